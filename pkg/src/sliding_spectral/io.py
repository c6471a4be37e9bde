"""CSV input and output with a fixed, lossless float format."""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .potentials import PotentialSpec

FLOAT_FMT = "%.17g"


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return FLOAT_FMT % float(v)


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    """Write to ``path`` (LF endings) or to stdout when ``path`` is None or '-'."""
    text = render_csv(header, rows)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, newline="\n")


def read_csv(path):
    """(header, float array) of a file written by :func:`write_csv`."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def load_potential_csv(path, interpolation: str = "cubic") -> PotentialSpec:
    """Sampled potential from a two-column CSV (r, q) with a header row."""
    _, data = read_csv(path)
    if data.shape[1] < 2:
        raise ValueError("potential file needs two columns: r, q")
    return PotentialSpec.sampled(data[:, 0], data[:, 1], interpolation)
