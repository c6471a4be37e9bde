import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sliding_spectral import from_tag  # noqa: E402
from sliding_spectral.inverse import sliding_pipeline_schrodinger  # noqa: E402


@pytest.fixture(scope="session")
def sine_pipeline(tmp_path_factory):
    """Full spectra -> defect -> potential run for q = sin on a in [1, pi], h = 0.05.

    Shared between the module tests and the acceptance suite; it is the most
    expensive computation in the test run.
    """
    a_grid = np.arange(1.0, math.pi + 1e-9, 0.05)
    cache = tmp_path_factory.mktemp("spectra")
    return sliding_pipeline_schrodinger(from_tag("sin"), 0, a_grid, n_max=60, cache_dir=cache)
