"""Forward solvers, quantum defects and sliding inverse problems for radial
Schrodinger and Dirac equations, with statistical sums and Coulomb variants."""

from .potentials import PotentialSpec, constant, from_tag, zero
from .types import (
    BracketError,
    BranchedEnergy,
    DefectEstimate,
    EigenSpectrum,
    InsufficientDataError,
    SolutionSample,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "PotentialSpec",
    "constant",
    "from_tag",
    "zero",
    "BracketError",
    "BranchedEnergy",
    "DefectEstimate",
    "EigenSpectrum",
    "InsufficientDataError",
    "SolutionSample",
    "SolverError",
]
