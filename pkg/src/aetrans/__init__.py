"""Acoustic-elastic transmission eigenvalues: radial solvers, eigenfunction
localization, and a boundary integral eigenvalue scan for smooth curves."""

__version__ = "0.1.0"

from .params import NondimParams, ParameterError, PhysicalMedium, nondimensionalize, wavenumbers
from .radial import EigRecord, ModeIndex, asymptotic_fit, char_fn, find_eigenvalue, sweep
from .eigfun import build_eigenpair, l2_norms, localization_ratio

__all__ = [
    "__version__",
    "NondimParams",
    "ParameterError",
    "PhysicalMedium",
    "nondimensionalize",
    "wavenumbers",
    "EigRecord",
    "ModeIndex",
    "asymptotic_fit",
    "char_fn",
    "find_eigenvalue",
    "sweep",
    "build_eigenpair",
    "l2_norms",
    "localization_ratio",
]
