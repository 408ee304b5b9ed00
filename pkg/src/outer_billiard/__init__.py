"""Numerical toolkit for the outer length billiard around a convex curve."""

from .billiard import PhasePair, Tolerances, iterate, step
from .curve import CurveModel, CurveSpec, build_curve
from .errors import BilliardError
from .spectrum import fit_coeffs, minimize_orbit

__all__ = [
    "BilliardError",
    "CurveModel",
    "CurveSpec",
    "PhasePair",
    "Tolerances",
    "build_curve",
    "fit_coeffs",
    "iterate",
    "minimize_orbit",
    "step",
]
__version__ = "0.1.0"
