"""Twisted Orlicz algebras on ℤ^d: Young functions, Orlicz norms, cocycles,
twisted convolution, and numerical checks of the algebra conditions."""

from . import config, counterexample, criteria, errors, lattice, numerics, orlicz, twist, young
from .config import Tolerances, default_tolerances
from .criteria import CriterionReport
from .lattice import Cocycle, Weight, coboundary, heisenberg_cocycle, make_weight
from .orlicz import DiscreteFunction, luxemburg_norm, orlicz_norm
from .twist import twisted_convolve
from .young import YoungFunction, YoungPair, conjugate

__version__ = "0.1.0"

__all__ = [
    "config", "counterexample", "criteria", "errors", "lattice", "numerics", "orlicz", "twist", "young",
    "Tolerances", "default_tolerances", "CriterionReport", "Cocycle", "Weight", "coboundary",
    "heisenberg_cocycle", "make_weight", "DiscreteFunction", "luxemburg_norm", "orlicz_norm",
    "twisted_convolve", "YoungFunction", "YoungPair", "conjugate",
]
