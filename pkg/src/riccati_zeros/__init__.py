"""Zeros of special functions and orthogonal polynomials by third-order Riccati-ratio iteration."""
from .core import (IterationOptions, Method, RiccatiProblem, Termination, ZeroResult, estimate_order,
                   newton_step, riccati_residual, solve_zero, third_order_step)
from .errors import (EvaluatorError, GridTooCoarse, GuessOutOfBounds, InsufficientHistory, Unsupported,
                     UnsupportedParameter, ZeroFinderError)
from .families import Bessel, Coulomb, Cylinder, Hermite, Kummer, Legendre, build
from .oracle import audit_sweep, reference_config, reference_zeros, relative_error, scan_and_bisect
from .sweep import SweepFailure, SweepReport, find_zeros

__all__ = [
    "Bessel", "Coulomb", "Cylinder", "EvaluatorError", "GridTooCoarse", "GuessOutOfBounds", "Hermite",
    "InsufficientHistory", "IterationOptions", "Kummer", "Legendre", "Method", "RiccatiProblem",
    "SweepFailure", "SweepReport", "Termination", "Unsupported", "UnsupportedParameter", "ZeroFinderError",
    "ZeroResult", "audit_sweep", "build", "estimate_order", "find_zeros", "newton_step", "reference_config",
    "reference_zeros", "relative_error", "riccati_residual", "scan_and_bisect", "solve_zero",
    "third_order_step",
]
