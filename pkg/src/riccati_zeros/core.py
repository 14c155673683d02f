"""Riccati-ratio problem abstraction, iteration steps and the solve loop.

Every zero finder in the package works on a ratio ``h(z)`` of two
solutions of a coupled first-order system, written in a variable ``z``
where the ratio obeys

    dh/dz = 1 + h**2 - 2 r(z) h.

Zeros of ``h`` are the zeros of the target function and poles of ``h``
are the zeros of its companion.  The third-order step

    z -> z - 2 h / (2 + h**2 - 2 r h)

converges monotonically inside the regimes certified by :mod:`.sweep`.
Newton, a second-order arctangent step and a fourth-order normal-form
step are provided for comparison.
"""
from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InsufficientHistory, NonFiniteSample, NonPositiveA, ZeroDenominator

Evaluator = Callable[[float], float]

DENOMINATOR_FLOOR = 1e-300
EPS = sys.float_info.epsilon
STALL_LEVEL = 1e-10


class Method(str, enum.Enum):
    TOM = "TOM"
    NEWTON = "NEWTON"
    SOM = "SOM"
    FOM = "FOM"


class Termination(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    SINGULARITY_HIT = "SingularityHit"
    LEFT_DOMAIN = "LeftDomain"


@dataclass(frozen=True)
class CoupledSystem:
    """First-order system ``y' = c1 y + c2 w``, ``w' = c3 y + c4 w``."""

    c1: Evaluator
    c2: Evaluator
    c3: Evaluator
    c4: Evaluator

    def k(self, x: float) -> float:
        return math.sqrt(-self.c4(x) / self.c2(x))

    def check(self, xs: Sequence[float]) -> bool:
        """True when c2, c4 are nonzero with opposite signs at every sample."""
        for x in xs:
            c2, c4 = self.c2(x), self.c4(x)
            if c2 == 0.0 or c4 == 0.0 or c2 * c4 >= 0.0:
                return False
        return True


@dataclass(frozen=True)
class RiccatiProblem:
    """A ratio ``h(z)`` with its drift ``r(z)`` and the coordinate maps.

    ``compose_x`` optionally advances the iterate directly in x: it
    receives the current x and the z-increment ``d`` of a step
    ``z -> z - d`` and returns the new x.  Families whose x-form is the
    natural one (Legendre, Hermite) provide it.
    """

    h: Evaluator
    r: Evaluator
    z_of_x: Evaluator
    x_of_z: Evaluator
    domain_z: tuple[float, float]
    r_dot: Optional[Evaluator] = None
    compose_x: Optional[Callable[[float, float], float]] = None
    name: str = ""

    def rdot(self, z: float) -> float:
        if self.r_dot is not None:
            return self.r_dot(z)
        d = max(1e-6, 1e-8 * abs(z))
        return (self.r(z + d) - self.r(z - d)) / (2.0 * d)

    def omega(self, z: float) -> float:
        """Coefficient of the normal form ``u'' + omega u = 0`` in z."""
        r = self.r(z)
        return 1.0 + self.rdot(z) - r * r

    def in_domain(self, z: float) -> bool:
        lo, hi = self.domain_z
        return math.isfinite(z) and lo < z < hi


@dataclass(frozen=True)
class IterationOptions:
    rel_tol: float = 1e-15
    abs_tol: float = 1e-12
    max_iter: int = 60
    method: Method = Method.TOM
    # "x" measures the stopping test on the x-iterates, "z" on z-iterates
    measure: str = "z"

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.measure not in ("x", "z"):
            raise ValueError("measure must be 'x' or 'z'")
        object.__setattr__(self, "method", Method(self.method))


@dataclass
class ZeroResult:
    z_star: float
    x_star: float
    iterations: int
    history: list[float] = field(default_factory=list)
    final_residual: float = math.nan
    termination: Termination = Termination.CONVERGED
    guess: float = math.nan

    @property
    def converged(self) -> bool:
        return self.termination is Termination.CONVERGED


def _denominator_guard(den: float) -> None:
    if not abs(den) >= DENOMINATOR_FLOOR:
        raise ZeroDenominator(f"step denominator {den!r} below {DENOMINATOR_FLOOR}")


def third_order_step(z: float, h_val: float, r_val: float) -> float:
    den = 2.0 + h_val * h_val - 2.0 * r_val * h_val
    _denominator_guard(den)
    return z - 2.0 * h_val / den


def newton_step(z: float, h_val: float, r_val: float) -> float:
    den = 1.0 + h_val * h_val - 2.0 * r_val * h_val
    _denominator_guard(den)
    return z - h_val / den


def som_step(z: float, h_val: float, r_val: float = 0.0, A_val: float = 1.0) -> float:
    """Second-order arctangent step ``z - atan(sqrt(A) h)/sqrt(A)``.

    In the Riccati variable the natural choice is ``A = 1``; ``r_val`` is
    accepted so all ratio steps share one signature.
    """
    if not A_val > 0:
        raise NonPositiveA(f"A = {A_val!r}")
    s = math.sqrt(A_val)
    return z - math.atan(s * h_val) / s


def fom_step(z: float, t1_val: float, A_val: float) -> float:
    """Fourth-order step for ``u'' + A u = 0`` with ratio ``t1 = u/u'``."""
    if not A_val > 0:
        raise NonPositiveA(f"A = {A_val!r}")
    s = math.sqrt(A_val)
    return z - math.atan(s * t1_val) / s


def normal_form_ratio(h_val: float, r_val: float) -> float:
    """``u/u'`` for the normal-form solution sharing the zeros of ``h``."""
    den = 1.0 - r_val * h_val
    _denominator_guard(den)
    return h_val / den


def step_increment(problem: RiccatiProblem, method: Method, z: float, h_val: float) -> float:
    """Amount ``d`` such that the selected method maps ``z`` to ``z - d``."""
    r_val = problem.r(z)
    if method is Method.TOM:
        return z - third_order_step(z, h_val, r_val)
    if method is Method.NEWTON:
        return z - newton_step(z, h_val, r_val)
    if method is Method.SOM:
        return z - som_step(z, h_val, r_val)
    if method is Method.FOM:
        return z - fom_step(z, normal_form_ratio(h_val, r_val), problem.omega(z))
    raise ValueError(f"unknown method {method!r}")


def g_map(problem: RiccatiProblem, z: float) -> float:
    """The third-order iteration function ``G(z)``."""
    return third_order_step(z, problem.h(z), problem.r(z))


def g_prime(h_val: float, r_val: float, r_dot_val: float) -> float:
    """Closed-form derivative of ``G`` along a solution of the Riccati equation."""
    h2 = h_val * h_val
    num = 3 * h2 * h2 + 2 * h2 + 4 * r_val * r_val * h2 - 4 * r_dot_val * h2 - 8 * r_val * h2 * h_val
    den = 2.0 + h2 - 2.0 * r_val * h_val
    return num / (den * den)


def solve_zero(problem: RiccatiProblem, z0: float, opts: IterationOptions = IterationOptions(),
               window: Optional[tuple[float, float]] = None) -> ZeroResult:
    """Iterate the selected method from ``z0`` until the step is below tolerance.

    ``window`` narrows the domain: an iterate outside it ends the run with
    ``LeftDomain``.  Sweeps use it to stop chasing a zero beyond their bounds.
    """
    lo, hi = window if window is not None else problem.domain_z
    method = opts.method
    z = float(z0)
    x = problem.x_of_z(z)
    history = [z]

    def finish(term: Termination, residual: float = math.nan) -> ZeroResult:
        return ZeroResult(z_star=z, x_star=x, iterations=len(history) - 1, history=history,
                          final_residual=residual, termination=term, guess=float(z0))

    h_val = problem.h(z)
    if not math.isfinite(h_val):
        return finish(Termination.SINGULARITY_HIT)

    prev_delta = math.inf
    for _ in range(opts.max_iter):
        d = step_increment(problem, method, z, h_val)
        if problem.compose_x is not None:
            x_new = problem.compose_x(x, d)
            z_new = problem.z_of_x(x_new)
        else:
            z_new = z - d
            x_new = problem.x_of_z(z_new) if problem.in_domain(z_new) else math.nan
        if not problem.in_domain(z_new) or not math.isfinite(x_new) or not lo <= z_new <= hi:
            history.append(z_new)
            z, x = z_new, x_new
            return finish(Termination.LEFT_DOMAIN)
        if opts.measure == "x":
            delta, scale = abs(x_new - x), abs(x_new)
        else:
            delta, scale = abs(z_new - z), abs(z_new)
        history.append(z_new)
        z, x = z_new, x_new
        h_val = problem.h(z)
        if not math.isfinite(h_val):
            return finish(Termination.SINGULARITY_HIT)
        if delta <= opts.abs_tol or delta <= opts.rel_tol * scale:
            return finish(Termination.CONVERGED, abs(h_val))
        # a step that stops shrinking at this size is evaluation noise
        if delta >= prev_delta and delta <= STALL_LEVEL * max(1.0, scale):
            return finish(Termination.CONVERGED, abs(h_val))
        prev_delta = delta
    return finish(Termination.MAX_ITER, abs(h_val))


def riccati_residual(problem: RiccatiProblem, z: float, delta: float = 1e-5) -> float:
    """Central-difference derivative of ``h`` minus the Riccati right-hand side."""
    hm, h0, hp = problem.h(z - delta), problem.h(z), problem.h(z + delta)
    if not (math.isfinite(hm) and math.isfinite(h0) and math.isfinite(hp)):
        raise NonFiniteSample(f"h not finite near z={z!r}")
    return (hp - hm) / (2.0 * delta) - (1.0 + h0 * h0 - 2.0 * problem.r(z) * h0)


def fixed_point_derivatives(problem: RiccatiProblem, z_star: float, delta: float = 1e-3) -> tuple[float, float]:
    """Central differences of ``G`` at a converged zero: ``(G', G'')``."""
    gm, g0, gp = g_map(problem, z_star - delta), g_map(problem, z_star), g_map(problem, z_star + delta)
    return (gp - gm) / (2 * delta), (gp - 2 * g0 + gm) / (delta * delta)


def estimate_order(history: Sequence[float], z_star: float) -> float:
    """Least-squares slope of ``log|e_{m+1}|`` against ``log|e_m|``.

    Only the leading run of strictly decreasing errors above
    ``10 eps |z_star|`` is used.
    """
    return order_from_errors([zm - z_star for zm in history], 10.0 * EPS * abs(z_star))


def order_from_errors(errors: Sequence[float], floor: float) -> float:
    """Order fit on signed or unsigned errors, ignoring those at or below ``floor``."""
    errs: list[float] = []
    for e in map(abs, errors):
        if e <= floor or e == 0.0 or (errs and e >= errs[-1]):
            break
        errs.append(e)
    if len(errs) < 4:
        raise InsufficientHistory(f"need 4 decreasing errors, have {len(errs)}")
    le = np.log(np.asarray(errs))
    slope, _ = np.polyfit(le[:-1], le[1:], 1)
    return float(slope)
