"""Bracketing and the all-zeros sweep.

A sweep walks from zero to zero in the Riccati variable.  Because the
distance from a pole of h to the adjacent zero is bounded by pi/2 on one
side and exceeds pi/2 on the other (the side depends on the sign of r),
stepping pi/2 from a converged zero always lands on the convergent side
of the next one.  When 1 + r' - r**2 is monotone the gaps between zeros
are monotone too, and the previous gap gives a sharper guess.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import IterationOptions, Method, RiccatiProblem, Termination, ZeroResult, solve_zero
from .errors import EvaluatorError, GuessOutOfBounds, StepError, Unsupported, ZeroFinderError
from .families import FamilyCase, FamilyParams, Hermite, Legendre, build

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
# a guess this close to a pole is nudged a further pi/4 toward its target
POLE_GUARD = 1e8


class Direction(enum.IntEnum):
    FORWARD = 1
    BACKWARD = -1


class GuessRule(str, enum.Enum):
    NONZERO_R_POS = "nonzero_r_pos"
    NONZERO_R_NEG = "nonzero_r_neg"
    R_ZERO = "r_zero"
    CLOSED_INTERVAL = "closed_interval"


class CertificateKind(str, enum.Enum):
    DECREASING_R_POS = "DecreasingRPos"
    DECREASING_R_NEG = "DecreasingRNeg"
    DECREASING_ABS_R_LT1 = "DecreasingAbsRLt1"
    R_HAS_UNIQUE_ZERO = "RHasUniqueZero"
    SLOWLY_INCREASING_R = "SlowlyIncreasingR"


class SweepFailure(ZeroFinderError):
    """A solve inside a sweep did not produce the expected zero."""

    def __init__(self, message: str, guess: float, result: Optional[ZeroResult] = None):
        super().__init__(f"{message} (guess z={guess!r})")
        self.guess = guess
        self.result = result


@dataclass(frozen=True)
class RegimeCertificate:
    kind: CertificateKind
    interval: tuple[float, float]
    k1: Optional[float] = None
    k2: Optional[float] = None

    def __post_init__(self):
        if self.kind is CertificateKind.SLOWLY_INCREASING_R:
            if self.k1 is None or self.k2 is None:
                raise ValueError("SlowlyIncreasingR needs k1 and k2")
            if not (0.0 < self.k2 <= 1.0 and 8.0 * self.k2 ** 2 + 6.0 * self.k1 - 3.0 < 0.0):
                raise ValueError(f"k1={self.k1}, k2={self.k2} violate 0 < k2 <= 1, 8 k2^2 + 6 k1 < 3")


@dataclass
class AccelState:
    """Gap bookkeeping for convexity-accelerated guesses."""

    trend: Optional[str]
    peak: Optional[float] = None
    last_two_gaps: list = field(default_factory=list)


@dataclass
class SweepPlan:
    direction: Direction
    guess_rule: GuessRule
    bounds: tuple[float, float]
    r_zero: Optional[float] = None
    accel: Optional[AccelState] = None
    # nonzero-r rules start from a known zero or singularity of h
    start: Optional[float] = None
    start_is_zero: bool = False
    max_zeros: Optional[int] = None

    def __post_init__(self):
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError(f"empty sweep bounds {self.bounds}")
        if self.r_zero is not None and not lo <= self.r_zero <= hi:
            raise ValueError("r_zero outside the sweep bounds")


@dataclass
class GuessRecord:
    z: float
    h: float
    rule: str
    direction: int


@dataclass
class SweepReport:
    zeros: list = field(default_factory=list)
    guesses_used: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    missed_zero_audit: Optional[object] = None
    failures: list = field(default_factory=list)
    name: str = ""

    @property
    def xs(self) -> list[float]:
        return [zr.x_star for zr in self.zeros]

    @property
    def zs(self) -> list[float]:
        return [zr.z_star for zr in self.zeros]

    @property
    def total_iterations(self) -> int:
        return sum(zr.iterations for zr in self.zeros)


# ---------------------------------------------------------------------------
# Guess rules
# ---------------------------------------------------------------------------

def xi1(x: float) -> int:
    return 1 if x >= 0 else -1


def xi2(x: float) -> int:
    return 1 if x > 0 else -1


def endpoint_is_zero(h_val: float, r_val: float = 0.0) -> bool:
    return math.isfinite(h_val) and abs(h_val) <= 1e-14 * (1.0 + abs(r_val))


def next_guess(plan: SweepPlan, previous_zero: float, direction: Optional[Direction] = None) -> float:
    """Plain pi/2 step from the previous zero; raises GuessOutOfBounds past the plan bounds."""
    d = plan.direction if direction is None else direction
    guess = previous_zero + d * HALF_PI
    lo, hi = plan.bounds
    if not lo <= guess <= hi:
        raise GuessOutOfBounds(f"guess {guess!r} outside {plan.bounds}")
    return guess


def first_guess_closed_interval(plan: SweepPlan, h_at_endpoint: float, r_sign: int,
                                r_val: float = 0.0) -> float:
    """Guess rule for the first zero of a closed interval.

    For r > 0 the sweep starts at the right end and walks backward, for
    r < 0 it starts at the left end.  An endpoint where h vanishes is
    itself the first zero.
    """
    lo, hi = plan.bounds
    if r_sign > 0:
        if endpoint_is_zero(h_at_endpoint, r_val):
            return hi
        return hi - HALF_PI * (1 - xi1(h_at_endpoint)) / 2
    if endpoint_is_zero(h_at_endpoint, r_val):
        return lo
    return lo + HALF_PI * (1 + xi2(h_at_endpoint)) / 2


def guess_around_r_zero(plan: SweepPlan, h_at_zr: float) -> tuple[float, float]:
    """Guesses for the two zeros straddling the zero of r."""
    if plan.r_zero is None:
        raise ValueError("plan has no r_zero")
    zr = plan.r_zero
    if not math.isfinite(h_at_zr) or abs(h_at_zr) > POLE_GUARD:
        return zr - HALF_PI, zr + HALF_PI
    if h_at_zr < 0:
        return zr - HALF_PI, zr
    return zr, zr + HALF_PI


def _trend_on(accel: AccelState, lo: float, hi: float) -> Optional[str]:
    if accel.trend != "peak":
        return accel.trend
    if accel.peak is None:
        return None
    if hi <= accel.peak:
        return "increasing"
    if lo >= accel.peak:
        return "decreasing"
    return None


def accelerate_guess(plan: SweepPlan, last_zeros: Sequence[float],
                     direction: Optional[Direction] = None) -> float:
    """Previous zero plus (or minus) the previous gap when convexity allows it.

    ``last_zeros`` are in march order, most recent last.  Forward marches
    need a non-increasing omega, backward marches a non-decreasing one;
    otherwise the plain pi/2 rule is returned.
    """
    d = plan.direction if direction is None else direction
    prev = last_zeros[-1]
    plain = prev + d * HALF_PI
    if plan.accel is None or len(last_zeros) < 2:
        return plain
    gap = abs(last_zeros[-1] - last_zeros[-2])
    guess = prev + d * gap
    trend = _trend_on(plan.accel, min(guess, last_zeros[-2]), max(guess, last_zeros[-2]))
    ok = trend == "constant" or (d > 0 and trend == "decreasing") or (d < 0 and trend == "increasing")
    if not ok or gap <= HALF_PI:
        return plain
    gaps = plan.accel.last_two_gaps
    gaps.append(gap)
    del gaps[:-2]
    return guess


# ---------------------------------------------------------------------------
# Regime classification
# ---------------------------------------------------------------------------

def _samples(lo: float, hi: float, n: int = 257) -> np.ndarray:
    if math.isinf(lo) and math.isinf(hi):
        lo, hi = -1e3, 1e3
    elif math.isinf(lo):
        lo = hi - max(1e3, 10 * abs(hi))
    elif math.isinf(hi):
        hi = lo + max(1e3, 10 * abs(lo))
    t = (np.arange(n) + 0.5) / n
    return lo + (hi - lo) * t


def classify_regime(problem: RiccatiProblem, interval: tuple[float, float],
                    case: Optional[FamilyCase] = None) -> RegimeCertificate:
    """Certificate for ``interval`` (in z) from sampled r and r'.

    The adapters' analytic facts decide which certificate is requested;
    the samples confirm them on the interval actually swept.
    """
    zs = _samples(*interval)
    r = np.array([problem.r(float(z)) for z in zs])
    rd = np.array([problem.rdot(float(z)) for z in zs])
    tiny = 1e-15
    if np.all(rd <= tiny):
        if np.all(np.abs(r) <= tiny):
            return RegimeCertificate(CertificateKind.DECREASING_ABS_R_LT1, interval)
        if np.all(r > 0):
            return RegimeCertificate(CertificateKind.DECREASING_R_POS, interval)
        if np.all(r < 0):
            kind = (CertificateKind.DECREASING_ABS_R_LT1 if np.max(np.abs(r)) < 1
                    else CertificateKind.DECREASING_R_NEG)
            return RegimeCertificate(kind, interval)
        if np.max(np.abs(r)) < 1:
            return RegimeCertificate(CertificateKind.R_HAS_UNIQUE_ZERO, interval)
        raise Unsupported(f"{problem.name}: r changes sign with |r| >= 1 on {interval}")
    if case is not None and case.k1 is not None and case.k2 is not None:
        if np.all(r < 0) and np.all(-r < case.k2) and np.all(rd < case.k1):
            return RegimeCertificate(CertificateKind.SLOWLY_INCREASING_R, interval, case.k1, case.k2)
    raise Unsupported(f"{problem.name}: no convergence regime covers {interval}")


# ---------------------------------------------------------------------------
# The sweep itself
# ---------------------------------------------------------------------------

class _LastValue:
    """One-entry memo so a guess is not evaluated twice."""

    def __init__(self, fn):
        self.fn = fn
        self.key = None
        self.value = None

    def __call__(self, z):
        if self.key is not None and z == self.key:
            return self.value
        v = self.fn(z)
        self.key, self.value = z, v
        return v


def _exact_zero(problem: RiccatiProblem, z: float) -> ZeroResult:
    return ZeroResult(z_star=z, x_star=problem.x_of_z(z), iterations=0, history=[z],
                      final_residual=abs(problem.h(z)), termination=Termination.CONVERGED, guess=z)


def normal_form_phase(problem: RiccatiProblem, z1: float, z2: float, samples: int = 33) -> float:
    """Trapezoid estimate of the integral of sqrt(max(omega, 0)) between two points.

    Consecutive zeros sit about pi apart in this phase; the check only
    undercounts where omega < 0.
    """
    zs = np.linspace(min(z1, z2), max(z1, z2), samples)
    vals = np.array([math.sqrt(max(problem.omega(float(z)), 0.0)) for z in zs])
    return float(np.trapezoid(vals, zs)) if hasattr(np, "trapezoid") else float(np.trapz(vals, zs))


SKIP_PHASE = 1.5 * math.pi


def _monotone(history: Sequence[float]) -> bool:
    steps = np.diff(np.asarray(history, dtype=float))
    return bool(np.all(steps > 0) or np.all(steps < 0))


class _Sweeper:
    def __init__(self, problem, plan, opts, accelerate, strict, report):
        self.problem = problem
        self.plan = plan
        self.opts = opts
        self.accelerate = accelerate
        self.strict = strict
        self.report = report
        self.found: list[ZeroResult] = []
        self.solved = 0

    def fail(self, message, guess, result=None):
        if self.strict:
            raise SweepFailure(message, guess, result)
        self.report.failures.append((guess, message))

    def solve(self, guess: float, rule: str, toward: int) -> Optional[ZeroResult]:
        h0 = self.problem.h(guess)
        if not math.isfinite(h0) or abs(h0) > POLE_GUARD:
            guess = guess + toward * QUARTER_PI
            rule = rule + "+pole_shift"
            h0 = self.problem.h(guess)
        self.report.guesses_used.append(GuessRecord(guess, h0, rule, toward))
        lo, hi = self.plan.bounds
        slack = HALF_PI
        d_lo, d_hi = self.problem.domain_z
        # stop halfway to a domain edge: an iterate drifting toward it only approaches it geometrically
        w_lo = lo - slack if lo - slack > d_lo else 0.5 * (d_lo + lo)
        w_hi = hi + slack if hi + slack < d_hi else 0.5 * (hi + d_hi)
        try:
            res = solve_zero(self.problem, guess, self.opts, (w_lo, w_hi))
        except (EvaluatorError, StepError) as exc:
            self.fail(f"{type(exc).__name__}: {exc}", guess)
            return None
        if res.termination is Termination.LEFT_DOMAIN and _monotone(res.history):
            # under TOM the target lies beyond the sweep bounds; baselines
            # are checked against the remaining phase by the caller
            return None
        if not res.converged:
            self.fail(f"solve ended with {res.termination.value}", guess, res)
            return None
        return res

    def duplicate(self, z: float) -> bool:
        tol = 1e-9 * max(1.0, abs(z))
        return any(abs(z - f.z_star) <= tol for f in self.found)

    def plain_guess(self, prev: float, direction: int) -> float:
        """Previous zero plus pi/2, or for FOM most of a local normal-form half-period.

        FOM lands on the zero nearest in normal-form phase, so a pi/2 step
        with omega < 1 would fall back onto the previous zero.
        """
        if self.opts.method is Method.FOM:
            om = self.problem.omega(prev)
            if math.isfinite(om) and om > 0:
                return prev + direction * 0.75 * math.pi / math.sqrt(om)
        return prev + direction * HALF_PI

    def check_remaining(self, marched: list[float], direction: int) -> None:
        """Flag a baseline march that stopped with a zero's worth of phase left."""
        if self.opts.method is Method.TOM or self.limit_reached():
            return
        lo, hi = self.plan.bounds
        start = marched[-1] if marched else (lo if direction > 0 else hi)
        end = hi if direction > 0 else lo
        if math.isfinite(end) and normal_form_phase(self.problem, start, end) > SKIP_PHASE:
            self.fail("baseline march stopped before the sweep bound", start)

    def limit_reached(self) -> bool:
        return self.plan.max_zeros is not None and self.solved >= self.plan.max_zeros

    def add(self, res: ZeroResult, counted: bool = True):
        self.found.append(res)
        if counted:
            self.solved += 1

    def chain(self, direction: Direction, first_guess: float, rule: str,
              seed: Optional[list] = None) -> None:
        """March in one direction from ``first_guess`` until the bounds or the count stop it."""
        lo, hi = self.plan.bounds
        marched: list[float] = list(seed or [])
        guess = first_guess
        while not self.limit_reached():
            if not lo <= guess <= hi:
                break
            res = self.solve(guess, rule, int(direction))
            if res is None and rule == "accelerated":
                plain = self.plain_guess(marched[-1], direction)
                if lo <= plain <= hi:
                    res = self.solve(plain, "retry_plain", int(direction))
            if res is None:
                self.check_remaining(marched, direction)
                break
            z = res.z_star
            if z < lo or z > hi:
                break
            if self.duplicate(z) or (marched and (z - marched[-1]) * direction <= 0):
                self.fail("solve did not advance to a new zero", guess, res)
                break
            if self.opts.method is not Method.TOM and marched:
                # baselines carry no bracketing guarantee, so look for a jumped zero
                if normal_form_phase(self.problem, marched[-1], z) > SKIP_PHASE:
                    self.fail("baseline step probably skipped a zero", guess, res)
            self.add(res)
            marched.append(z)
            if self.accelerate and len(marched) >= 3:
                guess, rule = accelerate_guess(self.plan, marched, direction), "accelerated"
                if guess == marched[-1] + direction * HALF_PI:
                    guess, rule = self.plain_guess(marched[-1], direction), "plain"
            else:
                guess, rule = self.plain_guess(marched[-1], direction), "plain"


def sweep_interval(problem: RiccatiProblem, plan: SweepPlan, opts: IterationOptions = IterationOptions(),
                   accelerate: bool = True, strict: bool = True,
                   certificate: Optional[RegimeCertificate] = None) -> SweepReport:
    """Find every zero of h inside ``plan.bounds`` (z-coordinates)."""
    problem = replace(problem, h=_LastValue(problem.h))
    report = SweepReport(name=problem.name)
    if certificate is not None:
        report.certificates.append(certificate)
    sw = _Sweeper(problem, plan, opts, accelerate, strict, report)
    lo, hi = plan.bounds
    rule = plan.guess_rule

    if rule in (GuessRule.NONZERO_R_NEG, GuessRule.NONZERO_R_POS):
        start = plan.start if plan.start is not None else (lo if rule is GuessRule.NONZERO_R_NEG else hi)
        d = Direction.FORWARD if rule is GuessRule.NONZERO_R_NEG else Direction.BACKWARD
        seed = []
        if plan.start_is_zero:
            sw.add(_exact_zero(problem, start), counted=False)
            seed = [start]
        first = sw.plain_guess(start, d) if plan.start_is_zero else start + d * HALF_PI
        sw.chain(d, first, "plain", seed)
    elif rule is GuessRule.CLOSED_INTERVAL:
        d = plan.direction
        end = hi if d is Direction.BACKWARD else lo
        h_end, r_end = problem.h(end), problem.r(end)
        if endpoint_is_zero(h_end, r_end):
            sw.add(_exact_zero(problem, end))
            sw.chain(d, sw.plain_guess(end, d), "plain", [end])
        else:
            g = first_guess_closed_interval(plan, h_end, -int(d), r_end)
            sw.chain(d, g, "endpoint")
    elif rule is GuessRule.R_ZERO:
        zr = plan.r_zero
        h_zr = problem.h(zr)
        left, right = guess_around_r_zero(plan, h_zr)
        seeds = {}
        for g, toward in ((left, -1), (right, +1)):
            if endpoint_is_zero(problem.h(g)):
                res = _exact_zero(problem, g)
            elif lo <= g <= hi:
                res = sw.solve(g, "r_zero", toward)
            else:
                res = None
            if res is not None and lo <= res.z_star <= hi and not sw.duplicate(res.z_star):
                sw.add(res)
                seeds[toward] = res.z_star
        # march outward from whichever straddling zeros were found
        for toward in (-1, +1):
            d = Direction(toward)
            if toward in seeds:
                sw.chain(d, sw.plain_guess(seeds[toward], toward), "plain", [seeds[toward]])
            else:
                start = left if toward < 0 else right
                sw.chain(d, start + toward * HALF_PI, "plain")
    else:
        raise ValueError(f"unknown guess rule {rule!r}")

    if opts.method is not Method.TOM and plan.max_zeros is not None and sw.solved < plan.max_zeros:
        sw.fail(f"found {sw.solved} of {plan.max_zeros} zeros", math.nan)
    report.zeros = sorted(sw.found, key=lambda zr: zr.z_star)
    return report


# ---------------------------------------------------------------------------
# Family-level orchestration
# ---------------------------------------------------------------------------

def _scan_low_end(problem: RiccatiProblem, left: float, right: float, samples: int = 512) -> Optional[float]:
    """First sample in (left, right) where h is finite and negative."""
    if math.isinf(left):
        left = right - 50.0
    span = right - left
    for k in range(1, samples + 1):
        z = left + span * k / (samples + 1)
        try:
            v = problem.h(z)
        except EvaluatorError:
            continue
        if math.isfinite(v) and v < 0:
            return z
    return None


def low_end_zero(problem: RiccatiProblem, case: FamilyCase, opts: IterationOptions,
                 report: SweepReport) -> Optional[ZeroResult]:
    """The single zero allowed between ``case.low_end_x`` and the certified region, if any."""
    right = problem.z_of_x(case.certified_x[0])
    left = problem.z_of_x(case.low_end_x) if case.low_end_x > 0 else problem.domain_z[0]
    if case.low_end == "guess":
        guess = case.low_end_guess
    else:
        guess = _scan_low_end(problem, left, right)
    if guess is None:
        return None
    h0 = problem.h(guess)
    report.guesses_used.append(GuessRecord(guess, h0, "low_end", 1))
    try:
        res = solve_zero(problem, guess, opts)
    except (EvaluatorError, StepError) as exc:
        report.failures.append((guess, f"low-end solve: {exc}"))
        return None
    if res.converged and left < res.z_star < right:
        return res
    return None


def _options(case: FamilyCase, method: Method, tol: Optional[float], max_iter: Optional[int]) -> IterationOptions:
    o = case.options
    kw = {"method": method}
    if max_iter is not None:
        kw["max_iter"] = max_iter
    if tol is not None:
        if o.abs_tol > 0:
            kw["abs_tol"] = tol
        else:
            kw["rel_tol"] = tol
    return replace(o, **kw)


def _mirror(res: ZeroResult) -> ZeroResult:
    return replace(res, z_star=-res.z_star, x_star=-res.x_star, history=[-v for v in res.history],
                   guess=-res.guess)


def _polynomial_sweep(problem, case, opts, accelerate, strict) -> SweepReport:
    top_z = problem.z_of_x(case.zeros_x[1])
    acc = AccelState(case.omega_trend)
    plan = SweepPlan(Direction.FORWARD, GuessRule.NONZERO_R_NEG, (0.0, top_z), accel=acc,
                     start=0.0, start_is_zero=case.origin == "zero", max_zeros=case.zero_count)
    cert = classify_regime(problem, (0.0, top_z), case)
    return sweep_interval(problem, plan, opts, accelerate, strict, cert)


def plan_for(problem: RiccatiProblem, case: FamilyCase, a: float, b: float,
             already_found: int = 0) -> tuple[SweepPlan, RegimeCertificate]:
    """Plan covering the certified part [a, b] (x) of a request."""
    za, zb = problem.z_of_x(a), problem.z_of_x(b)
    cert = classify_regime(problem, (za, zb), case)
    acc = AccelState(case.omega_trend, case.omega_peak_z)
    limit = None if case.zero_count is None else case.zero_count - already_found
    if case.direction == "outward" and case.r_zero is not None and za < case.r_zero < zb:
        plan = SweepPlan(Direction.FORWARD, GuessRule.R_ZERO, (za, zb), r_zero=case.r_zero, accel=acc,
                         max_zeros=limit)
    else:
        if case.direction == "outward":
            d = Direction.FORWARD if case.r_zero <= za else Direction.BACKWARD
        elif case.direction == "backward":
            d = Direction.BACKWARD
        else:
            d = Direction.FORWARD
        plan = SweepPlan(d, GuessRule.CLOSED_INTERVAL, (za, zb), accel=acc, max_zeros=limit)
    return plan, cert


def find_zeros(params: FamilyParams, interval: Optional[tuple[float, float]] = None,
               method: Method = Method.TOM, accelerate: bool = True, tol: Optional[float] = None,
               max_iter: Optional[int] = None, strict: bool = True) -> SweepReport:
    """All zeros of the family function in ``interval`` (x), sorted.

    Without an interval the family's default is used: every zero for the
    polynomial and Kummer families, the certified region plus 100 for the
    others.
    """
    problem, case = build(params)
    opts = _options(case, Method(method), tol, max_iter)
    if isinstance(params, (Legendre, Hermite)):
        half = _polynomial_sweep(problem, case, opts, accelerate, strict)
        pos = [zr for zr in half.zeros if zr.z_star > 0]
        origin = [zr for zr in half.zeros if zr.z_star == 0]
        allz = [_mirror(zr) for zr in reversed(pos)] + origin + pos
        if interval is not None:
            allz = [zr for zr in allz if interval[0] <= zr.x_star <= interval[1]]
        half.zeros = allz
        return half

    a, b = interval if interval is not None else case.default_interval()
    if not a < b:
        raise ValueError(f"empty interval ({a}, {b})")
    if b > case.x_limit:
        raise Unsupported(f"{problem.name}: evaluation limited to x <= {case.x_limit}")
    cert_lo, cert_hi = case.certified_x
    if case.zeros_x is not None:
        # no zeros outside zeros_x, so those parts need no certificate
        a_eff, b_eff = max(a, case.zeros_x[0]), min(b, case.zeros_x[1])
    else:
        a_eff, b_eff = a, b
    report = SweepReport(name=problem.name)
    extra: list[ZeroResult] = []
    if a_eff < cert_lo:
        zf = case.zero_free_region
        if zf is not None and zf[0] <= max(a_eff, 0.0) and zf[1] >= cert_lo:
            pass
        elif case.low_end is not None and a_eff >= case.low_end_x - 1e-15:
            low = low_end_zero(problem, case, opts, report)
            if low is not None and a <= low.x_star <= b:
                extra.append(low)
        elif zf is not None and zf[0] <= max(a_eff, 0.0) and zf[1] >= min(b_eff, cert_lo):
            pass
        else:
            raise Unsupported(f"{problem.name}: [{a}, {cert_lo}) lies outside every certified region "
                              f"({case.special_first_zero or 'no bespoke bracket'})")
        a_eff = cert_lo
    if b_eff > cert_hi:
        raise Unsupported(f"{problem.name}: ({cert_hi}, {b}] lies outside every certified region")
    zeros = list(extra)
    if a_eff < b_eff:
        plan, cert = plan_for(problem, case, a_eff, b_eff, len(extra))
        sub = sweep_interval(problem, plan, opts, accelerate, strict, cert)
        report.guesses_used.extend(sub.guesses_used)
        report.certificates.extend(sub.certificates)
        report.failures.extend(sub.failures)
        zeros.extend(zr for zr in sub.zeros if a <= zr.x_star <= b)
    report.zeros = sorted(zeros, key=lambda zr: zr.z_star)
    return report
