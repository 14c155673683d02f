"""Family adapters: parameters -> RiccatiProblem plus case metadata.

Each adapter fixes the ratio ``h``, the drift ``r`` (with its analytic
derivative) and the map between the natural variable x and the Riccati
variable z.  The accompanying :class:`FamilyCase` records which
convergence regime applies, where it is certified, and what the sweep
needs to know (direction, zero-free region, monotonicity of omega).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

from . import specfun
from .core import IterationOptions, RiccatiProblem
from .errors import UnsupportedParameter

HALF_PI = 0.5 * math.pi
INF = math.inf


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Legendre:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise UnsupportedParameter("Legendre degree must be an integer >= 1")


@dataclass(frozen=True)
class Hermite:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise UnsupportedParameter("Hermite degree must be an integer >= 1")


@dataclass(frozen=True)
class Bessel:
    mu: float

    def __post_init__(self):
        if not self.mu > -1.0:
            raise UnsupportedParameter("Bessel order must exceed -1")
        if self.mu > specfun.ORDER_CAP:
            raise UnsupportedParameter(f"Bessel order capped at {specfun.ORDER_CAP}")


@dataclass(frozen=True)
class Cylinder:
    mu: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < math.pi:
            raise UnsupportedParameter("phase alpha must lie in [0, pi)")
        if abs(self.mu) > specfun.ORDER_CAP:
            raise UnsupportedParameter(f"cylinder order capped at {specfun.ORDER_CAP}")


@dataclass(frozen=True)
class Kummer:
    a: float
    b: float
    experimental: bool = False

    def __post_init__(self):
        if not (self.a < -1.0 and self.b > 0.0):
            raise UnsupportedParameter("Kummer adapter needs a < -1 and b > 0")
        if self.b < 1.0 / 6.0 and not self.experimental:
            raise UnsupportedParameter("b < 1/6 needs the experimental first-zero path")


@dataclass(frozen=True)
class Coulomb:
    L: float
    eta: float

    def __post_init__(self):
        if not self.L > 0:
            raise UnsupportedParameter("Coulomb adapter needs L > 0")


FamilyParams = Union[Legendre, Hermite, Bessel, Cylinder, Kummer, Coulomb]


@dataclass(frozen=True)
class FamilyCase:
    """Regime facts for one parameter set.

    Intervals are in x.  ``direction`` is "forward", "backward" or
    "outward" (sweep away from the zero of r).  ``omega_trend`` describes
    ``1 + r' - r**2`` along increasing z: "increasing", "decreasing",
    "constant", "peak" (increasing below ``omega_peak_z``, decreasing
    above) or None when undeclared.

    The region between ``low_end_x`` and the certified lower bound holds
    at most one zero.  ``low_end`` says how the sweep brackets it:
    "guess" iterates from ``low_end_guess`` (z), "scan" walks up from the
    left end to the first point where h < 0 (valid because r > 0 there).
    """

    case_id: str
    certified_x: tuple[float, float]
    direction: str
    r_sign: Optional[int]
    omega_trend: Optional[str]
    options: IterationOptions
    zero_free_region: Optional[tuple[float, float]] = None
    special_first_zero: Optional[str] = None
    k1: Optional[float] = None
    k2: Optional[float] = None
    r_zero: Optional[float] = None
    omega_peak_z: Optional[float] = None
    zero_count: Optional[int] = None
    origin: Optional[str] = None
    zeros_x: Optional[tuple[float, float]] = None
    low_end: Optional[str] = None
    low_end_guess: Optional[float] = None
    low_end_x: Optional[float] = None
    x_limit: float = INF

    def default_interval(self) -> tuple[float, float]:
        """x-interval a run covers when the caller gives none."""
        if self.zeros_x is not None:
            return self.zeros_x
        if self.low_end is not None:
            lo = self.low_end_x
        elif self.zero_free_region is not None and self.zero_free_region[1] >= self.certified_x[0]:
            lo = self.zero_free_region[0]
        else:
            lo = self.certified_x[0]
        hi = min(self.x_limit, self.certified_x[0] + 100.0)
        return lo, hi


# ---------------------------------------------------------------------------
# Orthogonal polynomials (Taylor-cursor backed)
# ---------------------------------------------------------------------------

def _with_cursor(family: str, n: int, x_of_z, ratio):
    cursor = specfun.TaylorCursor(family, n)

    def h(z: float) -> float:
        x = x_of_z(z)
        cursor.at(x)
        return ratio(cursor.state, x).value

    h.cursor = cursor
    return h


def legendre_problem(n: int, x_space: bool = True) -> RiccatiProblem:
    """Legendre adapter; ``x_space`` iterates through the tanh addition rule."""
    Legendre(n)
    c = n + 1.0

    def x_of_z(z):
        return math.tanh(z / c)

    def z_of_x(x):
        if not abs(x) < 1.0:
            return math.copysign(INF, x) if not math.isnan(x) else x
        return c * math.atanh(x)

    def compose_x(x, d):
        t = math.tanh(d / c)
        return (x - t) / (1.0 - x * t)

    def r_dot(z):
        t = math.tanh(z / c)
        return -(1.0 - t * t) / c

    lim = 18.0 * c
    return RiccatiProblem(
        h=_with_cursor("legendre", n, x_of_z, specfun.legendre_ratio),
        r=lambda z: -math.tanh(z / c),
        r_dot=r_dot,
        z_of_x=z_of_x,
        x_of_z=x_of_z,
        domain_z=(-lim, lim),
        compose_x=compose_x if x_space else None,
        name=f"legendre(n={n})",
    )


def legendre_case(n: int) -> FamilyCase:
    top = math.cos(math.pi / (2 * n + 1))
    return FamilyCase(
        case_id="Legendre",
        certified_x=(0.0, 1.0),
        direction="forward",
        r_sign=-1,
        omega_trend="decreasing",
        # near x = 1 the zero spacing in z grows like n while a step moves at most 2
        options=IterationOptions(rel_tol=1e-15, abs_tol=0.0, measure="x", max_iter=60 + n),
        zero_count=n // 2,
        origin="zero" if n % 2 else "singular",
        zeros_x=(-top, top),
    )


def hermite_problem(n: int, x_space: bool = True) -> RiccatiProblem:
    Hermite(n)
    c = math.sqrt(2.0 * (n + 1))
    if not c * math.sqrt(2.0 * n + 1) < 2.0 * (n + 1):
        raise AssertionError("zero interval escapes the |r| < 1 region")
    return RiccatiProblem(
        h=_with_cursor("hermite", n, lambda z: z / c, specfun.hermite_ratio),
        r=lambda z: -z / (2.0 * (n + 1)),
        r_dot=lambda z: -1.0 / (2.0 * (n + 1)),
        z_of_x=lambda x: c * x,
        x_of_z=lambda z: z / c,
        domain_z=(-2.0 * (n + 1), 2.0 * (n + 1)),
        compose_x=(lambda x, d: x - d / c) if x_space else None,
        name=f"hermite(n={n})",
    )


def hermite_case(n: int) -> FamilyCase:
    top = math.sqrt(2.0 * n + 1)
    return FamilyCase(
        case_id="Hermite",
        certified_x=(0.0, top),
        direction="forward",
        r_sign=-1,
        omega_trend="decreasing",
        options=IterationOptions(rel_tol=1e-10, abs_tol=0.0, measure="x", max_iter=60 + n),
        zero_count=n // 2,
        origin="zero" if n % 2 else "singular",
        zeros_x=(-top, top),
    )


# ---------------------------------------------------------------------------
# Bessel and cylinder functions
# ---------------------------------------------------------------------------

_BESSEL_OPTIONS = IterationOptions(rel_tol=1e-15, abs_tol=1e-10, measure="x")
# lower end for r = 0 cylinder cases, whose zeros n*pi - alpha may sit near 0
FLAT_START = 1e-12


def _bessel_case(mu: float) -> FamilyCase:
    if mu >= 0.5:
        trend = "constant" if mu == 0.5 else "increasing"
        # r = 0 at mu = 1/2; any positive start inside the zero-free part will do
        lo = mu - 0.5 if mu > 0.5 else mu
        return FamilyCase("BesselCase1", (lo, INF), "backward", 1 if mu > 0.5 else 0, trend,
                          _BESSEL_OPTIONS, zero_free_region=(0.0, mu))
    if mu == -0.5:
        return FamilyCase("BesselCase2Flat", (0.5 * HALF_PI, INF), "forward", 0, "constant",
                          _BESSEL_OPTIONS, zero_free_region=(0.0, HALF_PI))
    if mu >= 0.0:
        lo = HALF_PI * (mu + 1.5)
        return FamilyCase("BesselCase2a", (lo, INF), "forward", -1, "decreasing", _BESSEL_OPTIONS,
                          zero_free_region=(0.0, lo), k1=16.0 / (9.0 * math.pi ** 2),
                          k2=4.0 / (3.0 * math.pi))
    bound = math.sqrt((mu + 1.0) * (mu + 5.0))
    if mu > -0.5:
        return FamilyCase("BesselCase2b", (bound, INF), "forward", -1, "decreasing", _BESSEL_OPTIONS,
                          zero_free_region=(0.0, bound), k1=2.0 / 9.0, k2=1.0 / 3.0)
    lo = -(mu + 0.5)
    if bound >= lo:
        return FamilyCase("BesselCase2c", (lo, INF), "backward", 1, "increasing", _BESSEL_OPTIONS,
                          zero_free_region=(0.0, bound))
    return FamilyCase("BesselCase2c", (lo, INF), "backward", 1, "increasing", _BESSEL_OPTIONS,
                      zero_free_region=(0.0, bound),
                      special_first_zero="at most one zero between sqrt((mu+1)(mu+5)) and -(mu+1/2)",
                      low_end="guess", low_end_guess=bound, low_end_x=bound)


def _cylinder_case(mu: float, alpha: float) -> FamilyCase:
    if alpha == 0.0 and mu > -1.0:
        base = _bessel_case(mu)
        return replace(base, case_id=base.case_id.replace("Bessel", "Cylinder"))
    scan = "at most one zero below the certified region; bracketed where h < 0"
    if mu >= 0.5:
        trend = "constant" if mu == 0.5 else "increasing"
        lo = mu - 0.5
        if mu == 0.5:
            return FamilyCase("CylinderCase1", (FLAT_START, INF), "backward", 0, trend, _BESSEL_OPTIONS)
        if alpha < 5.0 * math.pi / 6.0:
            return FamilyCase("CylinderCase1", (lo, INF), "backward", 1, trend, _BESSEL_OPTIONS,
                              zero_free_region=(0.0, mu))
        return FamilyCase("CylinderCase1", (lo, INF), "backward", 1, trend, _BESSEL_OPTIONS,
                          special_first_zero=scan, low_end="scan", low_end_x=0.0)
    if mu == -0.5:
        return FamilyCase("CylinderCase2Flat", (FLAT_START, INF), "forward", 0, "constant",
                          _BESSEL_OPTIONS)
    if mu < -0.5:
        return FamilyCase("CylinderCase2a", (-(mu + 0.5), INF), "backward", 1, "increasing",
                          _BESSEL_OPTIONS, special_first_zero=scan, low_end="scan", low_end_x=0.0)
    lo = 0.75 * math.pi + mu * HALF_PI
    k2 = (mu + 0.5) / (HALF_PI * (mu + 1.5))
    k1 = (mu + 0.5) / (math.pi ** 2 / 4.0 * (mu + 1.5) ** 2)
    return FamilyCase("CylinderCase2b", (lo, INF), "forward", -1, "decreasing", _BESSEL_OPTIONS,
                      k1=k1, k2=k2, special_first_zero="first zero may lie below the certified region")


def _order_drift(mu: float):
    if mu >= 0.5:
        m = mu - 0.5
        return (lambda x: m / x), (lambda x: -m / (x * x))
    m = mu + 0.5
    return (lambda x: -m / x), (lambda x: m / (x * x))


def bessel_problem(mu: float) -> tuple[RiccatiProblem, FamilyCase]:
    Bessel(mu)
    if mu >= 0.5:
        def h(x):
            if not x > 0:
                return math.nan
            return specfun.bessel_ratio_cf(mu, x).value
    else:
        def h(x):
            if not x > 0:
                return math.nan
            up = specfun.bessel_ratio_cf(mu + 1.0, x).value  # J_{mu+1}/J_mu
            if up == 0.0:
                return math.inf
            return -1.0 / up
    r, r_dot = _order_drift(mu)
    problem = RiccatiProblem(h=h, r=r, r_dot=r_dot, z_of_x=lambda x: x, x_of_z=lambda z: z,
                             domain_z=(0.0, INF), name=f"bessel(mu={mu})")
    return problem, _bessel_case(mu)


def cylinder_problem(mu: float, alpha: float) -> tuple[RiccatiProblem, FamilyCase]:
    Cylinder(mu, alpha)
    if mu >= 0.5:
        def h(x):
            if not x > 0:
                return math.nan
            return specfun.cylinder_ratio(mu, alpha, x, -1).value
    else:
        def h(x):
            if not x > 0:
                return math.nan
            return -specfun.cylinder_ratio(mu, alpha, x, +1).value
    r, r_dot = _order_drift(mu)
    problem = RiccatiProblem(h=h, r=r, r_dot=r_dot, z_of_x=lambda x: x, x_of_z=lambda z: z,
                             domain_z=(0.0, INF), name=f"cylinder(mu={mu}, alpha={alpha})")
    return problem, _cylinder_case(mu, alpha)


# ---------------------------------------------------------------------------
# Kummer and Coulomb
# ---------------------------------------------------------------------------

def kummer_constants(a: float, b: float) -> dict:
    """Scale, drift zero and zero/|r|<1 intervals for the Kummer adapter."""
    kappa = math.sqrt((1.0 - a) / (b - a))
    c = kappa * (b - a)
    disc = math.sqrt(a * (a - b) - b)
    star_lo = (math.sqrt(1.0 - a) - math.sqrt(b - a)) ** 2
    star_hi = 1.0 - 2.0 * a + b + 2.0 * c
    return {
        "kappa": kappa,
        "scale": c,
        "z_r": c * math.log(1.0 - 2.0 * a + b),
        "x_I": (b - 2.0 * a - 2.0 * disc, b - 2.0 * a + 2.0 * disc),
        "x_I_star": (star_lo, star_hi),
        "z_I_star": (c * math.log(star_lo) if star_lo > 0 else -INF, c * math.log(star_hi)),
    }


def kummer_problem(a: float, b: float, experimental: bool = False) -> tuple[RiccatiProblem, FamilyCase]:
    Kummer(a, b, experimental)
    k = kummer_constants(a, b)
    kappa, c = k["kappa"], k["scale"]
    top = 1.0 - 2.0 * a + b

    def h(z):
        return kappa * specfun.kummer_ratio(a, b, math.exp(z / c)).value

    def r(z):
        return (top - math.exp(z / c)) / (2.0 * c)

    def r_dot(z):
        return -math.exp(z / c) / (2.0 * c * c)

    problem = RiccatiProblem(h=h, r=r, r_dot=r_dot, z_of_x=lambda x: c * math.log(x),
                             x_of_z=lambda z: math.exp(z / c), domain_z=(-INF, INF),
                             name=f"kummer(a={a}, b={b})")
    x_lo, x_hi = k["x_I"]
    star_lo, star_hi = k["x_I_star"]
    # d(omega)/dx has the sign of (b - 2a - x)
    peak = c * math.log(b - 2.0 * a)
    # number of positive zeros of M(a, b, .) for a < 0, b > 0
    count = math.ceil(-a)
    opts = IterationOptions(rel_tol=1e-15, abs_tol=1e-12, measure="z")
    if star_lo > x_lo:
        case = FamilyCase("KummerSmallB", (star_lo, x_hi), "outward", None, "peak", opts,
                          special_first_zero="at most one zero between x_I and the |r| < 1 region",
                          r_zero=k["z_r"], omega_peak_z=peak, zero_count=count, zeros_x=(x_lo, x_hi),
                          low_end="scan", low_end_x=x_lo)
    else:
        case = FamilyCase("Kummer", (x_lo, x_hi), "outward", None, "peak", opts,
                          r_zero=k["z_r"], omega_peak_z=peak, zero_count=count, zeros_x=(x_lo, x_hi))
    return problem, case


def coulomb_problem(L: float, eta: float) -> tuple[RiccatiProblem, FamilyCase]:
    Coulomb(L, eta)
    s = math.hypot(L, eta)

    def h(z):
        x = L * z / s
        if not x > 0:
            return math.nan
        return specfun.coulomb_ratio(L, eta, x).value

    problem = RiccatiProblem(
        h=h, r=lambda z: L / z + eta / s, r_dot=lambda z: -L / (z * z),
        z_of_x=lambda x: s * x / L, x_of_z=lambda z: L * z / s, domain_z=(0.0, INF),
        name=f"coulomb(L={L}, eta={eta})",
    )
    x_cert = L * L / (s - eta)
    opts = IterationOptions(rel_tol=1e-15, abs_tol=1e-12, measure="z")
    common = dict(special_first_zero="at most one zero below the |r| < 1 region",
                  low_end="scan", low_end_x=0.0, x_limit=50.0 + 10.0 * L)
    if eta < 0:
        # omega' = 2L(1 + L + eta z / s) / z**3 changes sign once
        return problem, FamilyCase("CoulombNegEta", (x_cert, INF), "outward", None, "peak", opts,
                                   r_zero=-L * s / eta, omega_peak_z=-(1.0 + L) * s / eta, **common)
    return problem, FamilyCase("CoulombNonNegEta", (x_cert, INF), "backward", 1, "increasing", opts,
                               **common)


def build(params: FamilyParams) -> tuple[RiccatiProblem, FamilyCase]:
    """Problem and case for any parameter record."""
    if isinstance(params, Legendre):
        return legendre_problem(params.n), legendre_case(params.n)
    if isinstance(params, Hermite):
        return hermite_problem(params.n), hermite_case(params.n)
    if isinstance(params, Bessel):
        return bessel_problem(params.mu)
    if isinstance(params, Cylinder):
        return cylinder_problem(params.mu, params.alpha)
    if isinstance(params, Kummer):
        return kummer_problem(params.a, params.b, params.experimental)
    if isinstance(params, Coulomb):
        return coulomb_problem(params.L, params.eta)
    raise TypeError(f"unknown family parameters {params!r}")


def family_name(params: FamilyParams) -> str:
    return type(params).__name__.lower()


def describe(params: FamilyParams) -> str:
    fields = {k: v for k, v in vars(params).items() if k != "experimental"}
    return ";".join(f"{k}={v}" for k, v in fields.items())
