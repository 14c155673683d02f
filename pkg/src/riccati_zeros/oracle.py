"""Independent zero oracle: sign scan of the target function plus bisection.

Nothing here touches the Riccati machinery.  Reference evaluators come
from textbook recurrences, scipy.special or mpmath and are only ever
used to check the solver.  The scan looks at the sign of y itself, never
the ratio h, so poles of h cannot masquerade as zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import mpmath
import numpy as np
from scipy import special

from .errors import GridTooCoarse, ZeroReference
from .families import Bessel, Coulomb, Cylinder, FamilyParams, Hermite, Kummer, Legendre, family_name

VectorFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OracleConfig:
    """``grid_step`` is measured in x, or in theta = arccos(x) when ``variable`` is "theta"."""

    evaluator: VectorFn
    grid_step: float
    bisect_tol: float = 1e-14
    variable: str = "x"

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        if self.variable not in ("x", "theta"):
            raise ValueError("variable must be 'x' or 'theta'")


@dataclass
class ReferenceZeroSet:
    family: str
    params: dict
    zeros: list
    tags: list = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("reference zeros must be strictly increasing")
        if not self.tags:
            self.tags = ["oracle"] * len(self.zeros)
        if len(self.tags) != len(self.zeros):
            raise ValueError("one tag per zero")

    def to_table(self) -> str:
        """One ``family<TAB>params<TAB>zero<TAB>tag`` record per line."""
        p = ";".join(f"{k}={v!r}" for k, v in self.params.items())
        return "".join(f"{self.family}\t{p}\t{z!r}\t{t}\n" for z, t in zip(self.zeros, self.tags))

    @staticmethod
    def from_table(text: str) -> list["ReferenceZeroSet"]:
        groups: dict = {}
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            family, params, zero, tag = line.split("\t")
            key = (family, params)
            groups.setdefault(key, ([], []))
            groups[key][0].append(float(zero))
            groups[key][1].append(tag)
        out = []
        for (family, params), (zeros, tags) in groups.items():
            pd = {}
            for item in filter(None, params.split(";")):
                k, v = item.split("=", 1)
                pd[k] = float(v)
            out.append(ReferenceZeroSet(family, pd, zeros, tags))
        return out


@dataclass
class AuditRecord:
    matched: int = 0
    missed: int = 0
    spurious: int = 0
    max_relative_error: float = 0.0
    pairs: list = field(default_factory=list)
    missed_zeros: list = field(default_factory=list)
    spurious_zeros: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.missed == 0 and self.spurious == 0


# ---------------------------------------------------------------------------
# Reference evaluators
# ---------------------------------------------------------------------------

def legendre_values(n: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    p0, p1 = np.ones_like(x), x.copy()
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1


def hermite_signs(n: int, x: np.ndarray) -> np.ndarray:
    """H_n(x) up to a positive, x-dependent factor (rescaled to avoid overflow)."""
    x = np.asarray(x, dtype=float)
    p0, p1 = np.ones_like(x), 2.0 * x
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, 2.0 * x * p1 - 2.0 * k * p0
        s = np.maximum(np.abs(p0), np.abs(p1))
        s = np.where(s > 1e100, s, 1.0)
        p0, p1 = p0 / s, p1 / s
    return p1


def _coulomb_values(L: float, eta: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if eta == 0 and float(L).is_integer():
        return x * special.spherical_jn(int(L), x)
    f = np.frompyfunc(lambda t: float(mpmath.coulombf(L, eta, t)), 1, 1)
    return f(x).astype(float)


def reference_function(params: FamilyParams, companion: bool = False) -> VectorFn:
    """Vectorised target y (or its interlacing companion w) for a family."""
    if isinstance(params, Legendre):
        m = params.n + (1 if companion else 0)
        return lambda x: legendre_values(m, x)
    if isinstance(params, Hermite):
        m = params.n + (1 if companion else 0)
        return lambda x: hermite_signs(m, x)
    if isinstance(params, Bessel):
        mu = params.mu
        if companion:
            mu = mu - 1.0 if mu >= 0.5 else mu + 1.0
        return lambda x: special.jv(mu, x)
    if isinstance(params, Cylinder):
        mu, al = params.mu, params.alpha
        if companion:
            mu = mu - 1.0 if mu >= 0.5 else mu + 1.0
        return lambda x: special.jv(mu, x) * math.cos(al) - special.yv(mu, x) * math.sin(al)
    if isinstance(params, Kummer):
        a = params.a - (1.0 if companion else 0.0)
        return lambda x: special.hyp1f1(a, params.b, x)
    if isinstance(params, Coulomb):
        L = params.L - (1.0 if companion else 0.0)
        return lambda x: _coulomb_values(L, params.eta, x)
    raise TypeError(f"unknown family parameters {params!r}")


def reference_config(params: FamilyParams, companion: bool = False, bisect_tol: float = 1e-14) -> OracleConfig:
    """Evaluator and a grid fine enough for the family's zero spacing."""
    fn = reference_function(params, companion)
    if isinstance(params, Legendre):
        return OracleConfig(fn, math.pi / (8.0 * (params.n + 2)), bisect_tol, "theta")
    if isinstance(params, Hermite):
        return OracleConfig(fn, math.pi / (8.0 * math.sqrt(2.0 * params.n + 3)), bisect_tol)
    if isinstance(params, Kummer):
        return OracleConfig(fn, 1e-3, bisect_tol)
    if isinstance(params, Coulomb):
        return OracleConfig(fn, 0.05, bisect_tol)
    return OracleConfig(fn, 0.02, bisect_tol)


# ---------------------------------------------------------------------------
# Scan and bisect
# ---------------------------------------------------------------------------

def _bisect_all(fn: VectorFn, lo: np.ndarray, hi: np.ndarray, flo: np.ndarray, tol: float) -> np.ndarray:
    """Bisect every bracket at once; stops per bracket at ``tol`` (relative) or float resolution."""
    lo, hi, flo = lo.copy(), hi.copy(), flo.copy()
    done = np.zeros(lo.shape, dtype=bool)
    out = 0.5 * (lo + hi)
    for _ in range(2100):
        mid = 0.5 * (lo + hi)
        finished = (mid <= lo) | (mid >= hi) | (hi - lo <= tol * np.abs(mid))
        newly = finished & ~done
        out[newly] = mid[newly]
        done |= finished
        if done.all():
            break
        act = ~done
        fm = np.asarray(fn(mid[act]), dtype=float)
        hit = fm == 0.0
        idx = np.nonzero(act)[0]
        out[idx[hit]] = mid[idx[hit]]
        done[idx[hit]] = True
        same = (fm < 0) == (flo[idx] < 0)
        left = idx[same & ~hit]
        right = idx[~same & ~hit]
        lo[left], flo[left] = mid[left], fm[same & ~hit]
        hi[right] = mid[right]
    return out


def _grid(config: OracleConfig, a: float, b: float) -> np.ndarray:
    if config.variable == "theta":
        t_lo, t_hi = math.acos(min(1.0, b)), math.acos(max(-1.0, a))
        m = max(2, math.ceil((t_hi - t_lo) / config.grid_step))
        xs = np.cos(np.linspace(t_hi, t_lo, m + 1))
        xs[0], xs[-1] = a, b
        if a < 0 < b and m % 2 == 0 and abs(t_hi + t_lo - math.pi) < 1e-15:
            xs[m // 2] = 0.0
        return xs
    m = max(2, math.ceil((b - a) / config.grid_step))
    return np.linspace(a, b, m + 1)


def scan_and_bisect(config: OracleConfig, a: float, b: float) -> list[float]:
    """Every sign change of the evaluator on a grid over [a, b], bisected.

    ``bisect_tol`` is relative to the zero (bisection also stops at
    floating-point resolution).  Each bracketing cell is re-sampled once
    at 16 sub-cells; more than one sign change there raises GridTooCoarse.
    """
    if not a < b:
        return []
    if a == 0.0:
        # targets are positive zeros; several families vanish or blow up at 0
        a = min(1e-8 * config.grid_step, 0.5 * b)
    xs = _grid(config, a, b)
    fs = np.asarray(config.evaluator(xs), dtype=float)
    if not np.all(np.isfinite(fs)):
        raise ValueError("reference evaluator returned non-finite values on the grid")
    zeros = [float(x) for x, f in zip(xs, fs) if f == 0.0]
    cells = np.nonzero(fs[:-1] * fs[1:] < 0)[0]
    if len(cells) == 0:
        return sorted(zeros)
    t = np.linspace(0.0, 1.0, 17)
    lo_c, hi_c = xs[cells], xs[cells + 1]
    sub = lo_c[:, None] + (hi_c - lo_c)[:, None] * t[None, :]
    sub[:, 0], sub[:, -1] = lo_c, hi_c
    fsub = np.asarray(config.evaluator(sub.ravel()), dtype=float).reshape(sub.shape)
    sg = np.sign(fsub)
    flips = sg[:, :-1] * sg[:, 1:] < 0
    nflip = flips.sum(axis=1)
    interior_hit = np.any(fsub[:, 1:-1] == 0.0, axis=1)
    bad = (nflip > 1) | ((nflip == 1) & interior_hit)
    if np.any(bad):
        k = int(np.nonzero(bad)[0][0])
        raise GridTooCoarse(f"several sign changes in [{lo_c[k]}, {hi_c[k]}]")
    for k in np.nonzero(nflip == 0)[0]:
        # an interior sub-node hit the zero exactly
        zeros.append(float(sub[k, 1:-1][fsub[k, 1:-1] == 0.0][0]))
    rows = np.nonzero(nflip == 1)[0]
    j = np.argmax(flips[rows], axis=1)
    found = _bisect_all(config.evaluator, sub[rows, j], sub[rows, j + 1], fsub[rows, j], config.bisect_tol)
    zeros.extend(float(v) for v in found)
    return sorted(zeros)


def reference_zeros(params: FamilyParams, a: float, b: float, companion: bool = False,
                    bisect_tol: float = 1e-14) -> ReferenceZeroSet:
    cfg = reference_config(params, companion, bisect_tol)
    zs = scan_and_bisect(cfg, a, b)
    fam = family_name(params) + ("-companion" if companion else "")
    pd = {k: v for k, v in vars(params).items() if k != "experimental"}
    return ReferenceZeroSet(fam, pd, zs, ["oracle-scan"] * len(zs))


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

def relative_error(x_computed: float, x_reference: float) -> float:
    if x_reference == 0:
        raise ZeroReference("relative error undefined at a zero reference")
    return abs(1.0 - x_computed / x_reference)


def compare_zero_lists(computed: Iterable[float], reference: Iterable[float],
                       match_tol: float = 1e-6) -> AuditRecord:
    """Pair sorted lists; a pair matches when within ``match_tol`` * max(1, |x|)."""
    comp, ref = sorted(computed), sorted(reference)
    rec = AuditRecord()
    i = j = 0
    while i < len(comp) and j < len(ref):
        c, r = comp[i], ref[j]
        if abs(c - r) <= match_tol * max(1.0, abs(r)):
            err = abs(c) if r == 0 else relative_error(c, r)
            rec.pairs.append((c, r, err))
            rec.matched += 1
            rec.max_relative_error = max(rec.max_relative_error, err)
            i += 1
            j += 1
        elif c < r:
            rec.spurious_zeros.append(c)
            i += 1
        else:
            rec.missed_zeros.append(r)
            j += 1
    rec.spurious_zeros.extend(comp[i:])
    rec.missed_zeros.extend(ref[j:])
    rec.spurious, rec.missed = len(rec.spurious_zeros), len(rec.missed_zeros)
    return rec


def audit_sweep(report, config: OracleConfig, a: float, b: float, match_tol: float = 1e-6) -> AuditRecord:
    """Counts matched/missed/spurious zeros of a sweep on [a, b] against the oracle."""
    computed = [x for x in report.xs if a <= x <= b]
    rec = compare_zero_lists(computed, scan_and_bisect(config, a, b), match_tol)
    report.missed_zero_audit = rec
    return rec


# ---------------------------------------------------------------------------
# Extended-precision iteration replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtendedProblem:
    """mpmath versions of a family's ratio, drift and coordinate map."""

    h: Callable
    r: Callable
    r_dot: Callable
    x_of_z: Callable


def extended_problem(params: FamilyParams) -> ExtendedProblem:
    """Ratio and drift written directly with mpmath special functions.

    These mirror the runtime adapters but share no code with them, so
    iterating them gives a second opinion on convergence behaviour.
    """
    mp = mpmath
    if isinstance(params, Legendre):
        n, c = params.n, mp.mpf(params.n + 1)
        x_of_z = lambda z: mp.tanh(z / c)
        return ExtendedProblem(
            h=lambda z: -mp.legendre(n, x_of_z(z)) / mp.legendre(n + 1, x_of_z(z)),
            r=lambda z: -mp.tanh(z / c),
            r_dot=lambda z: -mp.sech(z / c) ** 2 / c,
            x_of_z=x_of_z)
    if isinstance(params, Hermite):
        n = params.n
        c = mp.sqrt(2 * (n + 1))
        return ExtendedProblem(
            h=lambda z: -c * mp.hermite(n, z / c) / mp.hermite(n + 1, z / c),
            r=lambda z: -z / (2 * (n + 1)),
            r_dot=lambda z: mp.mpf(-1) / (2 * (n + 1)),
            x_of_z=lambda z: z / c)
    if isinstance(params, (Bessel, Cylinder)):
        mu = mp.mpf(params.mu)
        al = mp.mpf(getattr(params, "alpha", 0.0))

        def cyl(order, x):
            if al == 0:
                return mp.besselj(order, x)
            return mp.cos(al) * mp.besselj(order, x) - mp.sin(al) * mp.bessely(order, x)

        if mu >= 0.5:
            m = mu - mp.mpf(0.5)
            return ExtendedProblem(h=lambda x: cyl(mu, x) / cyl(mu - 1, x), r=lambda x: m / x,
                                   r_dot=lambda x: -m / x ** 2, x_of_z=lambda z: z)
        m = mu + mp.mpf(0.5)
        return ExtendedProblem(h=lambda x: -cyl(mu, x) / cyl(mu + 1, x), r=lambda x: -m / x,
                               r_dot=lambda x: m / x ** 2, x_of_z=lambda z: z)
    if isinstance(params, Kummer):
        a, b = mp.mpf(params.a), mp.mpf(params.b)
        kappa = mp.sqrt((1 - a) / (b - a))
        c = kappa * (b - a)
        top = 1 - 2 * a + b
        x_of_z = lambda z: mp.exp(z / c)
        return ExtendedProblem(
            h=lambda z: kappa * mp.hyp1f1(a, b, x_of_z(z)) / mp.hyp1f1(a - 1, b, x_of_z(z)),
            r=lambda z: (top - x_of_z(z)) / (2 * c),
            r_dot=lambda z: -x_of_z(z) / (2 * c * c),
            x_of_z=x_of_z)
    if isinstance(params, Coulomb):
        L, eta = mp.mpf(params.L), mp.mpf(params.eta)
        s = mp.sqrt(L * L + eta * eta)
        x_of_z = lambda z: L * z / s
        return ExtendedProblem(
            h=lambda z: mp.coulombf(L, eta, x_of_z(z)) / mp.coulombf(L - 1, eta, x_of_z(z)),
            r=lambda z: L / z + eta / s,
            r_dot=lambda z: -L / z ** 2,
            x_of_z=x_of_z)
    raise TypeError(f"unknown family parameters {params!r}")


def _extended_step(method: str, z, h, r, r_dot):
    mp = mpmath
    if method == "TOM":
        return z - 2 * h / (2 + h * h - 2 * r * h)
    if method == "NEWTON":
        return z - h / (1 + h * h - 2 * r * h)
    if method == "SOM":
        return z - mp.atan(h)
    if method == "FOM":
        omega = 1 + r_dot - r * r
        if omega <= 0:
            raise ValueError("normal-form coefficient is not positive")
        root = mp.sqrt(omega)
        return z - mp.atan(root * h / (1 - r * h)) / root
    raise ValueError(f"unknown method {method!r}")


def extended_history(params: FamilyParams, method: str, z0: float, dps: int = 80,
                     max_iter: int = 12) -> tuple[list[float], float, float]:
    """Iterate ``method`` from ``z0`` at ``dps`` digits.

    Returns the iterates' errors as floats (history minus the limit), the
    limit, and the machine epsilon of the working precision.  The limit
    is the TOM fixed point refined from the last iterate.
    """
    with mpmath.workdps(dps):
        # constants such as the Kummer scale must be formed at full precision
        ep = extended_problem(params)
        zs = [mpmath.mpf(z0)]
        for _ in range(max_iter):
            z = zs[-1]
            z_new = _extended_step(method, z, ep.h(z), ep.r(z), ep.r_dot(z))
            zs.append(z_new)
            if abs(z_new - z) <= mpmath.mpf(10) ** (-dps + 5) * max(1, abs(z_new)):
                break
        limit = zs[-1]
        for _ in range(3):
            limit = _extended_step("TOM", limit, ep.h(limit), ep.r(limit), ep.r_dot(limit))
        errs = [float(z - limit) for z in zs]
        return errs, float(limit), float(mpmath.eps)
