"""Special-function backends used by the family adapters.

* Local Taylor series for the weighted Legendre and Hermite solutions,
  advanced from one expansion centre to the next (a moving cursor).
* Continued fractions for Bessel and Coulomb ratios of consecutive orders.
* Steed/Temme evaluation of J and Y of real order for cylinder functions.
* Power series for Kummer's M and for the regular Coulomb function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from scipy.special import loggamma

from .errors import CancellationLoss, NoConvergence, TruncationNotMet

TINY = 1e-300
SINGULAR_REL = 1e-300


@dataclass
class RatioSample:
    value: float
    y_val: float = math.nan
    y_prime_val: float = math.nan

    @property
    def singular(self) -> bool:
        return not math.isfinite(self.value)


def _ratio(num: float, den: float, y=math.nan, yp=math.nan) -> RatioSample:
    if den == 0.0 or abs(den) < SINGULAR_REL * abs(num):
        return RatioSample(math.inf, y, yp)
    return RatioSample(num / den, y, yp)


# ---------------------------------------------------------------------------
# Local Taylor series
# ---------------------------------------------------------------------------

LEGENDRE_CAP = 100
HERMITE_CAP = 50
LEGENDRE_TAIL = 1e-19
HERMITE_TAIL = 1e-25


@dataclass
class TaylorState:
    """Expansion centre with the solution value and slope there.

    ``coeffs`` holds the coefficients generated on the most recent advance
    and ``order_used`` the truncation order it needed.
    """

    family: str
    n: int
    center: float
    y: float
    yp: float
    normalization: float = 1.0
    coeffs: list = field(default_factory=list)
    order_used: int = 0


def taylor_seed(family: str, n: int) -> TaylorState:
    """Parity seed at x = 0: y(0)=0, y'(0)=1 for odd n, y(0)=1, y'(0)=0 for even n."""
    if family not in ("legendre", "hermite"):
        raise ValueError(family)
    if n % 2:
        return TaylorState(family, n, 0.0, 0.0, 1.0, normalization=_odd_normalization(family, n))
    return TaylorState(family, n, 0.0, 1.0, 0.0, normalization=_even_normalization(family, n))


def _even_normalization(family: str, n: int) -> float:
    # 1 / (value at 0) of sqrt(1-x^2) P_n or exp(-x^2/2) H_n, in log form to dodge overflow
    if family == "legendre":
        m = n // 2
        lg = math.lgamma(n + 1) - n * math.log(2.0) - 2 * math.lgamma(m + 1)
        return (-1) ** m * math.exp(-lg)
    m = n // 2
    lg = math.lgamma(n + 1) - math.lgamma(m + 1)
    return (-1) ** m * math.exp(-lg) if lg < 700 else 0.0


def _odd_normalization(family: str, n: int) -> float:
    if family == "legendre":
        m = (n - 1) // 2
        lg = math.lgamma(n + 2) - n * math.log(2.0) - math.lgamma(m + 1) - math.lgamma(m + 2)
        return (-1) ** m * math.exp(-lg)
    m = (n - 1) // 2
    lg = math.log(2.0 * n) + math.lgamma(n) - math.lgamma(m + 1)
    return (-1) ** m * math.exp(-lg) if lg < 700 else 0.0


def _legendre_coeffs(n: int, d: float, s: float, y0: float, y1: float):
    """Sum the series for (1-x^2)^2 y'' + (n(n+1)(1-x^2) + 1) y = 0 about d."""
    u = 1.0 - d * d
    nn = 4.0 * n * (n + 1)
    q0, q1, q2, q3, q4 = 4 * u * u, -16 * d * u, 4 * (4 * d * d - 2 * u), 16 * d, 4.0
    p0, p1, p2 = nn * u + 4.0, -2.0 * nn * d, -nn
    a = [y0, y1]
    val = y0 + y1 * s
    der = y1
    sk = s  # s**k for the latest k
    settled = False
    for k in range(0, LEGENDRE_CAP - 1):
        acc = p0 * a[k]
        if k >= 1:
            acc += q1 * (k + 1) * k * a[k + 1] + p1 * a[k - 1]
            acc += q2 * k * (k - 1) * a[k]
        if k >= 2:
            acc += q3 * (k - 1) * (k - 2) * a[k - 1] + p2 * a[k - 2]
        if k >= 3:
            acc += q4 * (k - 2) * (k - 3) * a[k - 2]
        nxt = -acc / (q0 * (k + 2) * (k + 1))
        a.append(nxt)
        m = k + 2
        dterm = m * nxt * sk  # m a_m s^(m-1)
        sk *= s
        term = nxt * sk
        val += term
        der += dterm
        small = abs(term) <= LEGENDRE_TAIL * abs(val) and abs(dterm) <= LEGENDRE_TAIL * abs(der)
        # two orders in a row, since parity can zero out every other coefficient
        if small and settled:
            return a, val, der
        settled = small
    raise TruncationNotMet(f"legendre series about {d} did not settle for step {s}")


def _hermite_coeffs(n: int, d: float, s: float, y0: float, y1: float):
    """Sum the series for y'' + (2n+1-x^2) y = 0 about d."""
    b0 = 2.0 * n + 1.0 - d * d
    a = [y0, y1]
    val = y0 + y1 * s
    der = y1
    sk = s
    settled = False
    for k in range(0, HERMITE_CAP - 1):
        acc = -b0 * a[k]
        if k >= 1:
            acc += 2.0 * d * a[k - 1]
        if k >= 2:
            acc += a[k - 2]
        nxt = acc / ((k + 2) * (k + 1))
        a.append(nxt)
        m = k + 2
        dterm = m * nxt * sk
        sk *= s
        val += nxt * sk
        der += dterm
        small = abs(dterm) <= HERMITE_TAIL * abs(der)
        if small and settled:
            return a, val, der
        settled = small
    raise TruncationNotMet(f"hermite series about {d} did not settle for step {s}")


def taylor_advance(state: TaylorState, x_new: float) -> tuple[TaylorState, float, float]:
    """Evaluate y, y' at ``x_new`` from the expansion about ``state.center``.

    Returns a new state centred at ``x_new``.  Raises TruncationNotMet when
    the tail test still fails at the order cap (the step is too long).
    """
    s = x_new - state.center
    if s == 0.0:
        return state, state.y, state.yp
    if state.family == "legendre":
        coeffs, y, yp = _legendre_coeffs(state.n, state.center, s, state.y, state.yp)
    else:
        coeffs, y, yp = _hermite_coeffs(state.n, state.center, s, state.y, state.yp)
    new = TaylorState(state.family, state.n, x_new, y, yp, state.normalization, coeffs, len(coeffs) - 1)
    return new, y, yp


def taylor_step_bound(family: str, n: int, x: float) -> float:
    """Longest step from centre ``x`` taken in one expansion."""
    if family == "legendre":
        w = 1.0 - x * x
        k = math.sqrt(n * (n + 1) * w + 1.0) / w
        return min(0.5 * math.pi / k, 0.4 * (1.0 - abs(x)))
    k = math.sqrt(max(2.0 * n + 1.0 - x * x, 1.0))
    return min(0.5 * math.pi / k, 0.5)


class TaylorCursor:
    """Task-local evaluator that walks a TaylorState to any requested x."""

    def __init__(self, family: str, n: int):
        self.family = family
        self.n = n
        self.state = taylor_seed(family, n)
        self.advances = 0

    def at(self, x: float) -> tuple[float, float]:
        if self.family == "legendre" and not -1.0 < x < 1.0:
            raise ValueError(f"x={x!r} outside (-1, 1)")
        st = self.state
        while st.center != x:
            bound = taylor_step_bound(self.family, self.n, st.center)
            target = x if abs(x - st.center) <= bound else st.center + math.copysign(bound, x - st.center)
            try:
                st, _, _ = taylor_advance(st, target)
            except TruncationNotMet:
                half = st.center + 0.5 * (target - st.center)
                if half == st.center or half == target:
                    raise
                st, _, _ = taylor_advance(st, half)
            self.advances += 1
        self.state = st
        return st.y, st.yp


def legendre_ratio(state: TaylorState, x: float) -> RatioSample:
    """-P_n/P_{n+1} from the weighted solution and its slope at x = state.center."""
    n = state.n
    y, yp = state.y, state.yp
    num = (n + 1) * y
    den = (1.0 - x * x) * yp - n * x * y
    return _ratio(num, den, y, yp)


def hermite_ratio(state: TaylorState, x: float) -> RatioSample:
    """-sqrt(2(n+1)) H_n/H_{n+1} from the weighted solution at x = state.center."""
    n = state.n
    y, yp = state.y, state.yp
    num = -math.sqrt(2.0 * (n + 1)) * y
    den = x * y - yp
    return _ratio(num, den, y, yp)


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

CF_TOL = 1e-16
CF_MAX_TERMS = 10_000
ORDER_CAP = 1000.0


def _lentz(a_fn, b_fn, what: str) -> float:
    """Modified Lentz evaluation of a1/(b1 + a2/(b2 + ...))."""
    f = TINY
    c = f
    d = 0.0
    for k in range(1, CF_MAX_TERMS + 1):
        ak, bk = a_fn(k), b_fn(k)
        d = bk + ak * d
        if d == 0.0:
            d = TINY
        c = bk + ak / c
        if c == 0.0:
            c = TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < CF_TOL:
            return f
    raise NoConvergence(f"{what}: continued fraction needed more than {CF_MAX_TERMS} terms")


def bessel_cf1(nu: float, x: float) -> float:
    """J_nu(x)/J_{nu-1}(x) for nu > 0 by the continued fraction."""
    if not nu > 0:
        raise ValueError("continued fraction needs nu > 0")
    return _lentz(lambda k: 1.0 if k == 1 else -1.0,
                  lambda k: 2.0 * (nu + k - 1) / x, "bessel ratio")


def bessel_ratio_cf(mu: float, x: float) -> RatioSample:
    """J_mu(x)/J_{mu-1}(x) for mu > 0, x > 0."""
    if not x > 0:
        raise ValueError("x must be positive")
    if mu > ORDER_CAP:
        raise NoConvergence(f"order {mu} above cap {ORDER_CAP}")
    lead = 2.0 * mu / x
    tail = bessel_cf1(mu + 1.0, x)
    den = lead - tail  # J_{mu-1}/J_mu
    if abs(den) <= 4.0 * 2.2e-16 * max(abs(lead), abs(tail)):
        return RatioSample(math.inf)
    return RatioSample(1.0 / den)


def bessel_j_series(nu: float, x: float) -> float:
    """Power series for J_nu(x), nu > -1; accurate for moderate x only."""
    q = 0.25 * x * x
    t = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))
    t0 = t
    total, mag = t, abs(t)
    for k in range(1, 500):
        t *= -q / (k * (k + nu))
        total += t
        mag += abs(t)
        if k > q and abs(t) < 1e-17 * abs(total):
            break
    else:
        raise NoConvergence("bessel series")
    # |J| <= 1, so the absolute error eps * mag is what matters, not the local value
    if mag > 1e10 * max(abs(total), 1e-6 * abs(t0)):
        raise CancellationLoss("bessel series cancellation")
    return total


# 1/Gamma(1+x) Taylor coefficients, used for the Temme series
_RGAMMA = (
    1.0, 0.57721566490153286061, -0.65587807152025388108, -0.042002635034095235529,
    0.1665386113822914895, -0.042197734555544336748, -0.0096219715278769735621,
    0.0072189432466630995424, -0.0011651675918590651121, -0.00021524167411495097282,
    0.00012805028238811618615, -0.000020134854780788238656, -1.2504934821426706573e-6,
    1.1330272319816958824e-6, -2.0563384169776071035e-7, 6.1160951044814158179e-9,
    5.0020076444692229301e-9, -1.1812745704870201446e-9, 1.0434267116911005105e-10,
    7.782263439905071254e-12, -3.6968056186422057082e-12,
)


def _temme_gammas(mu: float):
    even = sum(c * mu ** k for k, c in enumerate(_RGAMMA) if k % 2 == 0)
    odd = sum(c * mu ** (k - 1) for k, c in enumerate(_RGAMMA) if k % 2 == 1)
    gampl = even + mu * odd  # 1/Gamma(1+mu)
    gammi = even - mu * odd  # 1/Gamma(1-mu)
    return -odd, even, gampl, gammi


HANKEL_MIN_X = 25.0


def _hankel_jy(nu: float, x: float) -> Optional[tuple[float, float]]:
    """J_nu, Y_nu from the large-argument expansion, or None when it would lose digits."""
    four_nu2 = 4.0 * nu * nu
    p, q = 1.0, 0.0
    term = 1.0
    for k in range(1, 200):
        term *= (four_nu2 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) > 1.0:
            return None
        if k % 2:
            q += term if k % 4 == 1 else -term
        else:
            p += -term if k % 4 == 2 else term
        if abs(term) < 1e-17:
            break
    else:
        return None
    # cos(x - phi) expanded so the only rounding in the phase is that of x itself
    phi = (0.5 * nu + 0.25) * math.pi
    cx, sx, cp, sp = math.cos(x), math.sin(x), math.cos(phi), math.sin(phi)
    c = cx * cp + sx * sp
    s = sx * cp - cx * sp
    amp = math.sqrt(2.0 / (math.pi * x))
    return amp * (p * c - q * s), amp * (p * s + q * c)


def bessel_jy(nu: float, x: float) -> tuple[float, float, float, float]:
    """J_nu, Y_nu, J'_nu, Y'_nu for nu >= 0, x > 0.

    Large arguments use the Hankel expansion when it converges cleanly;
    otherwise Steed's method with Temme's series near the origin.
    """
    if nu < 0 or not x > 0:
        raise ValueError("bessel_jy needs nu >= 0 and x > 0")
    if nu > ORDER_CAP:
        raise NoConvergence(f"order {nu} above cap {ORDER_CAP}")
    if x >= HANKEL_MIN_X:
        lo, hi = _hankel_jy(nu, x), _hankel_jy(nu + 1.0, x)
        if lo is not None and hi is not None:
            j, y = lo
            return j, y, nu / x * j - hi[0], nu / x * y - hi[1]
    eps = 1e-16
    nl = int(nu + 0.5) if x < 2.0 else max(0, int(nu - x + 1.5))
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi
    # CF1: J'_nu/J_nu
    isign = 1
    h = max(nu * xi, TINY)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(CF_MAX_TERMS):
        b += xi2
        d = b - d
        if abs(d) < TINY:
            d = TINY
        c = b - 1.0 / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if d < 0:
            isign = -isign
        if abs(delta - 1.0) < eps:
            break
    else:
        raise NoConvergence("bessel_jy CF1")
    rjl = isign * 1e-30
    rjpl = h * rjl
    rjl1, rjp1 = rjl, rjpl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
    if rjl == 0.0:
        rjl = eps
    f = rjpl / rjl
    if x < 2.0:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < eps else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < eps else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(xmu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < eps else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        total = ff + r * q
        total1 = p
        for i in range(1, CF_MAX_TERMS):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * (ff + r * q)
            total += delta
            delta1 = c * p - i * delta
            total1 += delta1
            if abs(delta) < (1.0 + abs(total)) * eps:
                break
        else:
            raise NoConvergence("bessel_jy Temme series")
        rymu = -total
        ry1 = -total1 * xi2
        rymup = xmu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        for i in range(2, CF_MAX_TERMS):
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < TINY:
                dr = TINY
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < TINY:
                cr = TINY
            den = dr * dr + di * di
            dr /= den
            di = -di / den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < eps:
                break
        else:
            raise NoConvergence("bessel_jy CF2")
        gam = (p - f) / q
        rjmu = math.sqrt(w / ((p - f) * gam + q))
        rjmu = math.copysign(rjmu, rjl)
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup
    fact = rjmu / rjl
    rj = rjl1 * fact
    rjp = rjp1 * fact
    for i in range(1, nl + 1):
        rytemp = (xmu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
    ry = rymu
    ryp = nu * xi * rymu - ry1
    return rj, ry, rjp, ryp


def bessel_jy_any(order: float, x: float) -> tuple[float, float]:
    """(J, Y) of any real order via reflection for negative orders."""
    if order >= 0:
        j, y, _, _ = bessel_jy(order, x)
        return j, y
    nu = -order
    j, y, _, _ = bessel_jy(nu, x)
    cs, sn = math.cos(nu * math.pi), math.sin(nu * math.pi)
    if nu == int(nu):
        cs, sn = (-1.0) ** int(nu), 0.0
    return cs * j - sn * y, sn * j + cs * y


def bessel_y(mu: float, x: float) -> float:
    return bessel_jy_any(mu, x)[1]


def cylinder_value(mu: float, alpha: float, x: float) -> float:
    j, y = bessel_jy_any(mu, x)
    return j * math.cos(alpha) - y * math.sin(alpha)


def cylinder_ratio(mu: float, alpha: float, x: float, companion: int = -1) -> RatioSample:
    """C_mu(x)/C_{mu+companion}(x) with companion = -1 or +1."""
    if not x > 0:
        raise ValueError("x must be positive")
    num = cylinder_value(mu, alpha, x)
    den = cylinder_value(mu + companion, alpha, x)
    return _ratio(num, den)


# ---------------------------------------------------------------------------
# Kummer and Coulomb series
# ---------------------------------------------------------------------------

CANCELLATION_LIMIT = 1e12


def kummer_m(a: float, b: float, x: float, max_terms: int = 5000) -> tuple[float, float]:
    """M(a, b, x) by its power series; returns (value, sum of |terms|)."""
    terms = [1.0]
    t = partial = 1.0
    for k in range(max_terms):
        if a + k == 0.0:
            break
        t *= (a + k) / (b + k) * x / (k + 1)
        terms.append(t)
        partial += t
        if k > abs(a) + abs(x) and abs(t) < 1e-17 * abs(partial):
            break
    else:
        raise NoConvergence("kummer series")
    return math.fsum(terms), math.fsum(abs(v) for v in terms)


def kummer_ratio(a: float, b: float, x: float) -> RatioSample:
    """M(a, b, x)/M(a-1, b, x)."""
    num, mag_n = kummer_m(a, b, x)
    den, mag_d = kummer_m(a - 1.0, b, x)
    if max(mag_n, mag_d) > CANCELLATION_LIMIT * max(abs(num), abs(den)):
        raise CancellationLoss(f"kummer series lost all digits at x={x}")
    return _ratio(num, den, num)


def coulomb_normalization(L: float, eta: float) -> float:
    """C_L(eta) = 2^L exp(-pi eta/2) |Gamma(L+1+i eta)| / Gamma(2L+2)."""
    lg = complex(loggamma(complex(L + 1.0, eta))).real
    return math.exp(L * math.log(2.0) - 0.5 * math.pi * eta + lg - math.lgamma(2 * L + 2))


def coulomb_f(L: float, eta: float, x: float, max_terms: int = 2000) -> tuple[float, float]:
    """Regular Coulomb function F_L(eta, x) by its power series.

    Returns (value, condition) where condition is sum|terms|/|sum|.
    """
    b_prev, b_cur = 1.0, eta / (L + 1.0)
    terms = [1.0, b_cur * x]
    partial = terms[0] + terms[1]
    settled = False
    xm = x
    for m in range(2, max_terms):
        b_next = (2.0 * eta * b_cur - b_prev) / (m * (m + 2.0 * L + 1.0))
        xm *= x
        t = b_next * xm
        terms.append(t)
        b_prev, b_cur = b_cur, b_next
        partial += t
        small = abs(t) < 1e-17 * abs(partial)
        if m > 2 * x + 2 and small and settled:
            break
        settled = small
    else:
        raise NoConvergence("coulomb series")
    total = math.fsum(terms)
    mag = math.fsum(abs(v) for v in terms)
    value = coulomb_normalization(L, eta) * x ** (L + 1.0) * total
    cond = mag / abs(total) if total != 0 else math.inf
    return value, cond


def coulomb_cf(L: float, eta: float, x: float) -> tuple[float, float]:
    """F_L/F_{L-1} by the continued fraction from the order recurrence.

    Returns (ratio, reciprocal-denominator check) with the denominator
    ``q_L - s_L F_{L+1}/F_L`` exposed for singularity detection.
    """
    def p(l):
        return (l + 1.0) * math.sqrt(l * l + eta * eta)

    def q(l):
        return (2.0 * l + 1.0) * (eta + l * (l + 1.0) / x)

    def s(l):
        return l * math.sqrt((l + 1.0) ** 2 + eta * eta)

    tail = _lentz(lambda k: p(L + 1) if k == 1 else -s(L + k - 1) * p(L + k),
                  lambda k: q(L + k), "coulomb ratio")
    lead = q(L)
    other = s(L) * tail
    den = lead - other
    if abs(den) <= 4.0 * 2.2e-16 * max(abs(lead), abs(other)):
        return math.inf, den
    return p(L) / den, den


def coulomb_ratio(L: float, eta: float, x: float, method: str = "cf") -> RatioSample:
    """F_L(eta, x)/F_{L-1}(eta, x)."""
    if not x > 0:
        raise ValueError("x must be positive")
    if method == "series":
        num, c1 = coulomb_f(L, eta, x)
        den, c2 = coulomb_f(L - 1.0, eta, x)
        if min(c1, c2) > CANCELLATION_LIMIT:
            raise CancellationLoss(f"coulomb series lost all digits at x={x}")
        return _ratio(num, den, num)
    value, _ = coulomb_cf(L, eta, x)
    return RatioSample(value)
