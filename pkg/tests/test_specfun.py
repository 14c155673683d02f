import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from riccati_zeros.errors import CancellationLoss, NoConvergence, TruncationNotMet
from riccati_zeros.specfun import (TaylorCursor, bessel_j_series, bessel_jy, bessel_ratio_cf, bessel_y,
                                   coulomb_f, coulomb_ratio, cylinder_ratio, cylinder_value,
                                   hermite_ratio, kummer_m, kummer_ratio, legendre_ratio,
                                   taylor_advance, taylor_seed)


def _legendre_direct(n, x):
    return math.sqrt(1 - x * x) * special.eval_legendre(n, x)


def _hermite_direct(n, x):
    return math.exp(-0.5 * x * x) * special.eval_hermite(n, x)


# --- Taylor evaluators ---------------------------------------------------------

def test_parity_seeds():
    st4 = taylor_seed("hermite", 4)
    assert (st4.y, st4.yp) == (1.0, 0.0)
    st3 = taylor_seed("legendre", 3)
    assert (st3.y, st3.yp) == (0.0, 1.0)
    with pytest.raises(ValueError):
        taylor_seed("laguerre", 3)


def test_hermite_two_advance():
    st2 = taylor_seed("hermite", 2)
    _, y, _ = taylor_advance(st2, 0.5)
    assert y == pytest.approx(0.441248451, abs=1e-9)
    assert y == pytest.approx(-0.5 * math.exp(-0.125) * (4 * 0.25 - 2), abs=1e-15)


def test_order_cap_respected():
    st, _, _ = taylor_advance(taylor_seed("legendre", 40), 0.02)
    assert st.order_used <= 100
    st, _, _ = taylor_advance(taylor_seed("hermite", 40), 0.05)
    assert st.order_used <= 50


def test_truncation_not_met_on_long_step():
    with pytest.raises(TruncationNotMet):
        taylor_advance(taylor_seed("hermite", 200), 3.0)


def test_legendre_ratio_value():
    cur = TaylorCursor("legendre", 2)
    cur.at(0.5)
    assert legendre_ratio(cur.state, 0.5).value == pytest.approx(-0.285714286, abs=1e-9)


def test_legendre_ratio_singular_at_companion_zero():
    n = 2
    x = math.sqrt(0.6)  # zero of P_3
    cur = TaylorCursor("legendre", n)
    cur.at(x)
    sample = legendre_ratio(cur.state, x)
    assert sample.singular or abs(sample.value) > 1e12


def test_legendre_ratio_sign_flip():
    cur = TaylorCursor("legendre", 4)
    root = 0.3399810435848563
    cur.at(root - 1e-3)
    left = legendre_ratio(cur.state, root - 1e-3).value
    cur.at(root + 1e-3)
    right = legendre_ratio(cur.state, root + 1e-3).value
    assert left * right < 0


def test_hermite_ratio_values():
    cur = TaylorCursor("hermite", 3)
    cur.at(1.0)
    assert hermite_ratio(cur.state, 1.0).value == pytest.approx(-0.565685425, abs=1e-9)
    r = math.sqrt(1.5)
    cur.at(r)
    assert abs(hermite_ratio(cur.state, r).value) < 1e-14
    cur.at(1e-9)
    assert abs(hermite_ratio(cur.state, 1e-9).value) < 1e-8


@pytest.mark.parametrize("family,direct", [("legendre", _legendre_direct), ("hermite", _hermite_direct)])
def test_taylor_matches_direct(family, direct):
    rng = np.random.default_rng(7)
    for n in (1, 2, 7, 18, 30):
        hi = 0.98 if family == "legendre" else math.sqrt(2 * n + 1)
        cur = TaylorCursor(family, n)
        norm = cur.state.normalization
        for x in sorted(rng.uniform(0.0, hi, 10)):
            y, _ = cur.at(float(x))
            ref = norm * direct(n, float(x))
            scale = max(abs(ref), 1e-3 * max(abs(norm * direct(n, t)) for t in np.linspace(0, hi, 50)))
            assert abs(y - ref) <= 1e-12 * scale


@given(st.floats(min_value=0.05, max_value=0.9), st.floats(min_value=-0.02, max_value=0.02))
def test_recentering_stability(x, shift):
    n = 25
    a = TaylorCursor("legendre", n)
    b = TaylorCursor("legendre", n)
    b.at(x + shift)
    ya, _ = a.at(x)
    yb, _ = b.at(x)
    # odd seed: y'(0) = 1, so the oscillation amplitude is about 1/n
    amplitude = 1.0 / n
    assert abs(ya - yb) <= 1e-13 * max(abs(ya), amplitude)


# --- Bessel ------------------------------------------------------------------------

def test_bessel_half_order_is_tangent():
    assert bessel_ratio_cf(0.5, 1.0).value == pytest.approx(1.557407725, abs=1e-9)


def test_bessel_small_argument():
    assert bessel_ratio_cf(2.0, 1e-4).value == pytest.approx(2.5e-5, abs=1e-12)


def test_bessel_singular_at_j0_zero():
    sample = bessel_ratio_cf(1.0, 2.404825557695773)
    assert sample.singular or abs(sample.value) > 1e13


def test_bessel_ratio_rejects_bad_input():
    with pytest.raises(ValueError):
        bessel_ratio_cf(1.0, 0.0)
    with pytest.raises(NoConvergence):
        bessel_ratio_cf(1500.0, 10.0)


@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=0.05, max_value=4.95))
def test_cf_matches_series(mu, x):
    num = bessel_j_series(mu, x)
    den = bessel_j_series(mu - 1.0, x) if mu >= 1.0 else special.jv(mu - 1.0, x)
    if abs(den) < 1e-6 * abs(num):
        return
    direct = num / den
    assert bessel_ratio_cf(mu, x).value == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_bessel_jy_against_scipy():
    for nu in (0.0, 0.3, 1.0, 2.5, 10.0, 40.0):
        for x in (0.2, 1.0, 3.7, 12.0, 60.0):
            j, y, _, _ = bessel_jy(nu, x)
            assert j == pytest.approx(special.jv(nu, x), rel=1e-10, abs=1e-14)
            assert y == pytest.approx(special.yv(nu, x), rel=1e-10, abs=1e-14)


@given(st.floats(min_value=0.0, max_value=15.0), st.floats(min_value=20.0, max_value=2000.0))
def test_bessel_jy_large_argument_absolute_accuracy(nu, x):
    # near the zeros only absolute accuracy on the amplitude scale is meaningful
    amp = math.sqrt(2.0 / (math.pi * x))
    j, y, jp, yp = bessel_jy(nu, x)
    tol = 1e-13 * amp
    assert abs(j - special.jv(nu, x)) < tol
    assert abs(y - special.yv(nu, x)) < tol
    assert abs(jp - special.jvp(nu, x)) < tol
    assert abs(yp - special.yvp(nu, x)) < tol


# --- cylinder functions -------------------------------------------------------------

@pytest.mark.parametrize("mu", [0.5, 1.0, 2.3, 10.0])
def test_cylinder_alpha_zero_is_bessel(mu):
    for x in (0.7, 3.3, 8.1, 21.0):
        cf = bessel_ratio_cf(mu, x).value
        assert cylinder_ratio(mu, 0.0, x).value == pytest.approx(cf, rel=1e-12, abs=1e-12)


def test_cylinder_half_order_zeros():
    alpha = math.pi / 4
    for k in range(1, 6):
        x = k * math.pi - alpha
        assert abs(cylinder_value(0.5, alpha, x)) < 1e-14
        assert abs(cylinder_ratio(0.5, alpha, x).value) < 1e-13


@given(st.floats(min_value=0.0, max_value=30.0), st.floats(min_value=0.5, max_value=60.0))
def test_wronskian(mu, x):
    j0, y0, _, _ = bessel_jy(mu, x)
    j1, y1, _, _ = bessel_jy(mu + 1.0, x)
    target = 2.0 / (math.pi * x)
    assert j1 * y0 - j0 * y1 == pytest.approx(target, rel=1e-10)


def test_bessel_y_negative_order():
    assert bessel_y(-0.3, 2.0) == pytest.approx(special.yv(-0.3, 2.0), rel=1e-12)


# --- Kummer and Coulomb -----------------------------------------------------------------

def test_kummer_examples():
    assert kummer_ratio(-2.0, 1.0, 1e-12).value == pytest.approx(1.0, abs=1e-10)
    assert kummer_m(-2.0, 1.0, 1.0)[0] == pytest.approx(-0.5, abs=1e-15)
    assert kummer_m(-3.0, 1.0, 1.0)[0] == pytest.approx(-0.666666667, abs=1e-9)
    assert kummer_ratio(-2.0, 1.0, 1.0).value == pytest.approx(0.75, abs=1e-14)
    assert abs(kummer_ratio(-2.0, 1.0, 2 - math.sqrt(2)).value) < 1e-15


def test_kummer_cancellation():
    with pytest.raises(CancellationLoss):
        kummer_ratio(-60.5, 1.0, 200.0)


def test_coulomb_examples():
    assert coulomb_ratio(1.0, 0.0, math.pi / 2).value == pytest.approx(0.636619772, abs=1e-9)
    assert abs(coulomb_ratio(1.0, 0.0, 4.493409457909064).value) < 1e-14
    assert abs(coulomb_ratio(1.0, 0.0, 1e-6).value) < 1e-6
    assert coulomb_ratio(1.0, 0.0, math.pi / 2, method="series").value == pytest.approx(2 / math.pi, abs=1e-14)


@given(st.floats(min_value=0.2, max_value=25.0))
def test_coulomb_cf_matches_series(x):
    a = coulomb_ratio(2.0, 0.7, x).value
    num, c1 = coulomb_f(2.0, 0.7, x)
    den, c2 = coulomb_f(1.0, 0.7, x)
    if abs(den) < 1e-6 * abs(num):
        return
    # the series loses digits in proportion to its condition estimate
    tol = 1e-12 + 1e-14 * (c1 + c2)
    assert a == pytest.approx(num / den, rel=tol, abs=1e-12)


def test_coulomb_cf_against_mpmath():
    import mpmath
    for L, eta, x in ((1.0, 0.0, 3.0), (2.0, 0.7, 20.0), (1.0, -1.5, 7.5), (3.0, 2.0, 40.0)):
        ref = float(mpmath.coulombf(L, eta, x) / mpmath.coulombf(L - 1, eta, x))
        assert coulomb_ratio(L, eta, x).value == pytest.approx(ref, rel=1e-12)
