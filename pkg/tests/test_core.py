import math

import pytest
from hypothesis import given, strategies as st

from conftest import tan_problem
from riccati_zeros.core import (CoupledSystem, IterationOptions, Method, RiccatiProblem, Termination,
                                ZeroResult, estimate_order, fixed_point_derivatives, fom_step, g_map,
                                g_prime, newton_step, normal_form_ratio, order_from_errors,
                                riccati_residual, som_step, solve_zero, step_increment, third_order_step)
from riccati_zeros.errors import InsufficientHistory, NonFiniteSample, NonPositiveA, ZeroDenominator
from riccati_zeros.families import bessel_problem, build, hermite_problem, legendre_problem, Bessel, Hermite, Legendre
from riccati_zeros.sweep import find_zeros


# --- single steps -----------------------------------------------------------

def test_third_order_step_fixed_point():
    assert third_order_step(5.0, 0.0, 0.7) == 5.0


def test_third_order_step_arithmetic():
    h = math.tan(3.0)
    assert third_order_step(3.0, h, 0.0) == pytest.approx(3.0 - 2 * h / (2 + h * h), abs=1e-15)
    assert third_order_step(3.0, h, 0.0) == pytest.approx(3.141112870393896, abs=1e-12)


def test_newton_step_values():
    assert newton_step(5.0, 0.0, 0.7) == 5.0
    h = math.tan(3.0)
    assert newton_step(3.0, h, 0.0) == pytest.approx(3.139707749099463, abs=1e-12)


def test_zero_denominator():
    # 2 + 1 - 2 * 1.5 * 1 = 0
    with pytest.raises(ZeroDenominator):
        third_order_step(1.0, 1.0, 1.5)
    with pytest.raises(ZeroDenominator):
        newton_step(1.0, 1.0, 1.0)


def test_arctan_steps():
    assert som_step(2.5, 0.0, 0.3, 4.0) == 2.5
    assert fom_step(2.5, 0.0, 0.7) == 2.5
    assert fom_step(1.0, 1.0, 1.0) == pytest.approx(1.0 - math.pi / 4)
    with pytest.raises(NonPositiveA):
        fom_step(1.0, 0.2, 0.0)
    with pytest.raises(NonPositiveA):
        som_step(1.0, 0.2, 0.0, -1.0)


def test_bessel_normal_form_coefficient():
    problem, _ = bessel_problem(10.0)
    assert problem.omega(15.0) == pytest.approx(1.0 - 99.75 / 225.0, rel=1e-14)
    assert problem.omega(15.0) == pytest.approx(0.55667, abs=1e-5)


def test_fom_is_exact_for_constant_omega():
    # r = 0, omega = 1: one FOM step from anywhere in (pi/2, 3pi/2) lands on pi
    z = 2.2
    d = step_increment(tan_problem(), Method.FOM, z, math.tan(z))
    assert z - d == pytest.approx(math.pi, abs=1e-14)


def test_normal_form_ratio_guard():
    with pytest.raises(ZeroDenominator):
        normal_form_ratio(2.0, 0.5)


# --- solve loop ---------------------------------------------------------------

def test_solve_tan_problem():
    res = solve_zero(tan_problem(), 2.8)
    assert res.converged
    assert res.z_star == pytest.approx(math.pi, abs=1e-12)
    assert res.x_star == pytest.approx(math.pi, abs=1e-12)
    assert len(res.history) == res.iterations + 1


def test_newton_needs_at_least_as_many_steps():
    def steps(method):
        res = solve_zero(tan_problem(), 2.8, IterationOptions(abs_tol=1e-10, method=method))
        return res.iterations

    assert steps(Method.NEWTON) >= steps(Method.TOM)


def test_solve_hermite_three():
    problem = hermite_problem(3)
    res = solve_zero(problem, problem.z_of_x(1.2), IterationOptions(rel_tol=1e-15, abs_tol=0, measure="x"))
    assert res.x_star == pytest.approx(math.sqrt(1.5), abs=1e-15)


def test_solve_legendre_two():
    problem = legendre_problem(2)
    res = solve_zero(problem, problem.z_of_x(0.5), IterationOptions(rel_tol=1e-15, abs_tol=0, measure="x"))
    assert res.x_star == pytest.approx(0.577350269189626, abs=1e-15)


def test_singularity_hit():
    problem = RiccatiProblem(h=lambda z: math.inf if z > 1.0 else math.tan(z), r=lambda z: 0.0,
                             z_of_x=lambda x: x, x_of_z=lambda z: z, domain_z=(-10, 10))
    assert solve_zero(problem, 1.5).termination is Termination.SINGULARITY_HIT
    # a step that lands past the barrier
    problem2 = RiccatiProblem(h=lambda z: math.nan if z > 3.0 else math.tan(z), r=lambda z: 0.0,
                              z_of_x=lambda x: x, x_of_z=lambda z: z, domain_z=(-10, 10))
    assert solve_zero(problem2, 2.0).termination is Termination.SINGULARITY_HIT


def test_left_domain_and_window():
    problem = RiccatiProblem(h=math.tan, r=lambda z: 0.0, z_of_x=lambda x: x, x_of_z=lambda z: z,
                             domain_z=(2.0, 3.0))
    assert solve_zero(problem, 2.9).termination is Termination.LEFT_DOMAIN
    assert solve_zero(tan_problem(), 2.8, window=(2.5, 3.0)).termination is Termination.LEFT_DOMAIN


def test_max_iter():
    res = solve_zero(tan_problem(), 2.0, IterationOptions(max_iter=1))
    assert res.termination is Termination.MAX_ITER
    assert res.iterations == 1


def test_options_validation():
    with pytest.raises(ValueError):
        IterationOptions(rel_tol=0)
    with pytest.raises(ValueError):
        IterationOptions(abs_tol=-1)
    with pytest.raises(ValueError):
        IterationOptions(max_iter=0)
    with pytest.raises(ValueError):
        IterationOptions(measure="y")
    assert IterationOptions(method="NEWTON").method is Method.NEWTON


def test_zero_result_defaults():
    res = ZeroResult(1.0, 1.0, 0, [1.0])
    assert res.converged


def test_coupled_system():
    # Bessel-type system in y = sqrt(x) J_mu: c2 = 1 and c4 = -1
    system = CoupledSystem(c1=lambda x: 0.5 / x, c2=lambda x: 1.0, c3=lambda x: -1.0, c4=lambda x: -1.0)
    assert system.check([0.5, 1.0, 5.0])
    assert system.k(2.0) == 1.0
    bad = CoupledSystem(c1=lambda x: 0.0, c2=lambda x: 1.0, c3=lambda x: 0.0, c4=lambda x: 1.0)
    assert not bad.check([1.0])


# --- Riccati consistency ------------------------------------------------------

def test_residual_examples():
    assert abs(riccati_residual(tan_problem(), 0.3)) < 1e-6
    p7 = legendre_problem(7)
    h = p7.h(1.0)
    assert abs(riccati_residual(p7, 1.0)) < 1e-5 * (1 + h * h)
    p6 = hermite_problem(6)
    h = p6.h(2.0)
    assert abs(riccati_residual(p6, 2.0)) < 1e-5 * (1 + h * h)


def test_residual_non_finite():
    problem = RiccatiProblem(h=lambda z: math.inf, r=lambda z: 0.0, z_of_x=lambda x: x,
                             x_of_z=lambda z: z, domain_z=(-1, 1))
    with pytest.raises(NonFiniteSample):
        riccati_residual(problem, 0.0)


@given(st.floats(min_value=-1.4, max_value=1.4))
def test_residual_tan_property(z):
    assert abs(riccati_residual(tan_problem(), z)) < 1e-5 * (1 + math.tan(z) ** 2)


# --- fixed point and contact ----------------------------------------------------

@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=-0.99, max_value=0.99))
def test_step_vanishes_with_h(z, r):
    assert third_order_step(z, 0.0, r) == z
    h = 1e-9
    assert abs(third_order_step(z, h, r) - z) <= 2 * abs(h) * 1.01


@pytest.mark.parametrize("params", [Legendre(20), Hermite(15), Bessel(3.5), Bessel(-0.3)])
def test_cubic_contact(params):
    problem, _ = build(params)
    report = find_zeros(params)
    for zr in report.zeros[1:4]:
        g1, g2 = fixed_point_derivatives(problem, zr.z_star, 1e-3)
        assert abs(g1) <= 1e-5
        assert abs(g2) <= 1e-2 * max(1.0, abs(problem.r(zr.z_star)))
        assert g_prime(problem.h(zr.z_star), problem.r(zr.z_star), problem.rdot(zr.z_star)) == pytest.approx(0, abs=1e-12)
        assert abs(g_map(problem, zr.z_star) - zr.z_star) <= 2 * abs(problem.h(zr.z_star)) + 1e-15


@given(st.floats(min_value=math.pi / 2 + 1e-3, max_value=3 * math.pi / 2 - 1e-3))
def test_monotone_convergence_tan(z0):
    res = solve_zero(tan_problem(), z0)
    assert res.z_star == pytest.approx(math.pi, abs=1e-12)
    side = math.copysign(1.0, math.pi - z0)
    hist = [z for z in res.history if abs(z - math.pi) > 1e-13]
    assert all((b - a) * side > 0 for a, b in zip(hist, hist[1:]))


# --- convergence order -----------------------------------------------------------

def test_order_geometric_toy():
    history = [10.0 ** (-(3 ** m)) for m in range(5)]
    assert estimate_order(history, 0.0) == pytest.approx(3.0, abs=1e-9)


def test_order_insufficient():
    with pytest.raises(InsufficientHistory):
        estimate_order([1.0, 0.5, 0.0], 0.0)
    with pytest.raises(InsufficientHistory):
        order_from_errors([1e-1, 1e-3, 1e-9], 0.0)


def _legendre_fifth_positive(method):
    params = Legendre(50)
    problem, case = build(params)
    target = [zr for zr in find_zeros(params, accelerate=False).zeros if zr.x_star > 0][4]
    opts = IterationOptions(rel_tol=1e-15, abs_tol=0, measure="x", method=method, max_iter=100)
    res = solve_zero(problem, target.guess, opts)
    return estimate_order(res.history, target.z_star)


def test_order_tom_legendre():
    assert 2.7 <= _legendre_fifth_positive(Method.TOM) <= 3.3


def test_order_newton_legendre():
    assert 1.8 <= _legendre_fifth_positive(Method.NEWTON) <= 2.2


def test_order_fom_extended_precision():
    from riccati_zeros.oracle import extended_history
    params = Legendre(50)
    target = [zr for zr in find_zeros(params, accelerate=False).zeros if zr.x_star > 0][4]
    errors, limit, eps = extended_history(params, "FOM", target.guess)
    assert order_from_errors(errors, 10 * eps * abs(limit)) == pytest.approx(4.0, abs=0.3)


def test_method_agreement():
    for params in (Bessel(10.0), Hermite(21), Legendre(30)):
        problem, case = build(params)
        zeros = find_zeros(params, accelerate=False).zeros
        mid = len(zeros) // 2
        # baselines have no certificate at the extreme zeros, so compare interior ones
        for zr in zeros[mid:mid + 3]:
            limits = []
            for m in (Method.TOM, Method.NEWTON, Method.SOM):
                res = solve_zero(problem, zr.guess, IterationOptions(
                    rel_tol=case.options.rel_tol, abs_tol=case.options.abs_tol,
                    measure=case.options.measure, method=m, max_iter=200))
                assert res.converged
                limits.append(res.z_star)
            assert max(limits) - min(limits) <= 1e-10 * max(1.0, abs(zr.z_star))
