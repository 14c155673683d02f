import math

from hypothesis import HealthCheck, settings

from riccati_zeros.core import RiccatiProblem

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def tan_problem() -> RiccatiProblem:
    """h = tan z with r = 0: the half-order Bessel ratio, zeros at k*pi."""
    return RiccatiProblem(h=math.tan, r=lambda z: 0.0, r_dot=lambda z: 0.0, z_of_x=lambda x: x,
                          x_of_z=lambda z: z, domain_z=(-math.inf, math.inf), name="tan")


def singularities_z(problem, params, z_lo: float, z_hi: float) -> list[float]:
    """Poles of h in [z_lo, z_hi]: the oracle's zeros of the companion function, mapped to z."""
    from riccati_zeros.oracle import reference_zeros

    x_lo, x_hi = sorted((problem.x_of_z(z_lo), problem.x_of_z(z_hi)))
    if x_lo <= 0.0 and problem.domain_z[0] == 0.0:
        x_lo = 1e-9
    ref = reference_zeros(params, x_lo, x_hi, companion=True)
    return [problem.z_of_x(x) for x in ref.zeros]


def residual_failures(problem, params, z_lo: float, z_hi: float, count: int = 100, seed: int = 11,
                      guard: float = 1e-3) -> tuple[int, int]:
    """(failures, points checked) for the Riccati residual away from detected singularities."""
    import numpy as np
    from riccati_zeros.core import riccati_residual

    poles = np.array(singularities_z(problem, params, z_lo, z_hi))
    rng = np.random.default_rng(seed)
    bad = checked = 0
    while checked < count:
        z = float(rng.uniform(z_lo, z_hi))
        if poles.size and np.min(np.abs(poles - z)) < guard:
            continue
        h = problem.h(z)
        checked += 1
        if abs(riccati_residual(problem, z)) >= 1e-5 * (1 + h * h):
            bad += 1
    return bad, checked
