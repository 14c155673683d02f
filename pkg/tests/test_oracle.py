import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from riccati_zeros.errors import GridTooCoarse, ZeroReference
from riccati_zeros.families import Bessel, Coulomb, Cylinder, Hermite, Kummer, Legendre
from riccati_zeros.oracle import (AuditRecord, OracleConfig, ReferenceZeroSet, audit_sweep,
                                  compare_zero_lists, extended_history, reference_config,
                                  reference_zeros, relative_error, scan_and_bisect)
from riccati_zeros.core import order_from_errors
from riccati_zeros.specfun import bessel_j_series
from riccati_zeros.sweep import SweepReport, find_zeros


def test_scan_sine():
    zs = scan_and_bisect(OracleConfig(np.sin, 0.01), 1.0, 7.0)
    assert zs == pytest.approx([3.14159265358979, 6.28318530717959], abs=1e-13)


def test_scan_bessel_series():
    fn = np.vectorize(lambda x: bessel_j_series(0.0, float(x)))
    zs = scan_and_bisect(OracleConfig(fn, 0.01), 2.0, 6.0)
    assert zs == pytest.approx([2.404825557695773, 5.520078110286311], abs=1e-13)


def test_scan_hermite_weighted():
    fn = lambda x: np.exp(-x * x / 2) * (16 * x ** 4 - 48 * x ** 2 + 12)
    zs = scan_and_bisect(OracleConfig(fn, 0.01), 0.1, 2.0)
    assert zs == pytest.approx([0.524647623275290, 1.650680123885785], abs=1e-13)


def test_grid_too_coarse():
    fn = lambda x: (x - 1.0) * (x - 1.1) * (x - 1.2)
    with pytest.raises(GridTooCoarse):
        scan_and_bisect(OracleConfig(fn, 0.5), 0.75, 1.75)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(np.sin, 0.0)
    with pytest.raises(ValueError):
        OracleConfig(np.sin, 0.1, variable="phi")


def test_relative_error_examples():
    assert relative_error(3.14159265, math.pi) == pytest.approx(1.14e-9, rel=0.01)
    assert relative_error(2.5, 2.5) == 0.0
    assert relative_error(0.5773502691, 1 / math.sqrt(3)) == pytest.approx(1.55e-10, rel=0.01)
    with pytest.raises(ZeroReference):
        relative_error(1e-3, 0.0)


def test_audit_examples():
    rep = find_zeros(Legendre(100))
    audit = audit_sweep(rep, reference_config(Legendre(100)), -1.0, 1.0)
    assert (audit.missed, audit.spurious, audit.matched) == (0, 0, 100)
    assert rep.missed_zero_audit is audit
    rep = find_zeros(Bessel(10.0), (10.0, 110.0))
    audit = audit_sweep(rep, reference_config(Bessel(10.0)), 10.0, 110.0)
    assert audit.clean and audit.matched == len(rep.zeros)


def test_audit_empty_interval():
    audit = audit_sweep(SweepReport(), reference_config(Bessel(10.0)), 1.0, 5.0)
    assert (audit.matched, audit.missed, audit.spurious, audit.max_relative_error) == (0, 0, 0, 0.0)
    assert AuditRecord().clean


def test_compare_lists():
    rec = compare_zero_lists([1.0, 2.0, 5.0], [1.0, 3.0, 5.0 + 1e-12])
    assert (rec.matched, rec.missed, rec.spurious) == (2, 1, 1)
    assert rec.missed_zeros == [3.0]
    assert rec.spurious_zeros == [2.0]


def test_table_round_trip():
    ref = reference_zeros(Bessel(2.5), 1.0, 30.0)
    text = ref.to_table()
    assert text.count("\n") == len(ref.zeros)
    back = ReferenceZeroSet.from_table("# comment\n" + text)
    assert len(back) == 1
    assert back[0].zeros == ref.zeros
    assert back[0].params == {"mu": 2.5}
    assert back[0].family == "bessel"


def test_reference_set_checks():
    with pytest.raises(ValueError):
        ReferenceZeroSet("x", {}, [1.0, 1.0])
    with pytest.raises(ValueError):
        ReferenceZeroSet("x", {}, [1.0, 2.0], ["a"])


@pytest.mark.parametrize("params,a,b", [
    (Legendre(60), -1.0, 1.0),
    (Hermite(50), -11.0, 11.0),
    (Bessel(-0.7), 0.1, 80.0),
    (Cylinder(2.3, 0.4), 1.0, 80.0),
    (Kummer(-12.0, 3.0), 0.0, 60.0),
    (Coulomb(2.0, -1.0), 0.5, 60.0),
])
def test_grid_halving(params, a, b):
    cfg = reference_config(params)
    fine = OracleConfig(cfg.evaluator, cfg.grid_step / 2, cfg.bisect_tol, cfg.variable)
    z1, z2 = scan_and_bisect(cfg, a, b), scan_and_bisect(fine, a, b)
    assert len(z1) == len(z2)
    assert z1 == pytest.approx(z2, rel=1e-13, abs=1e-15)


@given(st.floats(min_value=0.05, max_value=0.95))
def test_zero_free_interval_finds_nothing(t):
    # sin has no zero strictly inside (k pi, (k+1) pi)
    lo = math.pi * (1 + 0.5 * t * 0.01)
    hi = 2 * math.pi * (1 - 0.5 * t * 0.01)
    assert scan_and_bisect(OracleConfig(np.sin, 0.05), lo, hi) == []


@pytest.mark.parametrize("method,expected", [("TOM", 3.0), ("NEWTON", 2.0), ("SOM", 2.0), ("FOM", 4.0)])
def test_extended_precision_orders(method, expected):
    params = Bessel(10.0)
    target = find_zeros(params, (10.0, 30.0)).xs[1]
    errors, limit, eps = extended_history(params, method, target + 0.6)
    assert order_from_errors(errors, 10 * eps * abs(limit)) == pytest.approx(expected, abs=0.3)
    assert limit == pytest.approx(target, rel=1e-14)
