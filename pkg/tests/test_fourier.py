import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from digitprimes import fourier as fo
from digitprimes.digits import GENUINE, PADDED

from oracles import direct_sum_exact, product_mp

thetas = st.floats(0, 1, exclude_max=True, allow_nan=False)


def test_direct_examples():
    assert fo.eval_direct(1, {0}, 0.0).magnitude == pytest.approx(1.0, abs=1e-15)
    assert fo.eval_direct(1, {0}, 0.5).magnitude == pytest.approx(1 / 9, rel=1e-12)
    assert fo.eval_direct(2, {0}, 0.0, GENUINE).magnitude == pytest.approx(90 / 81, rel=1e-14)


def test_direct_guard():
    with pytest.raises(ValueError):
        fo.eval_direct(fo.MAX_DIRECT_K + 1, {7}, 0.1)
    with pytest.raises(ValueError):
        fo.eval_direct(0, {7}, 0.1)


def test_product_examples():
    assert fo.eval_product(3, {5}, 0.0).magnitude == 1.0
    d = fo.eval_direct(2, {0}, 0.3).magnitude
    assert fo.eval_product(2, {0}, 0.3).magnitude == pytest.approx(d, rel=1e-12)
    th = math.sqrt(2) % 1
    d6 = fo.eval_direct(6, {1, 2}, th).magnitude
    assert fo.eval_product(6, {1, 2}, th).magnitude == pytest.approx(d6, rel=1e-10)


def test_product_rejects_genuine_with_zero():
    with pytest.raises(ValueError):
        fo.eval_product(2, {0}, 0.1, GENUINE)
    # the identity genuinely fails there: 90 members, not 81
    assert fo.eval_direct(2, {0}, 0.0, GENUINE).magnitude != fo.eval_product(2, {0}, 0.0).magnitude


def test_product_against_mpmath():
    for B, k, th in [((7,), 6, 0.17857187817437192), ((0,), 6, 0.510888884466533),
                     ((0, 9), 6, 0.2624947127501015), ((1, 3), 8, 0.123456789)]:
        ref = product_mp(k, B, th)
        assert fo.eval_product(k, B, th).magnitude == pytest.approx(ref, rel=1e-11)


def test_rational_path_matches_float_path():
    for q in (7, 13, 99, 1001):
        for a in (1, 2, q - 1):
            r = fo.product_rational(8, {3}, [a], q)[0]
            assert r == pytest.approx(product_mp(8, (3,), Fraction(a, q)), rel=1e-11)


def test_exact_oracle_matches_direct_where_well_conditioned():
    th = 0.3141592653589793
    assert fo.eval_direct(4, {2}, th).magnitude == pytest.approx(direct_sum_exact(4, {2}, th), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(th=thetas, k=st.integers(1, 5), B=st.sets(st.integers(0, 9), min_size=1, max_size=3))
def test_direct_product_absolute(th, k, B):
    d = fo.eval_direct(k, B, th).magnitude
    p = fo.eval_product(k, B, th).magnitude
    assert abs(d - p) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(th=thetas, k=st.integers(1, 12), B=st.sets(st.integers(0, 9), min_size=1, max_size=4))
def test_symmetry_and_bounds(th, k, B):
    # negation is exact in floating point, so the phases are exact negatives
    f = fo.eval_product_many(k, B, [th, -th])
    assert 0.0 <= f[0] <= 1.0 + 1e-15
    assert f[1] == pytest.approx(f[0], rel=1e-9, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(a=st.integers(-10**6, 10**6), q=st.integers(1, 10**5), k=st.integers(1, 10),
       B=st.sets(st.integers(0, 9), min_size=1, max_size=4))
def test_periodicity_exact(a, q, k, B):
    th = Fraction(a, q)
    f0 = fo.eval_product(k, B, th).magnitude
    assert fo.eval_product(k, B, th + 1).magnitude == f0
    assert fo.eval_product(k, B, th - 7).magnitude == f0
    assert fo.eval_product(k, B, -th).magnitude == pytest.approx(f0, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("B", [{0}, {7}, {1, 2}, {0, 5, 9}])
def test_normalisation_at_zero(B):
    for k in range(1, 15):
        assert fo.eval_product(k, B, 0.0).magnitude == 1.0
        assert fo.eval_product(k, B, Fraction(0)).magnitude == 1.0


def test_fixed_point_reduction():
    m = fo.to_fixed(np.array([0.25, 1.25, -0.75]))
    assert m.tolist() == [2**62] * 3
    assert int(fo.to_fixed(Fraction(1, 3))[0]) == (2**64) // 3


def test_scan_single_examples():
    rep = fo.scan_single_modulus(6, {0}, 1, 16)
    assert rep.measured == pytest.approx(1.0, abs=1e-15)
    rep = fo.scan_single_modulus(6, {7}, 101, 512)
    assert rep.measured <= 3 * (101 ** (27 / 77) + 101 / 10 ** (6 * 50 / 77))
    assert rep.reference == pytest.approx(101 ** (27 / 77) + 101 * 10 ** (-6 * 50 / 77))
    rep = fo.scan_single_modulus(4, {1, 3}, 11, 512)
    assert 0 < rep.ratio < 3
    assert rep.margin > 0


def test_scan_single_matches_float_evaluation():
    rep = fo.scan_single_modulus(5, {4}, 9, 32)
    beta = rep.argmax_beta
    vals = fo.eval_product_many(5, {4}, np.arange(1, 10) / 9 + beta)
    assert math.fsum(vals) == pytest.approx(rep.measured, rel=1e-12)


def test_scan_farey_examples():
    rep = fo.scan_farey(5, {0}, 1, 1)
    assert rep.measured == pytest.approx(1.0, abs=1e-15)
    rep = fo.scan_farey(6, {4}, 50, 256)
    assert 0 < rep.ratio < 10
    rep = fo.scan_farey(6, {0, 5, 9}, 30, 256)
    assert rep.measured <= 5 * 30 ** (2 * 99 / 200)


def test_farey_fraction_count():
    # |F_Q| over (0, 1] is sum_{q <= Q} phi(q)
    total = sum(a.size for _, a in fo.farey_fractions(20))
    phi = [sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1) for q in range(1, 21)]
    assert total == sum(phi)


def test_scan_csv_row():
    rep = fo.scan_single_modulus(3, {7}, 3, 8)
    row = rep.csv_row()
    assert tuple(row) == fo.ScanReport.CSV_FIELDS


@pytest.mark.parametrize("B,q,a", [({0}, 7, 1), ({5}, 3, 2)])
def test_small_modulus_decay_positive(B, q, a):
    rep = fo.small_modulus_decay(range(3, 13), B, q, a)
    assert rep.c0 > 0
    assert len(rep.rows) == 10


def test_small_modulus_decay_preconditions():
    with pytest.raises(ValueError):
        fo.small_modulus_decay([6], {5}, 10, 1)
    with pytest.raises(ValueError):
        fo.small_modulus_decay([6], {5}, 7, 7)
    with pytest.raises(ValueError):
        fo.small_modulus_decay([2], {5}, 7, 1)


def test_l1_norm_quadrature():
    def f(t):
        return abs(sum(complex(math.cos(2 * math.pi * n * t), math.sin(2 * math.pi * n * t))
                       for n in range(1, 10))) / 9

    ref, _ = quad(f, 0, 1, limit=400, points=[j / 9 for j in range(1, 9)])
    est = fo.l1_norm(1, {0}, 10**4).estimate
    assert est == pytest.approx(ref, rel=1e-6)


def test_l1_norm_ratio_bounded():
    rep = fo.l1_norm(4, {1, 2}, 10**5)
    assert rep.estimate > 0
    assert 0.05 < rep.ratio < 20
    with pytest.raises(ValueError):
        fo.l1_norm(4, {1, 2}, 999)


def test_sum_at_fractions_k1():
    # 1 + sum_{a=1}^{9} (1/9)|sum_{n=1}^{9} e(na/10)| = 1 + 9 * (1/9)
    assert fo.sum_at_fractions(1, {0}) == pytest.approx(2.0, rel=1e-14)
    assert fo.sum_at_fractions(2, {3}, t=0.0) == 100.0
