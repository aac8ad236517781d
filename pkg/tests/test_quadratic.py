import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from digitprimes import quadratic as qd

from oracles import mobius_trial, rho_ell_scan


def test_chi():
    assert [qd.chi(n) for n in range(8)] == [0, 1, 0, -1, 0, 1, 0, -1]
    assert qd.chi_array(np.arange(8)).tolist() == [0, 1, 0, -1, 0, 1, 0, -1]


def test_rho_small_values():
    # rho(2) = 1, rho(4) = 0, rho(5) = 2, rho(25) = 2, rho(65) = 4
    assert [qd.rho(d) for d in (1, 2, 3, 4, 5, 25, 65)] == [1, 1, 0, 0, 2, 2, 4]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 60))
def test_rho_ell_closed_form(d, ell):
    assert qd.rho_ell(ell, d) == rho_ell_scan(ell, d)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 5000))
def test_rho_multiplicative(a, b):
    if math.gcd(a, b) == 1:
        assert qd.rho(a * b) == qd.rho(a) * qd.rho(b)


def test_prime_power_hensel_beyond_brute():
    # 5^9 > 2^20 goes through the lifting branch
    assert qd.rho_prime_power(5, 9) == 2
    assert qd.rho_prime_power(3, 13) == 0
    assert qd.rho_prime_power(2, 21) == 0
    assert qd.rho_prime_power(1048583, 1) == 1 + qd.chi(1048583)


def test_tables_match_pointwise():
    n = 2000
    t = qd.rho_table(n)
    assert t[0] == 0
    assert all(t[d] == qd.rho(d) for d in range(1, n + 1))
    for ell in (1, 2, 6, 15, 49):
        tab = qd.rho_ell_table(ell, n)
        brute = qd.rho_ell_brute_table([ell], n)[0]
        assert np.array_equal(tab[1:], brute[1:])


def test_rho_ell_for_ells():
    ells = np.array([1, 3, 10, 21, 77])
    for d in (1, 9, 50, 360, 1001):
        assert qd.rho_ell_for_ells(ells, d).tolist() == [rho_ell_scan(int(e), d) for e in ells]


def test_square_root_part():
    assert [qd.square_root_part(d) for d in (1, 8, 12, 72, 97)] == [1, 2, 2, 6, 1]


def test_guards():
    with pytest.raises(ValueError):
        qd.rho(0)
    with pytest.raises(ValueError):
        qd.rho_ell(0, 5)
    with pytest.raises(ValueError):
        qd.average_rho_check(1, 1)
    with pytest.raises(ValueError):
        qd.mobius_rho_partial_sum(1, 0)
    with pytest.raises(ValueError):
        qd.constant_C(2)
    with pytest.raises(ValueError):
        qd.kappa1(10)
    with pytest.raises(ValueError):
        qd.kappa_B({0, 1, 2, 3})
    with pytest.raises(ValueError):
        qd.main_term(1e6, 2, {7}, 100)


def test_average_rho_bounded():
    ratios = [qd.average_rho_check(1, 10**e).ratio for e in (2, 3, 4, 5)]
    assert ratios == pytest.approx([0.1478, 0.0888, 0.0629, 0.0485], abs=5e-4)
    assert all(r < 1 for r in ratios)
    assert qd.average_rho_check(35, 10**4).ratio < 1


def test_mobius_rho_partial_sum_brute():
    V = 300
    ref = math.fsum(mobius_trial(d) * rho_ell_scan(2, d) / d for d in range(1, V + 1))
    assert qd.mobius_rho_partial_sum(2, V) == pytest.approx(ref, abs=1e-14)


def test_constant_C():
    c = qd.constant_C(10**5)
    # first factor p = 3 is 1 + 1/(2*4)
    assert qd.constant_C(3).value == pytest.approx(1 + 1 / 8, rel=1e-15)
    ref = math.prod(1 - qd.chi(p) / ((p - 1) * (p - qd.chi(p)))
                    for p in range(3, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1)))
    assert qd.constant_C(1000).value == pytest.approx(ref, rel=1e-13)
    assert abs(c.value - 1.078205172426509) <= c.tail_bound


def test_kappas():
    assert qd.kappa_B({0}) == Fraction(10, 9)
    assert qd.kappa_B({7}) == Fraction(5, 6)
    assert qd.kappa_B({1, 3}) == Fraction(5, 8)
    assert qd.kappa_B({0, 5}) == Fraction(5, 4)
    assert qd.kappa1(7) == Fraction(5, 6)
    assert qd.kappa1(0) == Fraction(10, 9)
    from digitprimes.digits import coprime_fraction_kappa
    for a in range(10):
        assert qd.kappa_B({a}) == qd.kappa1(a)
    for B in ({0}, {7}, {1, 3}, {0, 5}, {2, 4, 9}):
        fr = {coprime_fraction_kappa(B, k) for k in range(1, 6)}
        assert len(fr) == 1
        assert qd.kappa_B(B) == Fraction(10, 4) * fr.pop()


def test_singular_constants_json():
    sc = qd.singular_constants({7}, 10**5)
    js = sc.to_json()
    assert js["kappa"] == "5/6"
    assert js["kappa_float"] == pytest.approx(5 / 6)
    assert js["gamma_exponent"] == pytest.approx(math.log(9) / math.log(10))


def test_main_term_formula():
    C = 1.0782
    v = qd.main_term(1e6, 5, {7}, 1000, C=C)
    assert v == pytest.approx(4 * C * (5 / 6) / math.pi * math.exp(-qd.EULER_GAMMA) / math.log(5) * 1000)
