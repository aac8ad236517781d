import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from digitprimes import sieve as sv
from digitprimes.digits import member_array

from oracles import congruence_oracle, digits_ok, s_of_x_double_loop, von_mangoldt_trial


def test_run_guards():
    with pytest.raises(ValueError):
        sv.SieveRun(-1, 5, {7})
    with pytest.raises(ValueError):
        sv.SieveRun(100, 1, {7})


def test_ells_exclude_zero_and_small_primes():
    run = sv.SieveRun(10**4, 5, {7})
    ells = run.ells()
    assert 0 not in ells.tolist()
    ref = [e for e in range(101) if digits_ok(e, {7}) and math.gcd(e, 30) == 1]
    assert ells.tolist() == ref
    assert run.Pi == 30


def test_theorem_mode_off_at_desk_scale():
    assert not sv.SieveRun(10**8, 5, {7}).theorem_mode
    assert not sv.SieveRun(10, 5, {7}).theorem_mode


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3000), st.sampled_from([2, 3, 5, 7]), st.sampled_from([{7}, {0}, {1, 3}, {2, 5, 9}]))
def test_weights_against_double_loop(x, P, B):
    w = sv.build_weights(sv.SieveRun(x, P, B)).values
    assert np.array_equal(w, sv.brute_force_weights(x, P, B))


def test_weight_budget():
    with pytest.raises(MemoryError):
        sv.build_weights(sv.SieveRun(10**6, 5, {7}), memory_budget=10**5)


def test_lattice_counts_consistent():
    run = sv.SieveRun(10**5, 5, {7})
    w = sv.build_weights(run).values
    assert sv.admissible_lattice_count(run) == int(w.sum())
    ells = member_array(math.isqrt(run.x), {7}).tolist()
    ref = sum(2 * math.isqrt(run.x - e * e) + 1 for e in ells)
    assert sv.lattice_count(run) == ref


@pytest.mark.parametrize("x,P,B", [(2000, 5, {7}), (5000, 3, {1, 3}), (3000, 7, {0})])
def test_s_of_x_double_loop(x, P, B):
    run = sv.SieveRun(x, P, B)
    assert sv.s_of_x(run).total == pytest.approx(s_of_x_double_loop(x, P, B), rel=1e-13)


def test_s_of_x_matches_weights():
    run = sv.SieveRun(2 * 10**5, 5, {7})
    w = sv.build_weights(run).values
    from digitprimes.arith import von_mangoldt_table
    ref = math.fsum(w * von_mangoldt_table(run.x))
    res = sv.s_of_x(run)
    assert res.total == pytest.approx(ref, rel=1e-13)
    assert 0 <= res.prime_power_part < 0.05 * res.total


def test_s_of_x_threads_bit_identical():
    a = sv.s_of_x(sv.SieveRun(10**6, 5, {7}, threads=1))
    b = sv.s_of_x(sv.SieveRun(10**6, 5, {7}, threads=6))
    assert a.total == b.total and a.prime_only == b.prime_only


def test_s_of_x_guards():
    assert sv.s_of_x(sv.SieveRun(1, 5, {7})).total == 0.0
    with pytest.raises(ValueError):
        sv.s_of_x(sv.SieveRun(sv.MAX_WALK_X + 1, 5, {7}))


def test_congruence_table_oracle():
    x, P, B, D = 4000, 3, {7}, 20
    tab = sv.congruence_table(sv.SieveRun(x, P, B), D)
    A, M = congruence_oracle(x, P, B, D)
    assert np.array_equal(tab.A, A)
    assert np.allclose(tab.M, M, rtol=1e-13)
    assert tab.total() == pytest.approx(math.fsum(np.abs(A - M)))
    assert len(list(tab.rows())) == D


def test_congruence_table_log_and_threads():
    run = sv.SieveRun(10**4, 5, {7})
    t1 = sv.congruence_table(run, 30, with_log=True)
    t4 = sv.congruence_table(sv.SieveRun(10**4, 5, {7}, threads=4), 30, with_log=True)
    assert np.array_equal(t1.M, t4.M) and np.array_equal(t1.A_log, t4.A_log)
    assert t1.A_log[0] >= t1.A_log[1]


def test_congruence_guards():
    run = sv.SieveRun(10**4, 5, {7})
    with pytest.raises(ValueError):
        sv.congruence_table(run, 0)
    with pytest.raises(ValueError):
        sv.congruence_table(run, 101)


def test_type_one_fit_shape():
    fit = sv.type_one_fit(sv.SieveRun(10**5, 5, {7}), [10, 100, 30])
    assert fit.D_values == (10, 30, 100)
    assert fit.spread >= 1.0
    assert fit.fitted_c == pytest.approx(math.prod(fit.constants) ** (1 / 3))


def test_vaughan_pointwise_identity():
    n = 3000
    for U, V in ((2, 2), (10, 10), (31, 97), (3000, 3000)):
        small, mu_log, triple, bilinear, lam = sv.vaughan_pointwise(n, U, V)
        assert np.allclose(small + mu_log - triple + bilinear, lam, atol=1e-9)


def test_vaughan_decompose_small():
    p = sv.vaughan_decompose(sv.SieveRun(10**4, 5, {7}), 10, 10)
    assert p.residual <= 1e-12
    with pytest.raises(ValueError):
        sv.vaughan_decompose(sv.SieveRun(10**4, 5, {7}), 1, 10)
    with pytest.raises(ValueError):
        sv.vaughan_pointwise(sv.MAX_VAUGHAN_X + 1, 10, 10)


def test_verify_main_theorem_small():
    chk = sv.verify_main_theorem(sv.SieveRun(10**6, 5, {7}))
    assert chk.ratio == pytest.approx(0.7412, abs=5e-4)
    js = chk.to_json()
    assert js["kappa"] == "5/6" and js["theorem_mode"] is False and js["truncation"] == 10**6
    with pytest.raises(ValueError):
        sv.verify_main_theorem(sv.SieveRun(10**6, 5, {7}), p_max=10**5)


def test_growth_slope_self_consistent():
    slope, lo, hi = sv.growth_slope(10**5, 10**6, 5, {7})
    assert lo == sv.s_of_x(sv.SieveRun(10**5, 5, {7})).total
    assert slope == pytest.approx(math.log(hi / lo) / math.log(10))
