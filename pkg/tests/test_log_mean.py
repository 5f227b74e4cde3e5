import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmeans.kubo_ando import gauss_legendre_01
from opmeans.log_mean import (
    MeanFamily,
    default_rule,
    m_logarithmic_mean,
    mean_family,
    shift_compound,
    simplex_rule,
    verify_logmean_inequalities,
)
from opmeans.multi_means import ConvergenceError, MeanKind, SolverConfig, arithmetic_mean
from opmeans.spd_core import random_spd, random_spd_tuple


def test_two_point_rule_is_gauss_legendre():
    rule = simplex_rule(2, "gauss", level=8)
    x, c = gauss_legendre_01(8)
    assert len(rule) == 8
    np.testing.assert_allclose(rule.nodes[:, 0], x, atol=1e-15)
    np.testing.assert_allclose(rule.nodes[:, 1], 1 - x, atol=1e-15)
    np.testing.assert_allclose(rule.coeffs, c, rtol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_gauss_rule_flat_dirichlet_moments(n):
    rule = simplex_rule(n, "gauss", level=6)
    assert rule.coeffs.sum() == pytest.approx(1.0, abs=1e-13)
    mean = rule.integrate(rule.nodes)
    np.testing.assert_allclose(mean, np.full(n, 1 / n), atol=1e-10)
    # E[w_1^2] = 2 / (n (n+1)),  E[w_1 w_2] = 1 / (n (n+1))
    assert rule.integrate(rule.nodes[:, 0] ** 2) == pytest.approx(2 / (n * (n + 1)), abs=1e-10)
    assert rule.integrate(rule.nodes[:, 0] * rule.nodes[:, 1]) == pytest.approx(1 / (n * (n + 1)), abs=1e-10)


def test_montecarlo_rule_within_three_sigma():
    rule = simplex_rule(3, "montecarlo", count=4096, seed=5)
    sigma = math.sqrt((1 / 3) * (2 / 3) / 4 / 4096)  # Var[w_1] = (n-1)/(n^2 (n+1))
    assert abs(rule.integrate(rule.nodes[:, 0]) - 1 / 3) <= 3 * sigma
    sym = simplex_rule(3, "montecarlo", count=512, seed=5, symmetrize="cyclic")
    np.testing.assert_allclose(sym.integrate(sym.nodes), np.full(3, 1 / 3), atol=1e-14)


def test_full_symmetrization():
    rule = simplex_rule(3, "gauss", level=3, symmetrize="full")
    assert len(rule) == 9 * 6
    np.testing.assert_allclose(rule.integrate(rule.nodes), np.full(3, 1 / 3), atol=1e-14)


def test_rule_errors():
    with pytest.raises(ValueError):
        simplex_rule(3, "gauss", level=0)
    with pytest.raises(ValueError):
        simplex_rule(3, "montecarlo", count=0)
    with pytest.raises(ValueError):
        simplex_rule(1)
    with pytest.raises(ValueError):
        simplex_rule(3, "sobol")
    with pytest.raises(ValueError):
        simplex_rule(3, symmetrize="dihedral")


def test_default_rule_switches_to_montecarlo():
    assert default_rule(4).scheme.startswith("gauss")
    assert default_rule(5).scheme.startswith("montecarlo")


def test_arithmetic_family_gives_uniform_arithmetic_mean():
    mats = random_spd_tuple(3, 3, cond=100, seed=2)
    got = m_logarithmic_mean(mean_family("arithmetic"), mats)
    assert np.max(np.abs(got - arithmetic_mean(None, mats))) <= 1e-12


def test_equal_matrices():
    A = random_spd(3, 20, seed=1)
    got = m_logarithmic_mean(mean_family("karcher"), [A, A, A], simplex_rule(3, level=4))
    np.testing.assert_allclose(got, A, rtol=1e-11)


def test_two_variable_geometric_family_is_logarithmic_mean():
    a, b = 2.0, 7.0
    got = m_logarithmic_mean(mean_family("karcher"), [a * np.eye(1), b * np.eye(1)], simplex_rule(2, level=8))
    assert got[0, 0] == pytest.approx((b - a) / math.log(b / a), rel=1e-6)


def test_alm_family_rejected():
    with pytest.raises(ValueError):
        mean_family("alm")


def test_rule_size_mismatch():
    with pytest.raises(ValueError):
        m_logarithmic_mean(mean_family("arithmetic"), random_spd_tuple(2, 3, seed=0), simplex_rule(2))


def test_shift_compound_at_uniform_weights():
    mats = random_spd_tuple(2, 3, cond=30, seed=7)
    M = mean_family("karcher")
    M0 = shift_compound(M, 3)
    np.testing.assert_allclose(M0(None, mats), M(None, mats), rtol=1e-10)


def test_convergence_failure_names_node():
    fam = mean_family(MeanKind("karcher", solver=SolverConfig(max_iter=1)))
    with pytest.raises(ConvergenceError, match="node 0"):
        m_logarithmic_mean(fam, random_spd_tuple(2, 3, cond=100, seed=1), simplex_rule(3, level=2))


def test_chain_karcher_gauss6():
    mats = random_spd_tuple(2, 3, cond=50, seed=3)
    r = verify_logmean_inequalities(mean_family("karcher"), mats, simplex_rule(3, level=6, symmetrize="cyclic"))
    assert r.passed, r.to_json()
    assert len(r.directions) == 4


def test_chain_equal_tuple_is_tight():
    A = random_spd(2, 10, seed=9)
    r = verify_logmean_inequalities(mean_family("bmp"), [A, A, A], simplex_rule(3, level=3))
    assert r.passed
    assert all(abs(row["slack"]) <= 1e-12 for row in r.grid_data)


def test_chain_detects_broken_family():
    # a "mean" above the arithmetic mean must break L(M) <= A
    fam = MeanFamily("inflated", lambda w, A: 2 * arithmetic_mean(w, A))
    r = verify_logmean_inequalities(fam, random_spd_tuple(2, 3, seed=1), simplex_rule(3, level=3))
    assert not r.directions["L(M)<=A"]
    assert r.witness is not None


def test_parallel_matches_serial():
    mats = random_spd_tuple(2, 3, cond=30, seed=4)
    rule = simplex_rule(3, level=4)
    fam = mean_family("bmp")
    np.testing.assert_array_equal(m_logarithmic_mean(fam, mats, rule, threads=1),
                                  m_logarithmic_mean(fam, mats, rule, threads=4))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_bracketing_by_harmonic_and_arithmetic(seed):
    mats = random_spd_tuple(2, 3, cond=100, seed=seed)
    r = verify_logmean_inequalities(mean_family("log-euclidean"), mats, simplex_rule(3, level=4, symmetrize="cyclic"))
    assert r.directions["L(M)<=A"]


def test_shift_compound_integral_matches_direct_evaluation():
    mats = random_spd_tuple(2, 3, cond=50, seed=8)
    M = mean_family("bmp")
    rule = simplex_rule(3, level=3, symmetrize="cyclic")
    direct = rule.integrate([M(np.full(3, 1 / 3), [M(np.roll(w, -k), mats) for k in range(3)]) for w in rule.nodes])
    from opmeans.log_mean import _memoized

    got = m_logarithmic_mean(shift_compound(_memoized(M), 3), mats, rule, threads=3)
    np.testing.assert_allclose(got, direct, rtol=1e-14, atol=1e-14)
