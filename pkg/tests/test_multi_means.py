import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from opmeans._witnesses import LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B, LOG_EUCLIDEAN_P4_WEIGHTS
from opmeans.kubo_ando import weighted_geometric
from opmeans.multi_means import (
    ConvergenceError,
    MeanKind,
    SolverConfig,
    alm_mean,
    arithmetic_mean,
    as_weights,
    bmp_mean,
    check_property,
    evaluate,
    harmonic_mean,
    karcher_gradient,
    karcher_mean,
    log_euclidean_mean,
    power_mean,
)
from opmeans.spd_core import loewner_leq, random_spd, random_spd_tuple, spectral_norm, thompson_distance

seeds = st.integers(0, 2 ** 32 - 1)


def scalars(*xs):
    return [x * np.eye(1) for x in xs]


def test_arithmetic_examples():
    A = random_spd(3, 10, seed=1)
    np.testing.assert_allclose(arithmetic_mean(None, [A, A, A]), A)
    np.testing.assert_allclose(arithmetic_mean([0.5, 0.5], [np.eye(2), 3 * np.eye(2)]), 2 * np.eye(2))
    assert arithmetic_mean([0.2, 0.3, 0.5], scalars(1, 2, 3))[0, 0] == pytest.approx(2.3, abs=1e-15)
    with pytest.raises(ValueError):
        arithmetic_mean([0.5, 0.5], [A])


def test_harmonic_examples():
    A = random_spd(3, 10, seed=1)
    np.testing.assert_allclose(harmonic_mean(None, [A, A]), A, rtol=1e-12)
    assert harmonic_mean([0.5, 0.5], scalars(1, 1 / 3))[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_log_euclidean_examples():
    got = log_euclidean_mean([0.5, 0.5], [np.diag([1.0, 4.0]), np.diag([4.0, 1.0])])
    np.testing.assert_allclose(got, 2 * np.eye(2), atol=1e-14)
    assert log_euclidean_mean(None, scalars(1, np.e ** 2))[0, 0] == pytest.approx(np.e, rel=1e-14)


def test_weights_validation():
    with pytest.raises(ValueError):
        as_weights([0.5, 0.6], 2)
    with pytest.raises(ValueError):
        as_weights([1.0, 0.0], 2)
    np.testing.assert_allclose(as_weights(None, 4), np.full(4, 0.25))


def test_alm_examples():
    A = random_spd(3, 10, seed=3)
    np.testing.assert_allclose(alm_mean([A, A, A]), A, rtol=1e-12)
    assert alm_mean(scalars(1, 8, 27))[0, 0] == pytest.approx(6.0, rel=1e-12)


def test_alm_reference_run():
    mats = [random_spd(2, 10, seed=s) for s in (1, 2, 3)]
    X = alm_mean(mats)
    ref = alm_mean(mats, SolverConfig(tol=1e-14))
    assert thompson_distance(X, ref) <= 1e-11
    assert loewner_leq(harmonic_mean(None, mats), X, 1e-10)
    assert loewner_leq(X, arithmetic_mean(None, mats), 1e-10)


def test_alm_rejects_weights_and_sizes():
    mats = random_spd_tuple(2, 3, seed=1)
    with pytest.raises(ValueError):
        evaluate(MeanKind("alm"), [0.2, 0.3, 0.5], mats)
    with pytest.raises(ValueError):
        alm_mean(mats[:1])
    with pytest.raises(ValueError):
        alm_mean(random_spd_tuple(2, 7, seed=1))


def test_bmp_examples():
    A, B = random_spd_tuple(3, 2, cond=50, seed=8)
    np.testing.assert_allclose(bmp_mean([0.3, 0.7], [A, B]), weighted_geometric(A, B, 0.7), rtol=1e-12)
    C = random_spd(2, 10, seed=4)
    np.testing.assert_allclose(bmp_mean(None, [C, C, C]), C, rtol=1e-12)
    assert bmp_mean(None, scalars(2, 8))[0, 0] == pytest.approx(4.0, rel=1e-12)
    assert bmp_mean([0.5, 0.25, 0.25], scalars(1, 2, 4))[0, 0] == pytest.approx(2 ** 0.75, rel=1e-12)


def test_alm_and_bmp_agree_with_karcher_on_commuting_inputs():
    Q = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]
    mats = [(Q * lam) @ Q.T for lam in ([1.0, 2, 3], [4.0, 1, 2], [2.0, 5, 1])]
    expected = (Q * np.prod([[1.0, 2, 3], [4.0, 1, 2], [2.0, 5, 1]], axis=0) ** (1 / 3)) @ Q.T
    for X in (alm_mean(mats), bmp_mean(None, mats), karcher_mean(None, mats)):
        assert thompson_distance(X, expected) <= 1e-10


def test_power_examples():
    mats = random_spd_tuple(3, 3, cond=20, seed=5)
    w = [0.2, 0.3, 0.5]
    X, info = power_mean(1, w, mats, return_info=True)
    np.testing.assert_allclose(X, arithmetic_mean(w, mats), rtol=1e-14)
    assert info.residual == 0.0
    assert power_mean(0.5, None, scalars(1, 9))[0, 0] == pytest.approx(4.0, rel=1e-12)
    A = mats[0]
    for t in (-1, -0.3, 0.4, 1):
        np.testing.assert_allclose(power_mean(t, None, [A, A, A]), A, rtol=1e-12)
    np.testing.assert_allclose(power_mean(-1, w, mats), harmonic_mean(w, mats), rtol=1e-10)
    with pytest.raises(ValueError):
        power_mean(0, None, mats)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0.05, 1.0), st.booleans())
def test_power_scalar_closed_form(seed, t, negative):
    rng = np.random.default_rng(seed)
    a = np.exp(rng.uniform(-3, 3, 3))
    w = rng.dirichlet(np.ones(3))
    t = -t if negative else t
    expected = float(np.sum(w * a ** t)) ** (1 / t)
    assert power_mean(t, w, scalars(*a))[0, 0] == pytest.approx(expected, rel=1e-10)


def test_karcher_examples():
    A = random_spd(3, 10, seed=2)
    X, info = karcher_mean([0.3, 0.7], [A, A], return_info=True)
    np.testing.assert_allclose(X, A, rtol=1e-12)
    assert info.iterations == 1
    D1, D2 = np.diag([1.0, 4.0, 2.0]), np.diag([9.0, 1.0, 2.0])
    np.testing.assert_allclose(karcher_mean([0.5, 0.5], [D1, D2]), np.diag([3.0, 2.0, 2.0]), rtol=1e-12)


def test_karcher_two_matrices_is_geodesic_point():
    A, B = random_spd_tuple(3, 2, cond=100, seed=6)
    np.testing.assert_allclose(karcher_mean([0.35, 0.65], [A, B]), weighted_geometric(A, B, 0.65), rtol=1e-10)


def test_karcher_gradient_vanishes_independent_oracle():
    mats = random_spd_tuple(3, 4, cond=100, seed=12)
    w = [0.1, 0.2, 0.3, 0.4]
    X = karcher_mean(w, mats)
    R = sla.fractional_matrix_power(X, -0.5).real
    grad = sum(wk * sla.logm(R @ a @ R).real for wk, a in zip(w, mats))
    assert spectral_norm(grad) <= 1e-10
    assert spectral_norm(karcher_gradient(w, mats, X)) <= 1e-12


def test_power_means_approach_karcher():
    mats = random_spd_tuple(3, 3, cond=50, seed=21)
    L = karcher_mean(None, mats)
    d = [thompson_distance(L, power_mean(t, None, mats)) for t in (0.02, 0.01)]
    assert d[1] <= d[0]
    assert loewner_leq(power_mean(-0.01, None, mats), L, 1e-10)
    assert loewner_leq(L, power_mean(0.01, None, mats), 1e-10)


def test_convergence_error_carries_state():
    mats = random_spd_tuple(3, 3, cond=100, seed=2)
    with pytest.raises(ConvergenceError) as info:
        power_mean(0.5, None, mats, SolverConfig(max_iter=2))
    assert info.value.iterate.shape == (3, 3)
    assert info.value.residual > 0
    with pytest.raises(ConvergenceError):
        alm_mean(mats, SolverConfig(max_iter=1))


def test_mean_kind_parse():
    assert MeanKind.parse("power:0.5").t == 0.5
    assert MeanKind.parse("log_euclidean").tag == "log-euclidean"
    with pytest.raises(ValueError):
        MeanKind.parse("median")
    with pytest.raises(ValueError):
        MeanKind("power", 2.0)


def test_p10_karcher_random_triples():
    for s in range(20):
        mats = random_spd_tuple(3, 3, cond=100, seed=s)
        w = np.random.default_rng(s).dirichlet(np.ones(3))
        assert check_property("P10", MeanKind("karcher"), w, mats, seed=s).passed


def test_p3_bmp_transposition():
    mats = random_spd_tuple(2, 3, cond=30, seed=4)
    r = check_property("P3", MeanKind("bmp"), [0.2, 0.3, 0.5], mats, perm=[1, 0, 2], tol=1e-10)
    assert r.passed and r.worst_slack >= -1e-10


def test_p4_log_euclidean_stored_witness_fails():
    r = check_property("P4", MeanKind("log-euclidean"), LOG_EUCLIDEAN_P4_WEIGHTS, LOG_EUCLIDEAN_P4_A,
                       B=LOG_EUCLIDEAN_P4_B)
    assert not r.passed
    assert r.worst_slack < 0
    assert r.witness is not None


def test_p4_requires_ordered_tuples():
    mats = random_spd_tuple(2, 2, seed=1)
    with pytest.raises(ValueError):
        check_property("P4", MeanKind("karcher"), None, mats, B=[m / 2 for m in mats])


def test_p5_detects_arithmetic_counterexample():
    # d(A, B) = 1/2 log 100 but the arithmetic means are 1 and 50.5
    r = check_property("P5", MeanKind("arithmetic"), [0.5, 0.5], scalars(1, 1), B=scalars(1, 100))
    assert not r.passed
    assert r.grid_data[0]["distance"] == pytest.approx(np.log(50.5))


def test_p7_log_euclidean_not_congruence_invariant():
    mats = random_spd_tuple(2, 2, cond=100, seed=3)
    assert not check_property("P7", MeanKind("log-euclidean"), None, mats, seed=1).passed


def test_power_mean_fails_commuting_product():
    # P_1 is the arithmetic mean, not the geometric product
    r = check_property("P1", MeanKind("power", 1.0), None, [np.diag([1.0, 4.0]), np.diag([4.0, 1.0])])
    assert not r.passed


def test_unknown_property():
    with pytest.raises(ValueError):
        check_property("P11", MeanKind("karcher"), None, random_spd_tuple(2, 2, seed=0))


GEOMETRIC = [MeanKind("alm"), MeanKind("bmp"), MeanKind("karcher")]


@settings(max_examples=8, deadline=None)
@given(seeds, st.sampled_from(["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10"]))
def test_geometric_means_satisfy_all_properties(seed, prop):
    rng = np.random.default_rng(seed)
    mats = random_spd_tuple(2, 3, cond=float(rng.uniform(1, 100)), seed=rng)
    w = rng.dirichlet(np.ones(3))
    for kind in GEOMETRIC:
        r = check_property(prop, kind, None if kind.uniform_only else w, mats, seed=seed, tol=1e-8)
        assert r.passed, r.to_json()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_power_means_monotone_in_exponent(seed):
    rng = np.random.default_rng(seed)
    mats = random_spd_tuple(3, 3, cond=100, seed=rng)
    w = rng.dirichlet(np.ones(3))
    chain = [power_mean(t, w, mats) for t in (-1, -0.5, 0.5, 1)]
    L = karcher_mean(w, mats)
    chain.insert(2, L)
    for lo, hi in zip(chain, chain[1:]):
        assert loewner_leq(lo, hi, 1e-8)


def test_karcher_escapes_two_cycle_at_unit_step():
    # at step 1 this tuple settles into a two-cycle whose residual decays by ~0.5% per iteration
    rng = np.random.default_rng(268)
    mats = random_spd_tuple(3, 3, cond=100, seed=rng)
    w = rng.dirichlet(np.ones(3))
    X, info = karcher_mean(w, mats, return_info=True)
    assert info.residual <= 1e-12 and info.iterations < 200
    assert loewner_leq(power_mean(-0.5, w, mats), X, 1e-8)
    assert loewner_leq(X, power_mean(0.5, w, mats), 1e-8)
