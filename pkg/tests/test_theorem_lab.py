import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmeans import kubo_ando as ka
from opmeans import theorem_lab as tl
from opmeans.multi_means import karcher_mean
from opmeans.spd_core import loewner_leq, random_spd_tuple, random_sym

seeds = st.integers(0, 2 ** 32 - 1)


def test_grid_defaults():
    g = tl.LambdaGrid()
    assert g.values[0] == 2 ** -4 and g.values[-1] == 2 ** -20
    assert g.small == [2.0 ** -k for k in range(8, 21)]
    with pytest.raises(ValueError):
        tl.LambdaGrid(values=(0.1, 0.2))


# -- sandwich lemma


def test_lemma2_power():
    r = tl.verify_lemma2(ka.power(0.3))
    assert r.passed
    assert r.grid_data[0]["w"] == 0.3


def test_lemma2_logarithmic():
    r = tl.verify_lemma2(ka.logarithmic())
    assert r.passed and r.grid_data[0]["w"] == 0.5


def test_lemma2_arithmetic_upper_bound_tight():
    r = tl.verify_lemma2(ka.arithmetic(0.7))
    upper = r.grid_data[1]
    assert r.passed
    assert upper["min_slack"] == 0.0 and upper["max_slack"] == 0.0


def test_lemma2_wrong_weight_is_not_a_sandwich():
    r = tl.verify_lemma2(ka.power(0.5), w=0.4)
    assert r.passed  # the sandwich fails at 0.4, so the converse is vacuous
    assert r.grid_data[2]["sandwich_holds"] is False


# -- two-variable equivalence


def test_thm31_strict_scalar_case():
    r = tl.verify_theorem31(ka.power(0.5), ka.geometric(), -np.eye(2), np.eye(2))
    assert r.passed
    assert r.worst_slack > 0


@pytest.mark.parametrize("w, t", [(0.5, 1.0), (0.3, -1.0), (0.7, 2.0)])
def test_thm31_equality_probe(w, t):
    sigma = ka.power(w)
    r = tl.verify_theorem31(ka.logarithmic(), sigma, w * t * np.eye(2), (1 - w) * t * np.eye(2))
    assert r.passed
    excess = [abs(row["excess"]) for row in r.grid_data]
    lams = [row["lambda"] for row in r.grid_data]
    assert all(e <= 10 * lam for e, lam in zip(excess, lams))


def test_thm31_violation_detected():
    r = tl.verify_theorem31(ka.power(0.5), ka.geometric(), np.eye(2), np.zeros((2, 2)))
    assert r.passed  # both implications hold: hypothesis and conclusion both fail
    assert r.worst_slack < -1e-12
    assert "fails" in r.notes[0]


def test_thm31_first_order_coefficient():
    sigma = ka.harmonic(0.4)
    A, B = tl.random_thm31_pair(0.4, 3, 11, satisfy=False)
    r = tl.verify_theorem31(ka.power(0.5), sigma, A, B)
    last = r.grid_data[-1]
    ratio = last["excess"] / last["first_order"]
    assert 0.5 <= ratio <= 2.0


def test_thm31_constant_rejected():
    const = ka.ReprFunction(lambda t: np.ones_like(np.asarray(t, dtype=float)), 0.0, "one")
    with pytest.raises(ValueError):
        tl.verify_theorem31(const, ka.geometric(), np.eye(2), np.eye(2))


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0.1, 0.9), st.booleans())
def test_thm31_random_instances(seed, w, satisfy):
    A, B = tl.random_thm31_pair(w, 3, seed, satisfy)
    assert loewner_leq((1 - w) * A, w * B, 1e-9) == satisfy
    r = tl.verify_theorem31(ka.power(0.5), ka.power(w), A, B)
    assert r.passed
    assert (r.worst_slack >= -1e-10) == satisfy


# -- converse


def test_converse_matching_derivative():
    r = tl.verify_prop_converse(ka.power(0.4), 0.4)
    assert r.passed and r.witness is None


def test_converse_mismatch_finds_witness():
    r = tl.verify_prop_converse(ka.power(0.5), 0.3)
    assert r.passed
    assert r.witness["excess"] > 1e-12
    assert abs(abs(r.witness["t"]) - 1) <= 1.0


def test_converse_arithmetic():
    assert tl.verify_prop_converse(ka.arithmetic(0.3), 0.3).passed


# -- limit formulas


def test_limits_zero_matrix_exact():
    B, C = random_spd_tuple(2, 2, cond=4, seed=1)
    r = tl.verify_limit_formulas(ka.power(0.5), np.zeros((2, 2)), B, C, 0.5)
    assert all(row["error_f_limit"] <= 1e-14 for row in r.grid_data)


def test_limits_scalar_power():
    # (1 + 2 lam)^(1/(2 lam)) -> e
    r = tl.verify_limit_formulas(ka.power(0.5), 2 * np.eye(1), np.eye(1), np.eye(1), 0.5)
    assert r.passed
    errs = [row["error_f_limit"] for row in r.grid_data]
    assert errs[-1] <= 1e-5 and errs[-1] < errs[0]


def test_limits_random():
    rng = np.random.default_rng(3)
    A = random_sym(3, rng)
    B, C = random_spd_tuple(3, 2, cond=4, seed=rng)
    assert tl.verify_limit_formulas(ka.logarithmic(), A, B, C, 0.3).passed


# -- extension theorem

FUNCTIONALS = ["power:-1", "power:-0.5", "power:0.5", "power:1", "norm-product", "bmp", "alm", "log-euclidean"]


@pytest.mark.parametrize("label", FUNCTIONALS)
def test_extension_negative_identity(label):
    phi = tl.Functional.parse(label)
    T = [-np.eye(2), -np.eye(2)]
    r = tl.verify_extension_theorem(phi, ka.power(0.5), T, None, sandwich_trials=1, x_samples=8)
    assert r.passed
    assert all(row["max_excess"] <= 1e-10 for row in r.grid_data)


def test_extension_norm_product_exceeds_one():
    T = [np.eye(2), -np.eye(2)]
    r = tl.verify_extension_theorem(tl.Functional("norm-product"), ka.power(0.5), T, [0.9, 0.1], sandwich_trials=1)
    assert r.passed
    lam = r.grid_data[-1]["lambda"]
    expected = (1 + lam) ** 0.45 * (1 - lam) ** 0.05 - 1
    assert r.grid_data[-1]["max_excess"] == pytest.approx(expected, rel=1e-8)
    assert expected > 0


def test_extension_boundary_case():
    rng = np.random.default_rng(2)
    T1 = random_sym(3, rng)
    r = tl.verify_extension_theorem(tl.Functional("bmp"), ka.power(0.5), [T1, -T1], [0.5, 0.5], sandwich_trials=1)
    assert r.passed
    assert "boundary" in r.notes[0]
    assert r.worst_slack >= -1e-9


def test_extension_log_karcher_small():
    T = tl.random_hermitian_tuple(2, 2, None, 5, "positive")
    phi = tl.Functional("log-karcher", level=4)
    r = tl.verify_extension_theorem(phi, ka.power(0.5), T, None, sandwich_trials=1, x_samples=8)
    assert r.passed
    assert r.worst_slack < 0


def test_extension_uniform_only():
    T = tl.random_hermitian_tuple(3, 2, [0.2, 0.3, 0.5], 1)
    with pytest.raises(ValueError):
        tl.verify_extension_theorem(tl.Functional("alm"), ka.power(0.5), T, [0.2, 0.3, 0.5])


def test_functional_parse_errors():
    with pytest.raises(ValueError):
        tl.Functional.parse("trace")
    with pytest.raises(ValueError):
        tl.Functional.parse("power:3")


@pytest.mark.parametrize("mode, sign", [("negative", -1), ("boundary", 0), ("positive", 1)])
def test_random_hermitian_tuple_modes(mode, sign):
    w = np.array([0.2, 0.3, 0.5])
    T = tl.random_hermitian_tuple(3, 3, w, 4, mode)
    top = np.linalg.eigvalsh(sum(wk * t for wk, t in zip(w, T)))[-1]
    if sign < 0:
        assert top < 0
    elif sign == 0:
        assert abs(top) <= 1e-12
    else:
        assert top >= 0.1


# -- auxiliary inequalities


def test_y2013_commuting_eigenvector_is_tight():
    mats = [np.diag([1.0, 3.0]), np.diag([4.0, 2.0]), np.diag([2.0, 5.0])]
    w = np.array([0.2, 0.3, 0.5])
    L = karcher_mean(w, mats)
    x = np.array([1.0, 0.0])
    lhs = np.prod([(x @ a @ x) ** wk for a, wk in zip(mats, w)])
    assert lhs == pytest.approx(x @ L @ x, rel=1e-12)


def test_y2013_f1997_random():
    r = tl.verify_y2013_and_f1997(samples=30, seed=1)
    assert r.passed
    assert r.worst_slack >= -1e-9


# -- log-Euclidean counterexample search


def test_p4search_dim_one_inconclusive():
    r = tl.search_p4_violation_log_euclidean(100, dim=1)
    assert r.inconclusive and "by construction" in r.notes[0]


def test_p4search_commuting_finds_nothing():
    r = tl.search_p4_violation_log_euclidean(5000, seed=42, commuting=True)
    assert r.inconclusive and not r.passed


def test_p4search_finds_stored_witness():
    from opmeans._witnesses import LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B

    r = tl.search_p4_violation_log_euclidean(10 ** 6, seed=42, dim=2)
    assert r.passed
    for got, want in zip(r.witness["A"] + r.witness["B"], LOG_EUCLIDEAN_P4_A + LOG_EUCLIDEAN_P4_B):
        np.testing.assert_array_equal(got, want)


def test_independent_oracle_confirms_witness():
    import scipy.linalg as sla

    from opmeans._witnesses import LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B

    def ge(mats):
        return sla.expm(sum(0.5 * sla.logm(m).real for m in mats))

    for a, b in zip(LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B):
        assert np.linalg.eigvalsh(b - a)[0] >= 0
    assert np.linalg.eigvalsh(ge(LOG_EUCLIDEAN_P4_B) - ge(LOG_EUCLIDEAN_P4_A))[0] < -1.0


def test_sandwich_precheck_geometric_forms():
    rng = np.random.default_rng(0)
    for label in ("norm-product", "bmp", "log-euclidean"):
        lo, hi = tl._sandwich_precheck(tl.Functional.parse(label), 3, 3, None, 3, 32, rng)
        assert lo >= -1e-10 and hi >= -1e-10


def test_reports_reproducible_from_seed():
    a = tl.verify_y2013_and_f1997(samples=5, seed=9).to_json()
    b = tl.verify_y2013_and_f1997(samples=5, seed=9).to_json()
    assert a == b
