import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import fractional_matrix_power, logm
from scipy.optimize import minimize_scalar
from scipy.stats import entropy as shannon

from pbclab.entropy import (
    chernoff_distance,
    collision_conditional_entropy,
    conditional_entropy,
    mutual_information,
    mutual_information_variance,
    relative_entropy,
    relative_entropy_variance,
    renyi2_entropy,
    renyi_mutual_information,
    renyi_relative_entropy,
    sandwiched_renyi_relative_entropy,
    von_neumann_entropy,
)
from pbclab.operators import DensityOperator
from pbclab.states import diagonal_state, maximally_mixed, phi_plus, random_channel, random_density

seeds = st.integers(0, 2**32 - 1)


def _mpow(a, s):
    return fractional_matrix_power(a, s)


def test_phi_plus_entropies():
    rho = phi_plus(2)
    assert von_neumann_entropy(rho) == pytest.approx(0, abs=1e-12)
    assert renyi2_entropy(rho) == pytest.approx(0, abs=1e-12)
    assert mutual_information(rho) == pytest.approx(2, abs=1e-12)
    assert conditional_entropy(rho) == pytest.approx(-1, abs=1e-12)
    assert collision_conditional_entropy(rho) == pytest.approx(-1, abs=1e-12)


def test_diagonal_entropy_is_shannon():
    p = np.array([0.5, 0.25, 0.125, 0.125])
    assert von_neumann_entropy(diagonal_state(p)) == pytest.approx(shannon(p, base=2), abs=1e-13)
    assert renyi2_entropy(diagonal_state(p)) == pytest.approx(-math.log2(np.sum(p**2)), abs=1e-13)


def test_relative_entropy_matches_matrix_log():
    rng = np.random.default_rng(21)
    for _ in range(10):
        r, s = random_density(3, rng).matrix, random_density(3, rng).matrix
        ref = np.real(np.trace(r @ (logm(r) - logm(s)))) / math.log(2)
        assert relative_entropy(r, s).value == pytest.approx(ref, abs=1e-9)


def test_petz_and_sandwiched_match_fractional_powers():
    rng = np.random.default_rng(22)
    r, s = random_density(3, rng).matrix, random_density(3, rng).matrix
    for alpha in (0.3, 0.7, 1.5, 2.5):
        petz = math.log2(np.real(np.trace(_mpow(r, alpha) @ _mpow(s, 1 - alpha)))) / (alpha - 1)
        g = _mpow(s, (1 - alpha) / (2 * alpha))
        sand = math.log2(np.real(np.trace(_mpow(g @ r @ g, alpha)))) / (alpha - 1)
        assert renyi_relative_entropy(r, s, alpha).value == pytest.approx(petz, abs=1e-9)
        assert sandwiched_renyi_relative_entropy(r, s, alpha).value == pytest.approx(sand, abs=1e-9)


def test_commuting_divergences_are_classical():
    p, q = np.array([0.6, 0.3, 0.1]), np.array([0.2, 0.5, 0.3])
    for alpha in (0.5, 2.0):
        ref = math.log2(np.sum(p**alpha * q ** (1 - alpha))) / (alpha - 1)
        assert renyi_relative_entropy(np.diag(p), np.diag(q), alpha).value == pytest.approx(ref, abs=1e-12)
        assert sandwiched_renyi_relative_entropy(np.diag(p), np.diag(q), alpha).value == pytest.approx(ref, abs=1e-12)
    llr = np.log2(p / q)
    assert relative_entropy(np.diag(p), np.diag(q)).value == pytest.approx(np.sum(p * llr), abs=1e-13)
    v = np.sum(p * llr**2) - np.sum(p * llr) ** 2
    assert relative_entropy_variance(np.diag(p), np.diag(q)) == pytest.approx(v, abs=1e-12)


def test_support_violation_gives_inf():
    d = relative_entropy(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]))
    assert d.value == math.inf and d.support_violation
    assert renyi_relative_entropy(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]), 2.0).value == math.inf
    # Petz alpha < 1 stays finite when the supports overlap.
    assert math.isfinite(renyi_relative_entropy(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]), 0.5).value)


def test_petz_order_zero_is_minus_log_support_overlap():
    r, s = np.diag([0.7, 0.3, 0.0]), np.diag([0.2, 0.2, 0.6])
    assert renyi_relative_entropy(r, s, 0.0).value == pytest.approx(-math.log2(0.4), abs=1e-12)


def test_alpha_one_is_rejected():
    with pytest.raises(ValueError):
        renyi_relative_entropy(np.eye(2) / 2, np.eye(2) / 2, 1.0)


def test_collision_conditional_entropy_reference():
    rng = np.random.default_rng(23)
    rho = random_density(6, rng, dims=(2, 3))
    r = rho.matrix
    rb = np.einsum("ajak->jk", r.reshape(2, 3, 2, 3))
    x = r @ np.kron(np.eye(2), _mpow(rb, -0.5))
    assert collision_conditional_entropy(rho) == pytest.approx(-math.log2(np.real(np.trace(x @ x))), abs=1e-10)
    assert collision_conditional_entropy(rho, [0], []) == pytest.approx(renyi2_entropy(rho, [0]), abs=1e-12)


def test_chernoff_classical_oracle():
    p, q = np.array([0.7, 0.2, 0.1]), np.array([0.1, 0.3, 0.6])
    res = minimize_scalar(lambda s: math.log2(np.sum(p**s * q ** (1 - s))), bounds=(0, 1), method="bounded",
                          options={"xatol": 1e-12})
    c = chernoff_distance(np.diag(p), np.diag(q))
    assert c.value == pytest.approx(-res.fun, abs=1e-10)
    assert c.s_opt == pytest.approx(res.x, abs=1e-5)
    assert c.convex


def test_chernoff_orthogonal_is_infinite():
    assert chernoff_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).value == math.inf


def test_mutual_information_variance_of_product_is_zero():
    rng = np.random.default_rng(4)
    rho = DensityOperator(np.kron(random_density(2, rng).matrix, random_density(3, rng).matrix), (2, 3))
    assert mutual_information(rho) == pytest.approx(0, abs=1e-12)
    assert mutual_information_variance(rho) == pytest.approx(0, abs=1e-10)
    assert renyi_mutual_information(rho, 0.5) == pytest.approx(0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, alpha=st.floats(0.05, 0.95))
def test_data_processing(seed, alpha):
    rng = np.random.default_rng(seed)
    r, s = random_density(3, rng), random_density(3, rng)
    ch = random_channel(3, 2, rng)
    assert relative_entropy(ch(r), ch(s)).value <= relative_entropy(r, s).value + 1e-9
    assert renyi_relative_entropy(ch(r), ch(s), alpha).value <= renyi_relative_entropy(r, s, alpha).value + 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_renyi_monotone_and_sandwiched_below_petz(seed):
    rng = np.random.default_rng(seed)
    r, s = random_density(3, rng), random_density(3, rng)
    alphas = [0.5, 0.8, 1.2, 2.0]
    petz = [renyi_relative_entropy(r, s, a).value for a in alphas]
    sand = [sandwiched_renyi_relative_entropy(r, s, a).value for a in alphas]
    d = relative_entropy(r, s).value
    assert np.all(np.diff(petz) >= -1e-10)
    assert petz[1] <= d + 1e-10 <= petz[2] + 2e-10
    assert all(x <= y + 1e-10 for x, y in zip(sand, petz))


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_mutual_information_bounds(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(6, rng, dims=(2, 3), rank=int(rng.integers(1, 7)))
    i = mutual_information(rho)
    assert -1e-10 <= i <= 2 * math.log2(2) + 1e-10
    h = von_neumann_entropy(rho, [0]) + von_neumann_entropy(rho, [1]) - von_neumann_entropy(rho)
    assert i == pytest.approx(h, abs=1e-9)
    # H_2(A|B) <= H(A|B).
    assert collision_conditional_entropy(rho) <= conditional_entropy(rho) + 1e-9


def test_maximally_mixed_entropy():
    assert von_neumann_entropy(maximally_mixed(5)) == pytest.approx(math.log2(5), abs=1e-12)
