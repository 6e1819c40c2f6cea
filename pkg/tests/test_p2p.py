import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbclab.coding import channel_output, hn_constants, sup_on_grid
from pbclab.entropy import mutual_information, mutual_information_variance
from pbclab.hyptest import helstrom_error, hyp_test_mutual_info, inverse_normal_cdf
from pbclab.operators import DensityOperator
from pbclab.p2p import (
    P2PCodeSpec,
    capacity_upper_eps_MI,
    check_marginal_prod_lemma,
    error_exponent_lower,
    one_shot_capacity_lower,
    one_shot_error_bound,
    second_order_rate,
    simulate_p2p,
)
from pbclab.states import (
    depolarizing_channel,
    identity_channel,
    phi_plus,
    random_channel,
    random_density,
    random_pure_state,
)


def _reorder(m, dims, order):
    """Tensor factors of ``m`` (listed in ``dims``) rearranged so new factor k is old ``order[k]``."""
    n = len(dims)
    t = m.reshape(list(dims) * 2)
    t = np.transpose(t, list(order) + [n + i for i in order])
    d = m.shape[0]
    return t.reshape(d, d)


def srm_error_two_messages(omega, r, d_b):
    """Square-root-measurement error for M = 2, built without the library's layout helpers."""
    theta_r = np.einsum("ibjb->ij", omega.reshape(r, d_b, r, d_b))
    # Default test {omega - M theta_R x N(theta_A) >= 0}.
    n_a = np.einsum("ibic->bc", omega.reshape(r, d_b, r, d_b))
    w, v = np.linalg.eigh(omega - 2 * np.kron(theta_r, n_a))
    test = (v[:, w >= 0]) @ v[:, w >= 0].conj().T
    dims = [r, d_b, r]
    # Slot order [R1, R2, B]: message 1 puts omega on (R1, B), message 2 on (R2, B).
    rho1 = _reorder(np.kron(omega, theta_r), dims, [0, 2, 1])
    rho2 = _reorder(np.kron(theta_r, omega), [r, r, d_b], [1, 0, 2])
    g1 = _reorder(np.kron(test, np.eye(r)), dims, [0, 2, 1])
    g2 = _reorder(np.kron(np.eye(r), test), [r, r, d_b], [1, 0, 2])
    s = g1 + g2
    w, v = np.linalg.eigh(s)
    inv = np.where(w > 1e-12 * w.max(), 1 / np.sqrt(np.clip(w, 1e-300, None)), 0.0)
    root = (v * inv) @ v.conj().T
    succ = np.real(np.trace(root @ g1 @ root @ rho1) + np.trace(root @ g2 @ root @ rho2)) / 2
    return 1 - succ, rho1, rho2


def test_simulation_matches_independent_srm():
    rng = np.random.default_rng(51)
    theta = random_density(4, rng, dims=(2, 2))
    ch = random_channel(2, 2, rng)
    spec = P2PCodeSpec(theta, ch, 2)
    perf = simulate_p2p(spec)
    omega, _ = channel_output([theta], ch)
    err, _, _ = srm_error_two_messages(omega, 2, 2)
    assert perf.exact_error == pytest.approx(err, abs=1e-12)
    assert perf.message_spread < 1e-10


def test_noiseless_two_messages_closed_form():
    # Phi+ through the identity: the two code states have overlap forcing error (2 - sqrt 3) / 4.
    spec = P2PCodeSpec(phi_plus(2), identity_channel(2), 2)
    perf = simulate_p2p(spec)
    assert perf.exact_error == pytest.approx((2 - math.sqrt(3)) / 4, abs=1e-12)
    omega, _ = channel_output([phi_plus(2)], identity_channel(2))
    _, rho1, rho2 = srm_error_two_messages(omega, 2, 2)
    # No decoder beats the Helstrom error for the two equiprobable code states.
    assert helstrom_error(rho1 / 2, rho2 / 2).value > 0.01


@pytest.mark.parametrize("d", [3, 4])
def test_noiseless_bound_closed_form(d):
    # The default test keeps all of omega and overlaps the product state in 1/d^2.
    for m in (2, 3):
        for c in (0.5, 1.0, 2.0):
            perf = simulate_p2p(P2PCodeSpec(phi_plus(d), identity_channel(d), m, c=c))
            assert perf.bound == pytest.approx((2 + c + 1 / c) * (m - 1) / d**2, abs=1e-12)
            assert perf.exact_error <= perf.bound


def test_single_message_error_is_abstain_weight():
    rng = np.random.default_rng(52)
    theta, ch = random_density(4, rng, dims=(2, 2)), random_channel(2, 2, rng)
    perf = simulate_p2p(P2PCodeSpec(theta, ch, 1))
    omega, _ = channel_output([theta], ch)
    # With one message the decoder is the support projector of T; the rest abstains.
    assert perf.exact_error == pytest.approx(1 - np.real(np.trace(perf.test @ omega)), abs=1e-12)
    assert perf.exact_error == pytest.approx(perf.abstain_weight, abs=1e-12)
    assert simulate_p2p(P2PCodeSpec(theta, ch, 1, test=np.eye(4))).exact_error == pytest.approx(0, abs=1e-12)


def test_hn_constants():
    assert hn_constants(1.0) == (2.0, 4.0)
    with pytest.raises(ValueError):
        hn_constants(0.0)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 4), c=st.sampled_from([0.5, 1.0, 2.0]))
def test_exact_error_below_bound(seed, m, c):
    rng = np.random.default_rng(seed)
    theta = random_pure_state(4, rng, dims=(2, 2))
    spec = P2PCodeSpec(theta, random_channel(2, 2, rng), m, c=c)
    perf = simulate_p2p(spec)
    assert perf.exact_error <= perf.bound + 1e-9
    assert perf.bound == pytest.approx(one_shot_error_bound(spec), abs=1e-12)


def test_error_exponent_one_shot_offsets_iid():
    rng = np.random.default_rng(53)
    theta = random_pure_state(4, rng, dims=(2, 2))
    ch = depolarizing_channel(2, 0.1)
    one = error_exponent_lower(theta, ch, M=4)
    iid = error_exponent_lower(theta, ch, rate=2.0, iid=True)
    assert one.value == pytest.approx(iid.value - 2, abs=1e-12)


def test_error_exponent_vanishes_above_mutual_information():
    ch = depolarizing_channel(2, 0.3)
    omega, dims = channel_output([phi_plus(2)], ch)
    i = mutual_information(DensityOperator(omega, tuple(dims)))
    above = error_exponent_lower(phi_plus(2), ch, rate=i + 0.1, iid=True)
    below = error_exponent_lower(phi_plus(2), ch, rate=i - 0.3, iid=True)
    assert above.value == pytest.approx(0, abs=1e-12)
    assert below.value > 0


def test_sup_on_grid_refines_concave_maximum():
    value, arg, unimodal = sup_on_grid(lambda s: -(s - 0.37) ** 2, np.linspace(0, 1, 21))
    assert unimodal and arg == pytest.approx(0.37, abs=1e-6) and value == pytest.approx(0, abs=1e-12)
    _, _, uni = sup_on_grid(lambda s: math.cos(20 * s), np.linspace(0, 1, 21))
    assert not uni


def test_second_order_and_capacity_formulas():
    ch = depolarizing_channel(2, 0.2)
    omega, dims = channel_output([phi_plus(2)], ch)
    rho = DensityOperator(omega, tuple(dims))
    i, v = mutual_information(rho), mutual_information_variance(rho)
    n, eps = 100, 0.1
    assert second_order_rate(phi_plus(2), ch, n, eps) == pytest.approx(
        n * i + math.sqrt(n * v) * inverse_normal_cdf(eps), abs=1e-10
    )
    lower = one_shot_capacity_lower(phi_plus(2), ch, 0.2, 0.05)
    assert lower == pytest.approx(hyp_test_mutual_info(rho, 0.15).value - math.log2(4 * 0.2 / 0.05**2), abs=1e-10)
    with pytest.raises(ValueError):
        one_shot_capacity_lower(phi_plus(2), ch, 0.1, 0.2)


def test_capacity_upper_starts_at_maximally_entangled():
    eps = 0.1
    res = capacity_upper_eps_MI(identity_channel(2), eps, restarts=2, max_iter=12)
    # Phi+ with sigma = I/2: beta = (1 - eps) / 4.
    assert res.start_value == pytest.approx(2 - math.log2(1 - eps), abs=1e-6)
    assert res.value >= res.start_value - 1e-12
    assert res.value <= 2 - math.log2(1 - eps) + 1e-6


def test_marginal_product_check_on_product_state():
    rng = np.random.default_rng(54)
    rho_ab = random_density(4, rng).matrix
    rho_c = random_density(2, rng).matrix
    # Order (A, B, C) with rho_AC = rho_A x rho_C.
    m = np.kron(rho_ab, rho_c)
    chk = check_marginal_prod_lemma(DensityOperator(m, (2, 2, 2)), 0.2)
    assert chk.holds and chk.converged


def test_marginal_product_check_requires_product():
    rng = np.random.default_rng(55)
    with pytest.raises(ValueError):
        check_marginal_prod_lemma(random_density(8, rng, dims=(2, 2, 2)), 0.2)


def test_spec_validation():
    with pytest.raises(ValueError):
        P2PCodeSpec(random_density(2, np.random.default_rng(0)), identity_channel(2), 2)
    with pytest.raises(ValueError):
        P2PCodeSpec(phi_plus(2), identity_channel(2), 0)


def test_reorder_helper_swaps_factors():
    rng = np.random.default_rng(56)
    a, b = random_density(2, rng).matrix, random_density(3, rng).matrix
    np.testing.assert_allclose(_reorder(np.kron(a, b), [2, 3], [1, 0]), np.kron(b, a), atol=1e-14)
