import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbclab import linalg as la
from pbclab.operators import (
    DensityOperator,
    HermitianOperator,
    Povm,
    QuantumChannel,
    apply_channel,
    fidelity,
    partial_trace,
    permute_systems,
    tensor,
)
from pbclab.states import (
    amplitude_damping_channel,
    depolarizing_channel,
    phi_plus,
    random_channel,
    random_density,
    random_unitary,
)


def _einsum_partial_trace(m, dims, keep):
    """Reference partial trace via an explicit index contraction."""
    n = len(dims)
    t = m.reshape(list(dims) * 2)
    letters = "abcdefghijklmnop"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    r = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep]))
    return r.reshape(d, d)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_rejects_bad_dims():
    with pytest.raises(ValueError, match="dims"):
        HermitianOperator(np.eye(4), (3, 2))


def test_density_checks_trace_and_positivity():
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        DensityOperator(np.diag([0.7, 0.7]))
    rho = DensityOperator(np.diag([1.0, -1e-12]))
    assert np.min(np.linalg.eigvalsh(rho.matrix)) >= 0


def test_matrix_is_read_only():
    op = HermitianOperator(np.eye(2))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 3


def test_channel_rejects_non_trace_preserving():
    with pytest.raises(ValueError, match="trace preserving"):
        QuantumChannel((np.eye(2) * 0.9,), (2,), (2,))


@pytest.mark.parametrize("dims,keep", [((2, 3), [0]), ((2, 3), [1]), ((2, 2, 3), [0, 2]), ((3, 2, 2), [1])])
def test_partial_trace_matches_einsum(dims, keep):
    rng = np.random.default_rng(11)
    d = int(np.prod(dims))
    rho = random_density(d, rng, dims=dims)
    got = partial_trace(rho, keep).matrix
    np.testing.assert_allclose(got, _einsum_partial_trace(rho.matrix, dims, keep), atol=1e-13)


def test_permute_swaps_tensor_factors():
    rng = np.random.default_rng(3)
    a, b = random_density(2, rng), random_density(3, rng)
    ab = tensor(a, b)
    ba = permute_systems(ab, [1, 0])
    np.testing.assert_allclose(ba.matrix, np.kron(b.matrix, a.matrix), atol=1e-14)
    assert ba.dims == (3, 2)


def test_apply_channel_on_middle_system():
    rng = np.random.default_rng(5)
    a, b, c = random_density(2, rng), random_density(2, rng), random_density(3, rng)
    ch = random_channel(2, 3, rng)
    out = apply_channel(ch, tensor(a, b, c), on=[1])
    expect = np.kron(np.kron(a.matrix, ch(b).matrix), c.matrix)
    np.testing.assert_allclose(out.matrix, expect, atol=1e-13)
    assert out.dims == (2, 3, 3)


def test_apply_channel_output_takes_last_selected_slot():
    rng = np.random.default_rng(8)
    a, b, c = (random_density(2, rng) for _ in range(3))
    ch = random_channel(4, 2, rng, in_dims=(2, 2))
    out = apply_channel(ch, tensor(a, b, c), on=[0, 2])
    # Output lands where system 2 was: order is (B, out).
    expect = np.kron(b.matrix, ch(tensor(a, c)).matrix)
    np.testing.assert_allclose(out.matrix, expect, atol=1e-13)


def test_choi_of_identity_is_unnormalized_max_entangled():
    ch = QuantumChannel((np.eye(2),), (2,), (2,))
    np.testing.assert_allclose(ch.choi(), 2 * phi_plus(2).matrix, atol=1e-14)


def test_depolarizing_full_strength_outputs_mixed():
    rng = np.random.default_rng(1)
    ch = depolarizing_channel(3, 1.0)
    np.testing.assert_allclose(ch(random_density(3, rng)).matrix, np.eye(3) / 3, atol=1e-13)


def test_amplitude_damping_fixes_ground_state():
    ch = amplitude_damping_channel(0.4)
    np.testing.assert_allclose(ch(np.diag([1.0, 0.0])).matrix, np.diag([1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(ch(np.diag([0.0, 1.0])).matrix, np.diag([0.4, 0.6]), atol=1e-14)


def test_povm_abstain_completes_identity():
    p = Povm((np.diag([0.5, 0.0]), np.diag([0.0, 0.25])))
    np.testing.assert_allclose(p.abstain, np.diag([0.5, 0.75]))
    with pytest.raises(ValueError):
        Povm((np.eye(2), np.eye(2) * 0.1))


def test_fidelity_pure_overlap():
    psi = np.array([1, 1j]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert fidelity(rho, np.diag([1.0, 0.0])) == pytest.approx(0.5, abs=1e-12)


def test_psd_power_keeps_kernel():
    a = np.diag([4.0, 0.0])
    np.testing.assert_allclose(la.psd_power(a, -0.5), np.diag([0.5, 0.0]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d_in=st.integers(1, 3), d_out=st.integers(1, 3))
def test_random_channels_are_cptp(seed, d_in, d_out):
    rng = np.random.default_rng(seed)
    ch = random_channel(d_in, d_out, rng, n_kraus=int(rng.integers(1, 4)))
    out = ch(random_density(d_in, rng)).matrix
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.min(np.linalg.eigvalsh(out)) > -1e-12
    assert np.min(np.linalg.eigvalsh(ch.choi())) > -1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_partial_trace_is_unitarily_covariant(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(6, rng, dims=(2, 3))
    u = random_unitary(2, rng)
    big = np.kron(u, np.eye(3))
    rotated = HermitianOperator(big @ rho.matrix @ big.conj().T, (2, 3))
    np.testing.assert_allclose(
        partial_trace(rotated, [0]).matrix, u @ partial_trace(rho, [0]).matrix @ u.conj().T, atol=1e-12
    )
    np.testing.assert_allclose(partial_trace(rotated, [1]).matrix, partial_trace(rho, [1]).matrix, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_trace_norm_is_sum_of_abs_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    x = random_density(4, rng).matrix - random_density(4, rng).matrix
    assert la.trace_norm(x) == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(x))), abs=1e-12)
    assert la.positive_part_trace(x) == pytest.approx(la.trace_norm(x) / 2, abs=1e-12)
