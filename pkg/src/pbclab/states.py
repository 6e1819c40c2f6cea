"""Standard states and channels, plus seeded random generators."""

from __future__ import annotations

import numpy as np

from .operators import DensityOperator, QuantumChannel


def ket_to_density(psi: np.ndarray, dims=None) -> DensityOperator:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()), dims or (psi.size,))


def phi_plus(d: int = 2) -> DensityOperator:
    """Maximally entangled state on ``d x d``."""
    psi = np.zeros(d * d, dtype=complex)
    psi[[i * d + i for i in range(d)]] = 1.0
    return ket_to_density(psi, (d, d))


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d) / d, (d,))


def basis_state(d: int, i: int) -> DensityOperator:
    m = np.zeros((d, d), dtype=complex)
    m[i, i] = 1.0
    return DensityOperator(m, (d,))


def diagonal_state(p) -> DensityOperator:
    p = np.asarray(p, dtype=float)
    return DensityOperator(np.diag(p).astype(complex), (p.size,))


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel((np.eye(d),), (d,), (d,))


def unitary_channel(u: np.ndarray) -> QuantumChannel:
    d = u.shape[0]
    return QuantumChannel((u,), (d,), (d,))


def depolarizing_channel(d: int, p: float) -> QuantumChannel:
    """``rho -> (1 - p) rho + p Tr(rho) I/d`` via the Weyl operators."""
    if not 0 <= p <= 1 + 1 / (d * d - 1):
        raise ValueError("depolarizing parameter out of range")
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    ks = []
    for a in range(d):
        for b in range(d):
            w = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            if a == 0 and b == 0:
                coef = np.sqrt(1 - p + p / (d * d))
            else:
                coef = np.sqrt(p / (d * d))
            ks.append(coef * w)
    return QuantumChannel(tuple(ks), (d,), (d,))


def replacer_channel(d_in: int, tau: np.ndarray) -> QuantumChannel:
    """``rho -> Tr(rho) tau``."""
    tau = np.asarray(tau, dtype=complex)
    w, v = np.linalg.eigh(tau)
    ks = []
    for k in range(w.size):
        if w[k] <= 0:
            continue
        for i in range(d_in):
            e = np.zeros((1, d_in))
            e[0, i] = 1.0
            ks.append(np.sqrt(w[k]) * v[:, [k]] @ e)
    return QuantumChannel(tuple(ks), (d_in,), (tau.shape[0],))


def amplitude_damping_channel(gamma: float) -> QuantumChannel:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    return QuantumChannel((k0, k1), (2,), (2,))


# Seeded generators -------------------------------------------------------


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(d: int, rng: np.random.Generator, dims=None) -> DensityOperator:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return ket_to_density(psi, dims)


def random_density(
    d: int, rng: np.random.Generator, rank: int | None = None, dims=None
) -> DensityOperator:
    """Induced-measure random state of the given rank (full rank by default)."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityOperator(m / np.real(np.trace(m)), dims or (d,))


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return scale * m / np.real(np.trace(m))


def random_diagonal_state(d: int, rng: np.random.Generator) -> DensityOperator:
    p = rng.dirichlet(np.ones(d))
    return diagonal_state(p)


def random_channel(
    d_in: int, d_out: int, rng: np.random.Generator, n_kraus: int = 2, in_dims=None, out_dims=None
) -> QuantumChannel:
    """Random CPTP map from a Haar-like isometry into ``out x env``.

    ``n_kraus`` is raised to ``ceil(d_in / d_out)`` when needed for an isometry.
    """
    n_kraus = max(n_kraus, -(-d_in // d_out))
    v = random_isometry(d_in, d_out * n_kraus, rng)
    ks = tuple(v[k::n_kraus, :] for k in range(n_kraus))
    return QuantumChannel(ks, tuple(in_dims or (d_in,)), tuple(out_dims or (d_out,)))
