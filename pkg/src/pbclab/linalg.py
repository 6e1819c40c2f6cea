"""Array-level kernels for Hermitian matrices on tensor-product spaces.

Everything here works on plain ``numpy`` arrays. Subsystem layouts are
passed explicitly as a ``dims`` sequence; subsystem ``i`` is the ``i``-th
tensor factor in row-major (Kronecker) order.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

import numpy as np

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-10
TOL_CPTP = 1e-10
# Eigenvalues at or below EIG_REL * max|eig| are treated as zero.
EIG_REL = 1e-12
# Eigenvalues below LOG_CLIP are dropped before taking logarithms.
LOG_CLIP = 1e-14


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def eig_cutoff(w: np.ndarray) -> float:
    """Absolute zero-threshold for a spectrum ``w``."""
    if w.size == 0:
        return 0.0
    return EIG_REL * float(np.max(np.abs(w)))


def psd_power(a: np.ndarray, s: float) -> np.ndarray:
    """Pseudo-power of a PSD matrix.

    Eigenvalues at or below the relative cutoff are treated as the kernel
    and map to zero for every exponent, so ``s = 0`` gives the support
    projector and negative ``s`` gives a pseudo-inverse power.
    """
    w, v = np.linalg.eigh(hermitize(a))
    keep = w > eig_cutoff(w)
    wp = np.zeros_like(w)
    wp[keep] = 1.0 if s == 0 else w[keep] ** s
    return (v * wp) @ v.conj().T


def psd_log2(a: np.ndarray) -> np.ndarray:
    """Base-2 logarithm on the support, zero on the kernel."""
    w, v = np.linalg.eigh(hermitize(a))
    keep = w > max(eig_cutoff(w), LOG_CLIP)
    wl = np.zeros_like(w)
    wl[keep] = np.log2(w[keep])
    return (v * wl) @ v.conj().T


def support_projector(a: np.ndarray) -> np.ndarray:
    return psd_power(a, 0.0)


def positive_projector(x: np.ndarray, strict: bool = False) -> np.ndarray:
    """Projector onto ``{X >= 0}`` (kernel included) or ``{X > 0}``."""
    w, v = np.linalg.eigh(hermitize(x))
    tau = eig_cutoff(w)
    sel = w > tau if strict else w >= -tau
    vs = v[:, sel]
    return vs @ vs.conj().T


def trace_norm(x: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(x)))))


def positive_part_trace(x: np.ndarray) -> float:
    w = np.linalg.eigvalsh(hermitize(x))
    return float(np.sum(w[w > 0]))


def commute(a: np.ndarray, b: np.ndarray, atol: float = 1e-12) -> bool:
    c = a @ b - b @ a
    return bool(np.max(np.abs(c), initial=0.0) <= atol)


def common_eigenbasis(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Unitary diagonalizing two commuting Hermitian matrices, or ``None``."""
    # A generic real combination separates joint eigenspaces.
    v = np.linalg.eigh(hermitize(a) + 0.6180339887498949 * np.pi * hermitize(b))[1]
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0)
    for m in (a, b):
        d = v.conj().T @ m @ v
        off = d - np.diag(np.diag(d))
        if np.max(np.abs(off), initial=0.0) > 1e-10 * scale:
            return None
    return v


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def permute(mat: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``k`` is old factor ``perm[k]``."""
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm {perm} is not a permutation of {n} subsystems")
    if perm == list(range(n)):
        return mat
    d = prod(dims)
    t = mat.reshape(tuple(dims) * 2)
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(d, d)


def partial_trace(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not in ``keep``; kept factors stay in ascending order."""
    n = len(dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]
    if not drop:
        return mat
    x = permute(mat, dims, keep + drop)
    dk = prod(dims[i] for i in keep)
    dt = prod(dims[i] for i in drop)
    return np.einsum("ajbj->ab", x.reshape(dk, dt, dk, dt))


def embed(op: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Extend ``op`` (acting on ``targets`` in the given order) by identities."""
    n = len(dims)
    targets = list(targets)
    rest = [i for i in range(n) if i not in targets]
    drest = prod(dims[i] for i in rest)
    full = np.kron(op, np.eye(drest))
    order = targets + rest
    # ``full`` is laid out as ``order``; send it back to 0..n-1.
    inv = [order.index(i) for i in range(n)]
    return permute(full, [dims[i] for i in order], inv)


def apply_kraus(
    mat: np.ndarray,
    dims: Sequence[int],
    kraus: np.ndarray,
    on: Sequence[int],
    out_dims: Sequence[int],
) -> tuple[np.ndarray, list[int]]:
    """Apply a Kraus map to the subsystems ``on``.

    The output block takes the slot of the last acted-on subsystem, so a
    contiguous ``on`` is replaced in place. Returns the matrix and its dims.
    """
    n = len(dims)
    on = list(on)
    rest = [i for i in range(n) if i not in on]
    x = permute(mat, dims, rest + on)
    dr = prod(dims[i] for i in rest)
    di = prod(dims[i] for i in on)
    do = prod(out_dims)
    k = np.asarray(kraus)
    x = x.reshape(dr, di, dr, di)
    y = np.einsum("koi,aibj,kpj->aobp", k, x, k.conj(), optimize=True)
    y = y.reshape(dr * do, dr * do)
    pos = sum(1 for i in rest if i < max(on))
    rest_dims = [dims[i] for i in rest]
    n_out = len(out_dims)
    cur_dims = rest_dims + list(out_dims)
    n_rest = len(rest)
    order = list(range(pos)) + [n_rest + j for j in range(n_out)] + list(range(pos, n_rest))
    y = permute(y, cur_dims, order)
    new_dims = rest_dims[:pos] + list(out_dims) + rest_dims[pos:]
    return y, new_dims
