"""Operator types and the basic operations on them.

:class:`HermitianOperator` carries a dense matrix together with its
subsystem dimensions. Most functions in the package also accept plain
arrays, which are treated as a single subsystem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Sequence, Union

import numpy as np

from . import linalg as la


class BudgetError(ValueError):
    """Raised when a dense computation would exceed its dimension budget."""


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix on ``H_{d_1} x ... x H_{d_k}``."""

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if prod(dims) != m.shape[0] or any(d < 1 for d in dims):
            raise ValueError(f"dims {dims} do not match matrix size {m.shape[0]}")
        scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
        if np.max(np.abs(m - m.conj().T), initial=0.0) > la.TOL_HERM * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        m = la.hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_systems(self) -> int:
        return len(self.dims)

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and eigenvectors."""
        return np.linalg.eigh(self.matrix)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def _wrap(self, m: np.ndarray) -> HermitianOperator:
        return HermitianOperator(m, self.dims)

    def __add__(self, other):
        return self._wrap(self.matrix + as_matrix(other))

    def __sub__(self, other):
        return self._wrap(self.matrix - as_matrix(other))

    def __mul__(self, scalar: float):
        return self._wrap(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims})"


@dataclass(frozen=True, eq=False, repr=False)
class DensityOperator(HermitianOperator):
    """PSD operator with trace in ``(0, 1]``; small negative eigenvalues are clipped."""

    def __post_init__(self):
        super().__post_init__()
        w, v = np.linalg.eigh(self.matrix)
        if w.size and w[0] < -la.TOL_PSD:
            raise ValueError(f"operator is not PSD (min eigenvalue {w[0]:.3e})")
        tr = float(np.sum(w))
        if not (tr > la.TOL_TRACE and tr <= 1 + la.TOL_TRACE):
            raise ValueError(f"trace {tr} outside (0, 1]")
        if w.size and w[0] < 0:
            m = (v * np.clip(w, 0, None)) @ v.conj().T
            m = la.hermitize(m)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    def _wrap(self, m: np.ndarray) -> HermitianOperator:
        return HermitianOperator(m, self.dims)


Operand = Union[HermitianOperator, np.ndarray, Sequence]


def as_matrix(x: Operand) -> np.ndarray:
    if isinstance(x, HermitianOperator):
        return x.matrix
    return np.asarray(x, dtype=complex)


def dims_of(x: Operand) -> tuple[int, ...]:
    if isinstance(x, HermitianOperator):
        return x.dims
    return (np.asarray(x).shape[0],)


def as_operator(x: Operand, dims: Sequence[int] | None = None) -> HermitianOperator:
    if isinstance(x, HermitianOperator) and dims is None:
        return x
    return HermitianOperator(as_matrix(x), tuple(dims) if dims else dims_of(x))


def as_density(x: Operand, dims: Sequence[int] | None = None) -> DensityOperator:
    if isinstance(x, DensityOperator) and dims is None:
        return x
    return DensityOperator(as_matrix(x), tuple(dims) if dims else dims_of(x))


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by Kraus operators ``K_i : H_in -> H_out``."""

    kraus: tuple[np.ndarray, ...]
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]

    def __post_init__(self):
        ks = np.array([np.asarray(k, dtype=complex) for k in self.kraus])
        if ks.ndim != 3 or ks.shape[0] == 0:
            raise ValueError("kraus must be a non-empty list of matrices")
        in_dims = tuple(int(d) for d in self.in_dims)
        out_dims = tuple(int(d) for d in self.out_dims)
        if ks.shape[1:] != (prod(out_dims), prod(in_dims)):
            raise ValueError(
                f"Kraus shape {ks.shape[1:]} does not match out_dims {out_dims} / in_dims {in_dims}"
            )
        gram = np.einsum("koi,koj->ij", ks.conj(), ks)
        if np.max(np.abs(gram - np.eye(gram.shape[0]))) > la.TOL_CPTP:
            raise ValueError("Kraus operators are not trace preserving within tolerance")
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)

    @property
    def d_in(self) -> int:
        return prod(self.in_dims)

    @property
    def d_out(self) -> int:
        return prod(self.out_dims)

    def __call__(self, rho: Operand, on: Sequence[int] | None = None) -> HermitianOperator:
        return apply_channel(self, rho, on)

    def tensor(self, other: QuantumChannel) -> QuantumChannel:
        ks = [np.kron(a, b) for a in self.kraus for b in other.kraus]
        return QuantumChannel(tuple(ks), self.in_dims + other.in_dims, self.out_dims + other.out_dims)

    def power(self, n: int) -> QuantumChannel:
        out = self
        for _ in range(n - 1):
            out = out.tensor(self)
        return out

    def choi(self) -> np.ndarray:
        """Unnormalized Choi matrix on ``in x out``."""
        d = self.d_in
        omega = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                omega[i * d + i, j * d + j] = 1.0
        mat, _ = la.apply_kraus(omega, [d, d], self.kraus, [1], [self.d_out])
        return mat


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement elements with an explicit abstain outcome ``I - sum(elements)``."""

    elements: tuple[np.ndarray, ...]
    abstain: np.ndarray = field(default=None)

    def __post_init__(self):
        els = tuple(la.hermitize(np.asarray(e, dtype=complex)) for e in self.elements)
        d = els[0].shape[0]
        rest = np.eye(d) - sum(els)
        if np.linalg.eigvalsh(rest)[0] < -1e-8:
            raise ValueError("POVM elements sum to more than the identity")
        if any(np.linalg.eigvalsh(e)[0] < -1e-8 for e in els):
            raise ValueError("POVM element is not PSD")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "abstain", rest)


@dataclass(frozen=True, eq=False)
class BinaryTest:
    """Test operator ``0 <= T <= I`` with optional Neyman-Pearson parameters."""

    operator: np.ndarray
    mu: float | None = None
    t: float | None = None


def tensor(*ops: Operand) -> HermitianOperator:
    if len(ops) == 1 and isinstance(ops[0], (list, tuple)) and not isinstance(ops[0], np.ndarray):
        ops = tuple(ops[0])
    dims: tuple[int, ...] = ()
    for o in ops:
        dims += dims_of(o)
    return HermitianOperator(la.kron_all([as_matrix(o) for o in ops]), dims)


def tensor_power(op: Operand, n: int) -> HermitianOperator:
    return tensor(*([op] * n))


def partial_trace(op: Operand, keep: Sequence[int]) -> HermitianOperator:
    dims = dims_of(op)
    keep = sorted(set(keep))
    m = la.partial_trace(as_matrix(op), dims, keep)
    return HermitianOperator(m, tuple(dims[i] for i in keep))


def permute_systems(op: Operand, perm: Sequence[int]) -> HermitianOperator:
    dims = dims_of(op)
    m = la.permute(as_matrix(op), dims, perm)
    return HermitianOperator(m, tuple(dims[p] for p in perm))


def positive_spectral_projection(x: Operand) -> HermitianOperator:
    """Projector onto the eigenspaces of ``x`` with eigenvalue ``>= 0``."""
    return HermitianOperator(la.positive_projector(as_matrix(x)), dims_of(x))


def operator_power(x: Operand, s: float) -> HermitianOperator:
    """Pseudo-power of a PSD operator; kernel eigenvalues stay zero."""
    return HermitianOperator(la.psd_power(as_matrix(x), s), dims_of(x))


def trace_norm(x: Operand) -> float:
    return la.trace_norm(as_matrix(x))


def fidelity(rho: Operand, sigma: Operand) -> float:
    """``F = ||sqrt(rho) sqrt(sigma)||_1^2``."""
    a = la.psd_power(as_matrix(rho), 0.5) @ la.psd_power(as_matrix(sigma), 0.5)
    return float(np.sum(np.linalg.svd(a, compute_uv=False)) ** 2)


def apply_channel(
    channel: QuantumChannel, rho: Operand, on: Sequence[int] | None = None
) -> HermitianOperator:
    """Apply ``channel`` to the subsystems ``on`` of ``rho``.

    ``on`` defaults to every subsystem. The channel input dimension must equal
    the product of the selected dimensions. Output systems take the slot of
    the last selected subsystem.
    """
    dims = list(dims_of(rho))
    on = list(range(len(dims))) if on is None else list(on)
    if len(set(on)) != len(on) or any(i < 0 or i >= len(dims) for i in on):
        raise ValueError(f"invalid subsystem selection {on}")
    if prod(dims[i] for i in on) != channel.d_in:
        raise ValueError(
            f"channel input dimension {channel.d_in} does not match subsystems {on} of {dims}"
        )
    m, new_dims = la.apply_kraus(as_matrix(rho), dims, channel.kraus, on, channel.out_dims)
    return HermitianOperator(m, tuple(new_dims))


def check_budget(dim: int, budget: int, what: str = "dimension") -> None:
    if dim > budget:
        raise BudgetError(f"{what} {dim} exceeds budget {budget}")
