"""Entropies, Rényi divergences and the Chernoff distance (all in bits).

Subsystem groups are passed as index lists into the operator's ``dims``;
bipartite helpers default to ``a=(0,)`` and ``b=(1,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la
from .operators import Operand, as_matrix, dims_of


@dataclass(frozen=True)
class DivergenceResult:
    """Divergence value; ``support_violation`` marks a ``+inf`` caused by supports."""

    value: float
    support_violation: bool = False

    def __float__(self) -> float:
        return float(self.value)


def _spectrum(x: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(la.hermitize(x))
    return w[w > _log_floor(w)]


def _log_floor(w: np.ndarray) -> float:
    return max(la.eig_cutoff(w), la.LOG_CLIP)


def _shannon(p: np.ndarray) -> float:
    return float(-np.sum(p * np.log2(p)))


def _marginal(rho: Operand, keep: Sequence[int] | None) -> np.ndarray:
    m = as_matrix(rho)
    if keep is None:
        return m
    return la.partial_trace(m, dims_of(rho), keep)


def von_neumann_entropy(rho: Operand, keep: Sequence[int] | None = None) -> float:
    """``H(rho) = -Tr rho log2 rho`` of the marginal on ``keep``."""
    return _shannon(_spectrum(_marginal(rho, keep)))


def renyi2_entropy(rho: Operand, keep: Sequence[int] | None = None) -> float:
    """``H_2(rho) = -log2 Tr rho^2``."""
    m = _marginal(rho, keep)
    return float(-np.log2(np.real(np.trace(m @ m))))


def conditional_entropy(rho: Operand, a: Sequence[int] = (0,), b: Sequence[int] = (1,)) -> float:
    """``H(A|B) = H(AB) - H(B)``; an empty ``b`` gives ``H(A)``."""
    ab = sorted(set(a) | set(b))
    hb = von_neumann_entropy(rho, b) if len(b) else 0.0
    return von_neumann_entropy(rho, ab) - hb


def collision_conditional_entropy(
    rho: Operand, a: Sequence[int] = (0,), b: Sequence[int] = (1,)
) -> float:
    """``H_2(A|B) = -log2 Tr{rho_AB rho_B^{-1/2} rho_AB rho_B^{-1/2}}``.

    An empty ``b`` gives ``H_2(A)``. The inverse root is a pseudo-inverse.
    """
    if len(b) == 0:
        return renyi2_entropy(rho, a)
    dims = dims_of(rho)
    ab = sorted(set(a) | set(b))
    m = la.partial_trace(as_matrix(rho), dims, ab)
    sub_dims = [dims[i] for i in ab]
    b_local = [ab.index(i) for i in sorted(b)]
    rb = la.partial_trace(m, sub_dims, b_local)
    inv_sqrt = la.embed(la.psd_power(rb, -0.5), sub_dims, b_local)
    x = m @ inv_sqrt
    return float(-np.log2(np.real(np.trace(x @ x))))


def product_of_marginals(rho: Operand, groups: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Joint marginal on the union of ``groups`` and the product of group marginals.

    Both are returned in the ascending subsystem order of the union.
    """
    dims = dims_of(rho)
    m = as_matrix(rho)
    groups = [sorted(set(g)) for g in groups]
    union = sorted(set().union(*groups))
    joint = la.partial_trace(m, dims, union)
    prod_op = la.kron_all([la.partial_trace(m, dims, g) for g in groups])
    order = [i for g in groups for i in g]
    perm = [order.index(i) for i in union]
    prod_op = la.permute(prod_op, [dims[i] for i in order], perm)
    return joint, prod_op


# Divergences ------------------------------------------------------------


class _PairSpectra:
    """Eigen-data of ``(rho, sigma)`` for traces of the form ``Tr f(rho) g(sigma)``."""

    def __init__(self, rho: np.ndarray, sigma: np.ndarray):
        r, u = np.linalg.eigh(la.hermitize(rho))
        s, v = np.linalg.eigh(la.hermitize(sigma))
        self.r_on = r > la.eig_cutoff(r)
        self.s_on = s > la.eig_cutoff(s)
        self.r = np.where(self.r_on, r, 0.0)
        self.s = np.where(self.s_on, s, 0.0)
        # overlap[i, j] = |<u_i|v_j>|^2
        self.overlap = np.abs(u.conj().T @ v) ** 2
        self.trace_rho = float(np.sum(self.r))

    def kernel_leak(self) -> float:
        """Weight of ``rho`` on the kernel of ``sigma``."""
        return float(self.r @ self.overlap @ (~self.s_on))

    def support_violation(self) -> bool:
        return self.kernel_leak() > 1e-10 * max(self.trace_rho, 1e-300)

    def power_trace(self, s_rho: float, s_sigma: float) -> float:
        """``Tr rho^a sigma^b`` with pseudo-powers on the supports."""
        rp = np.zeros_like(self.r)
        sp = np.zeros_like(self.s)
        rp[self.r_on] = 1.0 if s_rho == 0 else self.r[self.r_on] ** s_rho
        sp[self.s_on] = 1.0 if s_sigma == 0 else self.s[self.s_on] ** s_sigma
        return float(rp @ self.overlap @ sp)

    def log_power_trace(self, s_rho: float, s_sigma: float) -> float:
        """``log2 Tr rho^a sigma^b`` evaluated stably in the log domain."""
        i, j = np.nonzero(self.r_on[:, None] & self.s_on[None, :] & (self.overlap > 0))
        if i.size == 0:
            return -math.inf
        lr = np.log2(self.r[i]) * s_rho
        ls = np.log2(self.s[j]) * s_sigma
        terms = lr + ls + np.log2(self.overlap[i, j])
        top = np.max(terms)
        return float(top + np.log2(np.sum(np.exp2(terms - top))))


def relative_entropy(rho: Operand, sigma: Operand) -> DivergenceResult:
    """``D(rho||sigma) = Tr rho (log2 rho - log2 sigma)``; ``+inf`` off support."""
    ps = _PairSpectra(as_matrix(rho), as_matrix(sigma))
    if ps.support_violation():
        return DivergenceResult(math.inf, True)
    r = ps.r[ps.r_on]
    first = float(np.sum(r * np.log2(r)))
    log_s = np.zeros_like(ps.s)
    log_s[ps.s_on] = np.log2(ps.s[ps.s_on])
    second = float(ps.r @ ps.overlap @ log_s)
    return DivergenceResult(first - second)


def _check_alpha(alpha: float, allow_zero: bool = True) -> None:
    if alpha == 1:
        raise ValueError("alpha = 1 is the von Neumann limit; use relative_entropy")
    lo_ok = alpha >= 0 if allow_zero else alpha > 0
    if not lo_ok or not math.isfinite(alpha):
        raise ValueError(f"alpha {alpha} outside the supported range")


def renyi_relative_entropy(rho: Operand, sigma: Operand, alpha: float) -> DivergenceResult:
    """Petz divergence ``(1/(alpha-1)) log2 Tr rho^alpha sigma^(1-alpha)``.

    Defined for ``alpha in [0, 1) U (1, inf)``. For ``alpha > 1`` a support
    violation gives ``+inf``; for ``alpha < 1`` a vanishing trace does too.
    """
    _check_alpha(alpha)
    ps = _PairSpectra(as_matrix(rho), as_matrix(sigma))
    if alpha > 1 and ps.support_violation():
        return DivergenceResult(math.inf, True)
    lq = ps.log_power_trace(alpha, 1 - alpha)
    if lq == -math.inf:
        return DivergenceResult(math.inf, True)
    return DivergenceResult(lq / (alpha - 1))


def sandwiched_renyi_relative_entropy(rho: Operand, sigma: Operand, alpha: float) -> DivergenceResult:
    """``(1/(alpha-1)) log2 Tr (sigma^g rho sigma^g)^alpha`` with ``g = (1-alpha)/(2 alpha)``."""
    _check_alpha(alpha, allow_zero=False)
    r, s = as_matrix(rho), as_matrix(sigma)
    if alpha > 1 and _PairSpectra(r, s).support_violation():
        return DivergenceResult(math.inf, True)
    g = la.psd_power(s, (1 - alpha) / (2 * alpha))
    w = np.linalg.eigvalsh(la.hermitize(g @ r @ g))
    w = w[w > _log_floor(w)]
    if w.size == 0:
        return DivergenceResult(math.inf, True)
    lw = alpha * np.log2(w)
    top = np.max(lw)
    lq = top + np.log2(np.sum(np.exp2(lw - top)))
    return DivergenceResult(float(lq / (alpha - 1)))


def mutual_information(rho: Operand, a: Sequence[int] = (0,), b: Sequence[int] = (1,)) -> float:
    """``I(A;B) = D(rho_AB || rho_A x rho_B)``."""
    joint, prod_op = product_of_marginals(rho, [a, b])
    return relative_entropy(joint, prod_op).value


def renyi_mutual_information(
    rho: Operand, alpha: float, a: Sequence[int] = (0,), b: Sequence[int] = (1,)
) -> float:
    """``I_alpha(A;B) = D_alpha(rho_AB || rho_A x rho_B)`` (Petz)."""
    joint, prod_op = product_of_marginals(rho, [a, b])
    return renyi_relative_entropy(joint, prod_op, alpha).value


def relative_entropy_variance(rho: Operand, sigma: Operand) -> float:
    """``V = Tr rho (log2 rho - log2 sigma)^2 - D^2``."""
    r, s = as_matrix(rho), as_matrix(sigma)
    d = relative_entropy(r, s)
    if d.support_violation:
        return math.inf
    x = la.psd_log2(r) - la.psd_log2(s)
    v = float(np.real(np.trace(r @ x @ x))) - d.value**2
    return max(v, 0.0)


def mutual_information_variance(rho: Operand, a: Sequence[int] = (0,), b: Sequence[int] = (1,)) -> float:
    joint, prod_op = product_of_marginals(rho, [a, b])
    return relative_entropy_variance(joint, prod_op)


# Chernoff distance ------------------------------------------------------

_GOLD = (math.sqrt(5) - 1) / 2


def golden_minimize(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200):
    """Golden-section search for the minimum of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def minimize_on_grid(f, grid: np.ndarray, tol: float = 1e-10):
    """Minimize ``f`` on ``[grid[0], grid[-1]]``.

    Values on ``grid`` are checked for discrete convexity. When convex, the
    bracket around the best grid point is refined by golden section; when not,
    the refinement still runs but ``convex`` is reported ``False``.
    """
    vals = np.array([f(s) for s in grid])
    finite = np.isfinite(vals)
    second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
    scale = max(1.0, float(np.max(np.abs(vals[finite]), initial=0.0)))
    convex = bool(np.all(finite)) and bool(np.all(second >= -1e-9 * scale))
    k = int(np.nanargmin(np.where(finite, vals, np.inf)))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    x, fx = golden_minimize(f, lo, hi, tol)
    if vals[k] < fx:
        x, fx = float(grid[k]), float(vals[k])
    return float(x), float(fx), convex


@dataclass(frozen=True)
class ChernoffResult:
    value: float
    s_opt: float
    convex: bool = True


def chernoff_distance(a: Operand, b: Operand) -> ChernoffResult:
    """``C(A, B) = sup_{s in [0,1]} -log2 Tr A^s B^(1-s)`` for PSD ``A``, ``B``.

    ``s -> log2 Tr A^s B^(1-s)`` is convex; golden section runs on a coarse
    grid bracket, and a 4097-point grid is used if convexity fails numerically.
    ``A B = 0`` gives ``+inf``.
    """
    ps = _PairSpectra(as_matrix(a), as_matrix(b))
    if ps.power_trace(0.0, 0.0) <= 1e-14:
        return ChernoffResult(math.inf, 0.5)

    def f(s):
        return ps.log_power_trace(s, 1 - s)

    s, fs, convex = minimize_on_grid(f, np.linspace(0, 1, 17))
    if not convex:
        s, fs, _ = minimize_on_grid(f, np.linspace(0, 1, 4097))
    return ChernoffResult(-fs, s, convex)
