"""Typical and relative-typical projectors, computed in spectrum space.

Membership of a basis sequence depends only on how many times each
distinct eigenvalue occurs in it, so every property is evaluated over type
classes of distinct eigenvalues. Dense projectors are materialized only on
request and within a dimension budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from . import linalg as la
from .entropy import relative_entropy, von_neumann_entropy
from .hyptest import _compositions, n_compositions
from .operators import BudgetError, Operand, as_matrix

DENSE_BUDGET = 1024
INDEX_BUDGET = 2**20
MAX_TYPES = 2_000_000


def chebyshev_threshold(variance: float, delta: float, eps: float) -> float:
    """Smallest ``n`` with ``variance / (n delta^2) <= eps``."""
    if delta <= 0 or eps <= 0:
        raise ValueError("delta and eps must be positive")
    return variance / (delta**2 * eps)


def _group_letters(values: np.ndarray, weights: np.ndarray):
    """Group basis letters by (numerically) equal ``values``.

    Returns per-class value, multiplicity, summed weight and the class label of
    every letter. Letters with value zero get label ``-1``.
    """
    cut = la.eig_cutoff(values)
    labels = np.full(values.size, -1)
    order = np.argsort(values)
    cls_val, cls_mult, cls_w = [], [], []
    for i in order:
        if values[i] <= cut:
            continue
        if cls_val and abs(values[i] - cls_val[-1]) <= 1e-12 * max(1.0, abs(values[i])):
            cls_mult[-1] += 1
            cls_w[-1] += weights[i]
        else:
            cls_val.append(values[i])
            cls_mult.append(1)
            cls_w.append(weights[i])
        labels[i] = len(cls_val) - 1
    return np.array(cls_val), np.array(cls_mult), np.array(cls_w), labels


@dataclass
class _SpectralTypicality:
    """Sequences ``y^n`` with ``|-(1/n) sum log2 f(y_j) - center| <= delta``.

    ``f`` holds per-letter values in ``basis``; ``prob`` holds the letter
    probabilities under the reference state.
    """

    basis: np.ndarray
    f: np.ndarray
    prob: np.ndarray
    center: float
    n: int
    delta: float
    classes: dict = field(init=False, repr=False)

    def __post_init__(self):
        vals, mult, w, labels = _group_letters(self.f, self.prob)
        c = vals.size
        if n_compositions(self.n, c) > MAX_TYPES:
            raise BudgetError(f"{n_compositions(self.n, c)} type classes exceed {MAX_TYPES}")
        k = _compositions(self.n, c)
        stat = -(k @ np.log2(vals)) / self.n
        typical = np.abs(stat - self.center) <= self.delta
        log_multi = (gammaln(self.n + 1) - np.sum(gammaln(k + 1), axis=1)) / math.log(2)
        log_count = log_multi + k @ np.log2(mult)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w = np.log2(w)
            log_prob = log_multi + np.where(k > 0, k * log_w, 0.0).sum(axis=1)
        self.classes = {
            "values": vals,
            "labels": labels,
            "types": k,
            "typical": typical,
            "stat": stat,
            "log_count": log_count,
            "log_prob": log_prob,
        }

    @property
    def log2_dim(self) -> float:
        """``log2 Tr Pi``."""
        lc = self.classes["log_count"][self.classes["typical"]]
        if lc.size == 0:
            return -math.inf
        top = lc.max()
        return float(top + np.log2(np.sum(np.exp2(lc - top))))

    @property
    def weight(self) -> float:
        """``Tr Pi rho^{x n}`` for the reference state."""
        lp = self.classes["log_prob"][self.classes["typical"]]
        return float(np.sum(np.exp2(lp)))

    @property
    def variance(self) -> float:
        """Per-letter variance of ``-log2 f`` under the letter probabilities."""
        on = self.f > la.eig_cutoff(self.f)
        x = -np.log2(self.f[on])
        p = self.prob[on]
        mean = float(np.sum(p * x))
        return float(np.sum(p * (x - mean) ** 2))

    def chebyshev_n(self, eps: float) -> float:
        return chebyshev_threshold(self.variance, self.delta, eps)

    def equipartition_ok(self, slack: float = 1e-9) -> bool:
        """``2^{-n(c+delta)} <= f(y^n) <= 2^{-n(c-delta)}`` on every typical type."""
        s = self.classes["stat"][self.classes["typical"]]
        n, c, dl = self.n, self.center, self.delta
        return bool(np.all(n * s <= n * (c + dl) + slack) and np.all(n * s >= n * (c - dl) - slack))

    def index_mask(self) -> np.ndarray:
        """Boolean membership over all ``d^n`` basis sequences."""
        d = self.f.size
        if d**self.n > INDEX_BUDGET:
            raise BudgetError(f"{d}^{self.n} sequences exceed {INDEX_BUDGET}")
        on = self.f > la.eig_cutoff(self.f)
        logf = np.full(d, -np.inf)
        logf[on] = np.log2(self.f[on])
        total = np.zeros(1)
        for _ in range(self.n):
            total = np.add.outer(total, logf).reshape(-1)
        stat = -total / self.n
        with np.errstate(invalid="ignore"):
            return np.isfinite(stat) & (np.abs(stat - self.center) <= self.delta + 1e-12)

    def matrix(self) -> np.ndarray:
        """Dense projector on ``H^{x n}`` (needs ``d^n <= 1024``)."""
        d = self.f.size
        if d**self.n > DENSE_BUDGET:
            raise BudgetError(f"{d}^{self.n} exceeds dense budget {DENSE_BUDGET}")
        u = la.kron_all([self.basis] * self.n)
        mask = self.index_mask().astype(float)
        return (u * mask) @ u.conj().T


class TypicalProjector(_SpectralTypicality):
    """Weak typical projector of ``rho^{x n}``.

    Construction asserts ``Tr Pi <= 2^{n(H + delta)}`` and equipartition.
    """

    def __init__(self, rho: Operand, n: int, delta: float):
        r = as_matrix(rho)
        p, u = np.linalg.eigh(la.hermitize(r))
        p = np.clip(p, 0, None)
        h = von_neumann_entropy(r)
        super().__init__(u, p, p, h, int(n), float(delta))
        self.entropy = h
        if not self.log2_dim <= self.n * (h + self.delta) + 1e-9:
            raise AssertionError("typical subspace dimension exceeds 2^{n(H+delta)}")
        if not self.equipartition_ok():
            raise AssertionError("equipartition bounds violated")


class RelativeTypicalProjector(_SpectralTypicality):
    """Projector onto ``B``-eigenbasis sequences typical for ``rho``.

    Letters ``y`` have weight ``f(y)`` (eigenvalues of ``B``) and probability
    ``<phi_y|rho|phi_y>``; the center is ``-Tr rho log2 B``.
    """

    def __init__(self, rho: Operand, b: Operand, n: int, delta: float):
        r, bm = as_matrix(rho), as_matrix(b)
        f, u = np.linalg.eigh(la.hermitize(bm))
        f = np.clip(f, 0, None)
        prob = np.clip(np.real(np.einsum("ij,ik,kj->j", u.conj(), r, u)), 0, None)
        on = f > la.eig_cutoff(f)
        if np.sum(prob[~on]) > 1e-10:
            raise ValueError("supp(rho) is not contained in supp(B); -Tr rho log B is infinite")
        center = -float(np.sum(prob[on] * np.log2(f[on])))
        super().__init__(u, f, prob, center, int(n), float(delta))
        if not self.equipartition_ok():
            raise AssertionError("relative typicality bounds violated")

    def operator_bounds_ok(self, b: Operand, slack: float = 1e-9) -> bool:
        """Dense check of ``2^{-n(c+delta)} Pi <= Pi B^n Pi <= 2^{-n(c-delta)} Pi``."""
        pi = self.matrix()
        bn = la.kron_all([as_matrix(b)] * self.n)
        mid = pi @ bn @ pi
        lo = 2.0 ** (-self.n * (self.center + self.delta))
        hi = 2.0 ** (-self.n * (self.center - self.delta))
        scale = max(hi, 1e-300)
        e1 = np.linalg.eigvalsh(la.hermitize(mid - lo * pi))[0]
        e2 = np.linalg.eigvalsh(la.hermitize(hi * pi - mid))[0]
        return bool(e1 >= -slack * scale and e2 >= -slack * scale)


def typical_projector(rho: Operand, n: int, delta: float) -> TypicalProjector:
    return TypicalProjector(rho, n, delta)


def relative_typical_projector(rho: Operand, b: Operand, n: int, delta: float) -> RelativeTypicalProjector:
    return RelativeTypicalProjector(rho, b, n, delta)


@dataclass(frozen=True)
class ProjectorTricks:
    """Minimum eigenvalues of the two operator inequalities (``>= 0`` means they hold)."""

    upper_by_state: float
    upper_by_inverse_root: float
    holds: bool


def check_projector_tricks(rho: Operand, n: int, delta: float, slack: float = 1e-9) -> ProjectorTricks:
    """Dense check of ``Pi <= 2^{n(H+delta)} rho^n`` and ``Pi <= 2^{-n(H-delta)/2} (rho^n)^{-1/2}``."""
    tp = TypicalProjector(rho, n, delta)
    pi = tp.matrix()
    rn = la.kron_all([as_matrix(rho)] * n)
    h = tp.entropy
    a = 2.0 ** (n * (h + delta)) * rn - pi
    b = 2.0 ** (-n * (h - delta) / 2) * la.psd_power(rn, -0.5) - pi
    e1 = float(np.linalg.eigvalsh(la.hermitize(a))[0])
    e2 = float(np.linalg.eigvalsh(la.hermitize(b))[0])
    return ProjectorTricks(e1, e2, e1 >= -slack and e2 >= -slack)


@dataclass(frozen=True)
class CompositeTestResult:
    """Composite test ``T = Pi_r..Pi_1 Pi_rho Pi_1..Pi_r`` and its errors.

    ``chain_bound`` is ``eps_rho + sum_i 2 sqrt(eps_i)`` built from the actual
    per-projector leakages, which bounds ``type1`` at every ``n``. The uniform
    ``eps + 2 r sqrt(eps)`` form is checked only when the Chebyshev threshold
    for ``eps`` is met (``threshold_reached``).
    """

    type1: float
    exponents: tuple[float, ...]
    divergences: tuple[float, ...]
    delta: float
    chain_bound: float
    uniform_bound: float
    threshold_reached: bool
    operator: np.ndarray = field(repr=False)

    @property
    def exponents_ok(self) -> bool:
        return all(e >= d - 2 * self.delta - 1e-9 for e, d in zip(self.exponents, self.divergences))

    @property
    def type1_ok(self) -> bool:
        ok = self.type1 <= self.chain_bound + 1e-9
        if self.threshold_reached:
            ok = ok and self.type1 <= self.uniform_bound + 1e-9
        return ok


def composite_alternative_test(
    rho: Operand, alternatives: Sequence[Operand], n: int, delta: float, eps: float = 0.1
) -> CompositeTestResult:
    """Typicality-based test of ``rho^n`` against each ``B_i^n``.

    The alternatives must commute pairwise; the non-commuting case is an
    open question and is rejected. Requires ``d^n <= 1024``.
    """
    r = as_matrix(rho)
    alts = [as_matrix(b) for b in alternatives]
    for i in range(len(alts)):
        for j in range(i + 1, len(alts)):
            if not la.commute(alts[i], alts[j]):
                raise ValueError(
                    "alternatives do not commute; the non-commuting composite test is an open question"
                )
    divs = []
    for b in alts:
        dv = relative_entropy(r, b)
        if dv.support_violation:
            raise ValueError("supp(rho) must lie in supp(B_i)")
        divs.append(dv.value)
    if min(divs) <= 0:
        raise ValueError("every alternative needs D(rho||B_i) > 0")
    d = r.shape[0]
    if d**n > DENSE_BUDGET:
        raise BudgetError(f"{d}^{n} exceeds dense budget {DENSE_BUDGET}")

    tp = TypicalProjector(r, n, delta)
    rel = [RelativeTypicalProjector(r, b, n, delta) for b in alts]
    q = np.eye(d**n, dtype=complex)
    for rp in rel:
        q = rp.matrix() @ q
    t_op = q @ tp.matrix() @ q.conj().T
    rn = la.kron_all([r] * n)
    type1 = 1 - float(np.real(np.trace(t_op @ rn)))
    exps = []
    for b in alts:
        tr = float(np.real(np.trace(t_op @ la.kron_all([b] * n))))
        exps.append(math.inf if tr <= 0 else -math.log2(tr) / n)
    leaks = [max(1 - x.weight, 0.0) for x in rel]
    chain = max(1 - tp.weight, 0.0) + sum(2 * math.sqrt(e) for e in leaks)
    uniform = eps + 2 * len(alts) * math.sqrt(eps)
    reached = all(n >= x.chebyshev_n(eps) for x in [tp, *rel])
    return CompositeTestResult(
        type1, tuple(exps), tuple(divs), delta, chain, uniform, reached, t_op
    )
