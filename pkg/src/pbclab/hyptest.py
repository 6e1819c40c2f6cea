"""Binary quantum hypothesis testing and the inequalities around it.

The hypothesis-testing relative entropy
``D_H^eps(rho||sigma) = -log2 min{Tr T sigma : 0 <= T <= I, Tr T rho >= 1 - eps}``
is computed twice per call. The primal route bisects the Neyman-Pearson
family ``T = P_+(rho - mu sigma) + t P_0(rho - mu sigma)``. The dual route
maximizes the concave function
``g(nu) = nu (1 - eps) - Tr(nu rho - sigma)_+`` independently. The two must
agree; the disagreement is reported as ``gap`` in bits.
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import linprog
from scipy.special import gammaln

from . import linalg as la
from .entropy import (
    chernoff_distance,
    golden_minimize,
    product_of_marginals,
    relative_entropy,
    relative_entropy_variance,
    renyi_relative_entropy,
    sandwiched_renyi_relative_entropy,
)
from .operators import BinaryTest, BudgetError, Operand, as_matrix, dims_of

log = logging.getLogger(__name__)

DENSE_BUDGET = 1024
GAP_TOL = 1e-7
MAX_TYPE_CLASSES = 2_000_000


@dataclass(frozen=True)
class HypTestValue:
    """Optimal hypothesis test summary.

    ``value`` is ``D_H^eps`` in bits, ``type1 = Tr (I - T) rho`` and
    ``type2 = Tr T sigma`` for the returned test, and ``gap`` is the
    primal/dual disagreement in bits (``nan`` when the dual was skipped).
    """

    value: float
    type1: float
    type2: float
    gap: float
    test: BinaryTest | None = field(default=None, repr=False)
    method: str = "dense"

    @property
    def certified(self) -> bool:
        return self.gap <= GAP_TOL or (self.value == math.inf)

    def record(self) -> dict:
        return {"value": self.value, "type1": self.type1, "type2": self.type2, "gap": self.gap}


def _log2_sum(logs: np.ndarray) -> float:
    logs = np.asarray(logs, dtype=float)
    logs = logs[np.isfinite(logs)]
    if logs.size == 0:
        return -math.inf
    top = float(np.max(logs))
    return top + float(np.log2(np.sum(np.exp2(logs - top))))


def _bits_gap(beta_primal: float, beta_dual: float) -> float:
    if beta_primal <= 0 and beta_dual <= 0:
        return 0.0
    if beta_primal <= 0 or beta_dual <= 0:
        return math.inf
    return abs(math.log2(beta_primal) - math.log2(beta_dual))


# Dense route ------------------------------------------------------------


def _np_projector(rho: np.ndarray, sigma: np.ndarray, mu: float):
    """``P_{>0}(rho - mu sigma)`` and ``Tr rho P``."""
    w, v = np.linalg.eigh(la.hermitize(rho - mu * sigma))
    vs = v[:, w > la.eig_cutoff(w)]
    p = vs @ vs.conj().T
    return p, float(np.real(np.sum(vs.conj() * (rho @ vs))))


def _dense_primal(rho: np.ndarray, sigma: np.ndarray, eps: float):
    """Neyman-Pearson bisection. Returns ``(beta, T, mu, t)``."""
    target = 1 - eps
    d = rho.shape[0]
    ker = np.eye(d) - la.support_projector(sigma)
    leak = float(np.real(np.trace(ker @ rho)))
    if leak >= target - 1e-12:
        return 0.0, min(1.0, target / leak) * ker, math.inf, 1.0

    r_max = float(np.linalg.eigvalsh(rho)[-1])
    s = np.linalg.eigvalsh(sigma)
    s_min = float(np.min(s[s > la.eig_cutoff(s)]))
    hi = 2 * r_max / s_min
    p_hi, f_hi = _np_projector(rho, sigma, hi)
    for _ in range(400):
        if f_hi < target:
            break
        hi *= 2
        p_hi, f_hi = _np_projector(rho, sigma, hi)
    else:
        raise RuntimeError("could not bracket the Neyman-Pearson threshold")
    # Geometric descent keeps the bracket ratio at 2 before bisecting.
    lo = hi / 2
    p_lo, f_lo = _np_projector(rho, sigma, lo)
    for _ in range(2000):
        if f_lo >= target or lo == 0:
            break
        hi, p_hi, f_hi = lo, p_lo, f_lo
        lo = lo / 2 if lo > 1e-300 else 0.0
        p_lo, f_lo = _np_projector(rho, sigma, lo)
    for _ in range(200):
        if hi - lo <= 1e-15 * hi or f_lo - f_hi <= 1e-13:
            break
        mid = (lo + hi) / 2
        p_mid, f_mid = _np_projector(rho, sigma, mid)
        if f_mid >= target:
            lo, p_lo, f_lo = mid, p_mid, f_mid
        else:
            hi, p_hi, f_hi = mid, p_mid, f_mid
    # Mixing the bracketing projectors meets the type-I constraint exactly.
    lam = 1.0 if f_lo - f_hi <= 0 else (target - f_hi) / (f_lo - f_hi)
    lam = min(max(lam, 0.0), 1.0)
    t_op = lam * p_lo + (1 - lam) * p_hi
    beta = float(np.real(np.trace(t_op @ sigma)))
    return max(beta, 0.0), t_op, (lo + hi) / 2, lam


def _bracket_unimodal_max(h, t0: float = 0.0, span: float = 1e4):
    """Bracket the maximizer of a unimodal ``h`` by galloping from ``t0``."""
    a, fa = t0, h(t0)
    b, fb = t0 + 1.0, h(t0 + 1.0)
    direction = 1.0
    if fb < fa:
        a, b, fa, fb = b, a, fb, fa
        direction = -1.0
    step = 1.0
    # Invariant: h(b) >= h(a) and b lies further in ``direction``.
    while abs(b - t0) < span:
        step *= 2
        c = b + direction * step
        fc = h(c)
        if fc < fb:
            return (min(a, c), max(a, c))
        a, fa, b, fb = b, fb, c, fc
    return (min(a, b), max(a, b))


def _golden_max(h, lo, hi, tol=1e-12):
    x, fx = golden_minimize(lambda t: -h(t), lo, hi, tol=tol, max_iter=400)
    return x, -fx


def _dense_dual(rho: np.ndarray, sigma: np.ndarray, eps: float) -> float:
    """``max_{nu >= 0} nu (1 - eps) - Tr(nu rho - sigma)_+`` by golden section in ``log2 nu``."""

    def g(t):
        nu = 2.0**t
        return nu * (1 - eps) - la.positive_part_trace(nu * rho - sigma)

    lo, hi = _bracket_unimodal_max(g)
    _, best = _golden_max(g, lo, hi)
    return max(best, 0.0)


# Classical route --------------------------------------------------------


def _compositions(n: int, d: int) -> np.ndarray:
    """All count vectors of length ``d`` summing to ``n``."""
    if d == 1:
        return np.array([[n]], dtype=np.int64)
    if d == 2:
        k = np.arange(n + 1, dtype=np.int64)
        return np.stack([k, n - k], axis=1)
    rows = []
    for first in range(n + 1):
        tail = _compositions(n - first, d - 1)
        rows.append(np.concatenate([np.full((tail.shape[0], 1), first), tail], axis=1))
    return np.concatenate(rows, axis=0)


def n_compositions(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def type_class_logs(logp: Sequence[np.ndarray], n: int):
    """Per-type-class ``log2`` masses of i.i.d. letter weights.

    ``logp`` is a list of ``log2`` letter-weight vectors (one per operator).
    Returns the compositions, ``log2`` class sizes, and a list of ``log2``
    per-sequence weights.
    """
    d = len(logp[0])
    if n_compositions(n, d) > MAX_TYPE_CLASSES:
        raise BudgetError(f"{n_compositions(n, d)} type classes exceed {MAX_TYPE_CLASSES}")
    k = _compositions(n, d)
    log_size = (gammaln(n + 1) - np.sum(gammaln(k + 1), axis=1)) / math.log(2)
    seq = []
    for lp in logp:
        lp = np.asarray(lp, dtype=float)
        terms = np.where(k > 0, k * np.where(np.isfinite(lp), lp, 0.0), 0.0)
        dead = np.any((k > 0) & ~np.isfinite(lp), axis=1)
        s = np.sum(terms, axis=1)
        s[dead] = -math.inf
        seq.append(s)
    return k, log_size, seq


def _safe_log2(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -math.inf)
    pos = x > 0
    out[pos] = np.log2(x[pos])
    return out


def _classical_primal(log_p: np.ndarray, log_q: np.ndarray, eps: float):
    """Neyman-Pearson over classes with ``log2`` masses. Returns ``(log2 beta, type1, accept)``."""
    target = 1 - eps
    live = np.isfinite(log_p)
    idx = np.nonzero(live)[0]
    lr = log_p[idx] - log_q[idx]
    order = idx[np.argsort(-lr, kind="stable")]
    mass = np.exp2(log_p[order])
    cum = np.cumsum(mass)
    k = int(np.searchsorted(cum, target - 1e-15))
    k = min(k, order.size - 1)
    before = cum[k - 1] if k > 0 else 0.0
    lam = min(max((target - before) / mass[k], 0.0), 1.0)
    logs = list(log_q[order[:k]])
    if lam > 0:
        logs.append(math.log2(lam) + log_q[order[k]])
    accept = np.zeros(log_p.size)
    accept[order[:k]] = 1.0
    accept[order[k]] = lam
    type1 = 1 - (before + lam * mass[k])
    return _log2_sum(np.array(logs)), float(max(type1, 0.0)), accept


def _classical_dual(log_p: np.ndarray, log_q: np.ndarray, eps: float, log_scale: float) -> float:
    """``log2`` of ``max_nu sum_k min(nu P_k, Q_k) - nu eps`` in extended precision.

    Classes whose total ``Q`` mass is below ``1e-16 * 2^log_scale`` change the
    objective by less than that amount and are dropped before the search.
    """
    if np.isfinite(log_scale):
        order = np.argsort(log_q)
        cum = np.cumsum(np.exp2(log_q[order] - log_scale))
        drop = order[cum <= 1e-16]
        keep = np.ones(log_q.size, dtype=bool)
        keep[drop] = False
        log_p, log_q = log_p[keep], log_q[keep]
    both = np.isfinite(log_p) & np.isfinite(log_q)
    if not np.any(both):
        return -math.inf
    breaks = log_q[both] - log_p[both]
    t_lo, t_hi = float(np.min(breaks)) - 1, float(np.max(breaks)) + 1
    finite_q = log_q[np.isfinite(log_q)]
    digits = 30 + int(math.ceil(0.30103 * (max(t_hi, 0) - min(float(np.min(finite_q)), 0))))
    with mpmath.workdps(digits):
        pq = [
            (mpmath.power(2, mpmath.mpf(float(a))) if np.isfinite(a) else mpmath.mpf(0),
             mpmath.power(2, mpmath.mpf(float(b))) if np.isfinite(b) else mpmath.mpf(0))
            for a, b in zip(log_p, log_q)
        ]
        e = mpmath.mpf(eps)

        def g(t):
            nu = mpmath.power(2, mpmath.mpf(t))
            return mpmath.fsum(min(nu * p, q) for p, q in pq) - nu * e

        a, b = t_lo, t_hi
        inv = (math.sqrt(5) - 1) / 2
        c, d = b - inv * (b - a), a + inv * (b - a)
        gc, gd = g(c), g(d)
        for _ in range(400):
            if b - a <= 1e-13 * max(1.0, abs(a) + abs(b)):
                break
            if gc >= gd:
                b, d, gd = d, c, gc
                c = b - inv * (b - a)
                gc = g(c)
            else:
                a, c, gc = c, d, gd
                d = a + inv * (b - a)
                gd = g(d)
        best = max(gc, gd, g(t_lo), g(t_hi))
        if best <= 0:
            return -math.inf
        return float(mpmath.log(best, 2))


def _classical_letters(rho: np.ndarray, sigma: np.ndarray):
    v = la.common_eigenbasis(rho, sigma)
    if v is None:
        return None
    p = np.clip(np.real(np.einsum("ij,ik,kj->j", v.conj(), rho, v)), 0, None)
    q = np.clip(np.real(np.einsum("ij,ik,kj->j", v.conj(), sigma, v)), 0, None)
    return v, p, q


def _classical_hyptest(p, q, eps, n, certify, basis=None):
    lp, lq = _safe_log2(p), _safe_log2(q)
    if n == 1:
        log_p, log_q = lp, lq
    else:
        _, log_size, (sp, sq) = type_class_logs([lp, lq], n)
        log_p, log_q = log_size + sp, log_size + sq
    log_beta, type1, accept = _classical_primal(log_p, log_q, eps)
    test = None
    if n == 1 and basis is not None:
        test = BinaryTest((basis * accept) @ basis.conj().T)
    if certify:
        log_dual = _classical_dual(log_p, log_q, eps, log_beta)
        if log_beta == -math.inf and log_dual == -math.inf:
            gap = 0.0
        elif log_beta == -math.inf or log_dual == -math.inf:
            gap = math.inf
        else:
            gap = abs(log_beta - log_dual)
    else:
        gap = math.nan
    beta = 2.0**log_beta if log_beta > -1000 else 0.0
    return HypTestValue(-log_beta, type1, beta, gap, test, "classical")


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


def hyp_test_rel_entropy(
    rho: Operand,
    sigma: Operand,
    eps: float,
    n: int = 1,
    certify: bool = True,
    classical: bool | None = None,
) -> HypTestValue:
    """``D_H^eps(rho^{x n} || sigma^{x n})`` with the optimal test.

    Commuting inputs use a classical Neyman-Pearson solver over type classes.
    Otherwise the tensor powers are formed densely, which requires
    ``d^n <= 1024``. ``certify`` runs the independent dual.
    """
    _check_eps(eps)
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise ValueError("rho and sigma must have the same shape")
    if abs(np.real(np.trace(r)) - 1) > la.TOL_TRACE:
        raise ValueError("rho must be normalized")
    letters = None
    if classical is not False and la.commute(r, s):
        letters = _classical_letters(r, s)
    if letters is not None:
        v, p, q = letters
        res = _classical_hyptest(p, q, eps, n, certify, basis=v)
    else:
        if classical:
            raise ValueError("inputs do not commute")
        d = r.shape[0]
        if d**n > DENSE_BUDGET:
            raise BudgetError(f"dense dimension {d}^{n} exceeds {DENSE_BUDGET}")
        if n > 1:
            r, s = la.kron_all([r] * n), la.kron_all([s] * n)
        res = _dense_hyptest(r, s, eps, certify)
    if certify and not res.certified:
        log.warning("D_H primal/dual gap %.3e bits exceeds %.0e", res.gap, GAP_TOL)
    return res


def _dense_hyptest(r: np.ndarray, s: np.ndarray, eps: float, certify: bool) -> HypTestValue:
    beta, t_op, mu, t = _dense_primal(r, s, eps)
    type1 = 1 - float(np.real(np.trace(t_op @ r)))
    gap = math.nan
    if certify:
        gap = _bits_gap(beta, _dense_dual(r, s, eps))
    value = math.inf if beta <= 0 else -math.log2(beta)
    return HypTestValue(value, max(type1, 0.0), beta, gap, BinaryTest(t_op, mu, t), "dense")


def hyp_test_mutual_info(
    rho: Operand, eps: float, a: Sequence[int] = (0,), b: Sequence[int] = (1,), certify: bool = True
) -> HypTestValue:
    """``I_H^eps(A;B) = D_H^eps(rho_AB || rho_A x rho_B)``."""
    joint, prod_op = product_of_marginals(rho, [a, b])
    return hyp_test_rel_entropy(joint, prod_op, eps, certify=certify)


@dataclass(frozen=True)
class MinSigmaResult:
    """``min_sigma D_H^eps(rho_AB || rho_A x sigma_B)``.

    ``value`` is attained at ``sigma``, so it never lies below the true
    minimum. ``duality_gap`` is ``upper - beta`` where ``upper`` is a proven
    bound on ``max_sigma beta(sigma)``; ``lower_bound`` is its value in bits.
    """

    value: float
    sigma: np.ndarray = field(repr=False)
    duality_gap: float
    iterations: int
    converged: bool
    lower_bound: float = -math.inf


def _hermitian_basis(d: int) -> list[np.ndarray]:
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j], e[j, i] = 1j, -1j
            basis.append(e)
    return basis


class _CuttingPlaneModel:
    """LP upper model of a concave function on density matrices.

    Each supergradient ``G`` with ``f(s) <= <G, s>`` adds a cut; PSD cuts
    ``<v v^*, s> >= 0`` tighten the relaxation of the state space. The LP
    optimum is therefore a proven upper bound on ``max f``.
    """

    def __init__(self, d: int):
        self.d = d
        self.basis = _hermitian_basis(d)
        self.value_rows: list[np.ndarray] = []
        self.psd_rows: list[np.ndarray] = []
        for v in np.eye(d):
            self.add_psd(v)

    def _row(self, g: np.ndarray) -> np.ndarray:
        return np.array([np.real(np.trace(g @ e)) for e in self.basis])

    def add_value(self, grad: np.ndarray) -> None:
        self.value_rows.append(self._row(grad))

    def add_psd(self, v: np.ndarray) -> None:
        self.psd_rows.append(self._row(np.outer(v, v.conj())))

    def solve(self):
        nb = len(self.basis)
        c = np.zeros(nb + 1)
        c[-1] = -1.0
        rows = [np.append(-r, 1.0) for r in self.value_rows] + [np.append(-r, 0.0) for r in self.psd_rows]
        a_eq = np.zeros((1, nb + 1))
        a_eq[0, : self.d] = 1.0
        bounds = [(0, 1)] * self.d + [(-1, 1)] * (nb - self.d) + [(None, None)]
        res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(len(rows)), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                      method="highs")
        if res.status != 0:
            return math.inf, None
        sigma = sum(x * e for x, e in zip(res.x[:nb], self.basis))
        return float(res.x[-1]), la.hermitize(sigma)


def hyp_test_mutual_info_min_sigma(
    rho: Operand,
    eps: float,
    a: Sequence[int] = (0,),
    b: Sequence[int] = (1,),
    max_iter: int = 500,
    gap_tol: float = 1e-6,
    sigma0: np.ndarray | None = None,
    line_search_tol: float = 1e-2,
    polish_iter: int = 200,
) -> MinSigmaResult:
    """Generalized hypothesis-testing mutual information, minimized over ``sigma_B``.

    ``sigma -> beta(sigma) = min_T Tr T (rho_A x sigma)`` is concave, and
    ``G = Tr_A[(rho_A x I) T*]`` from the optimal test is a supergradient.
    Frank-Wolfe steps to pure states with golden-section line search make
    fast initial progress. Because ``beta`` has kinks, the search then
    switches to a cutting-plane method whose LP model gives a proven upper
    bound on ``max beta``. Stops once the relative gap is below ``gap_tol``.
    Requires ``dim B <= 4``.
    """
    _check_eps(eps)
    dims = dims_of(rho)
    a, b = sorted(set(a)), sorted(set(b))
    union = sorted(set(a) | set(b))
    sub_dims = [dims[i] for i in union]
    a_loc = [union.index(i) for i in a]
    b_loc = [union.index(i) for i in b]
    db = math.prod(dims[i] for i in b)
    if db > 4:
        raise BudgetError(f"dim B = {db} exceeds 4 for the min-sigma search")
    joint = la.partial_trace(as_matrix(rho), dims, union)
    rho_a = la.partial_trace(joint, sub_dims, a_loc)
    # Layout used below: A-group first, then B-group.
    perm = a_loc + b_loc
    joint_ab = la.permute(joint, sub_dims, perm)
    da = joint_ab.shape[0] // db
    model = _CuttingPlaneModel(db)

    def evaluate(sig):
        res = _dense_hyptest(joint_ab, np.kron(rho_a, sig), eps, certify=False)
        t4 = res.test.operator.reshape(da, db, da, db)
        grad = la.hermitize(np.einsum("ij,jbic->bc", rho_a, t4))
        model.add_value(grad)
        return res.type2, grad

    def done(upper, beta):
        return upper - beta <= gap_tol * max(beta, 1e-300)

    sigma = la.partial_trace(joint, sub_dims, b_loc) if sigma0 is None else np.asarray(sigma0, complex)
    beta, grad = evaluate(sigma)
    upper = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        w, v = np.linalg.eigh(grad)
        upper = min(upper, float(w[-1]))
        if done(upper, beta):
            break
        vertex = np.outer(v[:, -1], v[:, -1].conj())
        x, neg = golden_minimize(
            lambda g: -_dense_hyptest(joint_ab, np.kron(rho_a, (1 - g) * sigma + g * vertex), eps, False).type2,
            0.0,
            1.0,
            tol=line_search_tol,
        )
        if -neg <= beta * (1 + 1e-12):
            break
        sigma = la.hermitize((1 - x) * sigma + x * vertex)
        beta, grad = evaluate(sigma)

    for _ in range(polish_iter if not done(upper, beta) else 0):
        bound, cand = model.solve()
        if cand is None:
            break
        upper = min(upper, bound)
        if done(upper, beta):
            break
        w, v = np.linalg.eigh(cand)
        if w[0] < -1e-12:
            model.add_psd(v[:, 0])
        proj = (v * np.clip(w, 0, None)) @ v.conj().T
        proj = la.hermitize(proj / np.real(np.trace(proj)))
        b_new, _ = evaluate(proj)
        it += 1
        if b_new > beta:
            beta, sigma = b_new, proj
    gap = max(upper - beta, 0.0)
    converged = done(upper, beta)
    value = math.inf if beta <= 0 else -math.log2(beta)
    lower = -math.log2(upper) if 0 < upper < math.inf else -math.inf
    return MinSigmaResult(value, sigma, gap, it, converged, lower)


# Helstrom and composite testing -----------------------------------------


@dataclass(frozen=True)
class HelstromResult:
    value: float
    test: BinaryTest = field(repr=False)


def helstrom_error(a: Operand, b: Operand) -> HelstromResult:
    """``P_e*(A, B) = (Tr(A + B) - ||A - B||_1) / 2`` with the test ``{A - B >= 0}``."""
    am, bm = as_matrix(a), as_matrix(b)
    value = 0.5 * (np.real(np.trace(am + bm)) - la.trace_norm(am - bm))
    t_op = la.positive_projector(am - bm)
    via_test = np.real(np.trace(am @ (np.eye(am.shape[0]) - t_op)) + np.trace(bm @ t_op))
    scale = max(1.0, float(np.real(np.trace(am + bm))))
    if abs(via_test - value) > 1e-9 * scale:
        raise RuntimeError(f"Helstrom cross-check failed: {value} vs {via_test}")
    return HelstromResult(float(value), BinaryTest(t_op))


def pe_star_composite(a: Operand, alternatives: Sequence[Operand]) -> float:
    """``P_e*(A, sum_i B_i)``."""
    return helstrom_error(a, sum(as_matrix(b) for b in alternatives)).value


@dataclass(frozen=True)
class ChernoffRow:
    n: int
    rate: float
    min_chernoff: float

    @property
    def gap(self) -> float:
        return abs(self.rate - self.min_chernoff)


def _simultaneous_letters(mats: Sequence[np.ndarray]):
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not la.commute(mats[i], mats[j]):
                return None
    combo = sum((0.6180339887 * (k + 1) ** 0.5 * np.pi) * m for k, m in enumerate(mats))
    v = np.linalg.eigh(la.hermitize(combo))[1]
    out = []
    for m in mats:
        dm = v.conj().T @ m @ v
        if np.max(np.abs(dm - np.diag(np.diag(dm)))) > 1e-10 * max(1.0, np.max(np.abs(m))):
            return None
        out.append(np.clip(np.real(np.diag(dm)), 0, None))
    return out


def chernoff_multi_trace(
    a: Operand,
    alternatives: Sequence[Operand],
    n_values: Sequence[int],
    weights: Sequence[float] | None = None,
) -> list[ChernoffRow]:
    """Rows ``(n, -(1/n) log2 P_e*(K0 A^n, sum_i K_i B_i^n), min_i C(A, B_i))``.

    ``weights`` holds ``(K0, K1, ..., Kr)`` and defaults to all ones. Commuting
    inputs are summed over type classes; otherwise the tensor powers are
    dense and need ``d^n <= 1024``. The table is diagnostic only.
    """
    am = as_matrix(a)
    alts = [as_matrix(b) for b in alternatives]
    k = np.ones(len(alts) + 1) if weights is None else np.asarray(weights, dtype=float)
    min_c = min(chernoff_distance(am, b).value for b in alts)
    letters = _simultaneous_letters([am] + alts)
    rows = []
    for n in n_values:
        if letters is not None:
            logs = [_safe_log2(x) for x in letters]
            _, log_size, seq = type_class_logs(logs, n)
            la_ = math.log2(k[0]) + seq[0]
            lb = np.array([math.log2(k[i + 1]) + seq[i + 1] for i in range(len(alts))])
            lb_tot = np.array([_log2_sum(lb[:, j]) for j in range(lb.shape[1])])
            log_pe = _log2_sum(log_size + np.minimum(la_, lb_tot))
        else:
            d = am.shape[0]
            if d**n > DENSE_BUDGET:
                raise BudgetError(f"dense dimension {d}^{n} exceeds {DENSE_BUDGET}")
            an = k[0] * la.kron_all([am] * n)
            bn = sum(k[i + 1] * la.kron_all([b] * n) for i, b in enumerate(alts))
            pe = helstrom_error(an, bn).value
            log_pe = math.log2(pe) if pe > 0 else -math.inf
        rows.append(ChernoffRow(int(n), -log_pe / n, min_c))
    return rows


# Inequality checks ------------------------------------------------------


@dataclass(frozen=True)
class InequalityCheck:
    """Outcome of checking ``smaller <= larger`` up to ``slack``."""

    smaller: float
    larger: float
    holds: bool
    slack: float

    @property
    def margin(self) -> float:
        return self.larger - self.smaller


def _ineq(smaller: float, larger: float, slack: float) -> InequalityCheck:
    if smaller == -math.inf or larger == math.inf:
        ok = True
    else:
        ok = smaller <= larger + slack
    return InequalityCheck(float(smaller), float(larger), bool(ok), slack)


def check_prop_hypo_renyi(
    rho, sigma, eps: float, alpha: float, slack: float = 1e-7, dh: float | None = None, div: float | None = None
):
    """``D_H^eps >= (alpha/(alpha-1)) log2(1/eps) + D_alpha`` for ``alpha in (0, 1)``.

    ``dh`` and ``div`` (the Petz ``D_alpha``) may be passed in precomputed.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if dh is None:
        dh = hyp_test_rel_entropy(rho, sigma, eps).value
    if div is None:
        div = renyi_relative_entropy(rho, sigma, alpha).value
    rhs = alpha / (alpha - 1) * math.log2(1 / eps) + div
    return _ineq(rhs, dh, slack)


def check_cmw_upper(
    rho, sigma, eps: float, alpha: float, slack: float = 1e-7, dh: float | None = None, div: float | None = None
):
    """``D_H^eps <= D~_alpha + (alpha/(alpha-1)) log2(1/(1-eps))`` for ``alpha > 1``.

    ``dh`` and ``div`` (the sandwiched ``D~_alpha``) may be passed in precomputed.
    """
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    if dh is None:
        dh = hyp_test_rel_entropy(rho, sigma, eps).value
    if div is None:
        div = sandwiched_renyi_relative_entropy(rho, sigma, alpha).value
    rhs = div + alpha / (alpha - 1) * math.log2(1 / (1 - eps))
    return _ineq(dh, rhs, slack)


def check_spectral_ineq(a, b, s: float, slack: float = 1e-8) -> InequalityCheck:
    """``P_e*(A, B) <= Tr A^s B^(1-s)`` for ``s in [0, 1]``."""
    am, bm = as_matrix(a), as_matrix(b)
    rhs = float(np.real(np.trace(la.psd_power(am, s) @ la.psd_power(bm, 1 - s))))
    return _ineq(helstrom_error(am, bm).value, rhs, slack)


def check_hayashi_nagaoka(s_op, t_op, c: float, slack: float = 1e-8) -> InequalityCheck:
    """``I - (S+T)^{-1/2} S (S+T)^{-1/2} <= (1+c)(I-S) + (2+c+1/c) T``.

    Reports the minimum eigenvalue of the difference as ``margin``.
    """
    sm, tm = as_matrix(s_op), as_matrix(t_op)
    if c <= 0:
        raise ValueError("c must be positive")
    eye = np.eye(sm.shape[0])
    root = la.psd_power(sm + tm, -0.5)
    lhs = eye - root @ sm @ root
    rhs = (1 + c) * (eye - sm) + (2 + c + 1 / c) * tm
    lam = float(np.linalg.eigvalsh(la.hermitize(rhs - lhs))[0])
    return _ineq(0.0, lam, slack)


def check_gentle(rho, lam, eps: float | None = None, slack: float = 1e-8) -> InequalityCheck:
    """``||rho - sqrt(L) rho sqrt(L)||_1 <= 2 sqrt(eps)`` with ``eps = Tr (I - L) rho`` by default."""
    r, lm = as_matrix(rho), as_matrix(lam)
    if eps is None:
        eps = max(float(np.real(np.trace(r) - np.trace(lm @ r))), 0.0)
    root = la.psd_power(lm, 0.5)
    return _ineq(la.trace_norm(r - root @ r @ root), 2 * math.sqrt(eps), slack)


def check_close(rho, sigma, lam, slack: float = 1e-8) -> InequalityCheck:
    """``Tr L sigma - ||rho - sigma||_1 <= Tr L rho``."""
    r, s, lm = as_matrix(rho), as_matrix(sigma), as_matrix(lam)
    lhs = float(np.real(np.trace(lm @ s))) - la.trace_norm(r - s)
    return _ineq(lhs, float(np.real(np.trace(lm @ r))), slack)


# Asymptotics ------------------------------------------------------------

_NORMAL = statistics.NormalDist()


def inverse_normal_cdf(p: float) -> float:
    """``Phi^{-1}(p)``; ``-inf`` at 0 and ``+inf`` at 1."""
    if p <= 0:
        return -math.inf
    if p >= 1:
        return math.inf
    x = _NORMAL.inv_cdf(p)
    # One Newton step on Phi(x) = p.
    phi = math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    if phi > 0:
        x -= (0.5 * math.erfc(-x / math.sqrt(2)) - p) / phi
    return x


def second_order_approx(rho, sigma, n: int, eps: float) -> float:
    """``n D + sqrt(n V) Phi^{-1}(eps)``."""
    d = relative_entropy(rho, sigma).value
    v = relative_entropy_variance(rho, sigma)
    return n * d + math.sqrt(n * v) * inverse_normal_cdf(eps)


@dataclass(frozen=True)
class SteinSandwich:
    lower: float
    exact: float
    upper: float
    n: int
    alpha_lo: float
    alpha_hi: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def ordered(self) -> bool:
        tol = 1e-7 / self.n
        return self.lower <= self.exact + tol and self.exact <= self.upper + tol


def stein_sandwich(
    rho, sigma, n: int, eps: float, alpha_lo: float | None = None, alpha_hi: float | None = None
) -> SteinSandwich:
    """Per-copy Rényi bounds around ``D_H^eps(rho^n || sigma^n) / n``.

    Defaults use ``alpha = 1 -/+ 1/sqrt(n)``.
    """
    a_lo = 1 - 1 / math.sqrt(n) if alpha_lo is None else alpha_lo
    a_hi = 1 + 1 / math.sqrt(n) if alpha_hi is None else alpha_hi
    if not (0 < a_lo < 1 < a_hi):
        raise ValueError("need 0 < alpha_lo < 1 < alpha_hi")
    exact = hyp_test_rel_entropy(rho, sigma, eps, n=n).value / n
    lower = a_lo / (n * (a_lo - 1)) * math.log2(1 / eps) + renyi_relative_entropy(rho, sigma, a_lo).value
    upper = a_hi / (n * (a_hi - 1)) * math.log2(1 / (1 - eps)) + sandwiched_renyi_relative_entropy(
        rho, sigma, a_hi
    ).value
    return SteinSandwich(lower, exact, upper, n, a_lo, a_hi)


__all__ = [
    "HypTestValue",
    "MinSigmaResult",
    "HelstromResult",
    "ChernoffRow",
    "InequalityCheck",
    "SteinSandwich",
    "hyp_test_rel_entropy",
    "hyp_test_mutual_info",
    "hyp_test_mutual_info_min_sigma",
    "helstrom_error",
    "pe_star_composite",
    "chernoff_multi_trace",
    "check_prop_hypo_renyi",
    "check_cmw_upper",
    "check_spectral_ineq",
    "check_hayashi_nagaoka",
    "check_gentle",
    "check_close",
    "inverse_normal_cdf",
    "second_order_approx",
    "stein_sandwich",
    "type_class_logs",
]
