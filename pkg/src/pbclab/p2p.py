"""Entanglement-assisted point-to-point coding by position-based encoding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import linalg as la
from .coding import (
    DEFAULT_S_GRID,
    SIM_BUDGET,
    CodePerformance,
    channel_output,
    hn_constants,
    simulate_position_code,
    sup_on_grid,
)
from .entropy import _PairSpectra, mutual_information, mutual_information_variance
from .hyptest import (
    hyp_test_mutual_info,
    hyp_test_mutual_info_min_sigma,
    inverse_normal_cdf,
)
from .operators import DensityOperator, Operand, QuantumChannel, as_density, as_matrix, dims_of


@dataclass(frozen=True)
class P2PCodeSpec:
    """Resource ``theta_RA``, channel ``A -> B``, ``M`` messages, test ``T`` on ``R x B``."""

    resource: DensityOperator
    channel: QuantumChannel
    M: int
    test: np.ndarray | None = field(default=None, repr=False)
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "resource", as_density(self.resource))
        if self.M < 1:
            raise ValueError("M must be at least 1")
        if len(self.resource.dims) != 2:
            raise ValueError("resource must be bipartite (R, A)")
        hn_constants(self.c)


def _states(spec: P2PCodeSpec):
    omega, dims = channel_output([spec.resource], spec.channel)
    decoupled, _ = channel_output([spec.resource], spec.channel, decoupled=[0])
    return omega, decoupled, dims


def default_test(spec: P2PCodeSpec) -> np.ndarray:
    """``{N(theta_RA) - M theta_R x N(theta_A) >= 0}``."""
    omega, decoupled, _ = _states(spec)
    return la.positive_projector(omega - spec.M * decoupled)


def _test(spec, omega, decoupled):
    if spec.test is not None:
        return np.asarray(as_matrix(spec.test), dtype=complex)
    return la.positive_projector(omega - spec.M * decoupled)


def one_shot_error_bound(spec: P2PCodeSpec) -> float:
    """``(1+c) Tr{(I-T) N(theta_RA)} + (2+c+1/c)(M-1) Tr{T theta_R x N(theta_A)}``."""
    omega, decoupled, _ = _states(spec)
    t_op = _test(spec, omega, decoupled)
    c1, c2 = hn_constants(spec.c)
    miss = float(np.real(np.trace(omega) - np.trace(t_op @ omega)))
    false = float(np.real(np.trace(t_op @ decoupled)))
    return c1 * miss + c2 * (spec.M - 1) * false


def simulate_p2p(spec: P2PCodeSpec, budget: int = SIM_BUDGET) -> CodePerformance:
    """Exact square-root-measurement error, computed for message 1 and spot-checked on message M."""
    omega, decoupled, dims = _states(spec)
    t_op = _test(spec, omega, decoupled)
    errs, abstain = simulate_position_code(omega, dims, [spec.M], t_op, budget=budget)
    first = errs[0][1]
    spread = max(abs(e - first) for _, e in errs)
    return CodePerformance(first, one_shot_error_bound(spec), spec.c, spread, abstain, t_op)


@dataclass(frozen=True)
class ExponentResult:
    value: float
    s_opt: float
    unimodal: bool


def error_exponent_lower(
    resource: Operand,
    channel: QuantumChannel,
    M: int | None = None,
    rate: float | None = None,
    iid: bool = False,
    s_grid: Sequence[float] = DEFAULT_S_GRID,
) -> ExponentResult:
    """``sup_s (1-s)[I_s(R;B) - log2 M] - 2`` (one-shot) or ``sup_s (1-s)[I_s - R]`` (i.i.d.).

    ``I_s`` is the Petz-Rényi mutual information of ``N(theta_RA)`` against
    ``theta_R x N(theta_A)`` for ``s in [0, 1]``.
    """
    th = as_density(resource)
    if iid:
        if rate is None:
            raise ValueError("i.i.d. mode needs a rate")
        offset = rate
    else:
        if M is None:
            raise ValueError("one-shot mode needs M")
        offset = math.log2(M)
    omega, _ = channel_output([th], channel)
    decoupled, _ = channel_output([th], channel, decoupled=[0])
    ps = _PairSpectra(omega, decoupled)

    def h(s):
        if s >= 1:
            return 0.0
        i_s = ps.log_power_trace(s, 1 - s) / (s - 1)
        return (1 - s) * (i_s - offset)

    value, s_opt, unimodal = sup_on_grid(h, s_grid)
    if not iid:
        value -= 2
    return ExponentResult(value, s_opt, unimodal)


def one_shot_capacity_lower(resource: Operand, channel: QuantumChannel, eps: float, eta: float) -> float:
    """``I_H^{eps-eta}(R;B) - log2(4 eps / eta^2)`` for ``0 < eta < eps < 1``."""
    if not 0 < eta < eps < 1:
        raise ValueError("need 0 < eta < eps < 1")
    omega, dims = channel_output([as_density(resource)], channel)
    rho = DensityOperator(omega, tuple(dims))
    return hyp_test_mutual_info(rho, eps - eta).value - math.log2(4 * eps / eta**2)


def second_order_rate(resource: Operand, channel: QuantumChannel, n: int, eps: float) -> float:
    """``n I(R;B) + sqrt(n V(R;B)) Phi^{-1}(eps)`` (total bits)."""
    omega, dims = channel_output([as_density(resource)], channel)
    rho = DensityOperator(omega, tuple(dims))
    i = mutual_information(rho)
    v = mutual_information_variance(rho)
    return n * i + math.sqrt(n * v) * inverse_normal_cdf(eps)


@dataclass(frozen=True)
class CapacityUpper:
    """Heuristic ``max_psi min_sigma D_H^eps(N(psi_RA) || psi_R x sigma_B)``; not certified."""

    value: float
    state: np.ndarray = field(repr=False)
    evaluations: int
    restarts: int
    start_value: float


def _pure_from_params(x: np.ndarray, d: int) -> np.ndarray:
    w = np.exp(x[:d] - np.max(x[:d]))
    lam = w / w.sum()
    h = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    p = x[d:]
    nd = len(iu[0])
    h[iu] = p[:nd] + 1j * p[nd : 2 * nd]
    h = h + h.conj().T + np.diag(p[2 * nd : 2 * nd + d])
    v = expm(1j * h)
    psi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        psi += np.sqrt(lam[i]) * np.kron(np.eye(d)[i], v[:, i])
    return np.outer(psi, psi.conj())


def capacity_upper_eps_MI(
    channel: QuantumChannel,
    eps: float,
    restarts: int = 3,
    seed: int = 0,
    max_iter: int = 200,
    inner_iter: int = 60,
    inner_gap: float = 1e-5,
) -> CapacityUpper:
    """Coordinate search over pure ``psi_RA`` with ``dim R = dim A``.

    The first start is the maximally entangled state, so the estimate is
    never below its value. Further starts are seeded at random. Each
    evaluation solves the inner minimum over ``sigma_B`` by Frank-Wolfe.
    ``max_iter`` caps the evaluations per restart.
    """
    d = channel.d_in
    if d > 3 or channel.d_out > 4:
        raise ValueError("capacity search supports dim A <= 3 and dim B <= 4")
    rng = np.random.default_rng(seed)
    n_par = d + d * d
    evals = 0

    def value(x, warm):
        nonlocal evals
        evals += 1
        psi = DensityOperator(_pure_from_params(x, d), (d, d))
        omega, dims = channel_output([psi], channel)
        res = hyp_test_mutual_info_min_sigma(
            DensityOperator(omega, tuple(dims)), eps, max_iter=inner_iter, gap_tol=inner_gap, sigma0=warm
        )
        return res.value, res.sigma

    best_val, best_x = -math.inf, np.zeros(n_par)
    start_value = math.nan
    for r in range(restarts):
        x = np.zeros(n_par) if r == 0 else rng.normal(scale=1.0, size=n_par)
        fx, warm = value(x, None)
        if r == 0:
            start_value = fx
        step, used = 0.5, 1
        while used < max_iter and step > 1e-3:
            improved = False
            for i in range(n_par):
                for sgn in (1.0, -1.0):
                    if used >= max_iter:
                        break
                    y = x.copy()
                    y[i] += sgn * step
                    fy, wy = value(y, warm)
                    used += 1
                    if fy > fx + 1e-12:
                        x, fx, warm, improved = y, fy, wy, True
                        break
            if not improved:
                step /= 2
        if fx > best_val:
            best_val, best_x = fx, x
    return CapacityUpper(best_val, _pure_from_params(best_x, d), evals, restarts, start_value)


@dataclass(frozen=True)
class MarginalProductCheck:
    lhs: float
    rhs: float
    holds: bool
    converged: bool


def check_marginal_prod_lemma(rho_abc: Operand, eps: float, slack: float = 2e-3) -> MarginalProductCheck:
    """``I_D(A;BC) <= I_D(AC;B)`` for ``rho_AC = rho_A x rho_C``, with min-sigma generalized MI."""
    dims = dims_of(rho_abc)
    if len(dims) != 3:
        raise ValueError("expected a tripartite state on (A, B, C)")
    m = as_matrix(rho_abc)
    ac = la.partial_trace(m, dims, [0, 2])
    prod_ac = np.kron(la.partial_trace(m, dims, [0]), la.partial_trace(m, dims, [2]))
    if np.max(np.abs(ac - prod_ac)) > 1e-10:
        raise ValueError("rho_AC must be a product state")
    lhs = hyp_test_mutual_info_min_sigma(rho_abc, eps, a=[0], b=[1, 2])
    rhs = hyp_test_mutual_info_min_sigma(rho_abc, eps, a=[0, 2], b=[1])
    return MarginalProductCheck(lhs.value, rhs.value, lhs.value <= rhs.value + slack, lhs.converged and rhs.converged)
