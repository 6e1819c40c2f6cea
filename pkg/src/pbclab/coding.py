"""Position-based coding shared by the point-to-point and multiple-access modules.

Sender ``k`` holds ``M_k`` copies of its reference system ``R_k``; message
``m_k`` selects which copy carries the channel-correlated part. The decoder
applies the square-root measurement built from ``Gamma^m = T`` acting on
``(R_{m_1}, ..., R_{m_K}, C)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .entropy import golden_minimize
from .operators import BudgetError, Operand, QuantumChannel, as_matrix, dims_of

SIM_BUDGET = 2**14


def hn_constants(c: float) -> tuple[float, float]:
    """Weights ``(1 + c, 2 + c + 1/c)`` from the operator inequality."""
    if c <= 0:
        raise ValueError("c must be positive")
    return 1 + c, 2 + c + 1 / c


def channel_output(
    resources: Sequence[Operand], channel: QuantumChannel, decoupled: Sequence[int] = ()
) -> tuple[np.ndarray, list[int]]:
    """``N(x_k theta_k)`` on ``[R_1, ..., R_K, C]``.

    Each resource is a bipartite state on ``(R_k, A_k)``. Senders listed in
    ``decoupled`` contribute ``theta_R x theta_A`` instead of ``theta_RA``.
    The channel output is flattened into a single system ``C``.
    """
    mats, dims = [], []
    for k, th in enumerate(resources):
        dk = dims_of(th)
        if len(dk) != 2:
            raise ValueError("each resource must be bipartite (R, A)")
        m = as_matrix(th)
        if k in decoupled:
            m = np.kron(la.partial_trace(m, dk, [0]), la.partial_trace(m, dk, [1]))
        mats.append(m)
        dims += list(dk)
    joint = la.kron_all(mats)
    a_idx = [2 * k + 1 for k in range(len(resources))]
    if math.prod(dims[i] for i in a_idx) != channel.d_in:
        raise ValueError("channel input dimension does not match the resources")
    out, _ = la.apply_kraus(joint, dims, channel.kraus, a_idx, [channel.d_out])
    r_dims = [dims[2 * k] for k in range(len(resources))]
    return out, r_dims + [channel.d_out]


def _place(blocks: Sequence[tuple[np.ndarray, Sequence[int]]], dims: Sequence[int]) -> np.ndarray:
    """Tensor product of ``(matrix, targets)`` blocks, returned in natural order."""
    order = [t for _, ts in blocks for t in ts]
    full = la.kron_all([m for m, _ in blocks])
    inv = [order.index(i) for i in range(len(dims))]
    return la.permute(full, [dims[i] for i in order], inv)


@dataclass(frozen=True)
class CodePerformance:
    """Exact square-root-measurement error next to its one-shot bound.

    ``exact_error`` is the error for the first message; ``message_spread`` is
    the largest deviation seen on the other simulated messages.
    """

    exact_error: float
    bound: float
    c: float
    message_spread: float
    abstain_weight: float
    test: np.ndarray = field(repr=False, default=None)

    @property
    def within_bound(self) -> bool:
        return self.exact_error <= self.bound + 1e-9

    def record(self) -> dict:
        return {
            "exact_error": self.exact_error,
            "bound": self.bound,
            "c": self.c,
            "message_spread": self.message_spread,
            "abstain_weight": self.abstain_weight,
        }


def simulate_position_code(
    omega: np.ndarray,
    omega_dims: Sequence[int],
    sizes: Sequence[int],
    test: np.ndarray,
    messages: Sequence[Sequence[int]] | None = None,
    budget: int = SIM_BUDGET,
):
    """Exact error of the position-based code with the square-root measurement.

    ``omega`` lives on ``[R_1, ..., R_K, C]``. Returns a list of
    ``(message, error)`` pairs and the weight of the abstain outcome for the
    first message. Abstaining counts as an error.
    """
    k_senders = len(sizes)
    r_dims = list(omega_dims[:k_senders])
    d_c = math.prod(omega_dims[k_senders:])
    dims: list[int] = []
    offset = []
    for k, mk in enumerate(sizes):
        offset.append(len(dims))
        dims += [r_dims[k]] * int(mk)
    c_idx = len(dims)
    dims.append(d_c)
    total = math.prod(dims)
    if total > budget:
        raise BudgetError(f"simulation dimension {total} exceeds {budget}")
    marg = [la.partial_trace(omega, list(r_dims) + [d_c], [k]) for k in range(k_senders)]

    def slots(msg):
        return [offset[k] + msg[k] for k in range(k_senders)]

    all_msgs = list(itertools.product(*[range(int(m)) for m in sizes]))
    s_op = np.zeros((total, total), dtype=complex)
    for msg in all_msgs:
        s_op += la.embed(test, dims, slots(msg) + [c_idx])
    root = la.psd_power(s_op, -0.5)
    if messages is None:
        messages = [all_msgs[0], all_msgs[-1]] if len(all_msgs) > 1 else [all_msgs[0]]
    out = []
    abstain = math.nan
    for msg in messages:
        used = slots(msg)
        blocks = [(omega, used + [c_idx])]
        for k, mk in enumerate(sizes):
            for j in range(int(mk)):
                if j != msg[k]:
                    blocks.append((marg[k], [offset[k] + j]))
        rho = _place(blocks, dims)
        gamma = la.embed(test, dims, used + [c_idx])
        smoothed = root @ rho @ root
        success = float(np.real(np.sum(gamma.T * smoothed)))
        out.append((tuple(msg), 1 - success))
        if math.isnan(abstain):
            supp = root @ s_op @ root
            abstain = float(np.real(np.trace(rho) - np.sum(supp.T * rho)))
    return out, abstain


def sup_on_grid(h, grid: Sequence[float], tol: float = 1e-10):
    """Maximize ``h`` over ``[min(grid), max(grid)]``.

    The grid values are checked for unimodality. If they are unimodal, the
    bracket around the best point is refined by golden section. Otherwise a
    4097-point scan is used. Returns ``(value, argmax, unimodal)``.
    """
    grid = np.asarray(sorted(grid), dtype=float)
    vals = np.array([h(s) for s in grid])
    k = int(np.argmax(vals))
    scale = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
    rising = np.all(np.diff(vals[: k + 1]) >= -scale)
    falling = np.all(np.diff(vals[k:]) <= scale)
    unimodal = bool(rising and falling)
    if unimodal:
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        x, fx = golden_minimize(lambda s: -h(s), lo, hi, tol=tol)
        if -fx > vals[k]:
            return float(-fx), float(x), True
        return float(vals[k]), float(grid[k]), True
    fine = np.linspace(grid[0], grid[-1], 4097)
    fv = np.array([h(s) for s in fine])
    j = int(np.argmax(fv))
    return float(fv[j]), float(fine[j]), False


DEFAULT_S_GRID = tuple(np.linspace(0.0, 1.0, 21))
