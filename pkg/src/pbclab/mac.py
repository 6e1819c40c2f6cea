"""Multiple-access coding: simulation, bounds, derandomization and rate regions.

Joint states for rate regions live on ``[S_1, ..., S_K, C]`` with the
receiver system last. Sender indices in subsets are 1-based in labels and
0-based in code.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

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
from .entropy import (
    _PairSpectra,
    collision_conditional_entropy,
    conditional_entropy,
    mutual_information,
    relative_entropy,
    renyi2_entropy,
    von_neumann_entropy,
)
from .operators import BudgetError, DensityOperator, Operand, QuantumChannel, as_density, as_matrix, dims_of


def nonempty_subsets(k: int) -> list[tuple[int, ...]]:
    return [s for r in range(1, k + 1) for s in itertools.combinations(range(k), r)]


# Position-based MAC codes -----------------------------------------------


@dataclass(frozen=True)
class MacCodeSpec:
    """Resources ``theta_{R_k A_k}``, channel ``A_1..A_K -> C``, message sizes, test on ``R_1..R_K C``."""

    resources: tuple[DensityOperator, ...]
    channel: QuantumChannel
    sizes: tuple[int, ...]
    test: np.ndarray | None = field(default=None, repr=False)
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(as_density(r) for r in self.resources))
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))
        if len(self.resources) != len(self.sizes) or not self.sizes:
            raise ValueError("need one message size per resource")
        if min(self.sizes) < 1:
            raise ValueError("message sizes must be positive")
        hn_constants(self.c)


def _decoupled_states(spec: MacCodeSpec):
    omega, dims = channel_output(spec.resources, spec.channel)
    parts = {j: channel_output(spec.resources, spec.channel, decoupled=j)[0] for j in nonempty_subsets(len(spec.sizes))}
    return omega, dims, parts


def composite_test(omega: np.ndarray, parts: Mapping[tuple, np.ndarray], sizes: Sequence[int]) -> np.ndarray:
    """``{omega - sum_J (prod_{j in J} M_j) omega_J >= 0}``."""
    x = omega.copy()
    for j, w in parts.items():
        x = x - math.prod(sizes[i] for i in j) * w
    return la.positive_projector(x)


def _spec_test(spec, omega, parts):
    if spec.test is not None:
        return np.asarray(as_matrix(spec.test), dtype=complex)
    return composite_test(omega, parts, spec.sizes)


def mac_one_shot_bound(spec: MacCodeSpec) -> float:
    """``c_I Tr{(I-T) omega} + c_II sum_J prod_{j in J}(M_j - 1) Tr{T omega_J}``.

    The sum runs over all ``2^K - 1`` nonempty sender subsets ``J``; in
    ``omega_J`` the senders in ``J`` are decoupled from the channel input.
    """
    omega, _, parts = _decoupled_states(spec)
    t_op = _spec_test(spec, omega, parts)
    return _bound_from(omega, parts, t_op, spec.sizes, spec.c)


def _bound_from(omega, parts, t_op, sizes, c):
    c1, c2 = hn_constants(c)
    miss = float(np.real(np.trace(omega) - np.trace(t_op @ omega)))
    false = 0.0
    for j, w in parts.items():
        mult = math.prod(sizes[i] - 1 for i in j)
        if mult:
            false += mult * float(np.real(np.trace(t_op @ w)))
    return c1 * miss + c2 * false


def mac_bound_terms(spec: MacCodeSpec) -> dict[tuple[int, ...], float]:
    """Per-subset false-alarm traces ``Tr{T omega_J}`` (keys are 0-based subsets)."""
    omega, _, parts = _decoupled_states(spec)
    t_op = _spec_test(spec, omega, parts)
    return {j: float(np.real(np.trace(t_op @ w))) for j, w in parts.items()}


def simulate_mac(spec: MacCodeSpec, budget: int = SIM_BUDGET) -> CodePerformance:
    """Exact simultaneous-decoding error of the position-based MAC code."""
    omega, dims, parts = _decoupled_states(spec)
    t_op = _spec_test(spec, omega, parts)
    errs, abstain = simulate_position_code(omega, dims, spec.sizes, t_op, budget=budget)
    first = errs[0][1]
    spread = max(abs(e - first) for _, e in errs)
    bound = _bound_from(omega, parts, t_op, spec.sizes, spec.c)
    return CodePerformance(first, bound, spec.c, spread, abstain, t_op)


# Classical-quantum MAC and derandomization ------------------------------


@dataclass(frozen=True)
class CqMac:
    """``(x, y) -> rho^{x,y}`` with input distributions ``p_x`` and ``p_y``."""

    p_x: np.ndarray
    p_y: np.ndarray
    outputs: Mapping[tuple[int, int], np.ndarray]

    def __post_init__(self):
        px = np.asarray(self.p_x, dtype=float)
        py = np.asarray(self.p_y, dtype=float)
        for p in (px, py):
            if np.any(p < 0) or abs(p.sum() - 1) > 1e-10:
                raise ValueError("input distributions must be probability vectors")
        outs = {}
        for x in range(px.size):
            for y in range(py.size):
                if (x, y) not in self.outputs:
                    raise ValueError(f"missing output for input pair {(x, y)}")
                outs[(x, y)] = as_density(self.outputs[(x, y)]).matrix
        d = {o.shape for o in outs.values()}
        if len(d) != 1:
            raise ValueError("all outputs must share one dimension")
        object.__setattr__(self, "p_x", px)
        object.__setattr__(self, "p_y", py)
        object.__setattr__(self, "outputs", outs)

    @property
    def d_out(self) -> int:
        return next(iter(self.outputs.values())).shape[0]

    def averages(self):
        """``rho_bar^x``, ``rho_bar^y`` and ``rho_bar``."""
        nx, ny = self.p_x.size, self.p_y.size
        bx = [sum(self.p_y[y] * self.outputs[(x, y)] for y in range(ny)) for x in range(nx)]
        by = [sum(self.p_x[x] * self.outputs[(x, y)] for x in range(nx)) for y in range(ny)]
        bar = sum(self.p_x[x] * bx[x] for x in range(nx))
        return bx, by, bar

    def omega(self) -> DensityOperator:
        """Classical-quantum state on ``[X, Y, C]``."""
        nx, ny, d = self.p_x.size, self.p_y.size, self.d_out
        m = np.zeros((nx * ny * d,) * 2, dtype=complex)
        for (x, y), rho in self.outputs.items():
            i = (x * ny + y) * d
            m[i : i + d, i : i + d] = self.p_x[x] * self.p_y[y] * rho
        return DensityOperator(m, (nx, ny, d))


def cq_default_tests(cq: CqMac, L: int, M: int) -> dict[tuple[int, int], np.ndarray]:
    """``Q^{x,y} = {rho^{x,y} - L rho_bar^y - M rho_bar^x - L M rho_bar >= 0}``."""
    bx, by, bar = cq.averages()
    return {
        (x, y): la.positive_projector(rho - L * by[y] - M * bx[x] - L * M * bar)
        for (x, y), rho in cq.outputs.items()
    }


def cq_one_shot_bound(cq: CqMac, L: int, M: int, tests=None, c: float = 1.0) -> float:
    """Randomness-assisted error bound for the classical-quantum MAC."""
    tests = cq_default_tests(cq, L, M) if tests is None else tests
    bx, by, bar = cq.averages()
    c1, c2 = hn_constants(c)
    miss = f1 = f2 = f12 = 0.0
    for (x, y), rho in cq.outputs.items():
        w = cq.p_x[x] * cq.p_y[y]
        q = tests[(x, y)]
        miss += w * float(np.real(1 - np.trace(q @ rho)))
        f1 += w * float(np.real(np.trace(q @ by[y])))
        f2 += w * float(np.real(np.trace(q @ bx[x])))
        f12 += w * float(np.real(np.trace(q @ bar)))
    return float(c1 * miss + c2 * ((L - 1) * f1 + (M - 1) * f2 + (L - 1) * (M - 1) * f12))


def cq_support_tests(cq: CqMac) -> dict[tuple[int, int], np.ndarray]:
    """``Q^{x,y}`` = projector onto the support of ``rho^{x,y}``."""
    return {xy: la.support_projector(rho) for xy, rho in cq.outputs.items()}


def cq_tests(cq: CqMac, L: int, M: int, kind: str = "composite"):
    """Named test families for derandomization: ``composite`` or ``support``."""
    if kind == "composite":
        return cq_default_tests(cq, L, M)
    if kind == "support":
        return cq_support_tests(cq)
    raise ValueError(f"unknown test family {kind!r}")


def codebook_error(cq: CqMac, xs: Sequence[int], ys: Sequence[int], tests) -> tuple[float, list]:
    """Average error of the square-root decoder built from ``Q^{x_l, y_m}``."""
    qs = {(l, m): tests[(x, y)] for l, x in enumerate(xs) for m, y in enumerate(ys)}
    root = la.psd_power(sum(qs.values()), -0.5)
    povm = {lm: root @ q @ root for lm, q in qs.items()}
    total = 0.0
    for (l, m), el in povm.items():
        rho = cq.outputs[(xs[l], ys[m])]
        total += 1 - float(np.real(np.sum(el.T * rho)))
    return total / len(povm), povm


@dataclass(frozen=True)
class DerandomizedCode:
    """Best deterministic codebook found and the ensemble it was drawn from.

    ``ensemble_average`` is exact when ``exhaustive``; otherwise it is the
    mean over the sampled codebooks.
    """

    codebook_x: tuple[int, ...]
    codebook_y: tuple[int, ...]
    avg_error: float
    ensemble_average: float
    exhaustive: bool
    searched: int
    bound: float
    povm: dict = field(repr=False)

    def record(self) -> dict:
        return {
            "codebook_x": list(self.codebook_x),
            "codebook_y": list(self.codebook_y),
            "avg_error": self.avg_error,
            "ensemble_average": self.ensemble_average,
            "exhaustive": self.exhaustive,
            "searched": self.searched,
            "bound": self.bound,
        }


def derandomize_cq_mac(
    cq: CqMac,
    L: int,
    M: int,
    search_budget: int = 1_000_000,
    tests=None,
    seed: int = 0,
    c: float = 1.0,
) -> DerandomizedCode:
    """Deterministic codebooks for a classical-quantum MAC.

    Every codebook ``(x_1..x_L, y_1..y_M)`` is enumerated when there are at
    most ``search_budget`` of them; otherwise ``search_budget`` codebooks are
    sampled from ``p_x^L p_y^M``. The minimum-error codebook is returned
    (ties broken by enumeration order). Its error never exceeds the
    ensemble average.
    """
    if search_budget < 1:
        raise ValueError("search budget must be positive")
    if L < 1 or M < 1:
        raise ValueError("L and M must be positive")
    if tests is None or isinstance(tests, str):
        tests = cq_tests(cq, L, M, tests or "composite")
    nx, ny = cq.p_x.size, cq.p_y.size
    n_books = nx**L * ny**M
    exhaustive = n_books <= search_budget
    if exhaustive:
        books = itertools.product(itertools.product(range(nx), repeat=L), itertools.product(range(ny), repeat=M))
    else:
        rng = np.random.default_rng(seed)
        books = (
            (tuple(rng.choice(nx, size=L, p=cq.p_x)), tuple(rng.choice(ny, size=M, p=cq.p_y)))
            for _ in range(search_budget)
        )
    best = (math.inf, None, None, None)
    acc = 0.0
    count = 0
    for xs, ys in books:
        err, povm = codebook_error(cq, xs, ys, tests)
        w = float(np.prod(cq.p_x[list(xs)]) * np.prod(cq.p_y[list(ys)])) if exhaustive else 1.0
        acc += w * err
        count += 1
        if err < best[0]:
            best = (err, xs, ys, povm)
    ensemble = acc if exhaustive else acc / count
    if best[0] > ensemble + 1e-9:
        raise AssertionError("best codebook is worse than the ensemble average")
    bound = cq_one_shot_bound(cq, L, M, tests, c)
    return DerandomizedCode(
        tuple(int(v) for v in best[1]),
        tuple(int(v) for v in best[2]),
        float(best[0]),
        float(ensemble),
        exhaustive,
        count,
        bound,
        best[3],
    )


# Rate regions -----------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    subset: tuple[int, ...]
    bound: float
    label: str


@dataclass(frozen=True)
class RateRegion:
    """``{R >= 0 : sum_{j in J} R_j <= bound(J) for every nonempty J}``."""

    kind: str
    n_senders: int
    constraints: tuple[Constraint, ...]
    note: str = ""

    def bound(self, subset: Sequence[int]) -> float:
        key = tuple(sorted(subset))
        for c in self.constraints:
            if c.subset == key:
                return c.bound
        raise KeyError(key)

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(self.bound((k,))) for k in range(self.n_senders))

    def contains(self, rates: Sequence[float], tol: float = 1e-12) -> bool:
        r = np.asarray(rates, dtype=float)
        if r.size != self.n_senders or np.any(r < -tol):
            return False
        return all(sum(r[list(c.subset)]) <= c.bound + tol for c in self.constraints)

    def vertices_2d(self) -> np.ndarray:
        """Corner points of a two-sender region, counter-clockwise; empty if infeasible."""
        if self.n_senders != 2:
            raise ValueError("vertices are only defined for two senders")
        a, b, c = self.bound((0,)), self.bound((1,)), self.bound((0, 1))
        # Half-planes n . x <= h.
        planes = [((-1, 0), 0.0), ((0, -1), 0.0), ((1, 0), a), ((0, 1), b), ((1, 1), c)]
        pts = []
        for (n1, h1), (n2, h2) in itertools.combinations(planes, 2):
            mat = np.array([n1, n2], dtype=float)
            if abs(np.linalg.det(mat)) < 1e-14:
                continue
            x = np.linalg.solve(mat, [h1, h2])
            if all(np.dot(n, x) <= h + 1e-12 for n, h in planes):
                pts.append(x)
        if not pts:
            return np.zeros((0, 2))
        pts = np.unique(np.round(np.array(pts), 13), axis=0)
        centre = pts.mean(axis=0)
        ang = np.arctan2(pts[:, 1] - centre[1], pts[:, 0] - centre[0])
        return pts[np.argsort(ang)]

    def record(self) -> dict:
        return {
            "kind": self.kind,
            "n_senders": self.n_senders,
            "constraints": [
                {"subset": [i + 1 for i in c.subset], "bound": c.bound, "label": c.label}
                for c in self.constraints
            ],
            "bounded": self.bounded,
        }


def _rates_name(j: Sequence[int]) -> str:
    return " + ".join(f"R{i + 1}" for i in j)


def _sys_name(idx: Sequence[int]) -> str:
    return "".join(f"S{i + 1}" for i in idx)


def _check_region_state(omega: Operand, n_senders: int):
    dims = dims_of(omega)
    if len(dims) != n_senders + 1:
        raise ValueError(f"expected a state on {n_senders} sender systems plus C, got dims {dims}")
    return list(range(n_senders)), n_senders


def renyi2_region(omega: Operand, n_senders: int) -> RateRegion:
    """``sum_J R <= H_2(S(J^c) C) - H(S(J^c) C | S(J))``.

    For two senders this pairs the bound with ``S_2 C`` conditioned on
    ``S_1`` with ``R_1``. The alternate labeling, which attaches the same
    expression to ``R_2``, is recorded in each label.
    """
    senders, c = _check_region_state(omega, n_senders)
    out = []
    for j in nonempty_subsets(n_senders):
        rest = [i for i in senders if i not in j] + [c]
        val = renyi2_entropy(omega, rest) - conditional_entropy(omega, rest, list(j))
        label = f"{_rates_name(j)} <= H2({_sys_name(rest[:-1])}C) - H({_sys_name(rest[:-1])}C|{_sys_name(j)})"
        if n_senders == 2 and len(j) == 1:
            other = 2 - j[0]
            label += f" [alternate labeling: R{other}]"
        out.append(Constraint(tuple(j), val, label))
    return RateRegion("renyi2", n_senders, tuple(out))


def collision_region(omega: Operand, n_senders: int) -> RateRegion:
    """``sum_J R <= H_2(C | S(J^c)) - H(C | S_1 ... S_K)`` with ``H_2(C|{}) = H_2(C)``."""
    senders, c = _check_region_state(omega, n_senders)
    h_all = conditional_entropy(omega, [c], senders)
    out = []
    for j in nonempty_subsets(n_senders):
        rest = [i for i in senders if i not in j]
        val = collision_conditional_entropy(omega, [c], rest) - h_all
        label = f"{_rates_name(j)} <= H2(C|{_sys_name(rest)}) - H(C|{_sys_name(senders)})"
        out.append(Constraint(tuple(j), val, label))
    return RateRegion("collision", n_senders, tuple(out))


def mi_region(omega: Operand, n_senders: int) -> RateRegion:
    """``sum_J R <= I(S(J); C S(J^c))``; for three or more senders this region is conjectured."""
    senders, c = _check_region_state(omega, n_senders)
    out = []
    for j in nonempty_subsets(n_senders):
        rest = [i for i in senders if i not in j] + [c]
        val = mutual_information(omega, list(j), rest)
        out.append(Constraint(tuple(j), val, f"{_rates_name(j)} <= I({_sys_name(j)};C{_sys_name(rest[:-1])})"))
    note = "conjectured for K >= 3" if n_senders >= 3 else ""
    return RateRegion("mi", n_senders, tuple(out), note)


def convex_hull_union(regions: Sequence[RateRegion]) -> np.ndarray:
    """Vertices of the convex hull of the union of two-sender regions (time sharing)."""
    pts = [r.vertices_2d() for r in regions]
    pts = np.concatenate([p for p in pts if p.size], axis=0) if any(p.size for p in pts) else np.zeros((0, 2))
    if pts.shape[0] < 3:
        return pts
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return np.unique(pts, axis=0)
    return pts[hull.vertices]


def hull_contains(vertices: np.ndarray, point: Sequence[float], tol: float = 1e-9) -> bool:
    """Whether ``point`` is a convex combination of ``vertices`` (LP feasibility)."""
    v = np.asarray(vertices, dtype=float)
    if v.size == 0:
        return False
    n = v.shape[0]
    a_eq = np.vstack([v.T, np.ones((1, n))])
    b_eq = np.concatenate([np.asarray(point, dtype=float), [1.0]])
    res = linprog(np.zeros(n), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
    if res.status != 0:
        return False
    return bool(np.max(np.abs(a_eq @ res.x - b_eq)) <= tol)


# Divergence identities and exponents ------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    divergences: tuple[float, float, float]
    informations: tuple[float, float, float]
    rates: tuple[float, float]

    @property
    def residuals(self) -> tuple[float, float, float]:
        r1, r2 = self.rates
        shift = (r1, r2, r1 + r2)
        return tuple(abs(d - (i - s)) for d, i, s in zip(self.divergences, self.informations, shift))


def _two_sender_states(theta: Operand, gamma: Operand, channel: QuantumChannel):
    res = [as_density(theta), as_density(gamma)]
    rho, dims = channel_output(res, channel)
    b1, _ = channel_output(res, channel, decoupled=[0])
    b2, _ = channel_output(res, channel, decoupled=[1])
    b3, _ = channel_output(res, channel, decoupled=[0, 1])
    return rho, dims, (b1, b2, b3)


def mac_divergence_identities(
    theta: Operand, gamma: Operand, channel: QuantumChannel, r1: float, r2: float
) -> IdentityCheck:
    """``D(rho||B_1) = I(R;CS) - R_1``, ``D(rho||B_2) = I(S;CR) - R_2``, ``D(rho||B_3) = I(RS;C) - R_1 - R_2``.

    Divergences use matrix logarithms against the scaled decoupled states; the
    informations come from marginal entropies.
    """
    rho, dims, (b1, b2, b3) = _two_sender_states(theta, gamma, channel)
    divs = (
        relative_entropy(rho, 2.0**r1 * b1).value,
        relative_entropy(rho, 2.0**r2 * b2).value,
        relative_entropy(rho, 2.0 ** (r1 + r2) * b3).value,
    )
    op = DensityOperator(rho, tuple(dims))
    h_all = von_neumann_entropy(op)
    infos = (
        von_neumann_entropy(op, [0]) + von_neumann_entropy(op, [1, 2]) - h_all,
        von_neumann_entropy(op, [1]) + von_neumann_entropy(op, [0, 2]) - h_all,
        von_neumann_entropy(op, [0, 1]) + von_neumann_entropy(op, [2]) - h_all,
    )
    return IdentityCheck(divs, infos, (r1, r2))


@dataclass(frozen=True)
class BoundaryCrossing:
    t_divergence: float
    t_information: float

    @property
    def gap(self) -> float:
        return abs(self.t_divergence - self.t_information)


def boundary_crossing(
    theta: Operand, gamma: Operand, channel: QuantumChannel, direction: Sequence[float], tol: float = 1e-10
) -> BoundaryCrossing:
    """Scale at which ``min_i D(rho||B_i)`` changes sign along ``t * direction``.

    Found by bisection on the divergences and compared with the crossing of
    the mutual-information region boundary.
    """
    d1, d2 = (float(x) for x in direction)
    if d1 < 0 or d2 < 0 or d1 + d2 <= 0:
        raise ValueError("direction must be non-negative and nonzero")
    rho, dims, (b1, b2, b3) = _two_sender_states(theta, gamma, channel)

    def min_div(t):
        r1, r2 = t * d1, t * d2
        return min(
            relative_entropy(rho, 2.0**r1 * b1).value,
            relative_entropy(rho, 2.0**r2 * b2).value,
            relative_entropy(rho, 2.0 ** (r1 + r2) * b3).value,
        )

    lo, hi = 0.0, 1.0
    while min_div(hi) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if min_div(mid) > 0:
            lo = mid
        else:
            hi = mid
    op = DensityOperator(rho, tuple(dims))
    i1 = mutual_information(op, [0], [1, 2])
    i2 = mutual_information(op, [1], [0, 2])
    i3 = mutual_information(op, [0, 1], [2])
    cands = [i3 / (d1 + d2)]
    if d1 > 0:
        cands.append(i1 / d1)
    if d2 > 0:
        cands.append(i2 / d2)
    return BoundaryCrossing((lo + hi) / 2, min(cands))


@dataclass(frozen=True)
class MacExponent:
    """Minimum over sender subsets of ``sup_s (1-s)[I_s - sum_J R]`` (conditional exponent)."""

    value: float
    terms: dict
    s_opt: dict
    label: str = "conditional exponent"


def decoupled_marginal(omega: np.ndarray, dims: Sequence[int], subset: Sequence[int]) -> np.ndarray:
    """``(x_{j in J} omega_{S_j}) x omega_{S(J^c) C}`` in natural order."""
    n = len(dims)
    blocks = [(la.partial_trace(omega, dims, [j]), [j]) for j in subset]
    rest = [i for i in range(n) if i not in subset]
    blocks.append((la.partial_trace(omega, dims, rest), rest))
    order = [t for _, ts in blocks for t in ts]
    full = la.kron_all([m for m, _ in blocks])
    inv = [order.index(i) for i in range(n)]
    return la.permute(full, [dims[i] for i in order], inv)


def mac_error_exponent(
    omega: Operand, rates: Sequence[float], s_grid: Sequence[float] = DEFAULT_S_GRID
) -> MacExponent:
    """Error exponent of simultaneous decoding at the given rates.

    Each term is ``sup_{s in [0,1]} (1-s)[D_s(omega || omega_J) - sum_J R]``
    with Petz divergences; the exponent is the smallest term.
    """
    dims = list(dims_of(omega))
    k = len(dims) - 1
    if len(rates) != k:
        raise ValueError("need one rate per sender")
    m = as_matrix(omega)
    terms, s_opt = {}, {}
    for j in nonempty_subsets(k):
        ps = _PairSpectra(m, decoupled_marginal(m, dims, j))
        shift = sum(rates[i] for i in j)

        def h(s, ps=ps, shift=shift):
            if s >= 1:
                return 0.0
            return (1 - s) * (ps.log_power_trace(s, 1 - s) / (s - 1) - shift)

        val, s_best, _ = sup_on_grid(h, s_grid)
        key = tuple(i + 1 for i in j)
        terms[key], s_opt[key] = val, s_best
    return MacExponent(min(terms.values()), terms, s_opt)


__all__ = [
    "MacCodeSpec",
    "CqMac",
    "RateRegion",
    "Constraint",
    "DerandomizedCode",
    "IdentityCheck",
    "BoundaryCrossing",
    "MacExponent",
    "simulate_mac",
    "mac_one_shot_bound",
    "mac_bound_terms",
    "composite_test",
    "derandomize_cq_mac",
    "cq_default_tests",
    "cq_one_shot_bound",
    "cq_support_tests",
    "cq_tests",
    "codebook_error",
    "renyi2_region",
    "collision_region",
    "mi_region",
    "convex_hull_union",
    "hull_contains",
    "mac_divergence_identities",
    "boundary_crossing",
    "mac_error_exponent",
    "decoupled_marginal",
    "nonempty_subsets",
    "BudgetError",
]
