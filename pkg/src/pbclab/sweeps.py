"""Seeded randomized sweeps of the operator and entropy inequalities.

Every trial draws from its own generator spawned from one ``SeedSequence``,
so results do not depend on how trials are spread over workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .hyptest import (
    InequalityCheck,
    check_close,
    check_cmw_upper,
    check_gentle,
    check_hayashi_nagaoka,
    check_prop_hypo_renyi,
    check_spectral_ineq,
    hyp_test_rel_entropy,
)
from .entropy import renyi_relative_entropy, sandwiched_renyi_relative_entropy
from .states import random_density, random_psd, random_unitary

EPS_GRID = tuple(np.round(np.arange(0.05, 0.951, 0.05), 2))
ALPHA_LOW_GRID = tuple(np.round(np.arange(0.1, 0.91, 0.1), 1))
ALPHA_HIGH_GRID = tuple(np.round(np.arange(1.1, 4.01, 0.1), 1))


def worker_count() -> int:
    """Workers allowed by ``PBCLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PBCLAB_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: Iterable, workers: int | None = None) -> list:
    """``list(map(fn, items))``, optionally on a thread pool; order is preserved."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _contraction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random ``0 <= L <= I``."""
    u = random_unitary(d, rng)
    return u @ np.diag(rng.uniform(0, 1, d)) @ u.conj().T


def _trial_gentle(rng, slack):
    d = int(rng.integers(2, 7))
    return [check_gentle(random_density(d, rng), _contraction(d, rng), slack=slack)]


def _trial_close(rng, slack):
    d = int(rng.integers(2, 7))
    return [check_close(random_density(d, rng), random_density(d, rng), _contraction(d, rng), slack=slack)]


def _trial_hn(rng, slack):
    d = int(rng.integers(2, 7))
    t_op = random_psd(d, rng, rank=int(rng.integers(1, d + 1)), scale=float(rng.uniform(0.1, 3)))
    return [check_hayashi_nagaoka(_contraction(d, rng), t_op, c, slack=slack) for c in (0.5, 1.0, 2.0)]


def _trial_spectral(rng, slack):
    d = int(rng.integers(2, 7))
    a = random_psd(d, rng, rank=int(rng.integers(1, d + 1)), scale=float(rng.uniform(0.1, 2)))
    b = random_psd(d, rng, rank=int(rng.integers(1, d + 1)), scale=float(rng.uniform(0.1, 2)))
    return [check_spectral_ineq(a, b, s, slack=slack) for s in (0.0, float(rng.uniform()), 0.5, 1.0)]


def _hyp_pair(rng):
    d = int(rng.integers(2, 4))
    return random_density(d, rng), random_density(d, rng)


def _renyi_trial(rng, slack, low: bool, high: bool):
    rho, sigma = _hyp_pair(rng)
    petz = {a: renyi_relative_entropy(rho, sigma, a).value for a in ALPHA_LOW_GRID} if low else {}
    sand = {a: sandwiched_renyi_relative_entropy(rho, sigma, a).value for a in ALPHA_HIGH_GRID} if high else {}
    out = []
    for eps in EPS_GRID:
        dh = hyp_test_rel_entropy(rho, sigma, eps).value
        out += [check_prop_hypo_renyi(rho, sigma, eps, a, slack=slack, dh=dh, div=v) for a, v in petz.items()]
        out += [check_cmw_upper(rho, sigma, eps, a, slack=slack, dh=dh, div=v) for a, v in sand.items()]
    return out


def _trial_prop1(rng, slack):
    return _renyi_trial(rng, slack, True, False)


def _trial_cmw(rng, slack):
    return _renyi_trial(rng, slack, False, True)


def _trial_renyi_bounds(rng, slack):
    return _renyi_trial(rng, slack, True, True)


CHECKS: dict[str, Callable[[np.random.Generator, float], list[InequalityCheck]]] = {
    "gentle": _trial_gentle,
    "close": _trial_close,
    "hn": _trial_hn,
    "spectral": _trial_spectral,
    "prop1": _trial_prop1,
    "cmw": _trial_cmw,
    "renyi_bounds": _trial_renyi_bounds,
}

DEFAULT_SLACK = {
    "gentle": 1e-8,
    "close": 1e-8,
    "hn": 1e-8,
    "spectral": 1e-8,
    "prop1": 1e-7,
    "cmw": 1e-7,
    "renyi_bounds": 1e-7,
}


@dataclass(frozen=True)
class SweepResult:
    name: str
    trials: int
    comparisons: int
    violations: int
    worst_margin: float
    slack: float
    seed: int

    def record(self) -> dict:
        return {
            "check": self.name,
            "trials": self.trials,
            "comparisons": self.comparisons,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "slack": self.slack,
            "seed": self.seed,
        }


def run_check(
    name: str, trials: int, seed: int, slack: float | None = None, workers: int | None = None
) -> SweepResult:
    """Run ``trials`` seeded instances of the named inequality check.

    ``worst_margin`` is the smallest ``larger - smaller`` seen; a negative
    value below ``-slack`` is a violation.
    """
    if name not in CHECKS:
        raise ValueError(f"unknown check {name!r}; choose from {sorted(CHECKS)}")
    slack = DEFAULT_SLACK[name] if slack is None else slack
    seqs = np.random.SeedSequence(seed).spawn(trials)
    trial = CHECKS[name]
    results: Sequence[list[InequalityCheck]] = ordered_map(
        lambda ss: trial(np.random.default_rng(ss), slack), seqs, workers
    )
    flat = [r for rs in results for r in rs]
    worst = min((r.margin for r in flat if math.isfinite(r.margin)), default=math.inf)
    return SweepResult(name, trials, len(flat), sum(not r.holds for r in flat), float(worst), slack, seed)
