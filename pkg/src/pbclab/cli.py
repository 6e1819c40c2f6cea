"""Command-line front end.

Every subcommand writes one JSON document (or CSV for tables) to stdout or
``--out``. Exit status: 0 success, 1 a checked invariant failed, 2 malformed
input, 3 dimension budget exceeded.

Operands are JSON files or ``builtin:NAME``; see ``BUILTIN_STATES`` and
``BUILTIN_CHANNELS``.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import io, sweeps
from .entropy import (
    mutual_information,
    relative_entropy,
    relative_entropy_variance,
    renyi2_entropy,
    renyi_relative_entropy,
    sandwiched_renyi_relative_entropy,
    von_neumann_entropy,
)
from .hyptest import GAP_TOL, chernoff_multi_trace, hyp_test_rel_entropy, second_order_approx, stein_sandwich
from .linalg import support_projector
from .mac import (
    MacCodeSpec,
    collision_region,
    convex_hull_union,
    derandomize_cq_mac,
    mac_bound_terms,
    mac_divergence_identities,
    mac_error_exponent,
    mac_one_shot_bound,
    mi_region,
    renyi2_region,
    boundary_crossing,
    simulate_mac,
)
from .operators import BudgetError, DensityOperator, HermitianOperator, QuantumChannel, as_density
from .p2p import (
    P2PCodeSpec,
    capacity_upper_eps_MI,
    error_exponent_lower,
    one_shot_capacity_lower,
    one_shot_error_bound,
    second_order_rate,
    simulate_p2p,
)
from .coding import channel_output
from .states import (
    amplitude_damping_channel,
    basis_state,
    depolarizing_channel,
    identity_channel,
    ket_to_density,
    maximally_mixed,
    phi_plus,
)
from .typicality import composite_alternative_test, typical_projector

BUILTIN_STATES: dict[str, Callable[[], HermitianOperator]] = {
    "phi_plus": lambda: phi_plus(2),
    "phi_plus3": lambda: phi_plus(3),
    "mixed2": lambda: maximally_mixed(2),
    "mixed3": lambda: maximally_mixed(3),
    "ket0": lambda: basis_state(2, 0),
    "ket1": lambda: basis_state(2, 1),
    "plus": lambda: ket_to_density(np.array([1.0, 1.0])),
}

BUILTIN_CHANNELS: dict[str, Callable[..., QuantumChannel]] = {
    "identity2": lambda: identity_channel(2),
    "identity3": lambda: identity_channel(3),
    "identity4": lambda: identity_channel(4),
    "depolarizing": lambda p: depolarizing_channel(2, p),
    "amplitude_damping": lambda g: amplitude_damping_channel(g),
}


class CheckFailed(Exception):
    """An invariant reported by the subcommand does not hold."""


@dataclass
class ExperimentConfig:
    """Run settings shared by every subcommand; ``seed`` determines all sampling."""

    seed: int = 0
    tol: dict[str, float] = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def tolerance(self, name: str, default: float) -> float:
        return self.tol.get(name, default)


@dataclass
class Output:
    """JSON payload plus an optional table for CSV."""

    data: dict
    table: tuple[list[str], list[list]] | None = None
    failed: str | None = None


# Operand loading ---------------------------------------------------------


def _builtin(ref: str, where: str):
    name, *params = ref[len("builtin:") :].split(":")
    try:
        vals = [float(p) for p in params]
    except ValueError:
        raise io.InputError(f"bad builtin parameter in {ref!r}", where) from None
    return name, vals


def load_operator(ref: Any, where: str = "operand") -> HermitianOperator:
    if isinstance(ref, str) and ref.startswith("builtin:"):
        name, vals = _builtin(ref, where)
        if name not in BUILTIN_STATES or vals:
            raise io.InputError(f"unknown builtin state {ref!r}; known: {sorted(BUILTIN_STATES)}", where)
        return BUILTIN_STATES[name]()
    if isinstance(ref, str):
        return io.operator_from_json(io.load_json(ref), ref)
    return io.operator_from_json(ref, where)


def load_state(ref: Any, where: str = "operand") -> DensityOperator:
    op = load_operator(ref, where)
    try:
        return as_density(op)
    except ValueError as e:
        raise io.InputError(str(e), where) from None


def load_channel(ref: Any, where: str = "channel") -> QuantumChannel:
    if isinstance(ref, str) and ref.startswith("builtin:"):
        name, vals = _builtin(ref, where)
        if name not in BUILTIN_CHANNELS:
            raise io.InputError(f"unknown builtin channel {ref!r}; known: {sorted(BUILTIN_CHANNELS)}", where)
        try:
            return BUILTIN_CHANNELS[name](*vals)
        except (TypeError, ValueError) as e:
            raise io.InputError(str(e), where) from None
    if isinstance(ref, str):
        return io.channel_from_json(io.load_json(ref), ref)
    return io.channel_from_json(ref, where)


def _spec_json(path: str) -> dict:
    obj = io.load_json(path)
    if not isinstance(obj, dict):
        raise io.InputError("expected a JSON object", path)
    return obj


def _get(obj: dict, key: str, where: str, kind=None, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise io.InputError(f"missing key {key!r}", where)
    v = obj[key]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise io.InputError(f"{key!r} must be an integer", where)
    if kind is float and (isinstance(v, bool) or not isinstance(v, (int, float))):
        raise io.InputError(f"{key!r} must be a number", where)
    return v


def _resolve_test(test: Any, omega: np.ndarray, where: str):
    if test is None or test == "composite":
        return None
    if test == "support":
        return support_projector(omega)
    return load_operator(test, where).matrix


def load_p2p_spec(path: str) -> P2PCodeSpec:
    """``{"resource", "channel", "M", "c"?, "test"?}``; ``test`` is ``composite``, ``support`` or an operator."""
    obj = _spec_json(path)
    resource = load_state(_get(obj, "resource", path), f"{path}.resource")
    channel = load_channel(_get(obj, "channel", path), f"{path}.channel")
    m = _get(obj, "M", path, int)
    c = float(_get(obj, "c", path, float, 1.0))
    try:
        omega, _ = channel_output([resource], channel)
        test = _resolve_test(obj.get("test"), omega, f"{path}.test")
        return P2PCodeSpec(resource, channel, m, test, c)
    except ValueError as e:
        if isinstance(e, (io.InputError, BudgetError)):
            raise
        raise io.InputError(str(e), path) from None


def load_mac_spec(path: str) -> MacCodeSpec:
    """``{"resources": [...], "channel", "sizes": [...], "c"?, "test"?}``."""
    obj = _spec_json(path)
    res = _get(obj, "resources", path)
    if not isinstance(res, list) or not res:
        raise io.InputError("resources must be a non-empty list", path)
    resources = [load_state(r, f"{path}.resources[{i}]") for i, r in enumerate(res)]
    channel = load_channel(_get(obj, "channel", path), f"{path}.channel")
    sizes = _get(obj, "sizes", path)
    if not isinstance(sizes, list) or not all(isinstance(s, int) for s in sizes):
        raise io.InputError("sizes must be a list of integers", path)
    c = float(_get(obj, "c", path, float, 1.0))
    try:
        omega, _ = channel_output(resources, channel)
        test = _resolve_test(obj.get("test"), omega, f"{path}.test")
        return MacCodeSpec(tuple(resources), channel, tuple(sizes), test, c)
    except ValueError as e:
        if isinstance(e, (io.InputError, BudgetError)):
            raise
        raise io.InputError(str(e), path) from None


# Subcommands -------------------------------------------------------------


def cmd_entropy(args, cfg: ExperimentConfig) -> Output:
    rho = load_state(args.state, "--state")
    data = {"H": von_neumann_entropy(rho), "H2": renyi2_entropy(rho)}
    if len(rho.dims) == 2:
        data["H_A"] = von_neumann_entropy(rho, [0])
        data["H_B"] = von_neumann_entropy(rho, [1])
        data["I"] = mutual_information(rho)
    return Output(data)


def cmd_divergence(args, cfg) -> Output:
    rho, sigma = load_state(args.rho, "--rho"), load_state(args.sigma, "--sigma")
    d = relative_entropy(rho, sigma)
    data = {"D": d.value, "support_violation": d.support_violation}
    data["V"] = relative_entropy_variance(rho, sigma) if math.isfinite(d.value) else math.nan
    if args.alpha is not None:
        data["alpha"] = args.alpha
        data["D_petz"] = renyi_relative_entropy(rho, sigma, args.alpha).value
        if args.alpha >= 0.5 and args.alpha != 1:
            data["D_sandwiched"] = sandwiched_renyi_relative_entropy(rho, sigma, args.alpha).value
    return Output(data)


def cmd_hyptest(args, cfg) -> Output:
    rho, sigma = load_state(args.rho, "--rho"), load_state(args.sigma, "--sigma")
    res = hyp_test_rel_entropy(rho, sigma, args.eps, n=args.n)
    tol = cfg.tolerance("gap", GAP_TOL)
    data = {"eps": args.eps, "n": args.n, **res.record(), "method": res.method}
    ok = res.value == math.inf or res.gap <= tol
    data["certified"] = ok
    return Output(data, failed=None if ok else f"primal/dual gap {res.gap:.3e} exceeds {tol:.0e}")


def cmd_stein(args, cfg) -> Output:
    rho, sigma = load_state(args.rho, "--rho"), load_state(args.sigma, "--sigma")
    s = stein_sandwich(rho, sigma, args.n, args.eps)
    data = {
        "n": s.n,
        "eps": args.eps,
        "lower": s.lower,
        "exact": s.exact,
        "upper": s.upper,
        "width": s.width,
        "second_order": second_order_approx(rho, sigma, args.n, args.eps) / args.n,
        "ordered": s.ordered,
    }
    return Output(data, failed=None if s.ordered else "lower <= exact <= upper fails")


def cmd_chernoff_multi(args, cfg) -> Output:
    a = load_state(args.a, "--a")
    alts = [load_operator(b, f"--alt[{i}]") for i, b in enumerate(args.alt)]
    rows = chernoff_multi_trace(a, alts, args.n, args.weights)
    recs = [{"n": r.n, "rate": r.rate, "min_chernoff": r.min_chernoff, "gap": r.gap} for r in rows]
    # The multiple-alternative conjecture is never asserted; only gaps are reported.
    data = {"rows": recs, "note": "diagnostic only; gaps are reported, convergence is not asserted"}
    table = (["n", "rate", "min_chernoff", "gap"], [[r["n"], r["rate"], r["min_chernoff"], r["gap"]] for r in recs])
    return Output(data, table)


def cmd_typicality(args, cfg) -> Output:
    rho = load_state(args.state, "--state")
    tp = typical_projector(rho, args.n, args.delta)
    data = {
        "n": args.n,
        "delta": args.delta,
        "entropy": tp.entropy,
        "weight": tp.weight,
        "log2_dim": tp.log2_dim,
        "chebyshev_n": tp.chebyshev_n(args.eps),
        "equipartition_ok": tp.equipartition_ok(),
    }
    failed = None if data["equipartition_ok"] else "equipartition bounds fail"
    if args.alt:
        alts = [load_operator(b, f"--alt[{i}]") for i, b in enumerate(args.alt)]
        ct = composite_alternative_test(rho, alts, args.n, args.delta, args.eps)
        data["composite"] = {
            "type1": ct.type1,
            "chain_bound": ct.chain_bound,
            "uniform_bound": ct.uniform_bound,
            "threshold_reached": ct.threshold_reached,
            "exponents": list(ct.exponents),
            "divergences": list(ct.divergences),
            "type1_ok": ct.type1_ok,
            "exponents_ok": ct.exponents_ok,
        }
        if not (ct.type1_ok and ct.exponents_ok):
            failed = "composite test bounds fail"
    return Output(data, failed=failed)


def cmd_p2p(args, cfg) -> Output:
    if args.action == "upper":
        ch = load_channel(args.channel, "--channel")
        res = capacity_upper_eps_MI(ch, args.eps, restarts=args.restarts, seed=cfg.seed, max_iter=args.max_iter)
        return Output(
            {
                "eps": args.eps,
                "value": res.value,
                "start_value": res.start_value,
                "evaluations": res.evaluations,
                "restarts": res.restarts,
                "certified": False,
            }
        )
    spec = load_p2p_spec(args.spec)
    if args.action == "simulate":
        perf = simulate_p2p(spec)
        rec = perf.record()
        return Output(rec, failed=None if perf.within_bound else "exact error exceeds the one-shot bound")
    if args.action == "bound":
        return Output({"M": spec.M, "c": spec.c, "bound": one_shot_error_bound(spec)})
    if args.action == "exponent":
        if args.rate:
            rows = [error_exponent_lower(spec.resource, spec.channel, rate=r, iid=True) for r in args.rate]
            recs = [{"rate": r, "exponent": e.value, "s_opt": e.s_opt, "unimodal": e.unimodal} for r, e in zip(args.rate, rows)]
            table = (["rate", "exponent", "s_opt"], [[x["rate"], x["exponent"], x["s_opt"]] for x in recs])
            return Output({"mode": "iid", "rows": recs}, table)
        e = error_exponent_lower(spec.resource, spec.channel, M=spec.M)
        return Output({"mode": "one-shot", "M": spec.M, "exponent": e.value, "s_opt": e.s_opt, "unimodal": e.unimodal})
    if args.action == "capacity":
        v = one_shot_capacity_lower(spec.resource, spec.channel, args.eps, args.eta)
        return Output({"eps": args.eps, "eta": args.eta, "log2_M_lower": v})
    if args.action == "second-order":
        v = second_order_rate(spec.resource, spec.channel, args.n, args.eps)
        return Output({"n": args.n, "eps": args.eps, "log2_M": v, "rate": v / args.n})
    raise AssertionError(args.action)


def _region_fn(kind):
    return {"renyi2": renyi2_region, "collision": collision_region, "mi": mi_region}[kind]


def cmd_mac(args, cfg) -> Output:
    if args.action in ("simulate", "bound"):
        spec = load_mac_spec(args.spec)
        if args.action == "simulate":
            perf = simulate_mac(spec)
            return Output(perf.record(), failed=None if perf.within_bound else "exact error exceeds the one-shot bound")
        terms = mac_bound_terms(spec)
        return Output(
            {
                "sizes": list(spec.sizes),
                "c": spec.c,
                "bound": mac_one_shot_bound(spec),
                "terms": [{"subset": [i + 1 for i in j], "trace": v} for j, v in terms.items()],
            }
        )
    if args.action == "derandomize":
        cq = io.cqmac_from_json(io.load_json(args.cq), args.cq)
        res = derandomize_cq_mac(cq, args.L, args.M, search_budget=args.budget, tests=args.tests, seed=cfg.seed)
        ok = res.avg_error <= res.ensemble_average + 1e-12
        return Output(res.record(), failed=None if ok else "codebook error exceeds ensemble average")
    if args.action == "region":
        omega = load_state(args.state, "--state")
        kinds = ["renyi2", "collision", "mi"] if args.kind == "all" else [args.kind]
        regions = [_region_fn(k)(omega, args.senders) for k in kinds]
        data: dict = {"regions": []}
        rows = []
        for r in regions:
            rec = r.record()
            if r.note:
                rec["note"] = r.note
            if args.senders == 2:
                verts = r.vertices_2d()
                rec["vertices"] = verts.tolist()
                rows += [[r.kind, float(v[0]), float(v[1])] for v in verts]
            data["regions"].append(rec)
        table = None
        if args.senders == 2:
            hull = convex_hull_union(regions)
            data["hull"] = hull.tolist()
            rows += [["hull", float(v[0]), float(v[1])] for v in hull]
            table = (["region", "R1", "R2"], rows)
        return Output(data, table)
    if args.action == "exponent":
        omega = load_state(args.state, "--state")
        e = mac_error_exponent(omega, args.rates)
        return Output(
            {
                "rates": list(args.rates),
                "exponent": e.value,
                "label": e.label,
                "terms": [{"subset": list(j), "value": v, "s_opt": e.s_opt[j]} for j, v in e.terms.items()],
            }
        )
    if args.action == "identities":
        theta, gamma = load_state(args.theta, "--theta"), load_state(args.gamma, "--gamma")
        ch = load_channel(args.channel, "--channel")
        chk = mac_divergence_identities(theta, gamma, ch, args.r1, args.r2)
        tol = cfg.tolerance("check", 1e-9)
        data = {
            "rates": list(chk.rates),
            "divergences": list(chk.divergences),
            "informations": list(chk.informations),
            "residuals": list(chk.residuals),
        }
        failed = None if max(chk.residuals) <= tol else "identity residual exceeds tolerance"
        if args.direction:
            bc = boundary_crossing(theta, gamma, ch, args.direction)
            data["crossing"] = {"t_divergence": bc.t_divergence, "t_information": bc.t_information, "gap": bc.gap}
            if bc.gap > 1e-4:
                failed = "divergence sign change misses the region boundary"
        return Output(data, failed=failed)
    raise AssertionError(args.action)


def cmd_check(args, cfg) -> Output:
    slack = cfg.tol.get("check")
    res = sweeps.run_check(args.name, args.trials, cfg.seed, slack)
    return Output(res.record(), failed=None if res.violations == 0 else f"{res.violations} violations")


# Parser --------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all sampled randomness")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="csv only for tabular outputs")
    common.add_argument("--tol-check", type=float, help="slack for inequality and identity checks")
    common.add_argument("--tol-gap", type=float, help="largest accepted primal/dual gap in bits")

    p = argparse.ArgumentParser(prog="pbclab", description="Position-based coding and hypothesis-testing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("entropy", parents=[common], help="entropies of a state")
    s.add_argument("--state", required=True)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("divergence", parents=[common], help="relative entropies")
    s.add_argument("--rho", required=True)
    s.add_argument("--sigma", required=True)
    s.add_argument("--alpha", type=float)
    s.set_defaults(func=cmd_divergence)

    s = sub.add_parser("hyptest", parents=[common], help="hypothesis-testing relative entropy")
    s.add_argument("--rho", required=True)
    s.add_argument("--sigma", required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_hyptest)

    s = sub.add_parser("stein", parents=[common], help="Renyi sandwich around the per-copy D_H")
    s.add_argument("--rho", required=True)
    s.add_argument("--sigma", required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_stein)

    s = sub.add_parser("chernoff-multi", parents=[common], help="symmetric-error rate against several alternatives")
    s.add_argument("--a", required=True)
    s.add_argument("--alt", action="extend", nargs="+", required=True)
    s.add_argument("--n", "--grid", dest="n", type=int, nargs="+", required=True)
    s.add_argument("--weights", type=float, nargs="+")
    s.set_defaults(func=cmd_chernoff_multi)

    s = sub.add_parser("typicality", parents=[common], help="typical projector and composite test")
    s.add_argument("--state", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--alt", action="extend", nargs="+")
    s.set_defaults(func=cmd_typicality)

    p2p = sub.add_parser("p2p", help="point-to-point position-based coding")
    p2p_sub = p2p.add_subparsers(dest="action", required=True)
    for name in ("simulate", "bound", "exponent", "capacity", "second-order"):
        s = p2p_sub.add_parser(name, parents=[common])
        s.add_argument("--spec", required=True)
        s.set_defaults(func=cmd_p2p)
    p2p_sub.choices["exponent"].add_argument("--rate", "--grid", dest="rate", type=float, nargs="+")
    p2p_sub.choices["capacity"].add_argument("--eps", type=float, required=True)
    p2p_sub.choices["capacity"].add_argument("--eta", type=float, required=True)
    p2p_sub.choices["second-order"].add_argument("--eps", type=float, required=True)
    p2p_sub.choices["second-order"].add_argument("--n", type=int, required=True)
    s = p2p_sub.add_parser("upper", parents=[common])
    s.add_argument("--channel", required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--restarts", type=int, default=3)
    s.add_argument("--max-iter", type=int, default=200)
    s.set_defaults(func=cmd_p2p)

    mac = sub.add_parser("mac", help="multiple-access coding")
    mac_sub = mac.add_subparsers(dest="action", required=True)
    for name in ("simulate", "bound"):
        s = mac_sub.add_parser(name, parents=[common])
        s.add_argument("--spec", required=True)
        s.set_defaults(func=cmd_mac)
    s = mac_sub.add_parser("derandomize", parents=[common])
    s.add_argument("--cq", required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--tests", choices=["composite", "support"], default="composite")
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(func=cmd_mac)
    s = mac_sub.add_parser("region", parents=[common])
    s.add_argument("--state", required=True)
    s.add_argument("--senders", type=int, required=True)
    s.add_argument("--kind", choices=["renyi2", "collision", "mi", "all"], default="all")
    s.set_defaults(func=cmd_mac)
    s = mac_sub.add_parser("exponent", parents=[common])
    s.add_argument("--state", required=True)
    s.add_argument("--rates", type=float, nargs="+", required=True)
    s.set_defaults(func=cmd_mac)
    s = mac_sub.add_parser("identities", parents=[common])
    s.add_argument("--theta", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--channel", required=True)
    s.add_argument("--r1", type=float, required=True)
    s.add_argument("--r2", type=float, required=True)
    s.add_argument("--direction", type=float, nargs=2)
    s.set_defaults(func=cmd_mac)

    chk = sub.add_parser("check", help="randomized inequality sweeps")
    chk_sub = chk.add_subparsers(dest="name", required=True)
    for name in sweeps.CHECKS:
        s = chk_sub.add_parser(name, parents=[common])
        s.add_argument("--trials", type=int, default=100)
        s.set_defaults(func=cmd_check)
    return p


def _config(args) -> ExperimentConfig:
    tol = {}
    if args.tol_check is not None:
        tol["check"] = args.tol_check
    if args.tol_gap is not None:
        tol["gap"] = args.tol_gap
    return ExperimentConfig(args.seed, tol, args.out, args.format)


def _render(out: Output, cfg: ExperimentConfig) -> str:
    if cfg.format == "csv":
        if out.table is None:
            raise io.InputError("csv output is only available for tabular results", "--format")
        return io.to_csv(*out.table)
    return io.dumps(out.data)


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit status."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = _config(args)
    try:
        out = args.func(args, cfg)
        text = _render(out, cfg)
    except BudgetError as e:
        print(f"pbclab: budget exceeded: {e}", file=sys.stderr)
        return 3
    except io.InputError as e:
        print(f"pbclab: input error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"pbclab: input error: {e}", file=sys.stderr)
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if out.failed:
        print(f"pbclab: check failed: {out.failed}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
