"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, fields
from pathlib import Path

from . import ahp
from .errors import InfeasibleError, NonReciprocalMatrixError, ParseError, RoutingError, ValidationError
from .ga import GaConfig
from .instance import Scenario, atomic_write_text, load_instance, routes_from_ids
from .objective import evaluate_plan
from .oracle import solve_exact
from .pipeline import generate_baseline, report_to_dict, route_string, run_pipeline, summary_text, verify_report
from .risk import DEFAULT_K_E, DEFAULT_K_O, DEFAULT_K_P, RiskWeights
from .svg import has_coordinates, render_svg
from .transport import schedule_routes

EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParseError(f"{what} {path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} {path}: {exc}") from exc


def _alpha(args) -> float:
    if args.alpha is None:
        print("warning: --alpha not given, using 0.5", file=sys.stderr)
        return 0.5
    if not 0.0 <= args.alpha <= 1.0:
        raise UsageError(f"--alpha must lie in [0, 1], got {args.alpha}")
    return args.alpha


def _weights(args) -> RiskWeights:
    path = getattr(args, "risk_config", None)
    if not path:
        return RiskWeights.default()
    cfg = _read_json(path, "risk config")
    conv = {k: float(cfg.get(k, d)) for k, d in (("K_p", DEFAULT_K_P), ("K_e", DEFAULT_K_E), ("K_o", DEFAULT_K_O))}
    if "weights" in cfg:
        return RiskWeights(*map(float, cfg["weights"]), **conv)
    result = ahp.derive_weights(cfg.get("pcm", ahp.DEFAULT_PCM))
    if not result.consistent:
        print(f"warning: comparison matrix fails the CI < 0.1 test (CI={result.consistency_index:.4f})", file=sys.stderr)
    return RiskWeights.from_ahp(result, **conv)


def _ga_config(args) -> GaConfig:
    raw = _read_json(args.ga_config, "GA config") if args.ga_config else {}
    known = {f.name for f in fields(GaConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ParseError(f"GA config: unknown keys {sorted(unknown)}")
    if getattr(args, "workers", None):
        raw["workers"] = args.workers
    try:
        return GaConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"GA config: {exc}") from exc


def _emit(args, payload: dict, summary: str | None = None) -> None:
    text = json.dumps(payload, indent=2)
    if args.out:
        atomic_write_text(args.out, text + "\n")
        if summary:
            print(summary)
    else:
        print(text)
        if summary:
            print(summary, file=sys.stderr)


def _instances_for_mode(args):
    insts = [load_instance(p) for p in args.instance]
    mode = args.mode
    if mode is None:
        if len(insts) == 1:
            return insts
        mode = "both"
    if mode == "both":
        kinds = sorted(i.scenario.value for i in insts)
        if kinds != ["covid", "general"]:
            raise UsageError("--mode both needs one general and one covid instance (repeat --instance)")
        return insts
    picked = [i for i in insts if i.scenario is Scenario(mode)]
    if len(picked) != 1:
        raise ValidationError([f"--mode {mode}: expected exactly one {mode} instance, got {len(picked)}"])
    return picked


def cmd_solve(args) -> int:
    alpha = _alpha(args)
    insts = _instances_for_mode(args)
    run = run_pipeline(insts, alpha, args.seed, _weights(args), _ga_config(args), args.draws)
    if args.svg:
        base = Path(args.svg)
        for s in run.scenarios:
            if not has_coordinates(s.instance):
                print(f"warning: {s.instance.name}: no coordinates, skipping SVG", file=sys.stderr)
                continue
            target = base if len(run.scenarios) == 1 else base.with_name(f"{base.stem}_{s.instance.scenario.value}{base.suffix or '.svg'}")
            atomic_write_text(target, render_svg(s.instance, s.ga.best_plan, title=f"{s.instance.name} ({s.instance.scenario.value})"))
    _emit(args, report_to_dict(run), summary_text(run))
    return 0


def cmd_oracle(args) -> int:
    alpha = _alpha(args)
    inst = load_instance(args.instance)
    weights = _weights(args)
    res = solve_exact(inst, weights, alpha, max_n=args.max_n)
    used = [r for r in res.optimal_plan.routes if r]
    payload = {
        "schema": 1,
        "instance": inst.name,
        "alpha": alpha,
        "routes": [list(r) for r in res.optimal_plan.routes],
        "route_strings": [route_string(inst, r) for r in used],
        "cost": asdict(res.optimal_cost),
        "risk": asdict(res.optimal_risk),
        "fitness": res.optimal_fitness,
        "feasible": res.feasible,
        "enumerated_count": res.enumerated_count,
        "modeling_defaults": weights.modeling_defaults,
    }
    _emit(args, payload)
    return 0


def cmd_baseline(args) -> int:
    alpha = _alpha(args)
    inst = load_instance(args.instance)
    weights = _weights(args)
    rep = generate_baseline(inst, weights, alpha, args.draws, args.seed)
    _emit(args, {"schema": 1, "instance": inst.name, "alpha": alpha, **asdict(rep)})
    return 0


def cmd_ahp(args) -> int:
    pcm = _read_json(args.pcm, "PCM") if args.pcm else ahp.DEFAULT_PCM
    res = ahp.derive_weights(pcm)
    names = ahp.CRITERIA if len(res.weights) == len(ahp.CRITERIA) else [f"w{i + 1}" for i in range(len(res.weights))]
    for name, w in zip(names, res.weights):
        print(f"{name:<12} {w:.4f}")
    print(f"lambda_max   {res.lambda_max:.4f}")
    print(f"CI           {res.consistency_index:.4f}")
    print(f"CR           {res.consistency_ratio:.4f}")
    print(f"consistent   {'yes' if res.consistent else 'no'} (CI < 0.1)")
    return 0


def cmd_validate(args) -> int:
    insts = [load_instance(p) for p in args.instance]
    if not args.plan:
        print("instance OK")
        return 0
    doc = _read_json(args.plan, "plan")
    if isinstance(doc, dict) and "schema" in doc:
        by_scenario = {i.scenario.value: i for i in insts}
        problems = []
        for sc in doc["scenarios"]:
            inst = by_scenario.get(sc["scenario"])
            if inst is None:
                continue
            plan = schedule_routes(inst, sc["routes"], strict=False)
            problems += [f"{sc['scenario']}: {v}" for v in evaluate_plan(plan, inst, RiskWeights(**doc["risk_weights"]), doc["alpha"]).violations]
        problems += verify_report(doc, by_scenario)
    else:
        if len(insts) != 1:
            raise UsageError("a bare plan file needs exactly one --instance")
        inst = insts[0]
        plan = schedule_routes(inst, routes_from_ids(inst, doc), strict=False)
        problems = [str(v) for v in evaluate_plan(plan, inst, _weights(args), _alpha(args) if args.alpha is not None else 0.5).violations]
    for p in problems:
        print(p)
    if problems:
        return EXIT_INVALID
    print("plan OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="medroute", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, multi=False):
        if multi:
            sp.add_argument("--instance", action="append", required=True, help="instance JSON (repeatable)")
        else:
            sp.add_argument("--instance", required=True, help="instance JSON")
        sp.add_argument("--alpha", type=float, default=None, help="risk share of the blended cost (default 0.5)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--risk-config", help="JSON with pcm or weights and K_p/K_e/K_o")
        sp.add_argument("--out", help="write JSON here (atomically) instead of stdout")

    s = sub.add_parser("solve", help="run the GA and compare against random routes")
    common(s, multi=True)
    s.add_argument("--mode", choices=["general", "covid", "both"])
    s.add_argument("--ga-config", help="JSON with GaConfig fields")
    s.add_argument("--draws", type=int, default=10, help="random baseline draws")
    s.add_argument("--workers", type=int, default=None, help="fitness evaluation threads")
    s.add_argument("--svg", help="write a schematic route map (needs coordinates)")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exhaustive optimum for N <= 9")
    common(o, seed=False)
    o.add_argument("--max-n", type=int, default=9)
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("baseline", help="mean cost of random chromosomes")
    common(b)
    b.add_argument("--draws", type=int, default=10)
    b.set_defaults(func=cmd_baseline)

    a = sub.add_parser("ahp", help="risk weights from a pairwise comparison matrix")
    a.add_argument("--pcm", help="JSON n x n matrix (default: built-in risk criteria matrix)")
    a.set_defaults(func=cmd_ahp)

    v = sub.add_parser("validate", help="check an instance, a plan file or a solve report")
    v.add_argument("--instance", action="append", required=True)
    v.add_argument("--plan", help="JSON array of routes, or a solve report")
    v.add_argument("--alpha", type=float, default=None)
    v.add_argument("--risk-config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"medroute: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, InfeasibleError, NonReciprocalMatrixError) as exc:
        print(f"medroute: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RoutingError, ValueError) as exc:
        print(f"medroute: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
