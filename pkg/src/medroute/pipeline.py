"""Scenario orchestration, random-route baselines and report (de)serialisation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ga import GaConfig, GaResult, decode, random_chromosome, run_ga
from .instance import ProblemInstance, Scenario
from .objective import evaluate_plan
from .risk import RiskWeights
from .transport import schedule_routes

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BaselineReport:
    draws: int
    mean_cost: float
    mean_time_hours: float
    per_draw: tuple[tuple[float, float], ...]
    infeasible_draws: int = 0


def generate_baseline(
    inst: ProblemInstance, weights: RiskWeights, alpha: float, draws: int = 10, rng_seed: int = 0
) -> BaselineReport:
    """Average blended cost and fleet hours of uniformly random chromosomes.

    Draws come from the same space as the GA's initial population but without
    feasibility resampling; infeasible draws are kept and counted.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(rng_seed)
    rows, bad = [], 0
    for _ in range(draws):
        plan = decode(random_chromosome(inst.n_sites, inst.fleet.num_vehicles_H, rng), inst)
        ev = evaluate_plan(plan, inst, weights, alpha)
        bad += not ev.feasible
        rows.append((ev.cost.blended_total, plan.total_time))
    return BaselineReport(
        draws=draws,
        mean_cost=math.fsum(c for c, _ in rows) / draws,
        mean_time_hours=math.fsum(t for _, t in rows) / draws,
        per_draw=tuple(rows),
        infeasible_draws=bad,
    )


def savings_percent(baseline: float, achieved: float) -> float:
    return (baseline - achieved) / baseline * 100.0 if baseline else 0.0


@dataclass(frozen=True)
class ScenarioReport:
    instance: ProblemInstance
    ga: GaResult
    baseline: BaselineReport

    @property
    def savings_percent_cost(self) -> float:
        return savings_percent(self.baseline.mean_cost, self.ga.best_cost.blended_total)

    @property
    def savings_percent_time(self) -> float:
        return savings_percent(self.baseline.mean_time_hours, self.ga.best_plan.total_time)

    @property
    def tons_collected(self) -> float:
        return self.instance.total_demand


@dataclass(frozen=True)
class RunReport:
    alpha: float
    seed: int
    weights: RiskWeights
    scenarios: tuple[ScenarioReport, ...] = field(default_factory=tuple)


def sub_seeds(seed: int, k: int = 2) -> list[int]:
    """Independent child seeds derived deterministically from one user seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def solve_scenario(
    inst: ProblemInstance,
    weights: RiskWeights,
    alpha: float,
    seed: int,
    ga_config: GaConfig | None = None,
    draws: int = 10,
) -> ScenarioReport:
    ga_seed, base_seed = sub_seeds(seed)
    cfg = GaConfig(**{**asdict(ga_config or GaConfig()), "rng_seed": ga_seed})
    ga = run_ga(inst, weights, alpha, cfg)
    base = generate_baseline(inst, weights, alpha, draws, base_seed)
    return ScenarioReport(inst, ga, base)


def run_pipeline(
    instances: list[ProblemInstance],
    alpha: float,
    seed: int,
    weights: RiskWeights | None = None,
    ga_config: GaConfig | None = None,
    draws: int = 10,
) -> RunReport:
    """Solve each instance independently ("daytime + nighttime" is just two of them)."""
    weights = weights or RiskWeights.default()
    order = {Scenario.GENERAL: 0, Scenario.COVID: 1}
    reports = [
        solve_scenario(inst, weights, alpha, seed, ga_config, draws)
        for inst in sorted(instances, key=lambda i: order[i.scenario])
    ]
    return RunReport(alpha, seed, weights, tuple(reports))


def route_string(inst: ProblemInstance, route) -> str:
    return "-".join(str(x) for x in (inst.depot_id, *route, inst.depot_id))


def scenario_to_dict(s: ScenarioReport) -> dict:
    inst, ga = s.instance, s.ga
    used = [r for r in ga.best_plan.routes if r]
    return {
        "scenario": inst.scenario.value,
        "instance": inst.name,
        "depot_id": inst.depot_id,
        "routes": [list(r) for r in ga.best_plan.routes],
        "route_strings": [route_string(inst, r) for r in used],
        "rendered": ga.best_chromosome.render(inst.depot_id),
        "vehicle_hours": [sch.duration for _, sch in ga.best_plan.used()],
        "total_time_hours": ga.best_plan.total_time,
        "tons_collected": s.tons_collected,
        "cost": asdict(ga.best_cost),
        "risk": asdict(ga.best_risk),
        "feasible": ga.feasible,
        "violations": [str(v) for v in ga.violations],
        "fitness": ga.best_fitness,
        "history": list(ga.history),
        "generations_run": ga.generations_run,
        "termination_reason": ga.termination_reason.value,
        "baseline": {
            "draws": s.baseline.draws,
            "mean_cost": s.baseline.mean_cost,
            "mean_time_hours": s.baseline.mean_time_hours,
            "per_draw": [list(r) for r in s.baseline.per_draw],
            "infeasible_draws": s.baseline.infeasible_draws,
        },
        "savings_percent_cost": s.savings_percent_cost,
        "savings_percent_time": s.savings_percent_time,
    }


def report_to_dict(run: RunReport) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "alpha": run.alpha,
        "seed": run.seed,
        "risk_weights": asdict(run.weights),
        "modeling_defaults": run.weights.modeling_defaults,
        "scenarios": [scenario_to_dict(s) for s in run.scenarios],
    }


def summary_text(run: RunReport) -> str:
    lines = [f"alpha={run.alpha}  seed={run.seed}"]
    if run.weights.modeling_defaults:
        lines.append(f"note: K_o={run.weights.K_o:g} is a modeling default, not an estimate")
    for s in run.scenarios:
        inst, ga = s.instance, s.ga
        c = ga.best_cost
        lines.append("")
        lines.append(f"[{inst.scenario.value}] {inst.name or 'instance'}: {inst.n_sites} sites, depot {inst.depot_id}")
        for h, (r, sch) in enumerate(ga.best_plan.used(), 1):
            load = sum(inst.sites[k - 1].demand_q for k in r)
            lines.append(f"  vehicle {h}: {route_string(inst, r)}  ({sch.duration:.2f} h, {load:.2f} t)")
        lines.append(
            f"  cost: blended {c.blended_total:.2f}  TC {c.total_TC:.2f} (fixed {c.fixed_CF:.2f}, transport "
            f"{c.transport_CVT:.2f}, penalty {c.penalty_CP:.2f}, cooling {c.cooling_travel + c.cooling_load:.2f})"
            f"  RC {c.risk_RC:.2f}"
        )
        lines.append(
            f"  baseline ({s.baseline.draws} random draws): cost {s.baseline.mean_cost:.2f}, "
            f"time {s.baseline.mean_time_hours:.2f} h"
        )
        lines.append(
            f"  savings: cost {s.savings_percent_cost:.1f}%  time {s.savings_percent_time:.1f}%  "
            f"tons collected {s.tons_collected:.2f}"
        )
        lines.append(
            f"  GA: {ga.generations_run} generations, {ga.termination_reason.value}"
            + ("" if ga.feasible else f", INFEASIBLE: {'; '.join(str(v) for v in ga.violations)}")
        )
    return "\n".join(lines)


_COST_KEYS = ("fixed_CF", "transport_CVT", "penalty_CP", "cooling_travel", "cooling_load", "risk_RC", "total_TC", "blended_total")


def verify_report(report: dict, instances: dict[str, ProblemInstance]) -> list[str]:
    """Re-evaluate stored routes and list every cost figure that does not reproduce.

    ``instances`` maps scenario name ("general"/"covid") to the instance used.
    """
    problems = []
    if report.get("schema") != SCHEMA_VERSION:
        return [f"unsupported report schema {report.get('schema')!r}"]
    weights = RiskWeights(**report["risk_weights"])
    for sc in report["scenarios"]:
        inst = instances.get(sc["scenario"])
        if inst is None:
            problems.append(f"{sc['scenario']}: no instance supplied")
            continue
        plan = schedule_routes(inst, sc["routes"])
        ev = evaluate_plan(plan, inst, weights, report["alpha"])
        got = asdict(ev.cost)
        for k in _COST_KEYS:
            want = sc["cost"][k]
            if abs(got[k] - want) > 1e-9 * max(1.0, abs(want)):
                problems.append(f"{sc['scenario']}.cost.{k}: stored {want} != recomputed {got[k]}")
    return problems
