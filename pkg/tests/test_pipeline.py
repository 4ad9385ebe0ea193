import json

import pytest

from medroute.instance import load_instance
from medroute.objective import evaluate_plan
from medroute.pipeline import (
    generate_baseline,
    report_to_dict,
    run_pipeline,
    savings_percent,
    sub_seeds,
    verify_report,
)
from medroute.ga import GaConfig, decode, random_chromosome
from medroute.risk import RiskWeights
from medroute.synthetic import small_random_instance

import numpy as np

W = RiskWeights.default()


def test_single_draw_baseline_is_that_chromosome():
    inst = small_random_instance(6, 2, 0)
    rep = generate_baseline(inst, W, 0.5, draws=1, rng_seed=17)
    c = random_chromosome(6, 2, np.random.default_rng(17))
    plan = decode(c, inst)
    assert rep.mean_cost == evaluate_plan(plan, inst, W, 0.5).cost.blended_total
    assert rep.mean_time_hours == plan.total_time


def test_baseline_deterministic_and_validated():
    inst = small_random_instance(6, 2, 0)
    assert generate_baseline(inst, W, 0.5, 10, 3) == generate_baseline(inst, W, 0.5, 10, 3)
    with pytest.raises(ValueError):
        generate_baseline(inst, W, 0.5, 0)


def test_savings_percent():
    assert savings_percent(200.0, 150.0) == 25.0
    assert savings_percent(0.0, 1.0) == 0.0


def test_sub_seeds_independent_and_stable():
    a = sub_seeds(42)
    assert a == sub_seeds(42) and a[0] != a[1]
    assert a != sub_seeds(43)


def test_report_round_trips_and_verifies():
    day = small_random_instance(6, 2, 1)
    run = run_pipeline([day], 0.5, 7, W, GaConfig(max_iterations=30))
    doc = json.loads(json.dumps(report_to_dict(run)))
    assert doc["schema"] == 1
    assert verify_report(doc, {"general": day}) == []
    doc["scenarios"][0]["cost"]["blended_total"] += 1.0
    assert verify_report(doc, {"general": day})


def test_both_scenarios_in_order():
    insts = [load_instance("synthetic_dalian_night.json"), small_random_instance(5, 2, 0)]
    run = run_pipeline(insts, 0.5, 1, W, GaConfig(max_iterations=20), draws=2)
    assert [s.instance.scenario.value for s in run.scenarios] == ["general", "covid"]
    night = run.scenarios[1]
    assert night.ga.best_cost.cooling_travel > 0
