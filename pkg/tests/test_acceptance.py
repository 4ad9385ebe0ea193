"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import contextlib
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from medroute.ahp import DEFAULT_PCM, derive_weights
from medroute.covid import CovidParams, vehicle_cooling_load, vehicle_cooling_travel
from medroute.ga import GaConfig, TerminationReason, parse_rendered, run_ga
from medroute.instance import FleetParams, load_instance
from medroute.objective import evaluate_plan
from medroute.oracle import solve_exact
from medroute.pipeline import solve_scenario
from medroute.risk import RiskWeights, edge_accident_prob, edge_env, edge_pop, edge_prop, total_risk_cost
from medroute.synthetic import small_random_instance
from medroute.transport import penalty_cost, return_penalty, schedule_routes

from helpers import UNIT_RISK, line

W = RiskWeights.default()


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title):
        detail = {}
        try:
            yield detail
        except BaseException:
            with capsys.disabled():
                print(f"\nCRITERION {number} FAIL  {title}  {detail.get('msg', '')}")
            raise
        with capsys.disabled():
            print(f"\nCRITERION {number} PASS  {title}  {detail.get('msg', '')}")

    return run


def test_criterion_1_ahp(criterion):
    with criterion(1, "AHP weights, lambda_max, CI") as d:
        t = time.perf_counter()
        r = derive_weights(DEFAULT_PCM)
        elapsed = time.perf_counter() - t
        d["msg"] = f"w={tuple(round(x, 4) for x in r.weights)} lambda={r.lambda_max:.4f} CI={r.consistency_index:.4f} {elapsed * 1e3:.2f} ms"
        assert np.allclose(r.weights, (0.5267, 0.3005, 0.0630, 0.1098), atol=1e-3)
        assert abs(r.lambda_max - 4.0201) <= 1e-3
        assert abs(r.consistency_index - 0.0067) <= 1e-3
        assert elapsed < 0.010


def test_criterion_2_oracle_equivalence(criterion):
    with criterion(2, "GA vs exact optimum on 20 random instances") as d:
        rng = np.random.default_rng(2024)
        hits, worst, t = 0, 0.0, time.perf_counter()
        for k in range(20):
            n, h = int(rng.integers(5, 9)), int(rng.integers(1, 3))
            inst = small_random_instance(n, h, seed=5000 + k)
            opt = solve_exact(inst, W, 0.5).optimal_fitness
            got = run_ga(inst, W, 0.5, GaConfig(rng_seed=k)).best_fitness
            gap = (got - opt) / opt
            hits += gap <= 1e-9
            worst = max(worst, gap)
        elapsed = time.perf_counter() - t
        d["msg"] = f"optimal {hits}/20, worst gap {worst:.2%}, {elapsed:.1f} s"
        assert hits >= 18
        assert worst <= 0.05
        assert elapsed < 30


def test_criterion_3_day_instance_beats_baseline(criterion):
    with criterion(3, "day instance vs 10-draw random baseline") as d:
        inst = load_instance("synthetic_dalian_day.json")
        t = time.perf_counter()
        rep = solve_scenario(inst, W, 0.5, seed=42, draws=10)
        elapsed = time.perf_counter() - t
        d["msg"] = f"savings {rep.savings_percent_cost:.1f}%, {rep.ga.best_plan.n_used} routes, {elapsed:.1f} s"
        assert rep.ga.feasible
        assert rep.savings_percent_cost >= 25.0
        assert elapsed < 60


def test_criterion_4_hand_values(criterion):
    with criterion(4, "cooling and penalty hand values") as d:
        p = CovidParams()
        zl, zs = vehicle_cooling_travel(3.0, p), vehicle_cooling_load(0.5, p)
        d["msg"] = f"Z_L={zl:.6f} Z_S={zs:.6f}"
        assert abs(zl - 4788.72) <= 1e-6
        assert abs(zs - 176.812) <= 1e-6
        fleet = FleetParams(num_vehicles_H=1, capacity_Q=1.0, window_t0=8.0, window_tR=13.0)
        assert return_penalty(8.0, fleet) == 0.0
        assert return_penalty(13.0, fleet) == 0.0
        # a whole plan returning exactly at each boundary
        for end in (8.0, 13.0):
            inst = line(1, step=(end - 8.0) * 20.0,
                        fleet={"window_t0": 8.0, "window_tR": 13.0, "num_vehicles_H": 1, "penalty_M": 5000.0})
            plan = schedule_routes(inst, [[1]])
            assert plan.schedules[0].return_time == end
            assert penalty_cost(plan, inst.fleet) == 0.0


def test_criterion_5_encoding_invariants(criterion):
    with criterion(5, "chromosome invariants over 300 generations x 30") as d:
        inst = load_instance("synthetic_dalian_day.json")
        n, h = inst.n_sites, inst.fleet.num_vehicles_H
        checked = [0]

        def check(gen, pop, fit):
            assert len(pop) == 30
            for c in pop:
                assert sorted(c.genes) == list(range(1, n + h))
                assert sorted(s for r in c.routes() for s in r) == list(range(1, n + 1))
                tokens = c.rendered_tokens(inst.depot_id)
                assert len(tokens) == h + n + 1
                assert tokens.count(inst.depot_id) == h + 1
            checked[0] += len(pop)

        r = run_ga(inst, W, 0.5, GaConfig(rng_seed=42, stall_generations=300), observer=check)
        assert r.generations_run == 300
        c = parse_rendered("29-7-1-4-29-2-6-3-5-29-9-8-29", 29)
        assert [list(x) for x in c.routes()] == [[7, 1, 4], [2, 6, 3, 5], [9, 8]]
        d["msg"] = f"{checked[0]} chromosomes checked"
        assert checked[0] == 301 * 30


def test_criterion_6_monotone_convergence(criterion):
    with criterion(6, "nonincreasing best cost and termination rule") as d:
        runs = [(small_random_instance(6 + k % 3, 1 + k % 2, 100 + k), GaConfig(rng_seed=k)) for k in range(8)]
        runs += [(small_random_instance(7, 2, 100 + k), GaConfig(rng_seed=k, stall_generations=1)) for k in range(4)]
        runs.append((load_instance("synthetic_dalian_day.json"), GaConfig(rng_seed=42)))
        for inst, cfg in runs:
            r = run_ga(inst, W, 0.5, replace(cfg, elitism_count=1))
            h = r.history
            assert all(a >= b for a, b in zip(h, h[1:]))
            assert r.generations_run <= 300
            gains = [(a - b) / a for a, b in zip(h, h[1:])]
            if r.termination_reason is TerminationReason.CONVERGED:
                assert all(g < 1e-7 for g in gains[-cfg.stall_generations:])
            else:
                assert r.generations_run == 300
        d["msg"] = f"{len(runs)} runs"


def test_criterion_7_risk_properties(criterion):
    with criterion(7, "risk model properties") as d:
        zero = line(4, risk={**UNIT_RISK, "accident_rate_q": 0.0})
        assert total_risk_cost(schedule_routes(zero, [[1, 2], [3, 4]]), zero, W).total_RC == 0.0

        inst = load_instance("synthetic_dalian_day.json")
        plan = schedule_routes(inst, [list(range(1, 10)), list(range(10, 20)), list(range(20, 29))])
        rb = total_risk_cost(plan, inst, W)
        edges = [inst.risk[e] for e in plan.edges()]
        assert math.isclose(rb.accident_prob_p, math.fsum(map(edge_accident_prob, edges)), rel_tol=1e-12)
        assert math.isclose(rb.env_RE, math.fsum(map(edge_env, edges)), rel_tol=1e-12)
        assert math.isclose(rb.pop_RP, math.fsum(map(edge_pop, edges)), rel_tol=1e-12)
        assert math.isclose(rb.prop_RA, math.fsum(map(edge_prop, edges)), rel_tol=1e-12)

        for e in edges[:5]:
            wide = replace(e, impact_radius_lambda=2 * e.impact_radius_lambda)
            assert math.isclose(edge_pop(wide), 4 * edge_pop(e), rel_tol=1e-12)

        night = load_instance("synthetic_dalian_night.json")
        nplan = schedule_routes(night, [list(range(1, 8)), list(range(8, 16)), []])
        for i, p in ((inst, plan), (night, nplan)):
            c0 = evaluate_plan(p, i, W, 0.0).cost
            c1 = evaluate_plan(p, i, W, 1.0).cost
            assert c0.blended_total == c0.total_TC
            assert c1.blended_total == c1.risk_RC
        d["msg"] = f"{len(edges)} edges checked"


def test_criterion_8_determinism(criterion):
    with criterion(8, "bit-identical result with 1 and 4 workers") as d:
        inst = load_instance("synthetic_dalian_day.json")
        one = run_ga(inst, W, 0.5, GaConfig(rng_seed=42, workers=1))
        four = run_ga(inst, W, 0.5, GaConfig(rng_seed=42, workers=4))
        assert one == four
        assert [x.hex() for x in one.history] == [x.hex() for x in four.history]
        assert one.best_fitness.hex() == four.best_fitness.hex()
        d["msg"] = f"{one.generations_run} generations, best {one.best_fitness:.6f}"
