from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from medroute.covid import (
    CovidParams,
    cooling_load_cost,
    cooling_travel_cost,
    covid_total_cost,
    vehicle_cooling_load,
    vehicle_cooling_travel,
)
from medroute.errors import NegativeDurationError
from medroute.instance import load_instance
from medroute.objective import evaluate_plan
from medroute.risk import RiskWeights, total_risk_cost
from medroute.transport import CostBreakdown, schedule_routes, total_transport_cost

from helpers import line

P = CovidParams()


def test_cooling_during_travel():
    # 1.08 * 2.5 * 59.12 * 20 * 3 h * 0.5
    assert vehicle_cooling_travel(3.0, P) == pytest.approx(4788.72, abs=1e-6)


def test_cooling_during_loading():
    # (0.54 * 26.78 + 3.22) * 20 * 0.5 * 2.0 * 0.5 h
    assert vehicle_cooling_load(0.5, P) == pytest.approx(176.812, abs=1e-6)


def test_door_factor_scales_linearly():
    ratio = vehicle_cooling_load(1.0, replace(P, door_factor_tau=2.0)) / vehicle_cooling_load(1.0, replace(P, door_factor_tau=0.25))
    assert ratio == pytest.approx(8.0)


def test_negative_duration():
    with pytest.raises(NegativeDurationError):
        vehicle_cooling_travel(-0.1, P)


def test_blended_example():
    c = CostBreakdown(360.0, 120.0, 0.0, 4788.72, 176.812, 0.0, 5445.532)
    assert c.blend(100.0, 0.5).blended_total == pytest.approx(2772.766, abs=1e-9)


@pytest.fixture
def night():
    return line(4, step=2.0, service=[0.1, 0.2, 0.15, 0.05], scenario="covid", fleet={"num_vehicles_H": 2})


def test_plan_costs_sum_over_used_vehicles(night):
    plan = schedule_routes(night, [[1, 2], [3, 4]])
    durations = [s.duration for _, s in plan.used()]
    assert cooling_travel_cost(plan, P) == pytest.approx(sum(vehicle_cooling_travel(d, P) for d in durations))
    assert cooling_load_cost(plan, P) == pytest.approx(vehicle_cooling_load(0.5, P))


def test_night_window_and_departure(night):
    assert night.fleet.depart_T0 == 18.0
    plan = schedule_routes(night, [[1, 2], [3, 4]])
    assert all(18.0 <= s.return_time <= 24.0 for _, s in plan.used())
    c = covid_total_cost(plan, night, None, RiskWeights.default(), 0.5)
    assert c.penalty_CP == 0.0


def test_covid_total_extends_general_total(night):
    plan = schedule_routes(night, [[1, 2], [3, 4]])
    w = RiskWeights.default()
    c = covid_total_cost(plan, night, None, w, 0.3)
    base = total_transport_cost(plan, night)
    assert c.total_TC == pytest.approx(base.total_TC + c.cooling_travel + c.cooling_load)
    assert c.risk_RC == pytest.approx(total_risk_cost(plan, night, w).total_RC)
    assert evaluate_plan(plan, night, w, 0.3).cost == c


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1))
def test_alpha_blend_bounds(alpha):
    inst = load_instance("synthetic_dalian_night.json")
    plan = schedule_routes(inst, [list(range(1, 8)), list(range(8, 16)), []])
    w = RiskWeights.default()
    c = covid_total_cost(plan, inst, None, w, alpha)
    lo, hi = sorted((c.total_TC, c.risk_RC))
    assert lo - 1e-9 <= c.blended_total <= hi + 1e-9
    if alpha == 0:
        assert c.blended_total == pytest.approx(c.total_TC)
    if alpha == 1:
        assert c.blended_total == pytest.approx(c.risk_RC)


def test_alpha_endpoints_exact():
    inst = load_instance("synthetic_dalian_night.json")
    plan = schedule_routes(inst, [list(range(1, 16)), [], []])
    w = RiskWeights.default()
    assert covid_total_cost(plan, inst, None, w, 0.0).blended_total == pytest.approx(covid_total_cost(plan, inst, None, w, 0.0).total_TC)
    c1 = covid_total_cost(plan, inst, None, w, 1.0)
    assert c1.blended_total == pytest.approx(c1.risk_RC)
