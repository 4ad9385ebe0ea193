import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from medroute.data import bundled_names
from medroute.errors import InfeasibleError, ParseError, ValidationError
from medroute.instance import (
    Scenario,
    check_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    validate_instance,
    write_instance,
)
from medroute.synthetic import small_random_instance, synthetic_instance

from helpers import build, line


def rules(inst):
    return {v.rule for v in validate_instance(inst)}


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9), st.integers(1, 3), st.integers(0, 10_000), st.sampled_from(["general", "covid"]))
def test_round_trip_through_json(n, h, seed, scenario):
    inst = synthetic_instance(n, h, seed, scenario=scenario)
    again = instance_from_dict(json.loads(json.dumps(instance_to_dict(inst))))
    assert again == inst


def test_write_and_load(tmp_path):
    inst = small_random_instance(6, 2, 3)
    path = tmp_path / "inst.json"
    write_instance(inst, path)
    assert load_instance(path) == inst


@pytest.mark.parametrize("name", bundled_names())
def test_bundled_instances_validate(name):
    inst = load_instance(name)
    assert validate_instance(inst) == []


def test_day_instance_shape():
    inst = load_instance("synthetic_dalian_day.json")
    assert inst.n_sites == 28
    assert inst.fleet.num_vehicles_H == 3
    assert inst.depot_id == 29
    assert inst.scenario is Scenario.GENERAL
    assert inst.distance_D.shape == (29, 29)


def test_night_instance_uses_night_window():
    inst = load_instance("synthetic_dalian_night.json")
    assert inst.scenario is Scenario.COVID
    f = inst.effective_fleet
    assert (f.window_t0, f.window_tR) == (18.0, 24.0)


def test_demand_above_capacity_is_rejected():
    inst = line(2, demands=[0.5, 10.1], check=False)
    assert "demand_within_capacity" in rules(inst)
    with pytest.raises(ValidationError) as err:
        check_instance(inst)
    assert any(v.rule == "demand_within_capacity" for v in err.value.violations)


def test_fleet_too_small_is_infeasible_not_invalid():
    inst = line(3, demands=[8.0, 8.0, 8.0], check=False)
    assert rules(inst) == {"fleet_capacity"}
    with pytest.raises(InfeasibleError):
        check_instance(inst)


def test_single_site_zero_demand_is_valid():
    inst = line(1, demands=[0.0])
    assert inst.n_sites == 1
    assert inst.total_demand == 0.0


def test_matrices_are_read_only():
    inst = line(2)
    with pytest.raises(ValueError):
        inst.distance_D[0, 1] = 5.0


@pytest.mark.parametrize(
    "mutate, rule",
    [
        (lambda d: d["distance"][1].__setitem__(1, 2.0), "zero_diagonal"),
        (lambda d: d["distance"][0].__setitem__(1, -1.0), "nonnegative_matrix"),
        (lambda d: d["sites"][0].__setitem__("demand", -0.1), "nonnegative_demand"),
        (lambda d: d["fleet"].__setitem__("num_vehicles_H", 0), "at_least_one_vehicle"),
        (lambda d: d["fleet"].__setitem__("window_tR", 7.0), "window_order"),
        (lambda d: d["fleet"].__setitem__("penalty_M", 0.5), "penalty_dominates"),
        (lambda d: d["risk_defaults"].__setitem__("leak_given_accident", 1.5), "probability_range"),
        (lambda d: d["risk_defaults"].__setitem__("impacted_area_Sm", 5.0), "impacted_area_within_segment"),
    ],
)
def test_validation_rules(mutate, rule):
    doc = instance_to_dict(line(2))
    doc["risk_defaults"] = {**doc.get("risk_defaults", {})}
    mutate(doc)
    inst = instance_from_dict(doc)
    assert rule in rules(inst)


def test_inconsistent_travel_time_is_flagged():
    doc = instance_to_dict(line(2))
    doc["risk_overrides"] = [{"from": 1, "to": 2, "length_L": 1.0, "speed_v": 10.0}]
    assert "travel_time_consistent" in rules(instance_from_dict(doc))


def test_bad_site_ids_raise():
    doc = instance_to_dict(line(2))
    doc["sites"][1]["id"] = 5
    with pytest.raises(ValidationError):
        instance_from_dict(doc)


def test_missing_key_is_parse_error():
    doc = instance_to_dict(line(2))
    del doc["distance"]
    with pytest.raises(ParseError):
        instance_from_dict(doc)


def test_travel_time_derived_from_speed():
    inst = build([[0, 4], [4, 0]], None)
    assert np.allclose(inst.travel_time_t, [[0, 0.1], [0.1, 0]])


def test_depot_id_maps_to_index_zero():
    inst = line(3)
    assert inst.label(0) == 4
    assert inst.label(2) == 2
