"""Small hand-built instances shared by the unit tests."""

from __future__ import annotations

from medroute.instance import instance_from_dict, check_instance

# one unit per field keeps hand arithmetic easy; tests override what they need
UNIT_RISK = {
    "accident_rate_q": 0.001,
    "leak_given_accident": 0.1,
    "area_water_A1": 100.0,
    "area_air_A2": 100.0,
    "area_soil_A3": 100.0,
    "sherwood_th1": 0.5,
    "sherwood_th2": 0.5,
    "sherwood_th3": 0.5,
    "harm_level_hm": 1.0,
    "fatal_rate_delta": 0.5,
    "impact_radius_lambda": 1.0,
    "pop_density_beta": 5000.0,
    "segment_area_S": 1.0,
    "impacted_area_Sm": 0.2,
    "personal_value_V1": 5e6,
    "public_value_V2": 5e6,
    "damage_severity_gamma": 0.5,
}


def build(
    distance,
    travel_time=None,
    demands=None,
    service=None,
    *,
    fleet=None,
    risk=None,
    overrides=None,
    scenario="general",
    depot_id=None,
    check=True,
):
    size = len(distance)
    n = size - 1
    demands = demands if demands is not None else [0.5] * n
    service = service if service is not None else [0.0] * n
    doc = {
        "sites": [{"id": k + 1, "demand": demands[k], "service_time": service[k]} for k in range(n)],
        "depot_id": depot_id if depot_id is not None else n + 1,
        "distance": distance,
        "travel_time": travel_time,
        "risk_defaults": UNIT_RISK if risk is None else risk,
        "risk_overrides": overrides or [],
        "fleet": {"num_vehicles_H": 2, "capacity_Q": 10.0, **(fleet or {})},
        "scenario": scenario,
    }
    if travel_time is None:
        doc["risk_defaults"] = {**doc["risk_defaults"], "speed_v": 40.0}
    inst = instance_from_dict(doc)
    return check_instance(inst) if check else inst


def line(n, step=1.0, speed=40.0, **kw):
    """Sites evenly spaced on a line from the depot: D[a][b] = step * |a - b|."""
    d = [[step * abs(a - b) for b in range(n + 1)] for a in range(n + 1)]
    t = [[x / speed for x in row] for row in d]
    return build(d, t, **kw)
