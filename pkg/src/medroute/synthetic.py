"""Synthetic urban instances with plausible geometry, demand and hazard data.

Distances are road-detoured straight lines clipped to an urban range; travel
times use a per-edge average speed.  Population density peaks at the city
centre, so the risk term competes with pure distance.
"""

from __future__ import annotations

import math

import numpy as np

from .instance import CovidParams, ProblemInstance, instance_from_dict

RISK_DEFAULTS = {
    "accident_rate_q": 2e-5,  # accidents per vehicle-hour
    "leak_given_accident": 0.05,
    "area_water_A1": 2000.0,
    "area_air_A2": 5000.0,
    "area_soil_A3": 1000.0,
    # one shared diffusion ratio for all three media
    "sherwood_th1": 0.5,
    "sherwood_th2": 0.5,
    "sherwood_th3": 0.5,
    "harm_level_hm": 2.0,
    "fatal_rate_delta": 0.05,
    "impact_radius_lambda": 0.5,
    "pop_density_beta": 5000.0,
    "segment_area_S": 0.2,
    "impacted_area_Sm": 0.05,
    "personal_value_V1": 8e7,
    "public_value_V2": 1.2e8,
    "damage_severity_gamma": 0.2,
}

ROAD_WIDTH_KM = 0.03


def synthetic_instance_dict(
    n_sites: int,
    n_vehicles: int,
    seed: int,
    *,
    depot_id: int | None = None,
    scenario: str = "general",
    area: tuple[float, float] = (14.0, 10.0),
    depot_xy: tuple[float, float] | None = None,
    demand_range: tuple[float, float] = (0.1, 0.45),
    capacity: float = 3.0,
    max_fill: float = 0.9,
    service_range: tuple[float, float] = (0.08, 0.15),
    window: tuple[float, float] = (8.0, 13.0),
    depart: float | None = None,
    detour: float = 1.25,
    km_range: tuple[float, float] = (2.0, 15.0),
    speed_range: tuple[float, float] = (25.0, 40.0),
    penalty_M: float = 1000.0,
    name: str = "",
) -> dict:
    rng = np.random.default_rng(seed)
    w, h = area
    xy = np.column_stack([rng.uniform(0, w, n_sites), rng.uniform(0, h, n_sites)])
    dep = np.array(depot_xy if depot_xy is not None else (0.1 * w, 0.1 * h))
    pts = np.vstack([dep, xy])
    size = n_sites + 1

    gap = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    dist = np.clip(detour * gap, *km_range)
    np.fill_diagonal(dist, 0.0)
    speed = rng.uniform(*speed_range, (size, size))
    speed = np.triu(speed, 1) + np.triu(speed, 1).T
    ttime = np.zeros_like(dist)
    off = ~np.eye(size, dtype=bool)
    ttime[off] = dist[off] / speed[off]
    dist, ttime = np.round(dist, 3), np.round(ttime, 4)

    demand = rng.uniform(*demand_range, n_sites)
    cap_total = max_fill * n_vehicles * capacity
    if demand.sum() > cap_total:
        demand *= cap_total / demand.sum()
    demand = np.minimum(np.floor(demand * 1000) / 1000, capacity)
    service = np.round(rng.uniform(*service_range, n_sites), 3)

    depot_id = n_sites + 1 if depot_id is None else depot_id
    centre = np.array([w / 2, h / 2])
    spread = 0.3 * min(w, h)
    overrides = []
    for a in range(size):
        for b in range(size):
            if a == b:
                continue
            mid = (pts[a] + pts[b]) / 2
            r2 = float(np.sum((mid - centre) ** 2))
            beta = 3000.0 + 12000.0 * math.exp(-r2 / (2 * spread**2))
            seg = round(max(float(dist[a, b]), 0.1) * ROAD_WIDTH_KM, 6)
            overrides.append(
                {
                    "from": depot_id if a == 0 else a,
                    "to": depot_id if b == 0 else b,
                    "pop_density_beta": round(beta, 1),
                    "segment_area_S": seg,
                    "impacted_area_Sm": round(0.25 * seg, 6),
                }
            )

    fleet = {
        "num_vehicles_H": n_vehicles,
        "capacity_Q": capacity,
        "fixed_cost_Ch": 120.0,
        "unit_transport_cost_Cij": 20.0,
        "penalty_M": penalty_M,
        "window_t0": window[0],
        "window_tR": window[1],
        "depart_T0": window[0] if depart is None else depart,
    }
    if scenario == "covid":
        c = CovidParams()
        fleet["covid"] = {k: getattr(c, k) for k in c.__dataclass_fields__}
        fleet["window_t0"], fleet["window_tR"] = c.night_t0, c.night_tR
        fleet["depart_T0"] = c.night_t0 if depart is None else depart

    return {
        "name": name,
        "scenario": scenario,
        "depot_id": depot_id,
        "depot_xy": [round(float(dep[0]), 3), round(float(dep[1]), 3)],
        "sites": [
            {
                "id": i + 1,
                "demand": float(demand[i]),
                "service_time": float(service[i]),
                "x": round(float(xy[i, 0]), 3),
                "y": round(float(xy[i, 1]), 3),
            }
            for i in range(n_sites)
        ],
        "distance": dist.tolist(),
        "travel_time": ttime.tolist(),
        "risk_defaults": dict(RISK_DEFAULTS),
        "risk_overrides": overrides,
        "fleet": fleet,
    }


def synthetic_instance(n_sites: int, n_vehicles: int, seed: int, **kw) -> ProblemInstance:
    return instance_from_dict(synthetic_instance_dict(n_sites, n_vehicles, seed, **kw))


def small_random_instance(n_sites: int, n_vehicles: int, seed: int, **kw) -> ProblemInstance:
    """Compact instance for oracle comparisons: a few km across, tighter window."""
    rng = np.random.default_rng([seed, 7])
    opts = dict(
        area=(6.0, 5.0),
        km_range=(0.5, 15.0),
        demand_range=(0.3, 1.2),
        window=(8.0, float(np.round(rng.uniform(10.0, 12.0), 2))),
        name=f"random_n{n_sites}_h{n_vehicles}_s{seed}",
    )
    opts.update(kw)
    return synthetic_instance(n_sites, n_vehicles, seed, **opts)
