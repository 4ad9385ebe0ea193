"""Pandemic variant: refrigerated-carriage costs and the nighttime window."""

from __future__ import annotations

from dataclasses import replace

from .errors import NegativeDurationError
from .instance import CovidParams, ProblemInstance
from .risk import RiskWeights, total_risk_cost
from .transport import CostBreakdown, RoutePlan, total_transport_cost

__all__ = [
    "CovidParams",
    "cooling_travel_cost",
    "cooling_load_cost",
    "vehicle_cooling_travel",
    "vehicle_cooling_load",
    "covid_total_cost",
]


def vehicle_cooling_travel(duration: float, p: CovidParams) -> float:
    if duration < 0:
        raise NegativeDurationError(f"vehicle returns {-duration} h before it departs")
    return (1 + p.deterioration_eps) * p.conductivity_Rc * p.body_surface_S * p.delta_T * duration * p.unit_cooling_Uc


def vehicle_cooling_load(service_hours: float, p: CovidParams) -> float:
    # 0.54 and 3.22 are fixed empirical coefficients of the door-opening heat load
    return (0.54 * p.carriage_volume_Vol + 3.22) * p.delta_T * p.unit_cooling_Uc * p.door_factor_tau * service_hours


def cooling_travel_cost(plan: RoutePlan, p: CovidParams) -> float:
    return float(sum(vehicle_cooling_travel(s.duration, p) for _, s in plan.used()))


def cooling_load_cost(plan: RoutePlan, p: CovidParams) -> float:
    return float(sum(vehicle_cooling_load(sum(s.service), p) for _, s in plan.used()))


def covid_total_cost(
    plan: RoutePlan,
    inst: ProblemInstance,
    covid: CovidParams | None,
    weights: RiskWeights,
    alpha: float,
) -> CostBreakdown:
    """Transport cost plus both cooling terms, blended with risk.

    The penalty window is forced to the nighttime window of ``covid`` whatever
    the fleet block says.
    """
    covid = covid or inst.covid
    night = replace(inst, fleet=replace(inst.fleet, covid=covid), scenario="covid")
    tc = total_transport_cost(plan, night)
    zl = cooling_travel_cost(plan, covid)
    zs = cooling_load_cost(plan, covid)
    tc = replace(tc, cooling_travel=zl, cooling_load=zs, total_TC=tc.total_TC + zl + zs)
    rc = total_risk_cost(plan, inst, weights).total_RC
    return tc.blend(rc, alpha)
