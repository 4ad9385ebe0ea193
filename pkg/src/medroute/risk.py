"""Accident-driven environment, population and property risk, capitalised into CNY.

Risk is summed over the edges a plan actually traverses (with multiplicity),
so it depends on the route and not on the road network as a whole.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .ahp import AhpResult, default_weights
from .errors import MissingRiskProfileError, ZeroSegmentAreaError, ZeroSpeedError
from .instance import EdgeRiskProfile, ProblemInstance
from .transport import RoutePlan

DEFAULT_K_P = 1e6  # CNY per person
DEFAULT_K_E = 300.0  # CNY per m^3
# No published estimate; reports flag it whenever it is in use.
DEFAULT_K_O = 1e5  # CNY per unit accident probability


@dataclass(frozen=True)
class RiskWeights:
    w_population: float
    w_property: float
    w_environment: float
    w_other: float
    K_p: float = DEFAULT_K_P
    K_e: float = DEFAULT_K_E
    K_o: float = DEFAULT_K_O

    def __post_init__(self):
        ws = (self.w_population, self.w_property, self.w_environment, self.w_other)
        if any(w < 0 for w in ws) or abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError(f"risk weights must be nonnegative and sum to 1, got {ws}")
        if min(self.K_p, self.K_e, self.K_o) < 0:
            raise ValueError("conversion coefficients must be nonnegative")

    @classmethod
    def from_ahp(cls, result: AhpResult, **conversions) -> "RiskWeights":
        if len(result.weights) != 4:
            raise ValueError(f"risk blending needs 4 criteria, got {len(result.weights)}")
        w = result.weights
        # renormalise away float dust so the sum check is exact to 1e-9
        s = sum(w)
        return cls(*(v / s for v in w), **conversions)

    @classmethod
    def default(cls) -> "RiskWeights":
        return cls.from_ahp(default_weights())

    @property
    def modeling_defaults(self) -> list[str]:
        return ["K_o"] if self.K_o == DEFAULT_K_O else []


@dataclass(frozen=True)
class RiskBreakdown:
    accident_prob_p: float = 0.0
    env_RE: float = 0.0
    pop_RP: float = 0.0
    prop_RA: float = 0.0
    total_RC: float = 0.0


def edge_accident_prob(edge: EdgeRiskProfile) -> float:
    """Leak-accident probability: accident rate x P(leak | accident) x time on segment."""
    if not edge.speed_v > 0:
        raise ZeroSpeedError(f"speed must be positive, got {edge.speed_v}")
    p = edge.accident_rate_q * edge.leak_given_accident * (edge.length_L / edge.speed_v)
    if p > 1.0:
        warnings.warn(f"accident probability {p} exceeds 1; clamped", RuntimeWarning, stacklevel=2)
        p = 1.0
    return p


def edge_env(edge: EdgeRiskProfile, p: float | None = None) -> float:
    p = edge_accident_prob(edge) if p is None else p
    spread = (
        edge.area_water_A1 * edge.sherwood_th1
        + edge.area_air_A2 * edge.sherwood_th2
        + edge.area_soil_A3 * edge.sherwood_th3
    )
    return p * edge.harm_level_hm * spread


def edge_pop(edge: EdgeRiskProfile, p: float | None = None) -> float:
    p = edge_accident_prob(edge) if p is None else p
    return p * edge.fatal_rate_delta * math.pi * edge.impact_radius_lambda**2 * edge.pop_density_beta


def edge_prop(edge: EdgeRiskProfile, p: float | None = None) -> float:
    if not edge.segment_area_S > 0:
        raise ZeroSegmentAreaError("segment area must be positive on a traversed edge")
    p = edge_accident_prob(edge) if p is None else p
    ratio = edge.impacted_area_Sm / edge.segment_area_S
    return ratio * p * (edge.personal_value_V1 + edge.public_value_V2) * edge.damage_severity_gamma


def _profiles(plan: RoutePlan, inst: ProblemInstance):
    for a, b in plan.edges():
        prof = inst.risk.get((a, b))
        if prof is None:
            raise MissingRiskProfileError(f"no risk profile for edge {inst.label(a)}->{inst.label(b)}")
        yield prof


def accident_prob(plan: RoutePlan, inst: ProblemInstance) -> float:
    return float(sum(edge_accident_prob(e) for e in _profiles(plan, inst)))


def env_risk(plan: RoutePlan, inst: ProblemInstance) -> float:
    return float(sum(edge_env(e) for e in _profiles(plan, inst)))


def pop_risk(plan: RoutePlan, inst: ProblemInstance) -> float:
    return float(sum(edge_pop(e) for e in _profiles(plan, inst)))


def prop_risk(plan: RoutePlan, inst: ProblemInstance) -> float:
    return float(sum(edge_prop(e) for e in _profiles(plan, inst)))


def blend_risk(w: RiskWeights, pop: float, prop: float, env: float, p: float) -> float:
    return (
        w.w_population * w.K_p * pop
        + w.w_property * prop
        + w.w_environment * w.K_e * env
        + w.w_other * w.K_o * p
    )


def total_risk_cost(plan: RoutePlan, inst: ProblemInstance, weights: RiskWeights) -> RiskBreakdown:
    p = accident_prob(plan, inst)
    env = env_risk(plan, inst)
    pop = pop_risk(plan, inst)
    prop = prop_risk(plan, inst)
    return RiskBreakdown(
        accident_prob_p=p, env_RE=env, pop_RP=pop, prop_RA=prop, total_RC=blend_risk(weights, pop, prop, env, p)
    )
