"""Integrated cost of a plan: (1 - alpha) * transport cost + alpha * risk cost.

Two evaluation paths live here.  :func:`evaluate_plan` composes the component
functions and returns every breakdown field.  :class:`RouteEvaluator`
precomputes per-edge quantities and scores single routes with a memo; the
solver and the exact oracle use it because the penalised objective is a sum of
independent per-route terms.  The test suite checks the two paths agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .covid import covid_total_cost
from .errors import MissingRiskProfileError
from .instance import ProblemInstance, Scenario, Violation
from .risk import RiskBreakdown, RiskWeights, blend_risk, edge_accident_prob, edge_env, edge_pop, edge_prop, total_risk_cost
from .transport import CostBreakdown, RoutePlan, check_feasibility, total_transport_cost

DEFAULT_INFEASIBILITY_PENALTY = 1e9


def integrated_cost(plan: RoutePlan, inst: ProblemInstance, weights: RiskWeights, alpha: float) -> CostBreakdown:
    """Blended transport/risk cost for the daytime (general) model."""
    tc = total_transport_cost(plan, inst)
    rc = total_risk_cost(plan, inst, weights).total_RC
    return tc.blend(rc, alpha)


@dataclass(frozen=True)
class Evaluation:
    cost: CostBreakdown
    risk: RiskBreakdown
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def penalised(self, infeasibility_penalty: float = DEFAULT_INFEASIBILITY_PENALTY) -> float:
        return self.cost.blended_total + infeasibility_penalty * len(self.violations)


def evaluate_plan(plan: RoutePlan, inst: ProblemInstance, weights: RiskWeights, alpha: float) -> Evaluation:
    if inst.scenario is Scenario.COVID:
        cost = covid_total_cost(plan, inst, inst.covid, weights, alpha)
    else:
        cost = integrated_cost(plan, inst, weights, alpha)
    return Evaluation(cost, total_risk_cost(plan, inst, weights), tuple(check_feasibility(plan, inst)))


@dataclass(frozen=True)
class RouteScore:
    fitness: float  # blended cost + infeasibility penalty per violation
    blended: float
    violations: int
    duration: float


_EMPTY = RouteScore(0.0, 0.0, 0, 0.0)


class RouteEvaluator:
    """Memoised scorer for single routes (tuples of site ids)."""

    def __init__(
        self,
        inst: ProblemInstance,
        weights: RiskWeights,
        alpha: float,
        infeasibility_penalty: float = DEFAULT_INFEASIBILITY_PENALTY,
    ):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        self.inst = inst
        self.alpha = alpha
        self.penalty = infeasibility_penalty
        size = inst.n_sites + 1
        self._d = inst.distance_D.tolist()
        self._t = inst.travel_time_t.tolist()
        self._risk: list[list[float | None]] = [[0.0] * size for _ in range(size)]
        for a in range(size):
            for b in range(size):
                if a == b:
                    continue
                prof = inst.risk.get((a, b))
                if prof is None:
                    self._risk[a][b] = None
                    continue
                try:
                    p = edge_accident_prob(prof)
                    self._risk[a][b] = blend_risk(
                        weights, edge_pop(prof, p), edge_prop(prof, p), edge_env(prof, p), p
                    )
                except ValueError:
                    # surfaced only if a route actually uses the edge
                    self._risk[a][b] = None
        self._demand = [0.0] + [s.demand_q for s in inst.sites]
        self._service = [0.0] + [s.service_time for s in inst.sites]
        fleet = inst.effective_fleet
        self._fleet = fleet
        self._limit = inst.duty_end
        self._load_weighted = fleet.transport_mode == "load_weighted"
        if inst.scenario is Scenario.COVID:
            c = inst.covid
            self._k_travel = (1 + c.deterioration_eps) * c.conductivity_Rc * c.body_surface_S * c.delta_T * c.unit_cooling_Uc
            self._k_load = (0.54 * c.carriage_volume_Vol + 3.22) * c.delta_T * c.unit_cooling_Uc * c.door_factor_tau
        else:
            self._k_travel = self._k_load = 0.0
        self._cache: dict[tuple[int, ...], RouteScore] = {}

    def _raise_for_edge(self, a: int, b: int):
        prof = self.inst.risk.get((a, b))
        if prof is None:
            raise MissingRiskProfileError(
                f"no risk profile for edge {self.inst.label(a)}->{self.inst.label(b)}"
            )
        edge_prop(prof)  # raises the specific error
        raise AssertionError("unreachable")

    def score(self, route: tuple[int, ...]) -> RouteScore:
        if not route:
            return _EMPTY
        hit = self._cache.get(route)
        if hit is not None:
            return hit
        d, t, rk = self._d, self._t, self._risk
        dist = ttime = risk = svc = load = 0.0
        weighted = 0.0
        prev = 0
        for s in route:
            dist += d[prev][s]
            weighted += d[prev][s] * load
            ttime += t[prev][s]
            r = rk[prev][s]
            if r is None:
                self._raise_for_edge(prev, s)
            risk += r
            svc += self._service[s]
            load += self._demand[s]
            prev = s
        dist += d[prev][0]
        weighted += d[prev][0] * load
        ttime += t[prev][0]
        r = rk[prev][0]
        if r is None:
            self._raise_for_edge(prev, 0)
        risk += r

        f = self._fleet
        duration = ttime + svc
        ret = f.depart_T0 + duration
        if ret < f.window_t0:
            cp = f.penalty_M * (f.window_t0 - ret)
        elif ret > f.window_tR:
            cp = f.penalty_M * (ret - f.window_tR)
        else:
            cp = 0.0
        transport = f.unit_transport_cost_Cij * (weighted if self._load_weighted else dist)
        tc = f.fixed_cost_Ch + transport + cp + self._k_travel * duration + self._k_load * svc
        blended = (1 - self.alpha) * tc + self.alpha * risk
        nviol = int(load > f.capacity_Q) + int(ret > self._limit)
        out = RouteScore(blended + self.penalty * nviol, blended, nviol, duration)
        self._cache[route] = out
        return out

    def fitness(self, routes: Iterable[Sequence[int]]) -> float:
        return math.fsum(self.score(tuple(r)).fitness for r in routes)

    def violations(self, routes: Iterable[Sequence[int]]) -> int:
        return sum(self.score(tuple(r)).violations for r in routes)
