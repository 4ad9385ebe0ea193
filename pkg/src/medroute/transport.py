"""Route plans, their schedules, and the transportation cost components."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

from .errors import DuplicateSiteError, MissingEdgeError, UnknownSiteError
from .instance import FleetParams, ProblemInstance, Violation


@dataclass(frozen=True)
class VehicleSchedule:
    depart: float
    arrivals: tuple[float, ...]
    departures: tuple[float, ...]
    return_time: float
    service: tuple[float, ...] = ()

    @property
    def duration(self) -> float:
        return self.return_time - self.depart


@dataclass(frozen=True)
class RoutePlan:
    """One entry per vehicle; an empty route means the vehicle stays home.

    ``schedules[h]`` is None exactly when ``routes[h]`` is empty.
    """

    routes: tuple[tuple[int, ...], ...]
    schedules: tuple[VehicleSchedule | None, ...]

    @property
    def used_flags(self) -> tuple[bool, ...]:
        return tuple(bool(r) for r in self.routes)

    @property
    def n_used(self) -> int:
        return sum(self.used_flags)

    def used(self) -> Iterator[tuple[tuple[int, ...], VehicleSchedule]]:
        for r, s in zip(self.routes, self.schedules):
            if r:
                yield r, s

    def edges(self) -> Iterator[tuple[int, int]]:
        """Traversed (from, to) matrix indices, depot legs included, with multiplicity."""
        for r in self.routes:
            if r:
                nodes = (0, *r, 0)
                yield from zip(nodes[:-1], nodes[1:])

    @property
    def total_time(self) -> float:
        return sum(s.duration for _, s in self.used())


def route_edges(route: Sequence[int]) -> list[tuple[int, int]]:
    if not route:
        return []
    nodes = (0, *route, 0)
    return list(zip(nodes[:-1], nodes[1:]))


def schedule_routes(inst: ProblemInstance, routes: Iterable[Iterable[int]], strict: bool = True) -> RoutePlan:
    """Propagate arrival/departure times along each route.

    Every vehicle leaves the depot at the fleet departure time.  With
    ``strict=False`` a site served twice is scheduled anyway (so coverage
    checks can report it) instead of raising.
    """
    routes = tuple(tuple(int(s) for s in r) for r in routes)
    n = inst.n_sites
    seen: set[int] = set()
    for r in routes:
        for s in r:
            if not 1 <= s <= n:
                raise UnknownSiteError(f"site {s} not in 1..{n}")
            if strict and s in seen:
                raise DuplicateSiteError(f"site {s} appears more than once")
            seen.add(s)

    t = inst.travel_time_t
    t0 = inst.fleet.depart_T0
    schedules = []
    for r in routes:
        if not r:
            schedules.append(None)
            continue
        arrivals, departures, service = [], [], []
        now, prev = t0, 0
        for s in r:
            now += t[prev, s]
            arrivals.append(now)
            service.append(inst.sites[s - 1].service_time)
            now += service[-1]
            departures.append(now)
            prev = s
        now += t[prev, 0]
        schedules.append(VehicleSchedule(t0, tuple(arrivals), tuple(departures), now, tuple(service)))
    return RoutePlan(routes, tuple(schedules))


def fixed_cost(plan: RoutePlan, fleet: FleetParams) -> float:
    return fleet.fixed_cost_Ch * plan.n_used


def transport_cost(plan: RoutePlan, inst: ProblemInstance, mode: str | None = None) -> float:
    """Distance cost over traversed edges.

    ``literal`` charges the unit cost per km.  ``load_weighted`` also multiplies
    by the tons on board, which start at zero and grow with every pickup.
    """
    mode = mode or inst.fleet.transport_mode
    if mode not in ("literal", "load_weighted"):
        raise ValueError(f"unknown transport mode {mode!r}")
    c = inst.fleet.unit_transport_cost_Cij
    d = inst.distance_D
    total = 0.0
    for r in plan.routes:
        load = 0.0
        for a, b in route_edges(r):
            dist = d[a, b]
            if dist != dist:  # NaN marks an absent road
                raise MissingEdgeError(f"no distance for edge {inst.label(a)}->{inst.label(b)}")
            total += c * dist * (load if mode == "load_weighted" else 1.0)
            if b != 0:
                load += inst.sites[b - 1].demand_q
    return float(total)


def return_penalty(return_time: float, fleet: FleetParams) -> float:
    if return_time < fleet.window_t0:
        return fleet.penalty_M * (fleet.window_t0 - return_time)
    if return_time > fleet.window_tR:
        return fleet.penalty_M * (return_time - fleet.window_tR)
    return 0.0


def penalty_cost(plan: RoutePlan, fleet: FleetParams) -> float:
    """Hard-window penalty on each used vehicle's return time, early or late."""
    return float(sum(return_penalty(s.return_time, fleet) for _, s in plan.used()))


def check_feasibility(plan: RoutePlan, inst: ProblemInstance) -> list[Violation]:
    out: list[Violation] = []
    fleet = inst.fleet
    if plan.n_used > fleet.num_vehicles_H:
        out.append(Violation("routes", "fleet_size", f"{plan.n_used} routes for {fleet.num_vehicles_H} vehicles"))
    counts = Counter(s for r in plan.routes for s in r)
    for s in range(1, inst.n_sites + 1):
        c = counts.get(s, 0)
        if c != 1:
            out.append(Violation(f"site {s}", "coverage", f"served {c} times"))
    limit = inst.duty_end
    for h, (r, sched) in enumerate(zip(plan.routes, plan.schedules)):
        if not r:
            continue
        load = sum(inst.sites[s - 1].demand_q for s in r)
        if load > fleet.capacity_Q:
            out.append(Violation(f"routes[{h}]", "capacity", f"load {load:g} > Q={fleet.capacity_Q:g}"))
        if sched.return_time > limit:
            out.append(
                Violation(f"routes[{h}]", "time_budget", f"returns at {sched.return_time:.4f} h > {limit:g} h")
            )
    return out


@dataclass(frozen=True)
class CostBreakdown:
    fixed_CF: float = 0.0
    transport_CVT: float = 0.0
    penalty_CP: float = 0.0
    cooling_travel: float = 0.0
    cooling_load: float = 0.0
    risk_RC: float = 0.0
    total_TC: float = 0.0
    blended_total: float = 0.0
    alpha: float = 0.0

    def blend(self, risk_rc: float, alpha: float) -> "CostBreakdown":
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        return replace(
            self, risk_RC=risk_rc, alpha=alpha, blended_total=(1 - alpha) * self.total_TC + alpha * risk_rc
        )


def total_transport_cost(plan: RoutePlan, inst: ProblemInstance) -> CostBreakdown:
    """Fixed + distance + window penalty; cooling terms stay zero here."""
    fleet = inst.effective_fleet
    cf = fixed_cost(plan, fleet)
    cvt = transport_cost(plan, inst)
    cp = penalty_cost(plan, fleet)
    tc = cf + cvt + cp
    return CostBreakdown(fixed_CF=cf, transport_CVT=cvt, penalty_CP=cp, total_TC=tc, blended_total=tc)
