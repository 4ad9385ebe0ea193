"""Exhaustive optimum for small instances, used to grade the GA.

Vehicles are interchangeable, so a plan is an unordered set of at most H
ordered routes.  The penalised objective is a sum of per-route terms, so the
search splits into (a) the cheapest visiting order of every site subset, found
by trying every permutation, and (b) every set partition of the sites into at
most H blocks.  Together these cover every plan exactly once; ``enumerated_count``
reports how many plans that is.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import InstanceTooLargeError
from .instance import ProblemInstance
from .objective import DEFAULT_INFEASIBILITY_PENALTY, RouteEvaluator, evaluate_plan
from .risk import RiskBreakdown, RiskWeights
from .transport import CostBreakdown, RoutePlan, schedule_routes


@dataclass(frozen=True)
class OracleResult:
    optimal_plan: RoutePlan
    optimal_cost: CostBreakdown
    optimal_risk: RiskBreakdown
    optimal_fitness: float
    enumerated_count: int
    violations: tuple

    @property
    def feasible(self) -> bool:
        return not self.violations


def _tol(x: float) -> float:
    return 1e-9 * max(1.0, abs(x))


def set_partitions(items: list[int], max_blocks: int):
    """Yield partitions of ``items`` into 1..max_blocks blocks (restricted growth order)."""
    n = len(items)
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i: int, used: int):
        if i == n:
            blocks = [[] for _ in range(used)]
            for item, lab in zip(items, labels):
                blocks[lab].append(item)
            yield blocks
            return
        for lab in range(min(used + 1, max_blocks)):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    yield from rec(0, 0)


def solve_exact(
    inst: ProblemInstance,
    weights: RiskWeights,
    alpha: float,
    max_n: int = 9,
    infeasibility_penalty: float = DEFAULT_INFEASIBILITY_PENALTY,
) -> OracleResult:
    """Global minimum of the penalised objective.

    Ties (within 1e-9 relative) go to the plan whose sorted tuple of routes is
    lexicographically smallest.
    """
    n = inst.n_sites
    if n > max_n:
        raise InstanceTooLargeError(f"N={n} exceeds max_n={max_n}")
    ev = RouteEvaluator(inst, weights, alpha, infeasibility_penalty)
    best_order: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {}

    def cheapest(block: tuple[int, ...]):
        hit = best_order.get(block)
        if hit is None:
            best_f, best_r = math.inf, None
            # permutations of a sorted tuple come out in lexicographic order,
            # so keeping the first within tolerance is the tie-break
            for perm in itertools.permutations(block):
                f = ev.score(perm).fitness
                if best_r is None or f < best_f - _tol(best_f):
                    best_f, best_r = f, perm
            hit = best_order[block] = (best_f, best_r)
        return hit

    best_f, best_key, count = math.inf, None, 0
    for blocks in set_partitions(list(range(1, n + 1)), inst.fleet.num_vehicles_H):
        count += math.prod(math.factorial(len(b)) for b in blocks)
        total = 0.0
        routes = []
        for b in blocks:
            f, r = cheapest(tuple(b))
            total += f
            routes.append(r)
        key = tuple(sorted(routes))
        if best_key is None or total < best_f - _tol(best_f) or (abs(total - best_f) <= _tol(best_f) and key < best_key):
            best_f, best_key = total, key

    routes = list(best_key) + [()] * (inst.fleet.num_vehicles_H - len(best_key))
    plan = schedule_routes(inst, routes)
    ev_full = evaluate_plan(plan, inst, weights, alpha)
    return OracleResult(
        optimal_plan=plan,
        optimal_cost=ev_full.cost,
        optimal_risk=ev_full.risk,
        optimal_fitness=ev_full.penalised(infeasibility_penalty),
        enumerated_count=count,
        violations=ev_full.violations,
    )
