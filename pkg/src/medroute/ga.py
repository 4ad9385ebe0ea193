"""Genetic algorithm over depot-delimited permutation chromosomes.

A chromosome is a permutation of the site ids ``1..N`` plus ``H - 1`` separator
tokens ``N+1 .. N+H-1``.  Keeping the separators distinct makes the gene string
a true permutation, which PMX needs; for display every separator (and both
ends) prints as the depot id, e.g. ``29-7-1-4-29-2-6-3-5-29-9-8-29``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateFitnessError, SeedExhaustedError
from .instance import ProblemInstance
from .objective import DEFAULT_INFEASIBILITY_PENALTY, Evaluation, RouteEvaluator, evaluate_plan
from .risk import RiskBreakdown, RiskWeights
from .transport import CostBreakdown, RoutePlan, schedule_routes


@dataclass(frozen=True)
class Chromosome:
    genes: tuple[int, ...]
    n_sites: int

    def __post_init__(self):
        object.__setattr__(self, "genes", tuple(int(g) for g in self.genes))

    @property
    def n_vehicles(self) -> int:
        return len(self.genes) - self.n_sites + 1

    def is_valid(self) -> bool:
        return sorted(self.genes) == list(range(1, len(self.genes) + 1)) and self.n_vehicles >= 1

    def routes(self) -> tuple[tuple[int, ...], ...]:
        out, cur = [], []
        for g in self.genes:
            if g > self.n_sites:
                out.append(tuple(cur))
                cur = []
            else:
                cur.append(g)
        out.append(tuple(cur))
        return tuple(out)

    def rendered_tokens(self, depot_id: int) -> list[int]:
        return [depot_id] + [depot_id if g > self.n_sites else g for g in self.genes] + [depot_id]

    def render(self, depot_id: int) -> str:
        return "-".join(str(t) for t in self.rendered_tokens(depot_id))


def encode(routes: Sequence[Sequence[int]], n_sites: int, n_vehicles: int) -> Chromosome:
    """Inverse of :meth:`Chromosome.routes`; pads with empty routes up to ``n_vehicles``."""
    routes = [list(r) for r in routes]
    if len(routes) > n_vehicles:
        raise ValueError(f"{len(routes)} routes but only {n_vehicles} vehicles")
    routes += [[] for _ in range(n_vehicles - len(routes))]
    genes: list[int] = []
    for h, r in enumerate(routes):
        if h:
            genes.append(n_sites + h)
        genes.extend(r)
    return Chromosome(tuple(genes), n_sites)


def parse_rendered(text: str, depot_id: int) -> Chromosome:
    tokens = [int(t) for t in text.strip().split("-")]
    if len(tokens) < 2 or tokens[0] != depot_id or tokens[-1] != depot_id:
        raise ValueError(f"rendered chromosome must start and end with depot {depot_id}: {text!r}")
    inner = tokens[1:-1]
    n_sites = sum(1 for t in inner if t != depot_id)
    routes, cur = [], []
    for t in inner:
        if t == depot_id:
            routes.append(cur)
            cur = []
        else:
            cur.append(t)
    routes.append(cur)
    return encode(routes, n_sites, len(routes))


def decode(chrom: Chromosome, inst: ProblemInstance) -> RoutePlan:
    return schedule_routes(inst, chrom.routes())


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 30
    max_iterations: int = 300
    improvement_epsilon: float = 1e-7
    # consecutive sub-epsilon generations before declaring convergence;
    # 1 stops at the first generation without improvement
    stall_generations: int = 150
    crossover_prob: float = 0.8
    mutation_prob: float = 0.2
    elitism_count: int = 1
    infeasibility_penalty: float = DEFAULT_INFEASIBILITY_PENALTY
    rng_seed: int = 0
    init_resamples: int = 100
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not (0 <= self.crossover_prob <= 1 and 0 <= self.mutation_prob <= 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be in [0, population_size)")
        if self.max_iterations < 0 or self.stall_generations < 1 or self.workers < 1:
            raise ValueError("max_iterations >= 0, stall_generations >= 1 and workers >= 1 required")


class TerminationReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class GaResult:
    best_chromosome: Chromosome
    best_plan: RoutePlan
    best_cost: CostBreakdown
    best_risk: RiskBreakdown
    best_fitness: float
    violations: tuple
    history: tuple[float, ...]
    generations_run: int
    termination_reason: TerminationReason

    @property
    def feasible(self) -> bool:
        return not self.violations


def fitness(chrom: Chromosome, inst: ProblemInstance, weights: RiskWeights, alpha: float, config: GaConfig | None = None) -> float:
    """Blended objective of the decoded plan plus the per-violation penalty."""
    config = config or GaConfig()
    return evaluate_plan(decode(chrom, inst), inst, weights, alpha).penalised(config.infeasibility_penalty)


def selection_score(cost: float) -> float:
    """Roulette weight: lower cost, larger slice."""
    return 1.0 / (cost + 1.0)


def select_parents(population: Sequence, scores: Sequence[float], rng: np.random.Generator):
    """Two independent roulette-wheel draws, each proportional to ``scores``."""
    s = np.asarray(scores, dtype=float)
    if s.shape != (len(population),) or not np.all(np.isfinite(s)) or np.any(s < 0):
        raise DegenerateFitnessError("scores must be finite, nonnegative and one per individual")
    cum = np.cumsum(s)
    total = cum[-1]
    if total <= 0:
        raise DegenerateFitnessError("all selection scores are zero")
    picks = np.searchsorted(cum, rng.random(2) * total, side="right")
    i, j = (min(int(k), len(population) - 1) for k in picks)
    return population[i], population[j]


def pmx_child(p1: Sequence[int], p2: Sequence[int], lo: int, hi: int) -> list[int]:
    """Child keeping ``p1[lo:hi]``; other positions come from ``p2`` through the segment mapping."""
    child = list(p2)
    child[lo:hi] = p1[lo:hi]
    where_in_p1 = {p1[k]: k for k in range(lo, hi)}
    for i in list(range(lo)) + list(range(hi, len(p1))):
        g = p2[i]
        while g in where_in_p1:
            g = p2[where_in_p1[g]]
        child[i] = g
    return child


def pmx_crossover(a: Chromosome, b: Chromosome, rng: np.random.Generator) -> tuple[Chromosome, Chromosome]:
    size = len(a.genes)
    if size < 2:
        return a, b
    lo, hi = sorted(int(x) for x in rng.choice(size + 1, 2, replace=False))
    c1 = pmx_child(a.genes, b.genes, lo, hi)
    c2 = pmx_child(b.genes, a.genes, lo, hi)
    return Chromosome(tuple(c1), a.n_sites), Chromosome(tuple(c2), a.n_sites)


def reverse_segment(genes: Sequence[int], i: int, j: int) -> tuple[int, ...]:
    """Reverse positions ``i..j`` inclusive (0-based)."""
    g = list(genes)
    g[i : j + 1] = g[i : j + 1][::-1]
    return tuple(g)


def inversion_mutation(c: Chromosome, rng: np.random.Generator, prob: float = 0.2) -> Chromosome:
    size = len(c.genes)
    if rng.random() >= prob or size < 2:
        return c
    i, j = sorted(int(x) for x in rng.choice(size, 2, replace=False))
    return Chromosome(reverse_segment(c.genes, i, j), c.n_sites)


def random_chromosome(n_sites: int, n_vehicles: int, rng: np.random.Generator) -> Chromosome:
    return Chromosome(tuple(int(g) for g in rng.permutation(n_sites + n_vehicles - 1) + 1), n_sites)


def initialize_population(
    inst: ProblemInstance,
    config: GaConfig,
    rng: np.random.Generator | None = None,
    evaluator: RouteEvaluator | None = None,
) -> list[Chromosome]:
    """Uniform random chromosomes, each resampled up to ``init_resamples`` times while infeasible.

    After the resampling budget an infeasible draw is kept; the fitness penalty
    then keeps it out of contention.
    """
    if inst.total_demand > inst.fleet.num_vehicles_H * inst.fleet.capacity_Q:
        raise SeedExhaustedError("total demand exceeds fleet capacity; no feasible chromosome exists")
    rng = np.random.default_rng(config.rng_seed) if rng is None else rng
    if evaluator is None:
        from .risk import RiskWeights

        evaluator = RouteEvaluator(inst, RiskWeights.default(), 0.0, config.infeasibility_penalty)
    n, h = inst.n_sites, inst.fleet.num_vehicles_H
    pop = []
    for _ in range(config.population_size):
        for _ in range(max(1, config.init_resamples)):
            c = random_chromosome(n, h, rng)
            if evaluator.violations(c.routes()) == 0:
                break
        pop.append(c)
    return pop


class _Scorer:
    def __init__(self, ev: RouteEvaluator, workers: int):
        self.ev = ev
        self.cache: dict[tuple[int, ...], float] = {}
        self.pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def one(self, c: Chromosome) -> float:
        f = self.cache.get(c.genes)
        if f is None:
            f = self.ev.fitness(c.routes())
            self.cache[c.genes] = f
        return f

    def __call__(self, pop: list[Chromosome]) -> list[float]:
        if self.pool is None:
            return [self.one(c) for c in pop]
        return list(self.pool.map(self.one, pop))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


Observer = Callable[[int, Sequence[Chromosome], Sequence[float]], None]


def run_ga(
    inst: ProblemInstance,
    weights: RiskWeights,
    alpha: float,
    config: GaConfig | None = None,
    observer: Observer | None = None,
) -> GaResult:
    """Evolve until the best cost stalls or ``max_iterations`` generations have run.

    All random draws happen on this thread in a fixed order, so the result is
    identical for any ``config.workers``.  ``observer(generation, population,
    fitnesses)`` is called once per generation, starting with generation 0.
    """
    config = config or GaConfig()
    rng = np.random.default_rng(config.rng_seed)
    ev = RouteEvaluator(inst, weights, alpha, config.infeasibility_penalty)
    score = _Scorer(ev, config.workers)
    try:
        pop = initialize_population(inst, config, rng, ev)
        fit = score(pop)
        if observer:
            observer(0, tuple(pop), tuple(fit))
        history = [min(fit)]
        reason = TerminationReason.MAX_ITERATIONS
        stall = 0
        gen = 0
        size = config.population_size
        while gen < config.max_iterations:
            gen += 1
            order = sorted(range(size), key=lambda k: (fit[k], k))
            nxt = [pop[k] for k in order[: config.elitism_count]]
            weights_ = [selection_score(f) for f in fit]
            while len(nxt) < size:
                a, b = select_parents(pop, weights_, rng)
                if rng.random() < config.crossover_prob:
                    a, b = pmx_crossover(a, b, rng)
                nxt.append(inversion_mutation(a, rng, config.mutation_prob))
                if len(nxt) < size:
                    nxt.append(inversion_mutation(b, rng, config.mutation_prob))
            pop = nxt
            fit = score(pop)
            if observer:
                observer(gen, tuple(pop), tuple(fit))
            best, prev = min(fit), history[-1]
            history.append(best)
            gain = (prev - best) / abs(prev) if prev else 0.0
            stall = stall + 1 if gain < config.improvement_epsilon else 0
            if stall >= config.stall_generations:
                reason = TerminationReason.CONVERGED
                break
    finally:
        score.close()

    k = min(range(size), key=lambda k: (fit[k], k))
    best_chrom = pop[k]
    plan = decode(best_chrom, inst)
    ev_full: Evaluation = evaluate_plan(plan, inst, weights, alpha)
    return GaResult(
        best_chromosome=best_chrom,
        best_plan=plan,
        best_cost=ev_full.cost,
        best_risk=ev_full.risk,
        best_fitness=fit[k],
        violations=ev_full.violations,
        history=tuple(history),
        generations_run=gen,
        termination_reason=reason,
    )
