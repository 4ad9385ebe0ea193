"""How often the GA finds the exhaustive optimum on small random instances.

    python3 scripts/oracle_benchmark.py [--instances 200] [--stall 150] [--mutation 0.2]
"""

import argparse
import time

import numpy as np

from medroute.ga import GaConfig, run_ga
from medroute.oracle import solve_exact
from medroute.risk import RiskWeights
from medroute.synthetic import small_random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--stall", type=int, default=GaConfig.stall_generations)
    ap.add_argument("--mutation", type=float, default=GaConfig.mutation_prob)
    ap.add_argument("--batch", type=int, default=20)
    args = ap.parse_args()

    w = RiskWeights.default()
    rng = np.random.default_rng(args.seed)
    gaps, gens = [], []
    t = time.perf_counter()
    for k in range(args.instances):
        n, h = int(rng.integers(5, 9)), int(rng.integers(1, 3))
        inst = small_random_instance(n, h, seed=9000 + k)
        opt = solve_exact(inst, w, args.alpha).optimal_fitness
        cfg = GaConfig(rng_seed=k, stall_generations=args.stall, mutation_prob=args.mutation)
        r = run_ga(inst, w, args.alpha, cfg)
        gaps.append((r.best_fitness - opt) / opt)
        gens.append(r.generations_run)
    gaps = np.array(gaps)
    b = args.batch
    batches = [gaps[i : i + b] for i in range(0, len(gaps) - b + 1, b)]
    ok = sum((g <= 1e-9).sum() >= 0.9 * b and g.max() <= 0.05 for g in batches)
    print(f"instances        {len(gaps)}")
    print(f"optimum found    {(gaps <= 1e-9).mean():.1%}")
    print(f"gap > 5%         {(gaps > 0.05).sum()}")
    print(f"worst gap        {gaps.max():.2%}")
    print(f"mean generations {np.mean(gens):.1f}")
    print(f"batches of {b} with >= 90% optimal and all within 5%: {ok}/{len(batches)}")
    print(f"elapsed          {time.perf_counter() - t:.1f} s")


if __name__ == "__main__":
    main()
