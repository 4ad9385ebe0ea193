"""Regenerate the bundled synthetic instances under src/medroute/data/.

The case-study road data were never published, so these instances only keep
its shape: 28 daytime sites around depot 29, 15 nighttime sites around depot
16, three 3-ton vehicles, and the published cost parameters.
"""

import argparse
from pathlib import Path

from medroute.instance import instance_from_dict, validate_instance, write_instance
from medroute.synthetic import synthetic_instance_dict

DATA = Path(__file__).resolve().parents[1] / "src" / "medroute" / "data"

SPECS = {
    "synthetic_dalian_day": dict(n_sites=28, n_vehicles=3, seed=29, depot_id=29, window=(8.0, 13.0)),
    "synthetic_dalian_night": dict(
        n_sites=15, n_vehicles=3, seed=16, depot_id=16, scenario="covid", demand_range=(0.2, 0.55)
    ),
    "small_n7_h2": dict(
        n_sites=7, n_vehicles=2, seed=7, depot_id=8, area=(6.0, 5.0), km_range=(0.5, 15.0),
        demand_range=(0.3, 1.2), window=(8.0, 10.5),
    ),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=DATA)
    args = ap.parse_args()
    for name, kw in SPECS.items():
        inst = instance_from_dict(synthetic_instance_dict(name=name, **kw))
        problems = validate_instance(inst)
        if problems:
            raise SystemExit(f"{name}: {problems[:3]}")
        path = args.out_dir / f"{name}.json"
        write_instance(inst, path)
        print(f"{path}: N={inst.n_sites} H={inst.fleet.num_vehicles_H} demand={inst.total_demand:.2f} t")


if __name__ == "__main__":
    main()
