"""Solve the bundled day and night instances and print the savings summary.

    python3 scripts/case_study.py [--seed 42] [--alpha 0.5] [--out report.json]
"""

import argparse
import json

from medroute.instance import atomic_write_text, load_instance
from medroute.pipeline import report_to_dict, run_pipeline, summary_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--out")
    args = ap.parse_args()

    insts = [load_instance("synthetic_dalian_day.json"), load_instance("synthetic_dalian_night.json")]
    run = run_pipeline(insts, args.alpha, args.seed)
    print(summary_text(run))
    if args.out:
        atomic_write_text(args.out, json.dumps(report_to_dict(run), indent=2) + "\n")


if __name__ == "__main__":
    main()
