#!/usr/bin/env python3
"""Reproduce the three adaptive-vs-baseline comparison tables.

Runs the autonomous loop ten times per test function, pairs each run with a
size-matched equidistant or factorial design trained through the same
surrogate pipeline, scores both on the held-out verification set, and
writes one CSV per function.

Usage:
    python scripts/run_benchmarks.py --out-dir results [--trials 10] [--seed N]
"""

import argparse
import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ared import benchmarks, session_io  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument(
        "--functions", nargs="+", default=["gauss2d", "surface3d", "peaks"],
        choices=sorted(benchmarks.BENCHMARKS),
    )
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for fid in args.functions:
        t0 = time.time()
        table = benchmarks.run_comparison(fid, args.trials, args.seed)
        path = out_dir / f"{fid}.csv"
        session_io.export_comparison_csv(table, str(path))

        counts = [o.adaptive_row.case_count for o in table.trials]
        a_mae = [o.adaptive_row.mae for o in table.trials]
        b_mae = [o.baseline_row.mae for o in table.trials]
        print(f"{fid}: {args.trials} trials in {time.time() - t0:.0f}s -> {path}")
        print(
            f"  selected cases: min={min(counts)} max={max(counts)} "
            f"mean={np.mean(counts):.1f}"
        )
        print(
            f"  verification MAE medians: adaptive={np.median(a_mae):.5g} "
            f"baseline={np.median(b_mae):.5g}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
