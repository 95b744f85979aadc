"""Regenerate region.csv, curves.csv and thresholds.csv.

    python3 scripts/make_figure_data.py --out data/ [--n-max 6] [--grid 40]
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from biasedgames.analysis import (
    curves_csv,
    region_csv,
    region_scan,
    svetlichny_curves,
    thresholds_csv,
    thresholds_vs_n,
)
from biasedgames.optimize import OptimizerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--grid", type=int, default=40)
    ap.add_argument("--curve-points", type=int, default=50)
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--tol", type=float, default=1e-4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = OptimizerConfig(seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    timings = {}

    t = time.perf_counter()
    (args.out / "region.csv").write_text(region_csv(region_scan(args.grid)))
    timings["region"] = time.perf_counter() - t

    t = time.perf_counter()
    grid = 0.5 + 0.5 * np.arange(args.curve_points) / args.curve_points
    (args.out / "curves.csv").write_text(curves_csv(svetlichny_curves(3, grid, cfg)))
    timings["curves"] = time.perf_counter() - t

    t = time.perf_counter()
    series = thresholds_vs_n(args.n_max, cfg, args.tol)
    (args.out / "thresholds.csv").write_text(thresholds_csv(series, args.tol))
    timings["thresholds"] = time.perf_counter() - t

    meta = {"optimizer": cfg.to_json(), "grid": args.grid, "tol_p": args.tol, "seconds": timings}
    (args.out / "meta.json").write_text(json.dumps(meta, indent=2))
    for n, p_star in series:
        print(f"n={n}  p*={p_star:.5f}")


if __name__ == "__main__":
    main()
