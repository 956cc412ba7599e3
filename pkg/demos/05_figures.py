"""
Reproducing the comparison figures
==================================

Each preset sweeps sample sizes 2^7..2^13 for one family of shapes and
plots median error curves (matched estimator per shape, dense baseline at
the anchor shape).  Full presets use 20 trials per grid point; pass
--trials to reduce for a quick look.  fig5 (the recurrence) is the slow
one: hundreds of first-order fits plus 2500-dimensional dense solves.

    python3 demos/05_figures.py --id fig2 --trials 5 --out out/
"""

import argparse
import time

import samplex as sx

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--id", default="fig2", choices=sx.FIGURE_IDS)
parser.add_argument("--trials", type=int, default=5)
parser.add_argument("--seed", type=int, default=42)
parser.add_argument("--out", default="figures_out")
args = parser.parse_args()

t0 = time.time()
result = sx.reproduce_figure(args.id, args.seed, out_dir=args.out, trials=args.trials)
print(f"{args.id}: {len(result.rows)} rows in {time.time() - t0:.0f}s "
      f"-> {args.out}/{args.id}.csv, {args.out}/{args.id}.svg")

for curve in sx.figure_curves(result, args.id):
    start, end = curve.median[0], curve.median[-1]
    print(f"  {curve.label:>10}: median error {start:.4f} (n={curve.n[0]}) "
          f"-> {end:.4f} (n={curve.n[-1]})")
