"""Command line interface.

Subcommands:
  sweep    run a JSON-configured estimator grid and write its CSV
  figure   reproduce one of the preset comparison figures (CSV + SVG)
  packing  build a minimax packing and print its JSON report
  recheck  run the library invariant battery

Outputs are deterministic given the seeds: re-running a command rewrites
byte-identical CSV/JSON.
"""

from __future__ import annotations

import argparse
import json
import sys

from .lowerbounds import (
    build_calibrated_packing,
    build_packing,
    fano_lower_bound,
    free_index_set,
)
from .models import ModelSpec
from .recheck import run_invariants
from .sweeps import FIGURE_IDS, SweepConfig, reproduce_figure, run_sweep


def _cmd_sweep(args) -> int:
    config = SweepConfig.from_json(args.config)
    if config.output is None:
        raise SystemExit("config must set 'output' when run from the command line")
    run_sweep(config)
    print(f"wrote {config.output}")
    return 0


def _cmd_figure(args) -> int:
    reproduce_figure(args.id, args.seed, out_dir=args.out, trials=args.trials)
    print(f"wrote {args.out}/{args.id}.csv and {args.out}/{args.id}.svg")
    return 0


def _cmd_packing(args) -> int:
    spec = ModelSpec(args.model, d=args.d, m=args.m, s=args.s, r=args.r, L=args.L)
    which = args.which_i if spec.kind == "cw" else None
    i_size = free_index_set(spec, which).size
    if args.eps_scale is None:
        packing = build_calibrated_packing(spec, which, args.n, args.sigma, args.seed)
    else:
        packing = build_packing(spec, which, args.eps_scale, args.seed)
    report = {
        "spec": {"kind": spec.kind, "d": spec.d, "m": spec.m, "s": spec.s,
                 "r": spec.r, "L": spec.L},
        "I_size": int(i_size),
        "M": int(packing.M),
        "rho_min": packing.rho_min,
        "rho_avg": packing.rho_avg,
        "eps_scale": packing.eps_scale,
        "n": args.n,
        "sigma": args.sigma,
        "fano_bound": fano_lower_bound(packing, args.n, args.sigma),
    }
    print(json.dumps(report, sort_keys=True))
    return 0


def _cmd_recheck(args) -> int:
    if args.config is not None:
        SweepConfig.from_json(args.config)  # validate; battery shapes are fixed
    results = run_invariants(seed=args.seed)
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{tag} {res.name}: {res.detail}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="samplex",
        description="sample-complexity experiments for structured linear networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a JSON-configured grid")
    p_sweep.add_argument("--config", required=True, help="path to a SweepConfig JSON file")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fig = sub.add_parser("figure", help="reproduce a preset comparison figure")
    p_fig.add_argument("--id", required=True, choices=FIGURE_IDS)
    p_fig.add_argument("--seed", type=int, default=42)
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.add_argument("--trials", type=int, default=20)
    p_fig.set_defaults(func=_cmd_figure)

    p_pack = sub.add_parser("packing", help="build a minimax packing report")
    p_pack.add_argument("--model", required=True, choices=("ca", "cw", "rnn"))
    p_pack.add_argument("--d", type=int, required=True)
    p_pack.add_argument("--m", type=int, default=0)
    p_pack.add_argument("--s", type=int, default=1)
    p_pack.add_argument("--r", type=int, default=0)
    p_pack.add_argument("--L", type=int, default=1)
    p_pack.add_argument("--n", type=int, required=True)
    p_pack.add_argument("--sigma", type=float, default=1.0)
    p_pack.add_argument("--which-i", choices=("I1", "I2"), default="I1",
                        help="free index set for the weighted-pooling class")
    p_pack.add_argument("--eps-scale", type=float, default=None,
                        help="override the matched scale sigma*sqrt(|I|/n)*coeff")
    p_pack.add_argument("--seed", type=int, default=0)
    p_pack.set_defaults(func=_cmd_packing)

    p_re = sub.add_parser("recheck", help="run the invariant battery")
    p_re.add_argument("--config", default=None, help="optional config JSON to validate")
    p_re.add_argument("--seed", type=int, default=0)
    p_re.set_defaults(func=_cmd_recheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
