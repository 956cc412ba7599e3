"""Batch sweep harness: run estimator grids, fit scaling exponents, and
reproduce the standard comparison figures.

A sweep crosses model shapes with sample sizes, runs a fixed number of
independent trials per grid point, fits the model-matched estimator and/or
the dense baseline, and records prediction errors measured through the
dense expansions.  Per-trial seeds derive from (master_seed, grid_index,
trial), so any row is reproducible in isolation and re-running a config
rewrites byte-identical CSV.

The ``wall_ms`` CSV column is reserved and always written as 0: rows must
be byte-stable across runs, which no measured timing is.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, NamedTuple

import numpy as np

from .datagen import derive_seed, gen_dataset, sample_truth
from .estimators import FitOptions, fit, fit_fnn, prediction_error
from .models import ModelSpec, expand_params

N_GRID_DEFAULT = tuple(2**k for k in range(7, 14))
TRIALS_DEFAULT = 20

# Iteration budget used by sweeps for the iterative fitters.  Tighter than
# the library-wide defaults: grids run hundreds of fits.
SWEEP_FIT_DEFAULTS = {"max_iters": 800, "tol": 1e-8, "restarts": 2}

_CSV_COLUMNS = (
    "model", "d", "m", "s", "r", "L", "n", "trial", "seed",
    "estimator", "pred_err", "train_loss", "converged", "wall_ms",
)

_CONFIG_KEYS = {
    "model", "d", "m", "s", "r", "L", "n", "sigma", "trials",
    "master_seed", "estimators", "output", "fit",
}

_FIT_KEYS = {"max_iters", "tol", "restarts", "method", "learning_rate"}


def _as_int_tuple(value, name: str) -> tuple[int, ...]:
    if isinstance(value, (int, np.integer)):
        value = [value]
    out = tuple(int(v) for v in value)
    if not out:
        raise ValueError(f"{name} must be a non-empty list of integers")
    return out


@dataclass(frozen=True)
class SweepConfig:
    """Grid description: shape lists are crossed, every combination must be
    a valid spec.  ``estimators`` is a subset of {"matched", "fnn"}."""

    model: str
    d: tuple[int, ...]
    n: tuple[int, ...] = N_GRID_DEFAULT
    m: tuple[int, ...] = (0,)
    s: tuple[int, ...] = (1,)
    r: tuple[int, ...] = (0,)
    L: tuple[int, ...] = (1,)
    sigma: float = 1.0
    trials: int = TRIALS_DEFAULT
    master_seed: int = 0
    estimators: tuple[str, ...] = ("matched", "fnn")
    output: str | None = None
    fit: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "d", _as_int_tuple(self.d, "d"))
        object.__setattr__(self, "n", _as_int_tuple(self.n, "n"))
        object.__setattr__(self, "m", _as_int_tuple(self.m, "m"))
        object.__setattr__(self, "s", _as_int_tuple(self.s, "s"))
        object.__setattr__(self, "r", _as_int_tuple(self.r, "r"))
        object.__setattr__(self, "L", _as_int_tuple(self.L, "L"))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        normalized = tuple(_normalize_estimator(e) for e in self.estimators)
        if not normalized:
            raise ValueError("estimators must be non-empty")
        object.__setattr__(self, "estimators", normalized)
        if self.fit is not None:
            unknown = set(self.fit) - _FIT_KEYS
            if unknown:
                raise ValueError(f"unknown fit option keys: {sorted(unknown)}")
        self.specs()  # validate every shape combination eagerly

    def specs(self) -> list[ModelSpec]:
        return [
            ModelSpec(self.model, d=dd, m=mm, s=ss, r=rr, L=ll)
            for dd, mm, ss, rr, ll in product(self.d, self.m, self.s, self.r, self.L)
        ]

    def grid(self) -> list[tuple[ModelSpec, int]]:
        return [(spec, n) for spec in self.specs() for n in self.n]

    def fit_options(self, seed: int) -> FitOptions:
        merged = dict(SWEEP_FIT_DEFAULTS)
        merged.update(self.fit or {})
        return FitOptions(seed=seed, **merged)

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "model" not in raw or "d" not in raw:
            raise ValueError("config requires at least 'model' and 'd'")
        kwargs = dict(raw)
        for key in ("estimators",):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _normalize_estimator(name: str) -> str:
    low = str(name).lower().replace("_", "-")
    if low in ("matched", "model-matched"):
        return "matched"
    if low == "fnn":
        return "fnn"
    raise ValueError(f"unknown estimator {name!r}; expected 'model-matched' or 'fnn'")


@dataclass(frozen=True)
class SweepRow:
    model: str
    d: int
    m: int
    s: int
    r: int
    L: int
    n: int
    trial: int
    seed: int
    estimator: str
    pred_err: float
    train_loss: float
    converged: bool
    wall_ms: float = 0.0


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def filtered(self, **where) -> list[SweepRow]:
        out = []
        for row in self.rows:
            if all(getattr(row, k) == v for k, v in where.items()):
                out.append(row)
        return out

    def median_error(self, **where) -> float:
        rows = self.filtered(**where)
        if not rows:
            raise ValueError(f"no rows match {where}")
        return float(np.median([r.pred_err for r in rows]))

    def __add__(self, other: "SweepResult") -> "SweepResult":
        return SweepResult(rows=self.rows + other.rows)


def _g17(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(_CSV_COLUMNS) + "\n")
        for row in result.rows:
            cells = [
                row.model, str(row.d), str(row.m), str(row.s), str(row.r), str(row.L),
                str(row.n), str(row.trial), str(row.seed), row.estimator,
                _g17(row.pred_err), _g17(row.train_loss),
                "true" if row.converged else "false", _g17(row.wall_ms),
            ]
            fh.write(",".join(cells) + "\n")


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute the grid: per (grid point, trial) draw a truth, generate data,
    fit the requested estimators, and record expansion-space errors."""
    rows: list[SweepRow] = []
    for g, (spec, n) in enumerate(config.grid()):
        for trial in range(config.trials):
            base = derive_seed(config.master_seed, g, trial)
            truth = sample_truth(spec, derive_seed(base, 0))
            theta_star = expand_params(truth, spec)
            data = gen_dataset(spec, truth, n, config.sigma, derive_seed(base, 1))
            for estimator in config.estimators:
                if estimator == "matched":
                    res = fit(data, config.fit_options(seed=derive_seed(base, 2)))
                    name = spec.kind
                else:
                    res = fit_fnn(data)
                    name = "fnn"
                rows.append(SweepRow(
                    model=spec.kind, d=spec.d, m=spec.m, s=spec.s, r=spec.r, L=spec.L,
                    n=n, trial=trial, seed=base, estimator=name,
                    pred_err=prediction_error(res.expanded_hat, theta_star),
                    train_loss=res.train_loss, converged=res.converged,
                ))
    result = SweepResult(rows=tuple(rows))
    if config.output is not None:
        write_csv(result, config.output)
    return result


class ScalingFit(NamedTuple):
    slope: float
    stderr: float


def fit_scaling_exponent(result: SweepResult, axis: str, **where) -> ScalingFit:
    """Least-squares slope of log(median error) against log(axis value).

    ``axis`` is one of "n", "m", "r"; keyword filters select the rows (for
    example ``estimator="ca", m=8``).  Requires at least 3 distinct axis
    values; errors aggregate by median over trials at each value.
    """
    if axis not in ("n", "m", "r"):
        raise ValueError(f"axis must be 'n', 'm' or 'r', got {axis!r}")
    rows = result.filtered(**where)
    values = sorted({getattr(r, axis) for r in rows})
    if len(values) < 3:
        raise ValueError(f"need >= 3 distinct {axis} values, got {len(values)}")
    xs = np.log([float(v) for v in values])
    ys = np.log([
        float(np.median([r.pred_err for r in rows if getattr(r, axis) == v]))
        for v in values
    ])
    k = len(xs)
    xc = xs - xs.mean()
    slope = float(xc @ ys / (xc @ xc))
    intercept = float(ys.mean() - slope * xs.mean())
    ssr = float(np.sum((ys - intercept - slope * xs) ** 2))
    stderr = math.sqrt(max(ssr, 0.0) / (k - 2) / float(xc @ xc)) if k > 2 else 0.0
    return ScalingFit(slope=slope, stderr=stderr)


FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5")


def figure_configs(fig_id: str, master_seed: int, trials: int = TRIALS_DEFAULT) -> list[SweepConfig]:
    """Preset grids of the four comparison figures.

    fig2: summed-pooling filter, d=64, m in {2, 8, 16}, stride 1.
    fig3: the same with non-overlapping stride s = m.
    fig4: weighted pooling, d=64, m=8, s in {1, 4, 8}.
    fig5: recurrence, d = L = 50, r in {2, 8, 16}.
    All use n in {2^7, ..., 2^13}.
    """
    if fig_id == "fig2":
        return [SweepConfig(model="ca", d=[64], m=[2, 8, 16], s=[1],
                            trials=trials, master_seed=derive_seed(master_seed, 0))]
    if fig_id == "fig3":
        return [
            SweepConfig(model="ca", d=[64], m=[m], s=[m],
                        trials=trials, master_seed=derive_seed(master_seed, i))
            for i, m in enumerate((2, 8, 16))
        ]
    if fig_id == "fig4":
        return [SweepConfig(model="cw", d=[64], m=[8], s=[1, 4, 8],
                            trials=trials, master_seed=derive_seed(master_seed, 0))]
    if fig_id == "fig5":
        return [SweepConfig(model="rnn", d=[50], r=[2, 8, 16], L=[50],
                            trials=trials, master_seed=derive_seed(master_seed, 0))]
    raise ValueError(f"unknown figure id {fig_id!r}, expected one of {FIGURE_IDS}")


# Shape value anchoring the single dense-baseline curve of each figure.
_FIGURE_SHAPE_AXIS = {"fig2": ("m", 8), "fig3": ("m", 8), "fig4": ("s", 1), "fig5": ("r", 8)}
_FIGURE_CURVE_AXIS = {"fig2": "m", "fig3": "m", "fig4": "s", "fig5": "r"}


class FigureCurve(NamedTuple):
    label: str
    n: tuple[int, ...]
    median: tuple[float, ...]
    q25: tuple[float, ...]
    q75: tuple[float, ...]


def _curve(rows: Iterable[SweepRow], label: str) -> FigureCurve:
    rows = list(rows)
    ns = sorted({r.n for r in rows})
    per_n = [[r.pred_err for r in rows if r.n == n] for n in ns]
    return FigureCurve(
        label=label,
        n=tuple(ns),
        median=tuple(float(np.median(v)) for v in per_n),
        q25=tuple(float(np.percentile(v, 25)) for v in per_n),
        q75=tuple(float(np.percentile(v, 75)) for v in per_n),
    )


def figure_curves(result: SweepResult, fig_id: str) -> list[FigureCurve]:
    """Median error curves of a figure run: one per model shape plus one
    dense-baseline curve at the anchor shape."""
    axis = _FIGURE_CURVE_AXIS[fig_id]
    anchor_axis, anchor_value = _FIGURE_SHAPE_AXIS[fig_id]
    matched = [r for r in result.rows if r.estimator != "fnn"]
    curves = []
    for value in sorted({getattr(r, axis) for r in matched}):
        rows = [r for r in matched if getattr(r, axis) == value]
        curves.append(_curve(rows, f"{rows[0].estimator} {axis}={value}"))
    fnn_rows = [
        r for r in result.rows
        if r.estimator == "fnn" and getattr(r, anchor_axis) == anchor_value
    ]
    if fnn_rows:
        curves.append(_curve(fnn_rows, "fnn"))
    return curves


def plot_figure(curves: list[FigureCurve], fig_id: str, path) -> None:
    """Log-log median error vs n with interquartile bands, saved as SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for curve in curves:
        style = "--" if curve.label == "fnn" else "-"
        ax.plot(curve.n, curve.median, style, marker="o", markersize=3, label=curve.label)
        ax.fill_between(curve.n, curve.q25, curve.q75, alpha=0.15)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("training samples n")
    ax.set_ylabel("median prediction error")
    ax.set_title(fig_id)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def reproduce_figure(fig_id: str, master_seed: int, out_dir=None,
                     trials: int = TRIALS_DEFAULT) -> SweepResult:
    """Run a figure preset; optionally write <fig_id>.csv and <fig_id>.svg."""
    result = SweepResult(rows=())
    for config in figure_configs(fig_id, master_seed, trials):
        result = result + run_sweep(config)
    if out_dir is not None:
        import os

        os.makedirs(out_dir, exist_ok=True)
        write_csv(result, os.path.join(out_dir, f"{fig_id}.csv"))
        plot_figure(figure_curves(result, fig_id), fig_id, os.path.join(out_dir, f"{fig_id}.svg"))
    return result
