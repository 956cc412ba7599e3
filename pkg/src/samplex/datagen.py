"""Seeded synthetic regression data for the structured linear models.

Inputs are isotropic standard Gaussian (vectors for ca/cw/fnn, per-step
vectors for rnn) and labels are ``forward(x; truth) + N(0, sigma^2)`` noise.

Reproducibility contract: every row draws from its own generator seeded by
``(seed, row_index)``, so row i of a length-100 dataset is bit-identical to
row i of a length-50 dataset with the same seed.  The generator is numpy's
PCG64 keyed through SeedSequence; the algorithm name is recorded on the
dataset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import (
    CAParams,
    CWParams,
    FNNParams,
    ModelSpec,
    Params,
    RNNParams,
    forward_params,
)

RNG_ALGORITHM = "pcg64-seedseq(seed,row)"

_SPECTRAL_TARGET = 0.9
_POWER_ITERS = 100


def derive_seed(*parts: int) -> int:
    """Hash a tuple of integers into a fresh 64-bit seed (deterministic)."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def rng_from(*parts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(p) for p in parts]))


@dataclass(frozen=True)
class Dataset:
    """Immutable bundle of inputs, labels, and the generating configuration.

    ``inputs`` has shape (n, d) for vector models and (n, L, d) for sequence
    models.  ``noise`` keeps the realized disturbances so residual-based
    identities can be checked exactly on synthetic data.
    """

    spec: ModelSpec
    inputs: np.ndarray
    labels: np.ndarray
    sigma: float
    seed: int
    truth: Params
    noise: np.ndarray
    rng_algorithm: str = field(default=RNG_ALGORITHM)

    def __post_init__(self):
        for name in ("inputs", "labels", "noise"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def features(self) -> np.ndarray:
        """Dense regression features z, shape (n, D); sequences flatten row-major."""
        if self.inputs.ndim == 3:
            return self.inputs.reshape(self.n, -1)
        return self.inputs


def _spectral_radius_estimate(A: np.ndarray, rng: np.random.Generator) -> float:
    """Power-iteration estimate of the spectral radius (fixed 100 steps)."""
    r = A.shape[0]
    v = rng.standard_normal(r)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(_POWER_ITERS):
        Av = A @ v
        est = np.linalg.norm(Av)
        if est == 0.0:
            return 0.0
        v = Av / est
    return float(est)


def sample_truth(spec: ModelSpec, seed: int) -> Params:
    """Draw a random ground-truth parameter bundle.

    ca/cw: standard normal filter (and pooling) weights.  rnn: standard
    normal input map; transition entries N(0, 1/r) rescaled so the
    power-iteration spectral-radius estimate is 0.9, keeping the recursion
    stable at any length.  fnn: standard normal dense regressor.
    """
    return sample_truth_rng(spec, rng_from(seed))


def sample_truth_rng(spec: ModelSpec, rng: np.random.Generator) -> Params:
    """Same draw as :func:`sample_truth` from a caller-owned generator."""
    if spec.kind == "ca":
        return CAParams(w=rng.standard_normal(spec.m))
    if spec.kind == "cw":
        return CWParams(w=rng.standard_normal(spec.m), a=rng.standard_normal(spec.r_conv))
    if spec.kind == "rnn":
        B = rng.standard_normal((spec.r, spec.d))
        A = rng.standard_normal((spec.r, spec.r)) / np.sqrt(spec.r)
        rho = _spectral_radius_estimate(A, rng)
        if rho <= 0.0:
            raise RuntimeError("degenerate transition draw (zero spectral radius estimate)")
        return RNNParams(A=A * (_SPECTRAL_TARGET / rho), B=B)
    return FNNParams(theta=rng.standard_normal(spec.D))


def gen_dataset(spec: ModelSpec, truth: Params, n: int, sigma: float, seed: int) -> Dataset:
    """Generate ``n`` rows of ``(input, forward(input; truth) + sigma * xi)``.

    Row i draws its input and its noise from the stream keyed (seed, i), so
    any prefix of rows is independent of ``n``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if spec.input_is_sequence:
        inputs = np.empty((n, spec.L, spec.d))
    else:
        inputs = np.empty((n, spec.d))
    noise = np.empty(n)
    labels = np.empty(n)
    for i in range(n):
        rng = rng_from(seed, i)
        inputs[i] = rng.standard_normal(inputs.shape[1:])
        noise[i] = sigma * rng.standard_normal()
        labels[i] = forward_params(truth, inputs[i], spec) + noise[i]
    return Dataset(
        spec=spec, inputs=inputs, labels=labels, sigma=float(sigma), seed=int(seed),
        truth=truth, noise=noise,
    )


def dump_csv(dataset: Dataset, path) -> None:
    """Write the dataset as CSV with 17-significant-digit floats.

    Vector models: one line per row, ``row,label,x_1,...,x_d``.  Sequence
    models: one line per (row, step), ``row,t,label,x_1,...,x_d`` with the
    row label repeated on each step line.
    """
    d = dataset.spec.d

    def fmt(v: float) -> str:
        return format(v, ".17g")

    with open(path, "w", newline="") as fh:
        if dataset.inputs.ndim == 3:
            fh.write("row,t,label," + ",".join(f"x_{j + 1}" for j in range(d)) + "\n")
            for i in range(dataset.n):
                for t in range(dataset.spec.L):
                    cells = [str(i), str(t + 1), fmt(dataset.labels[i])]
                    cells += [fmt(v) for v in dataset.inputs[i, t]]
                    fh.write(",".join(cells) + "\n")
        else:
            fh.write("row,label," + ",".join(f"x_{j + 1}" for j in range(d)) + "\n")
            for i in range(dataset.n):
                cells = [str(i), fmt(dataset.labels[i])]
                cells += [fmt(v) for v in dataset.inputs[i]]
                fh.write(",".join(cells) + "\n")
