"""Linear convolutional and recurrent network models and their dense expansions.

Three structured predictors map an input to a scalar:

* ``ca``  -- a convolutional filter ``w`` slid across the input with stride
  ``s``, all filter responses summed (average pooling up to scale).
* ``cw``  -- the same filter bank, but responses combined with learned
  pooling weights ``a`` (a one-hidden-layer linear CNN).
* ``rnn`` -- a linear recurrence ``h_t = A h_{t-1} + B x_t`` over a length-L
  sequence, output ``sum(h_L)``.

Each of these is a *structured linear model*: there is a dense vector
``theta`` with ``F(x) == <z, theta>`` where ``z`` is the input (or the
flattened sequence).  The ``expand_*`` functions construct that ``theta``.
``fnn`` denotes the unstructured baseline where ``theta`` itself is the
parameter.

All indices in docstrings are 1-based to match standard signal-processing
convention; arrays are 0-based as usual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

KINDS = ("ca", "cw", "rnn", "fnn")


@dataclass(frozen=True)
class ModelSpec:
    """Shape description of one model.

    Fields irrelevant to a kind keep their defaults (``m=0, s=1, r=0, L=1``).

    * ca/cw: input dimension ``d``, filter size ``m``, stride ``s`` with
      ``1 <= m <= d`` and both ``d`` and ``m`` divisible by ``s``.
    * rnn: per-step input dimension ``d``, hidden size ``r >= 1``, sequence
      length ``L >= 1``.
    * fnn: dense regressor on vectors (``L == 1``) or flattened sequences.
    """

    kind: str
    d: int
    m: int = 0
    s: int = 1
    r: int = 0
    L: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}, expected one of {KINDS}")
        if self.d < 1:
            raise ValueError("input dimension d must be >= 1")
        if self.L < 1:
            raise ValueError("sequence length L must be >= 1")
        if self.kind in ("ca", "cw"):
            if not 1 <= self.m <= self.d:
                raise ValueError(f"filter size m={self.m} must satisfy 1 <= m <= d={self.d}")
            if self.s < 1:
                raise ValueError("stride s must be >= 1")
            if self.d % self.s != 0 or self.m % self.s != 0:
                raise ValueError(
                    f"d={self.d} and m={self.m} must both be divisible by the stride s={self.s}"
                )
        elif self.kind == "rnn":
            if self.r < 1:
                raise ValueError("hidden size r must be >= 1")

    @property
    def r_conv(self) -> int:
        """Number of filter positions, (d - m) / s + 1."""
        if self.kind not in ("ca", "cw"):
            raise ValueError(f"r_conv is undefined for kind {self.kind!r}")
        return (self.d - self.m) // self.s + 1

    @property
    def D(self) -> int:
        """Dimension of the equivalent dense regressor."""
        if self.kind == "rnn":
            return self.L * self.d
        if self.kind == "fnn":
            return self.L * self.d
        return self.d

    @property
    def input_is_sequence(self) -> bool:
        return self.kind == "rnn" or (self.kind == "fnn" and self.L > 1)


def _frozen_array(value, name: str, ndim: int) -> np.ndarray:
    a = np.array(value, dtype=float)
    if a.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must contain only finite values")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CAParams:
    """Filter weights of the average-pooled convolutional model."""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen_array(self.w, "w", 1))


@dataclass(frozen=True)
class CWParams:
    """Filter weights ``w`` and pooling weights ``a`` of the weighted-pooling model."""

    w: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen_array(self.w, "w", 1))
        object.__setattr__(self, "a", _frozen_array(self.a, "a", 1))


@dataclass(frozen=True)
class RNNParams:
    """Transition matrix ``A`` (r x r) and input map ``B`` (r x d)."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen_array(self.A, "A", 2))
        object.__setattr__(self, "B", _frozen_array(self.B, "B", 2))
        if self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"A must be square, got shape {self.A.shape}")
        if self.B.shape[0] != self.A.shape[0]:
            raise ValueError(f"B has {self.B.shape[0]} rows but A is {self.A.shape[0]} x {self.A.shape[0]}")


@dataclass(frozen=True)
class FNNParams:
    """Dense linear regressor."""

    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen_array(self.theta, "theta", 1))


Params = CAParams | CWParams | RNNParams | FNNParams


def _check_vector(x, name: str, length: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (length,):
        raise ValueError(f"{name} must have shape ({length},), got {x.shape}")
    return x


def _check_matrix(x, name: str, shape: tuple[int, int]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {x.shape}")
    return x


def segment(x, ell: int, spec: ModelSpec) -> np.ndarray:
    """Return the ``ell``-th stride-offset window of ``x``.

    The window covers entries ``ell*s + 1 .. ell*s + m`` (1-based), for
    ``ell`` in ``0 .. r_conv - 1``.
    """
    x = _check_vector(x, "x", spec.d)
    if not 0 <= ell < spec.r_conv:
        raise IndexError(f"segment index {ell} out of range [0, {spec.r_conv - 1}]")
    lo = ell * spec.s
    return x[lo : lo + spec.m].copy()


def _windows(x: np.ndarray, spec: ModelSpec) -> np.ndarray:
    # (r_conv, m) view of all filter positions; stride slicing keeps exactly
    # the positions 0, s, 2s, ..., d - m.
    return sliding_window_view(x, spec.m)[:: spec.s]


def forward_ca(x, w, spec: ModelSpec) -> float:
    """Sum of filter responses over all positions: sum_l <w, segment(x, l)>."""
    x = _check_vector(x, "x", spec.d)
    w = _check_vector(w, "w", spec.m)
    return float((_windows(x, spec) @ w).sum())


def forward_cw(x, w, a, spec: ModelSpec) -> float:
    """Pooling-weighted sum of filter responses: sum_l a_l <w, segment(x, l)>."""
    x = _check_vector(x, "x", spec.d)
    w = _check_vector(w, "w", spec.m)
    a = _check_vector(a, "a", spec.r_conv)
    return float(_windows(x, spec) @ w @ a)


def forward_rnn(X, A, B, spec: ModelSpec) -> float:
    """Run ``h_t = A h_{t-1} + B x_t`` from ``h_0 = 0`` and return ``sum(h_L)``."""
    X = _check_matrix(X, "X", (spec.L, spec.d))
    A = _check_matrix(A, "A", (spec.r, spec.r))
    B = _check_matrix(B, "B", (spec.r, spec.d))
    h = np.zeros(spec.r)
    for t in range(spec.L):
        h = A @ h + B @ X[t]
    return float(h.sum())


def forward_fnn(x, theta, spec: ModelSpec) -> float:
    """Dense linear predictor ``<z, theta>`` on the (flattened) input."""
    z = flatten_input(x, spec)
    theta = _check_vector(theta, "theta", spec.D)
    return float(z @ theta)


def flatten_input(x, spec: ModelSpec) -> np.ndarray:
    """Map an input to the dense regression features ``z``.

    Vectors pass through; an (L, d) sequence flattens row-major, so block j
    of ``z`` is the step-j input.
    """
    x = np.asarray(x, dtype=float)
    if spec.input_is_sequence:
        if x.shape != (spec.L, spec.d):
            raise ValueError(f"input must have shape ({spec.L}, {spec.d}), got {x.shape}")
        return x.ravel()
    return _check_vector(x, "x", spec.d)


def expand_ca(w, spec: ModelSpec) -> np.ndarray:
    """Dense theta with forward_ca(x, w) == <x, theta>: the sum of all
    stride-shifted embeddings of ``w`` into R^d."""
    w = _check_vector(w, "w", spec.m)
    theta = np.zeros(spec.d)
    for ell in range(spec.r_conv):
        lo = ell * spec.s
        theta[lo : lo + spec.m] += w
    return theta


def expand_cw(w, a, spec: ModelSpec) -> np.ndarray:
    """Dense theta with forward_cw(x, w, a) == <x, theta>."""
    w = _check_vector(w, "w", spec.m)
    a = _check_vector(a, "a", spec.r_conv)
    theta = np.zeros(spec.d)
    for ell in range(spec.r_conv):
        lo = ell * spec.s
        theta[lo : lo + spec.m] += a[ell] * w
    return theta


def expand_rnn(A, B, spec: ModelSpec) -> np.ndarray:
    """Dense theta with forward_rnn(X, A, B) == <flatten(X), theta>.

    Block j (1-based, length d) equals ``1^T A^(L-j) B``.  Computed with L-1
    vector-matrix products; matrix powers are never formed.
    """
    A = _check_matrix(A, "A", (spec.r, spec.r))
    B = _check_matrix(B, "B", (spec.r, spec.d))
    blocks = [np.empty(0)] * spec.L
    v = np.ones(spec.r)
    blocks[spec.L - 1] = v @ B
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(spec.L - 1, 0, -1):
            v = v @ A
            if not np.all(np.isfinite(v)):
                raise OverflowError(
                    f"transition powers overflowed after {spec.L - j} steps "
                    "(spectral radius too large)"
                )
            blocks[j - 1] = v @ B
    return np.concatenate(blocks)


def expand_params(params: Params, spec: ModelSpec) -> np.ndarray:
    """Dense regressor for any parameter bundle."""
    if isinstance(params, CAParams):
        return expand_ca(params.w, spec)
    if isinstance(params, CWParams):
        return expand_cw(params.w, params.a, spec)
    if isinstance(params, RNNParams):
        return expand_rnn(params.A, params.B, spec)
    if isinstance(params, FNNParams):
        return _check_vector(params.theta, "theta", spec.D).copy()
    raise TypeError(f"unsupported params type {type(params).__name__}")


def forward_params(params: Params, x, spec: ModelSpec) -> float:
    """Evaluate any parameter bundle on one input."""
    if isinstance(params, CAParams):
        return forward_ca(x, params.w, spec)
    if isinstance(params, CWParams):
        return forward_cw(x, params.w, params.a, spec)
    if isinstance(params, RNNParams):
        return forward_rnn(x, params.A, params.B, spec)
    if isinstance(params, FNNParams):
        return forward_fnn(x, params.theta, spec)
    raise TypeError(f"unsupported params type {type(params).__name__}")
