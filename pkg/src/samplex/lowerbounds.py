"""Constructive minimax lower-bound machinery.

A packing is a finite adversarial family of dense regressors, all realizable
by the structured model class, pairwise well separated, with controlled KL
divergence between the label distributions they induce.  The pieces:

* a greedy Gilbert-Varshamov binary code supplies well-separated patterns;
* "free segment" constructions place any target values onto a designated
  index set of the dense expansion (first m coordinates for the filter
  models, a stride lattice for weighted pooling, the trailing min(r, L) * d
  coordinates for the recurrence via a Vandermonde solve);
* the Fano-method calculator turns the packing geometry into a minimax
  lower bound for Gaussian noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datagen import rng_from
from .models import (
    CAParams,
    CWParams,
    ModelSpec,
    Params,
    RNNParams,
    expand_params,
)

# Coefficient of the matched scale eps = c * sigma * sqrt(|I| / n).  Frozen
# from a one-time sweep over c in {2^-6, ..., 2^0} maximizing the Fano bound
# at |I| = 64, n = 1024, sigma = 1 (see tests).
FANO_EPS_COEFF = 0.03125

_GV_REJECTION_FACTOR = 200
_GV_MAX_WORDS = 4096


@dataclass(frozen=True)
class BinaryCode:
    """Binary code with guaranteed pairwise Hamming separation >= ceil(dim/4).

    ``words`` has shape (n_words, dim), dtype uint8, and always contains the
    all-zeros word first so packings can anchor at the zero pattern.
    """

    dim: int
    words: np.ndarray
    min_pairwise_hamming: int

    def __post_init__(self):
        self.words.setflags(write=False)

    @property
    def n_words(self) -> int:
        return self.words.shape[0]

    @property
    def log2_size(self) -> float:
        return math.log2(self.n_words)


def _pairwise_min_hamming(packed: np.ndarray) -> int:
    """Exact minimum pairwise Hamming distance of bit-packed words."""
    n = packed.shape[0]
    best = None
    chunk = 256
    for lo in range(0, n - 1, chunk):
        hi = min(lo + chunk, n - 1)
        block = packed[lo:hi]  # rows i in [lo, hi)
        for off, i in enumerate(range(lo, hi)):
            d = np.bitwise_count(packed[i + 1 :] ^ block[off]).sum(axis=1).min()
            best = int(d) if best is None else min(best, int(d))
    return best


def constant_weight_code(dim: int, seed: int, max_words: int = _GV_MAX_WORDS) -> BinaryCode:
    """Greedy Gilbert-Varshamov construction of a separated binary code.

    Uniform random candidates are accepted iff their Hamming distance to
    every previously accepted word (including the all-zeros seed word) is at
    least ceil(dim / 4).  Sampling stops after ``200 * dim`` consecutive
    rejections or ``max_words`` accepted words, whichever comes first.
    """
    if dim < 8:
        raise ValueError(f"code dimension must be >= 8, got {dim}")
    threshold = -(-dim // 4)
    rng = rng_from(seed)
    nbytes = (dim + 7) // 8
    packed = np.zeros((max_words, nbytes), dtype=np.uint8)
    words = np.zeros((max_words, dim), dtype=np.uint8)
    count = 1  # the zero word
    rejections = 0
    limit = _GV_REJECTION_FACTOR * dim
    while count < max_words and rejections < limit:
        cand = rng.integers(0, 2, size=dim, dtype=np.uint8)
        cp = np.packbits(cand)
        dmin = np.bitwise_count(packed[:count] ^ cp).sum(axis=1).min()
        if dmin >= threshold:
            packed[count] = cp
            words[count] = cand
            count += 1
            rejections = 0
        else:
            rejections += 1
    return BinaryCode(
        dim=dim,
        words=words[:count].copy(),
        # a single-word code has no pairs; report the vacuous maximum
        min_pairwise_hamming=_pairwise_min_hamming(packed[:count]) if count >= 2 else dim,
    )


def free_segment_ca(u, spec: ModelSpec) -> np.ndarray:
    """Filter whose dense expansion starts with ``u`` on its first m entries.

    Solved by forward substitution over the stride-size blocks: block j of
    the expansion is the sum of the filter blocks still overlapping it, and
    each new filter block is the target block minus the already-determined
    overlap.
    """
    if spec.kind != "ca":
        raise ValueError(f"expected a 'ca' spec, got {spec.kind!r}")
    u = np.asarray(u, dtype=float)
    if u.shape != (spec.m,):
        raise ValueError(f"u must have shape ({spec.m},), got {u.shape}")
    s, J, r_conv = spec.s, spec.m // spec.s, spec.r_conv
    ub = u.reshape(J, s)
    wb = np.zeros((J, s))
    for j in range(J):
        k0 = max(0, j - r_conv + 1)
        wb[j] = ub[j] - wb[k0:j].sum(axis=0)
    return wb.reshape(spec.m)


def cw_free_indices(spec: ModelSpec, which: str) -> np.ndarray:
    """Index set (0-based) targeted by each weighted-pooling construction."""
    if which == "I1":
        return np.arange(spec.m)
    if which == "I2":
        return np.arange(spec.r_conv) * spec.s
    raise ValueError(f"which must be 'I1' or 'I2', got {which!r}")


def free_segment_cw(u, which: str, spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Weighted-pooling parameters placing ``u`` on a designated index set.

    I1 pins the first m coordinates with a single active pooling position
    (a = e_1, w = u).  I2 pins the stride lattice {1, 1+s, ...} with a
    one-hot filter (w = e_1, a = u); the lattice has r_conv points, one per
    pooling position.
    """
    if spec.kind != "cw":
        raise ValueError(f"expected a 'cw' spec, got {spec.kind!r}")
    u = np.asarray(u, dtype=float)
    if which == "I1":
        if u.shape != (spec.m,):
            raise ValueError(f"u must have shape ({spec.m},) for I1, got {u.shape}")
        a = np.zeros(spec.r_conv)
        a[0] = 1.0
        return u.copy(), a
    if which == "I2":
        if u.shape != (spec.r_conv,):
            raise ValueError(f"u must have shape ({spec.r_conv},) for I2, got {u.shape}")
        w = np.zeros(spec.m)
        w[0] = 1.0
        return w, u.copy()
    raise ValueError(f"which must be 'I1' or 'I2', got {which!r}")


def free_segment_rnn(u, spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence parameters whose expansion ends with ``u``.

    With the fixed diagonal transition A = diag(1/r, ..., r/r), the last
    min(r, L) blocks of the expansion are ``sum_i a_i^k b_i`` for powers
    k = r'-1, ..., 0.  Equating them to the blocks of ``u`` gives one
    Vandermonde system per input coordinate, full row rank because the
    diagonal entries are distinct; the minimum-norm solution is taken when
    r' < r.
    """
    if spec.kind != "rnn":
        raise ValueError(f"expected an 'rnn' spec, got {spec.kind!r}")
    r, d = spec.r, spec.d
    r_free = min(r, spec.L)
    u = np.asarray(u, dtype=float)
    if u.shape != (r_free * d,):
        raise ValueError(f"u must have shape ({r_free * d},), got {u.shape}")
    roots = np.arange(1, r + 1) / r
    powers = r_free - 1 - np.arange(r_free)
    G = roots[None, :] ** powers[:, None]  # (r_free, r)
    if np.linalg.matrix_rank(G) != r_free:
        raise RuntimeError("Vandermonde system lost rank despite distinct roots")
    U = u.reshape(r_free, d)
    B = np.linalg.lstsq(G, U, rcond=None)[0]
    return np.diag(roots), B


@dataclass(frozen=True)
class PackingSet:
    """Finite adversarial parameter family with its separation statistics.

    ``thetas`` stacks the dense expansions, the zero-pattern member first.
    ``rho_min`` is half the smallest distance from the base member,
    ``rho_avg`` the root mean square of those distances, and ``M`` the
    number of non-base members.
    """

    spec: ModelSpec
    thetas: np.ndarray
    rho_min: float
    rho_avg: float
    eps_scale: float
    free_indices: np.ndarray | None = None

    def __post_init__(self):
        self.thetas.setflags(write=False)

    @property
    def M(self) -> int:
        return self.thetas.shape[0] - 1


def free_index_set(spec: ModelSpec, which_I: str | None = None) -> np.ndarray:
    """0-based free index set of the dense expansion for a model class."""
    if spec.kind == "ca":
        return np.arange(spec.m)
    if spec.kind == "cw":
        if which_I is None:
            raise ValueError("which_I ('I1' or 'I2') is required for the 'cw' class")
        return cw_free_indices(spec, which_I)
    if spec.kind == "rnn":
        size = min(spec.r, spec.L) * spec.d
        return np.arange(spec.D - size, spec.D)
    raise ValueError(f"no free-segment construction for kind {spec.kind!r}")


def _embed(spec: ModelSpec, which_I: str | None, u: np.ndarray) -> Params:
    if spec.kind == "ca":
        return CAParams(w=free_segment_ca(u, spec))
    if spec.kind == "cw":
        w, a = free_segment_cw(u, which_I, spec)
        return CWParams(w=w, a=a)
    w_A, w_B = free_segment_rnn(u, spec)
    return RNNParams(A=w_A, B=w_B)


def build_packing(spec: ModelSpec, which_I: str | None, eps_scale: float,
                  seed: int, max_words: int = _GV_MAX_WORDS) -> PackingSet:
    """Embed a separated binary code into the model class.

    Every code word, scaled by ``eps_scale``, is placed on the class's free
    index set and expanded to its dense regressor; the all-zeros word gives
    the base member.  Distances inherit the code's Hamming floor: members
    differ by at least eps_scale * sqrt(ceil(|I|/4)) on the free set alone.
    """
    if eps_scale <= 0:
        raise ValueError("eps_scale must be > 0")
    idx = free_index_set(spec, which_I)
    size = idx.shape[0]
    if size < 8:
        raise ValueError(f"free index set has {size} < 8 entries; no code fits")
    code = constant_weight_code(size, seed, max_words=max_words)
    thetas = np.empty((code.n_words, spec.D))
    for k in range(code.n_words):
        params = _embed(spec, which_I, eps_scale * code.words[k].astype(float))
        thetas[k] = expand_params(params, spec)
    dists = np.linalg.norm(thetas[1:] - thetas[0], axis=1)
    return PackingSet(
        spec=spec,
        thetas=thetas,
        rho_min=float(dists.min()) / 2.0,
        rho_avg=float(np.sqrt(np.mean(dists**2))),
        eps_scale=float(eps_scale),
        free_indices=idx,
    )


def matched_eps_scale(i_size: int, n: int, sigma: float, coeff: float = FANO_EPS_COEFF) -> float:
    """Packing scale matched to the noise level: coeff * sigma * sqrt(|I| / n)."""
    return coeff * sigma * math.sqrt(i_size / n)


def scale_packing(packing: PackingSet, factor: float) -> PackingSet:
    """Rescale a packing; every member and statistic is exactly linear in
    the pattern scale."""
    if factor <= 0:
        raise ValueError("factor must be > 0")
    return PackingSet(
        spec=packing.spec,
        thetas=packing.thetas * factor,
        rho_min=packing.rho_min * factor,
        rho_avg=packing.rho_avg * factor,
        eps_scale=packing.eps_scale * factor,
        free_indices=packing.free_indices,
    )


def build_calibrated_packing(spec: ModelSpec, which_I: str | None, n: int, sigma: float,
                             seed: int, gamma: float = 0.25,
                             max_words: int = _GV_MAX_WORDS) -> PackingSet:
    """Packing rescaled so the Fano information term equals ``gamma``.

    The recurrence embedding amplifies mass outside the free index set
    (its Vandermonde solve is ill conditioned and the largest transition
    root is 1), so a scale proportional to sqrt(|I| / n) can push the KL
    term past the clamp.  Calibrating n * rho_avg^2 / (sigma^2 log M) to a
    fixed gamma < 1 keeps the bound positive for every class and preserves
    the exact-halving behavior in n.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    unit = build_packing(spec, which_I, 1.0, seed, max_words=max_words)
    eps = sigma * math.sqrt(gamma * math.log(unit.M) / n) / unit.rho_avg
    return scale_packing(unit, eps)


def kl_gaussian_pair(theta_j, theta_0, n: int, sigma: float) -> float:
    """KL divergence between the n-sample Gaussian-design label laws of two
    regressors: n ||theta_j - theta_0||^2 / (2 sigma^2)."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    diff = np.asarray(theta_j, dtype=float) - np.asarray(theta_0, dtype=float)
    return float(n * (diff @ diff) / (2.0 * sigma**2))


def fano_lower_bound(packing: PackingSet, n: int, sigma: float) -> float:
    """Fano-method minimax lower bound for the packing under Gaussian noise.

    rho_min * (sqrt(M) / (1 + sqrt(M)))
            * (1 - n rho_avg^2 / (sigma^2 log M)
                 - 2 sqrt(n rho_avg^2 / (2 sigma^2 log^2 M)))
    clamped at zero when the information term overwhelms the separation.
    """
    M = packing.M
    if M < 2:
        raise ValueError(f"packing must have M >= 2 non-base members, got {M}")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    log_m = math.log(M)
    info = n * packing.rho_avg**2 / sigma**2
    factor = 1.0 - info / log_m - 2.0 * math.sqrt(info / (2.0 * log_m**2))
    return packing.rho_min * (math.sqrt(M) / (1.0 + math.sqrt(M))) * max(factor, 0.0)
