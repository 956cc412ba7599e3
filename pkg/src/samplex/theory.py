"""Numerical rate machinery: empirical norms, restricted eigenvalues,
metric-entropy bound formulas, and the entropy-integral rate predictor.

The bound calculators set every suppressed constant to one.  They are meant
for relative comparisons (slopes across n, ratios across shapes), never for
absolute calibration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .datagen import derive_seed, sample_truth
from .models import ModelSpec, expand_params

_DEGENERATE_PROBE = 1e-12
_BASIC_INEQ_SLACK = 1e-8


def empirical_norm(Z, phi) -> float:
    """Root mean square of the design inner products: sqrt(mean <z_i, phi>^2)."""
    Z = np.asarray(Z, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if Z.ndim != 2 or phi.shape != (Z.shape[1],):
        raise ValueError(f"incompatible shapes {Z.shape} and {phi.shape}")
    v = Z @ phi
    return float(np.sqrt(np.mean(v**2)))


@dataclass(frozen=True)
class REEstimate:
    """Probe-based restricted-eigenvalue estimates.

    ``lambda_min_est`` is an upper bound on the true restricted minimum (we
    only probe finitely many directions); ``lambda_max_est`` is a lower
    bound on the true restricted maximum.
    """

    lambda_min_est: float
    lambda_max_est: float
    n_probe: int
    seed: int


def restricted_eigs(Z, spec: ModelSpec, rho: float, n_probe: int, seed: int) -> REEstimate:
    """Extremes of ||phi||_X^2 over random unit-norm model-difference directions.

    Each probe is expand(p) - expand(p') for two independently drawn random
    parameter bundles, normalized to unit Euclidean norm.  ``rho`` is
    accepted for interface completeness; the estimates are scale-invariant
    because every probe is normalized.
    """
    del rho
    if n_probe < 1:
        raise ValueError("n_probe must be >= 1")
    Z = np.asarray(Z, dtype=float)
    lo, hi = np.inf, -np.inf
    used = 0
    for k in range(n_probe):
        p = sample_truth(spec, derive_seed(seed, k, 0))
        q = sample_truth(spec, derive_seed(seed, k, 1))
        phi = expand_params(p, spec) - expand_params(q, spec)
        norm = np.linalg.norm(phi)
        if norm < _DEGENERATE_PROBE:
            continue
        val = empirical_norm(Z, phi / norm) ** 2
        lo = min(lo, val)
        hi = max(hi, val)
        used += 1
    if used == 0:
        raise ValueError("all probe directions were degenerate (zero difference)")
    return REEstimate(lambda_min_est=float(lo), lambda_max_est=float(hi),
                      n_probe=n_probe, seed=seed)


def _entropy(spec: ModelSpec, eps: float, rho: float) -> float:
    """Metric-entropy formula for the model's difference class, unit constant,
    log clamped at zero.  Valid for any eps > 0."""
    if spec.kind == "ca":
        return spec.m * max(math.log(rho * spec.d / eps), 0.0)
    if spec.kind == "cw":
        count = min(spec.d, spec.m + (spec.d // spec.s) * (spec.m // spec.s))
        return count * max(math.log(rho * spec.d / eps), 0.0)
    if spec.kind == "rnn":
        count = (spec.d + spec.L) * min(spec.d, spec.r)
        return count * max(math.log(rho * spec.L * spec.d / eps), 0.0)
    raise ValueError(f"no entropy formula for kind {spec.kind!r}")


def covering_bound(spec: ModelSpec, eps: float, rho: float) -> float:
    """Log covering number bound of the difference class at scale ``eps``.

    ca: m log(rho d / eps); cw: min{d, m + (d/s)(m/s)} log(rho d / eps);
    rnn: (d + L) min{d, r} log(rho L d / eps).  Suppressed constants are 1
    and the log is clamped below at 0.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if rho <= 0.0:
        raise ValueError(f"rho must be > 0, got {rho}")
    return _entropy(spec, eps, rho)


def dudley_bound(spec: ModelSpec, n, sigma: float) -> float:
    """Entropy-integral rate prediction (sigma / sqrt(n)) * int_0^2 sqrt(entropy).

    The integrand vanishes beyond the diameter of the unit-normalized
    class, taken as 2; the integral is evaluated by adaptive quadrature to
    absolute tolerance 1e-6.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    integral, _ = quad(lambda e: math.sqrt(_entropy(spec, e, 1.0)), 0.0, 2.0,
                       epsabs=1e-6, limit=200)
    return float(sigma) / math.sqrt(n) * integral


def theory_rate(spec: ModelSpec, n, sigma: float) -> float:
    """Closed-form error-rate prediction with unit constant.

    ca: sqrt(sigma^2 m log(d) / n);
    cw: sqrt(sigma^2 min{d, m + (d/s)(m/s)} log(d) / n);
    rnn: sqrt(sigma^2 (d + L) min{r, d} log(L d) / n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.kind == "ca":
        count, logterm = spec.m, math.log(spec.d)
    elif spec.kind == "cw":
        count = min(spec.d, spec.m + (spec.d // spec.s) * (spec.m // spec.s))
        logterm = math.log(spec.d)
    elif spec.kind == "rnn":
        count = (spec.d + spec.L) * min(spec.r, spec.d)
        logterm = math.log(spec.L * spec.d)
    else:
        raise ValueError(f"no rate formula for kind {spec.kind!r}")
    return math.sqrt(sigma**2 * count * logterm / n)


class BasicInequalityCheck(NamedTuple):
    holds: bool
    slack: float


def check_basic_inequality(Z, y_noise, theta_hat, theta_star) -> BasicInequalityCheck:
    """Check the least-squares optimality identity on realized noise.

    Any minimizer of the squared loss satisfies
    ``||theta_hat - theta_star||_X^2 <= (2/n) sum_i xi_i <z_i, theta_hat - theta_star>``;
    the check allows 1e-8 of absolute slack and reports the signed margin
    (right side + slack - left side), so nonnegative means the inequality
    holds.
    """
    Z = np.asarray(Z, dtype=float)
    xi = np.asarray(y_noise, dtype=float)
    diff = np.asarray(theta_hat, dtype=float) - np.asarray(theta_star, dtype=float)
    if Z.ndim != 2 or diff.shape != (Z.shape[1],) or xi.shape != (Z.shape[0],):
        raise ValueError(
            f"incompatible shapes Z {Z.shape}, noise {xi.shape}, params {diff.shape}"
        )
    n = Z.shape[0]
    proj = Z @ diff
    lhs = float(proj @ proj) / n
    rhs = 2.0 / n * float(xi @ proj)
    slack = rhs + _BASIC_INEQ_SLACK - lhs
    return BasicInequalityCheck(holds=slack >= 0.0, slack=slack)
