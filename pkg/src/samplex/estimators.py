"""Least-squares fitting for all four parameterizations, plus prediction error.

The filter-with-summed-pooling model is linear in its filter, so it is fit
by exact least squares on aggregated features.  The weighted-pooling model
is bilinear and is fit by alternating exact least squares (each block solve
is a linear problem).  The recurrent model is fit by a full-batch
first-order method with reverse-accumulated gradients: Adam by default,
with plain Armijo-backtracked gradient descent selectable for reference.
The dense baseline is plain least squares on the (flattened) inputs.

Fits never compare raw parameters across runs; all quality metrics go
through the dense expansion, which is identifiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .datagen import Dataset, rng_from, sample_truth_rng
from .models import (
    CAParams,
    CWParams,
    FNNParams,
    ModelSpec,
    Params,
    RNNParams,
    expand_params,
)

ARMIJO_FACTOR = 1e-4
_MAX_HALVINGS = 60


@dataclass(frozen=True)
class FitOptions:
    """Iteration budget for the iterative fitters.

    ``tol`` is a relative-loss-decrease threshold: a restart stops once the
    loss improves by less than ``tol`` times its previous value (for the
    recurrent fitter, measured over a short window because adaptive steps
    are not monotone).  ``method`` selects the recurrent optimizer:
    ``"adam"`` (full-batch, per-parameter adaptive steps; default) or
    ``"gd"`` (plain gradient descent with Armijo backtracking, halving the
    step from 1.0).  Plain descent is kept as a reference; its single global
    step size makes it orders of magnitude slower on long recurrences.
    """

    max_iters: int = 10_000
    tol: float = 1e-10
    restarts: int = 5
    seed: int = 0
    method: str = "adam"
    learning_rate: float = 0.02

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.method not in ("adam", "gd"):
            raise ValueError(f"method must be 'adam' or 'gd', got {self.method!r}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass(frozen=True)
class FitResult:
    params_hat: Params
    expanded_hat: np.ndarray
    train_loss: float
    iterations: int
    converged: bool
    message: str = ""
    loss_history: np.ndarray | None = None


def ols(Z, y) -> np.ndarray:
    """Least-squares minimizer of ``sum_i (y_i - <z_i, theta>)^2``.

    Rank-deficient designs return the minimum-l2-norm minimizer (singular
    values below 1e-10 of the largest are treated as zero).
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    if Z.ndim != 2 or y.ndim != 1 or Z.shape[0] != y.shape[0]:
        raise ValueError(f"incompatible shapes {Z.shape} and {y.shape}")
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("design and labels must be finite")
    theta, *_ = np.linalg.lstsq(Z, y, rcond=1e-10)
    return theta


def _mean_sq(residual: np.ndarray) -> float:
    return float(np.mean(residual**2))


def _ca_windows(X: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """All filter positions of every row: view of shape (n, r_conv, m)."""
    return sliding_window_view(X, spec.m, axis=1)[:, :: spec.s, :]


def ca_features(X: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """Position-summed windows phi(x) = sum_l segment(x, l), shape (n, m)."""
    return _ca_windows(X, spec).sum(axis=1)


def fit_ca(dataset: Dataset, options: FitOptions | None = None) -> FitResult:
    """Exact least squares for the summed-pooling filter (linear in ``w``)."""
    if dataset.spec.kind != "ca":
        raise ValueError(f"fit_ca requires a 'ca' dataset, got {dataset.spec.kind!r}")
    if dataset.n == 0:
        raise ValueError("dataset is empty")
    spec = dataset.spec
    Phi = ca_features(dataset.inputs, spec)
    w = ols(Phi, dataset.labels)
    params = CAParams(w=w)
    return FitResult(
        params_hat=params,
        expanded_hat=expand_params(params, spec),
        train_loss=_mean_sq(Phi @ w - dataset.labels),
        iterations=1,
        converged=True,
    )


def fit_fnn(dataset: Dataset) -> FitResult:
    """Plain least squares on the dense (flattened) features."""
    Z = dataset.features()
    theta = ols(Z, dataset.labels)
    params = FNNParams(theta=theta)
    return FitResult(
        params_hat=params,
        expanded_hat=theta.copy(),
        train_loss=_mean_sq(Z @ theta - dataset.labels),
        iterations=1,
        converged=True,
    )


def cw_loss_and_grad(w, a, X, y, spec: ModelSpec):
    """Mean-squared loss of the weighted-pooling model and its gradient.

    Returns (loss, grad_w, grad_a); gradients are reverse-accumulated in
    closed form through the bilinear prediction.
    """
    W = _ca_windows(np.asarray(X, dtype=float), spec)
    w = np.asarray(w, dtype=float)
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    pred = np.einsum("nlm,m,l->n", W, w, a, optimize=True)
    res = pred - y
    loss = float(res @ res) / n
    gw = (2.0 / n) * np.einsum("n,nlm,l->m", res, W, a, optimize=True)
    ga = (2.0 / n) * np.einsum("n,nlm,m->l", res, W, w, optimize=True)
    return loss, gw, ga


def _project_dense_to_cw(theta: np.ndarray, spec: ModelSpec,
                         iters: int = 4000, tol: float = 1e-14):
    """Nearest weighted-pooling expansion to a dense regressor, by cheap
    d-dimensional alternating least squares.  Used to warm start fits."""
    d, m, s, r_conv = spec.d, spec.m, spec.s, spec.r_conv
    a = np.ones(r_conv)
    w = np.zeros(m)
    prev = None
    for _ in range(iters):
        D_w = np.zeros((d, m))
        for ell in range(r_conv):
            D_w[ell * s : ell * s + m] += a[ell] * np.eye(m)
        w = np.linalg.lstsq(D_w, theta, rcond=1e-10)[0]
        D_a = np.zeros((d, r_conv))
        for ell in range(r_conv):
            D_a[ell * s : ell * s + m, ell] = w
        a = np.linalg.lstsq(D_a, theta, rcond=1e-10)[0]
        gap = float(np.sum((D_a @ a - theta) ** 2))
        if prev is not None and prev - gap <= tol * prev:
            break
        prev = gap
    return w, a


def fit_cw(dataset: Dataset, options: FitOptions | None = None) -> FitResult:
    """Alternating exact least squares for the bilinear weighted-pooling model.

    Each sweep solves the pooling weights with the filter fixed, then the
    filter with the pooling weights fixed; both are exact linear solves, so
    the loss never increases.  The best restart wins: the first starts from
    the dense least-squares solution projected onto the expansion manifold
    (random starts crawl for thousands of sweeps when m + d/s >= d and the
    manifold is effectively dense), the rest start from standard normal
    (w, a).
    """
    if dataset.spec.kind != "cw":
        raise ValueError(f"fit_cw requires a 'cw' dataset, got {dataset.spec.kind!r}")
    opts = options or FitOptions()
    spec = dataset.spec
    W = _ca_windows(dataset.inputs, spec)
    y = dataset.labels
    n = dataset.n

    best = None
    for restart in range(opts.restarts):
        if restart == 0:
            w, a = _project_dense_to_cw(ols(dataset.features(), y), spec)
        else:
            rng = rng_from(opts.seed, restart)
            w = rng.standard_normal(spec.m)
            a = rng.standard_normal(spec.r_conv)
        history = []
        prev = None
        converged = False
        iters = 0
        for iters in range(1, opts.max_iters + 1):
            U = W @ w                      # (n, r_conv): response at each position
            a = np.linalg.lstsq(U, y, rcond=1e-10)[0]
            history.append(_mean_sq(U @ a - y))
            V = np.einsum("l,nlm->nm", a, W, optimize=True)
            w = np.linalg.lstsq(V, y, rcond=1e-10)[0]
            loss = _mean_sq(V @ w - y)
            history.append(loss)
            if prev is not None and prev - loss <= opts.tol * prev:
                converged = True
                break
            prev = loss
        loss = history[-1]
        if best is None or loss < best[0]:
            best = (loss, w, a, iters, converged, np.array(history))

    loss, w, a, iters, converged, history = best
    params = CWParams(w=w, a=a)
    return FitResult(
        params_hat=params,
        expanded_hat=expand_params(params, spec),
        train_loss=loss,
        iterations=iters,
        converged=converged,
        loss_history=history,
    )


def _rnn_forward_states(A, B, X):
    """States after each step for every row: list of (n, r), index t = 0..L."""
    n, L, _ = X.shape
    r = A.shape[0]
    H = [np.zeros((n, r))]
    for t in range(L):
        H.append(H[t] @ A.T + X[:, t, :] @ B.T)
    return H


def _rnn_predict(A, B, X) -> np.ndarray:
    n, L, _ = X.shape
    h = np.zeros((n, A.shape[0]))
    for t in range(L):
        h = h @ A.T + X[:, t, :] @ B.T
    return h.sum(axis=1)


def rnn_loss_and_grad(A, B, X, y):
    """Mean-squared loss of the linear recurrence and its gradient.

    Gradients are accumulated in reverse through the state recursion: with
    ``lam_t = (A^T)^(L-t) 1`` the adjoint of the step-t state,
    ``dL/dA = sum_t lam_t (g^T H_{t-1})`` and ``dL/dB = sum_t lam_t (g^T X_t)``
    where ``g`` holds the scaled residuals.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, L, _ = X.shape
    H = _rnn_forward_states(A, B, X)
    res = H[L].sum(axis=1) - y
    loss = float(res @ res) / n
    g = (2.0 / n) * res
    lam = np.ones(A.shape[0])
    GA = np.zeros_like(A)
    GB = np.zeros_like(B)
    for t in range(L, 0, -1):
        GB += np.outer(lam, g @ X[:, t - 1, :])
        if t > 1:
            GA += np.outer(lam, g @ H[t - 1])
        lam = A.T @ lam
    return loss, GA, GB


def _rnn_descend_gd(A, B, X, y, opts: FitOptions):
    """Plain gradient descent with Armijo backtracking (step halved from 1.0)."""
    loss, GA, GB = rnn_loss_and_grad(A, B, X, y)
    converged, message, iters = False, "", 0
    for iters in range(1, opts.max_iters + 1):
        if not np.isfinite(loss):
            return A, B, loss, iters, False, "loss diverged (non-finite)"
        gnorm2 = float(np.sum(GA**2) + np.sum(GB**2))
        if gnorm2 == 0.0:
            converged = True
            break
        step = 1.0
        accepted = False
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(_MAX_HALVINGS):
                cand_A = A - step * GA
                cand_B = B - step * GB
                res = _rnn_predict(cand_A, cand_B, X) - y
                new_loss = float(res @ res) / len(y)
                if np.isfinite(new_loss) and new_loss <= loss - ARMIJO_FACTOR * step * gnorm2:
                    accepted = True
                    break
                step *= 0.5
        if not accepted:
            # No acceptable step: numerically stationary.
            converged = True
            break
        A, B = cand_A, cand_B
        prev = loss
        loss, GA, GB = rnn_loss_and_grad(A, B, X, y)
        if prev - loss <= opts.tol * prev:
            converged = True
            break
    return A, B, loss, iters, converged, message


_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8
_ADAM_WINDOW = 25


def _rnn_descend_adam(A, B, X, y, opts: FitOptions):
    """Full-batch Adam on (A, B); stops when a 25-iteration window improves
    the loss by less than ``tol`` relative."""
    loss, GA, GB = rnn_loss_and_grad(A, B, X, y)
    mA, vA = np.zeros_like(A), np.zeros_like(A)
    mB, vB = np.zeros_like(B), np.zeros_like(B)
    window_loss = loss
    converged, message, iters = False, "", 0
    for iters in range(1, opts.max_iters + 1):
        if not np.isfinite(loss):
            return A, B, loss, iters, False, "loss diverged (non-finite)"
        mA = _ADAM_BETA1 * mA + (1 - _ADAM_BETA1) * GA
        vA = _ADAM_BETA2 * vA + (1 - _ADAM_BETA2) * GA**2
        mB = _ADAM_BETA1 * mB + (1 - _ADAM_BETA1) * GB
        vB = _ADAM_BETA2 * vB + (1 - _ADAM_BETA2) * GB**2
        c1 = 1.0 - _ADAM_BETA1**iters
        c2 = 1.0 - _ADAM_BETA2**iters
        A = A - opts.learning_rate * (mA / c1) / (np.sqrt(vA / c2) + _ADAM_EPS)
        B = B - opts.learning_rate * (mB / c1) / (np.sqrt(vB / c2) + _ADAM_EPS)
        loss, GA, GB = rnn_loss_and_grad(A, B, X, y)
        if iters % _ADAM_WINDOW == 0:
            if window_loss - loss <= opts.tol * window_loss:
                converged = True
                break
            window_loss = loss
    return A, B, loss, iters, converged, message


def fit_rnn(dataset: Dataset, options: FitOptions | None = None) -> FitResult:
    """First-order least-squares fit of the recurrence parameters (A, B).

    Gradients are reverse-accumulated through the state recursion.  The
    default optimizer is full-batch Adam: the loss surface couples the two
    matrices with step-size requirements differing by several orders of
    magnitude, which stalls any single-step-size descent; per-parameter
    adaptive steps reach the attainable error in a few hundred iterations.
    ``options.method = "gd"`` selects plain backtracking gradient descent
    instead.  Each restart initializes (A, B) from the same distribution
    used to draw ground truths; the best restart by final loss wins.
    """
    if dataset.spec.kind != "rnn":
        raise ValueError(f"fit_rnn requires an 'rnn' dataset, got {dataset.spec.kind!r}")
    opts = options or FitOptions()
    spec = dataset.spec
    X = dataset.inputs
    y = dataset.labels
    descend = _rnn_descend_adam if opts.method == "adam" else _rnn_descend_gd

    best = None
    for restart in range(opts.restarts):
        rng = rng_from(opts.seed, restart)
        init = sample_truth_rng(spec, rng)
        A, B, loss, iters, converged, message = descend(
            init.A.copy(), init.B.copy(), X, y, opts
        )
        key = loss if np.isfinite(loss) else np.inf
        if best is None or key < best[0]:
            best = (key, A, B, loss, iters, converged, message)

    _, A, B, loss, iters, converged, message = best
    params = RNNParams(A=A, B=B)
    return FitResult(
        params_hat=params,
        expanded_hat=expand_params(params, spec),
        train_loss=float(loss),
        iterations=iters,
        converged=converged,
        message=message,
    )


def fit(dataset: Dataset, options: FitOptions | None = None) -> FitResult:
    """Dispatch to the model-matched fitter for the dataset's kind."""
    kind = dataset.spec.kind
    if kind == "ca":
        return fit_ca(dataset, options)
    if kind == "cw":
        return fit_cw(dataset, options)
    if kind == "rnn":
        return fit_rnn(dataset, options)
    return fit_fnn(dataset)


def prediction_error(theta_hat, theta_star) -> float:
    """Root-mean-square prediction error under isotropic Gaussian inputs.

    With E[z z^T] = I the population error sqrt(E <z, diff>^2) is exactly
    the Euclidean distance of the dense expansions.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_hat.shape != theta_star.shape:
        raise ValueError(f"shape mismatch {theta_hat.shape} vs {theta_star.shape}")
    return float(np.linalg.norm(theta_hat - theta_star))


def batch_forward(params: Params, X: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """Evaluate a parameter bundle on a batch of inputs (direct recursion,
    not via the dense expansion)."""
    X = np.asarray(X, dtype=float)
    if isinstance(params, CAParams):
        return _ca_windows(X, spec) @ params.w @ np.ones(spec.r_conv)
    if isinstance(params, CWParams):
        return _ca_windows(X, spec) @ params.w @ params.a
    if isinstance(params, RNNParams):
        return _rnn_predict(params.A, params.B, X)
    if isinstance(params, FNNParams):
        return X.reshape(X.shape[0], -1) @ params.theta
    raise TypeError(f"unsupported params type {type(params).__name__}")


def mc_prediction_error(spec: ModelSpec, truth: Params, params_hat: Params,
                        n_mc: int, seed: int) -> float:
    """Monte Carlo estimate of the prediction error on fresh Gaussian inputs."""
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    rng = rng_from(seed)
    if spec.input_is_sequence:
        X = rng.standard_normal((n_mc, spec.L, spec.d))
    else:
        X = rng.standard_normal((n_mc, spec.d))
    diff = batch_forward(truth, X, spec) - batch_forward(params_hat, X, spec)
    return float(np.sqrt(np.mean(diff**2)))
