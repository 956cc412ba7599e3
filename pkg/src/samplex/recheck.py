"""Fast self-check battery behind ``samplex recheck``.

Each check exercises one library invariant end to end on small shapes and
reports pass/fail; the battery runs in a few seconds and is meant as a
smoke test after installation or modification.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import datagen, estimators, lowerbounds, models, theory

_RANDOM_SPECS = (
    models.ModelSpec("ca", d=12, m=4, s=2),
    models.ModelSpec("cw", d=12, m=4, s=1),
    models.ModelSpec("rnn", d=5, r=3, L=4),
)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _check_forward_matches_expansion(seed: int) -> str:
    rng = datagen.rng_from(seed, 1)
    worst = 0.0
    for k in range(200):
        spec = _RANDOM_SPECS[k % len(_RANDOM_SPECS)]
        truth = datagen.sample_truth(spec, datagen.derive_seed(seed, 10, k))
        x = rng.standard_normal((spec.L, spec.d)) if spec.input_is_sequence \
            else rng.standard_normal(spec.d)
        direct = models.forward_params(truth, x, spec)
        via = float(models.flatten_input(x, spec) @ models.expand_params(truth, spec))
        worst = max(worst, abs(direct - via) / (1.0 + abs(via)))
    if worst > 1e-9:
        raise AssertionError(f"worst relative gap {worst:.2e} > 1e-9")
    return f"worst relative gap {worst:.2e}"


def _check_expansion_homogeneity(seed: int) -> str:
    rng = datagen.rng_from(seed, 2)
    spec = _RANDOM_SPECS[0]
    w = rng.standard_normal(spec.m)
    for c in (0.0, 0.5, 2.0, 10.0):
        if not np.allclose(models.expand_ca(c * w, spec),
                           c * models.expand_ca(w, spec), atol=1e-12):
            raise AssertionError(f"scaling by {c} broke homogeneity")
    return "scalings {0, 0.5, 2, 10} exact"


def _check_datagen_reproducible(seed: int) -> str:
    spec = _RANDOM_SPECS[1]
    truth = datagen.sample_truth(spec, seed)
    a = datagen.gen_dataset(spec, truth, 40, 1.0, seed)
    b = datagen.gen_dataset(spec, truth, 40, 1.0, seed)
    half = datagen.gen_dataset(spec, truth, 20, 1.0, seed)
    if not (np.array_equal(a.inputs, b.inputs) and np.array_equal(a.labels, b.labels)):
        raise AssertionError("identical args produced different datasets")
    if not np.array_equal(a.labels[:20], half.labels):
        raise AssertionError("row prefix depends on n")
    return "byte-identical rerun; prefix stable"


def _check_ols_basic_inequality(seed: int) -> str:
    spec = _RANDOM_SPECS[0]
    truth = datagen.sample_truth(spec, seed)
    ds = datagen.gen_dataset(spec, truth, 64, 1.0, datagen.derive_seed(seed, 3))
    res = estimators.fit_ca(ds)
    check = theory.check_basic_inequality(
        ds.features(), ds.noise, res.expanded_hat, models.expand_params(truth, spec)
    )
    if not check.holds:
        raise AssertionError(f"violated with slack {check.slack:.2e}")
    return f"slack {check.slack:.2e}"


def _check_free_segment_roundtrips(seed: int) -> str:
    rng = datagen.rng_from(seed, 4)
    ca = models.ModelSpec("ca", d=12, m=4, s=2)
    u = rng.standard_normal(4)
    theta = models.expand_ca(lowerbounds.free_segment_ca(u, ca), ca)
    assert np.allclose(theta[:4], u, atol=1e-12)
    cw = models.ModelSpec("cw", d=12, m=4, s=2)
    for which in ("I1", "I2"):
        idx = lowerbounds.cw_free_indices(cw, which)
        u = rng.standard_normal(idx.size)
        w, a = lowerbounds.free_segment_cw(u, which, cw)
        assert np.allclose(models.expand_cw(w, a, cw)[idx], u, atol=1e-12)
    rnn = models.ModelSpec("rnn", d=5, r=3, L=4)
    size = min(rnn.r, rnn.L) * rnn.d
    u = rng.standard_normal(size)
    A, B = lowerbounds.free_segment_rnn(u, rnn)
    got = models.expand_rnn(A, B, rnn)[-size:]
    assert np.allclose(got, u, atol=1e-8 * max(1.0, float(np.abs(u).max())))
    return "ca, cw(I1, I2), rnn all exact"


def _check_code_separation(seed: int) -> str:
    code = lowerbounds.constant_weight_code(64, seed, max_words=256)
    floor = 16
    if code.min_pairwise_hamming < floor:
        raise AssertionError(f"min distance {code.min_pairwise_hamming} < {floor}")
    return f"{code.n_words} words, min distance {code.min_pairwise_hamming}"


def _check_fano_halving(seed: int) -> str:
    spec = models.ModelSpec("cw", d=32, m=1, s=1)
    n, sigma = 512, 1.0
    b = []
    for nn in (n, 4 * n):
        eps = lowerbounds.matched_eps_scale(32, nn, sigma)
        packing = lowerbounds.build_packing(spec, "I2", eps, seed, max_words=256)
        b.append(lowerbounds.fano_lower_bound(packing, nn, sigma))
    ratio = b[0] / b[1]
    if abs(ratio - 2.0) > 1e-6:
        raise AssertionError(f"quadrupling n gave ratio {ratio}")
    return f"bound ratio {ratio:.9f}"


def _check_rate_scaling(seed: int) -> str:
    spec = models.ModelSpec("ca", d=64, m=8, s=1)
    a = theory.dudley_bound(spec, 256, 1.0)
    b = theory.dudley_bound(spec, 1024, 1.0)
    if abs(a / b - 2.0) > 1e-9:
        raise AssertionError(f"1/sqrt(n) scaling off: {a / b}")
    return f"n -> 4n halves the bound ({a / b:.9f})"


def _check_probe_eigs_ordered(seed: int) -> str:
    spec = models.ModelSpec("ca", d=16, m=4, s=2)
    rng = datagen.rng_from(seed, 5)
    Z = rng.standard_normal((200, 16))
    est = theory.restricted_eigs(Z, spec, rho=1.0, n_probe=50, seed=seed)
    if not 0.0 <= est.lambda_min_est <= est.lambda_max_est:
        raise AssertionError(f"unordered estimates {est}")
    return f"[{est.lambda_min_est:.3f}, {est.lambda_max_est:.3f}]"


_CHECKS: tuple[tuple[str, Callable[[int], str]], ...] = (
    ("forward-matches-expansion", _check_forward_matches_expansion),
    ("expansion-homogeneity", _check_expansion_homogeneity),
    ("datagen-reproducible", _check_datagen_reproducible),
    ("ols-basic-inequality", _check_ols_basic_inequality),
    ("free-segment-roundtrips", _check_free_segment_roundtrips),
    ("code-separation", _check_code_separation),
    ("fano-halving", _check_fano_halving),
    ("rate-scaling", _check_rate_scaling),
    ("probe-eigs-ordered", _check_probe_eigs_ordered),
)


def run_invariants(seed: int = 0) -> list[CheckResult]:
    results = []
    for name, fn in _CHECKS:
        try:
            detail = fn(seed)
            results.append(CheckResult(name=name, passed=True, detail=detail))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the battery
            results.append(CheckResult(name=name, passed=False, detail=str(exc)))
    return results
