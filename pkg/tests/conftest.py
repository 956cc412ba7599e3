import numpy as np
import pytest

import samplex as sx
from samplex import ModelSpec, SweepConfig

N_GRID = tuple(2**k for k in range(7, 14))


def random_valid_spec(rng: np.random.Generator, kind: str) -> ModelSpec:
    """Draw a random spec satisfying the divisibility constraints."""
    if kind in ("ca", "cw"):
        s = int(rng.choice([1, 2, 4]))
        m = s * int(rng.integers(1, 5))
        d = m + s * int(rng.integers(0, 13))
        # d divisible by s holds because both m and the padding are multiples
        return ModelSpec(kind, d=d, m=m, s=s)
    if kind == "rnn":
        return ModelSpec(
            "rnn",
            d=int(rng.integers(1, 9)),
            r=int(rng.integers(1, 5)),
            L=int(rng.integers(1, 9)),
        )
    return ModelSpec("fnn", d=int(rng.integers(1, 13)), L=int(rng.integers(1, 4)))


def random_input(rng: np.random.Generator, spec: ModelSpec) -> np.ndarray:
    if spec.input_is_sequence:
        return rng.standard_normal((spec.L, spec.d))
    return rng.standard_normal(spec.d)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


# Session-scoped sweep runs shared by the acceptance criteria and the
# experiment-property tests (each takes one to a few minutes).

@pytest.fixture(scope="session")
def fig2_m8():
    """Summed-pooling filter sweep at m=8 over the full n grid, 20 trials."""
    import time

    t0 = time.monotonic()
    config = SweepConfig(model="ca", d=[64], m=[8], s=[1], n=list(N_GRID),
                         trials=20, master_seed=sx.derive_seed(42, 0))
    result = sx.run_sweep(config)
    return result, time.monotonic() - t0


@pytest.fixture(scope="session")
def rnn_r8_n1024():
    """Recurrence sweep at d=L=50, r=8, n=1024, 20 trials, both estimators."""
    config = SweepConfig(model="rnn", d=[50], r=[8], L=[50], n=[1024],
                         trials=20, master_seed=sx.derive_seed(43, 0))
    return sx.run_sweep(config)


@pytest.fixture(scope="session")
def rnn_r2_r16_n1024():
    """Matched-estimator sweeps at r=2 and r=16 for the ordering check."""
    results = {}
    for idx, r in enumerate((2, 16)):
        config = SweepConfig(model="rnn", d=[50], r=[r], L=[50], n=[1024],
                             trials=20, master_seed=sx.derive_seed(43, 1 + idx),
                             estimators=("matched",))
        results[r] = sx.run_sweep(config)
    return results
