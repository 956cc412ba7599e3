"""Qualitative properties of the preset experiment grids.

These mirror the headline comparisons: error curves fall with n, the
structured estimators beat or match the dense baseline in the regimes where
their parameter count is smaller or comparable, and recurrence error grows
with the hidden size.  They run real sweeps and take a few minutes total.
"""

import dataclasses

import numpy as np

import samplex as sx
from samplex import SweepConfig

from conftest import N_GRID


def _inversions(values):
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


class TestErrorFallsWithSampleSize:
    def test_fig2_and_fig3_median_curves(self):
        # full filter-model presets, matched estimator only
        curves = []
        for fig_id in ("fig2", "fig3"):
            for config in sx.figure_configs(fig_id, master_seed=101):
                config = dataclasses.replace(config, estimators=("matched",))
                result = sx.run_sweep(config)
                for m in config.m:
                    medians = [result.median_error(estimator="ca", m=m, n=n)
                               for n in N_GRID]
                    curves.append((f"{fig_id} m={m}", medians))
        for label, medians in curves:
            assert _inversions(medians) <= 1, f"{label}: {medians}"


class TestWeightedPoolingVersusDense:
    def test_stride_one_matches_dense_baseline(self):
        # m + d/s parameters comparable to d: the two estimators track each
        # other; medians within 20% at every sampled n
        config = SweepConfig(model="cw", d=[64], m=[8], s=[1],
                             n=[128, 512, 2048, 8192], trials=10,
                             master_seed=sx.derive_seed(44, 0))
        result = sx.run_sweep(config)
        for n in config.n:
            cw = result.median_error(estimator="cw", n=n)
            fnn = result.median_error(estimator="fnn", n=n)
            assert max(cw, fnn) / min(cw, fnn) <= 1.2, (n, cw, fnn)

    def test_larger_strides_beat_dense_baseline(self):
        config = SweepConfig(model="cw", d=[64], m=[8], s=[4, 8], n=[1024],
                             trials=10, master_seed=sx.derive_seed(44, 1))
        result = sx.run_sweep(config)
        for s in (4, 8):
            cw = result.median_error(estimator="cw", s=s)
            fnn = result.median_error(estimator="fnn", s=s)
            assert cw < fnn


class TestRecurrenceErrorGrowsWithHiddenSize:
    def test_median_ordering_at_fixed_n(self, rnn_r8_n1024, rnn_r2_r16_n1024):
        med = {
            2: rnn_r2_r16_n1024[2].median_error(estimator="rnn"),
            8: rnn_r8_n1024.median_error(estimator="rnn"),
            16: rnn_r2_r16_n1024[16].median_error(estimator="rnn"),
        }
        assert med[2] < med[8] < med[16], med

    def test_pairwise_trial_ordering_mostly_holds(self, rnn_r8_n1024, rnn_r2_r16_n1024):
        # trials are independent across hidden sizes, so triple-wise ordering
        # by trial index is a strictly harder event than the median ordering;
        # measured 12/20 with these seeds
        errs = {
            2: [r.pred_err for r in rnn_r2_r16_n1024[2].filtered(estimator="rnn")],
            8: [r.pred_err for r in rnn_r8_n1024.filtered(estimator="rnn")],
            16: [r.pred_err for r in rnn_r2_r16_n1024[16].filtered(estimator="rnn")],
        }
        ordered = sum(
            1 for e2, e8, e16 in zip(errs[2], errs[8], errs[16]) if e2 < e8 < e16
        )
        assert ordered >= 10
