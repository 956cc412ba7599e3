"""Sweep harness: grids, determinism, scaling fits, figure presets."""

import json
import math

import numpy as np
import pytest

import samplex as sx
from samplex import SweepConfig, SweepResult, SweepRow


def _tiny_config(**overrides):
    base = dict(
        model="ca", d=[8], m=[2], s=[1], n=[16, 32], trials=2, master_seed=7,
        sigma=1.0,
    )
    base.update(overrides)
    return SweepConfig(**base)


class TestSweepConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            SweepConfig.from_dict({"model": "ca", "d": [8], "m": [2], "bogus": 1})

    def test_unknown_fit_keys_rejected(self):
        with pytest.raises(ValueError, match="fit option keys"):
            _tiny_config(fit={"seed": 3})

    def test_estimator_names_normalized(self):
        cfg = _tiny_config(estimators=("model-matched", "FNN"))
        assert cfg.estimators == ("matched", "fnn")
        with pytest.raises(ValueError):
            _tiny_config(estimators=("ridge",))

    def test_invalid_shape_combination_rejected(self):
        with pytest.raises(ValueError):
            SweepConfig(model="ca", d=[8], m=[3], s=[2], n=[16])

    def test_grid_is_shapes_times_n(self):
        cfg = SweepConfig(model="ca", d=[8, 16], m=[2], s=[1], n=[16, 32, 64], trials=1)
        assert len(cfg.grid()) == 6

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "model": "ca", "d": [8], "m": [2], "s": [1], "n": [16],
            "trials": 1, "master_seed": 3, "estimators": ["matched"],
        }))
        cfg = SweepConfig.from_json(path)
        assert cfg.model == "ca" and cfg.n == (16,)


class TestRunSweep:
    def test_row_count_and_layout(self):
        res = sx.run_sweep(_tiny_config())
        assert len(res.rows) == 2 * 2 * 2  # grid x trials x estimators
        row = res.rows[0]
        assert row.model == "ca" and row.estimator in ("ca", "fnn")
        assert row.pred_err >= 0.0 and row.wall_ms == 0.0

    def test_noiseless_interpolation_both_estimators(self):
        cfg = SweepConfig(model="ca", d=[8], m=[2], s=[1], n=[32], trials=1,
                          sigma=0.0, master_seed=5)
        res = sx.run_sweep(cfg)
        for row in res.rows:
            assert row.pred_err <= 1e-6

    def test_identical_config_identical_csv_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        sx.run_sweep(_tiny_config(output=str(p1)))
        sx.run_sweep(_tiny_config(output=str(p2)))
        assert p1.read_bytes() == p2.read_bytes()

    def test_rows_reproducible_in_isolation(self):
        cfg = _tiny_config()
        res = sx.run_sweep(cfg)
        row = res.rows[1]  # fnn row of the first grid point / trial
        truth = sx.sample_truth(
            sx.ModelSpec("ca", d=8, m=2, s=1), sx.derive_seed(row.seed, 0))
        data = sx.gen_dataset(
            sx.ModelSpec("ca", d=8, m=2, s=1), truth, row.n, 1.0, sx.derive_seed(row.seed, 1))
        from samplex.estimators import fit_fnn

        again = fit_fnn(data)
        err = sx.prediction_error(
            again.expanded_hat, sx.expand_params(truth, sx.ModelSpec("ca", d=8, m=2, s=1)))
        assert err == row.pred_err

    def test_csv_format(self, tmp_path):
        path = tmp_path / "out.csv"
        sx.run_sweep(_tiny_config(output=str(path)))
        lines = path.read_text().splitlines()
        assert lines[0] == ("model,d,m,s,r,L,n,trial,seed,estimator,"
                            "pred_err,train_loss,converged,wall_ms")
        cells = lines[1].split(",")
        assert cells[0] == "ca" and cells[9] in ("ca", "fnn")
        assert cells[12] in ("true", "false")
        float(cells[10])  # parses


class TestScalingExponent:
    @staticmethod
    def _rows(errors_by_axis, axis="n"):
        rows = []
        for v, err in errors_by_axis.items():
            kw = dict(model="ca", d=64, m=8, s=1, r=0, L=1, n=1024, trial=0, seed=0,
                      estimator="ca", pred_err=err, train_loss=0.0, converged=True)
            kw[axis] = v
            rows.append(SweepRow(**kw))
        return SweepResult(rows=tuple(rows))

    def test_exact_inverse_sqrt_law(self):
        res = self._rows({n: 3.0 * n**-0.5 for n in (128, 256, 512, 1024)})
        fit = sx.fit_scaling_exponent(res, "n")
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.stderr == pytest.approx(0.0, abs=1e-12)

    def test_exact_sqrt_law_in_filter_size(self):
        res = self._rows({m: 0.7 * m**0.5 for m in (2, 4, 8, 16)}, axis="m")
        fit = sx.fit_scaling_exponent(res, "m")
        assert fit.slope == pytest.approx(0.5, abs=1e-12)

    def test_needs_three_axis_values(self):
        res = self._rows({128: 1.0, 256: 0.5})
        with pytest.raises(ValueError):
            sx.fit_scaling_exponent(res, "n")

    def test_filters_select_rows(self):
        rows = list(self._rows({n: n**-0.5 for n in (128, 256, 512)}).rows)
        rows += [SweepRow(model="ca", d=64, m=8, s=1, r=0, L=1, n=n, trial=0, seed=0,
                          estimator="fnn", pred_err=1.0, train_loss=0.0, converged=True)
                 for n in (128, 256, 512)]
        res = SweepResult(rows=tuple(rows))
        fit = sx.fit_scaling_exponent(res, "n", estimator="ca")
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        flat = sx.fit_scaling_exponent(res, "n", estimator="fnn")
        assert flat.slope == pytest.approx(0.0, abs=1e-12)


class TestFigurePresets:
    def test_preset_grids(self):
        for fig_id, n_specs in (("fig2", 3), ("fig3", 3), ("fig4", 3), ("fig5", 3)):
            configs = sx.figure_configs(fig_id, master_seed=1)
            specs = [spec for cfg in configs for spec in cfg.specs()]
            assert len(specs) == n_specs
            for cfg in configs:
                assert cfg.n == tuple(2**k for k in range(7, 14))

    def test_fig3_strides_match_filter_sizes(self):
        configs = sx.figure_configs("fig3", master_seed=1)
        shapes = sorted((s.m, s.s) for cfg in configs for s in cfg.specs())
        assert shapes == [(2, 2), (8, 8), (16, 16)]

    def test_unknown_figure_rejected(self):
        with pytest.raises(ValueError):
            sx.figure_configs("fig9", master_seed=1)

    def test_fig2_curve_structure(self, tmp_path):
        result = sx.reproduce_figure("fig2", master_seed=11, out_dir=str(tmp_path), trials=1)
        curves = sx.figure_curves(result, "fig2")
        labels = [c.label for c in curves]
        assert labels == ["ca m=2", "ca m=8", "ca m=16", "fnn"]
        for curve in curves:
            assert len(curve.n) == 7
        assert (tmp_path / "fig2.csv").exists()
        svg = (tmp_path / "fig2.svg").read_text()
        assert svg.lstrip().startswith("<?xml")
