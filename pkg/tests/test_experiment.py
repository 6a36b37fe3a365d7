"""Experiment orchestration: cells, reports, manifests, sweeps, determinism."""
import json

import pytest

import peaksched as ps
from peaksched.harness.experiment import (
    ExperimentConfig,
    config_from_sources,
    parse_config_text,
    run_experiment,
    run_sweep,
)
from peaksched.harness.traces import synth_trace, write_trace_csv


def small_config(**overrides) -> ExperimentConfig:
    base = dict(
        days=4,
        seed=17,
        algorithms="bed,lambda-bed",
        lambdas="0.3,1.0",
        predictors="perfect",
        out_dir="unused",
    )
    base.update(overrides)
    return config_from_sources(overrides=base)


class TestConfig:
    def test_file_parse_and_override(self):
        text = "days = 7\nlambdas = 0.2, 0.4  # trust grid\npeak-multiplier = 50\n"
        file_values = parse_config_text(text)
        config = config_from_sources(file_values, {"days": 9})
        assert config.days == 9
        assert config.lambdas == (0.2, 0.4)
        assert config.peak_multiplier == 50.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ps.ValidationError, match="unknown config"):
            config_from_sources({"dayz": "3"})

    def test_lambda_range_enforced(self):
        with pytest.raises(ps.ValidationError):
            small_config(lambdas="1.5").validate()

    def test_seed_required_for_randomized(self):
        config = small_config(algorithms="red", seed=None)
        with pytest.raises(ps.ValidationError, match="seed"):
            config.validate()

    def test_scalar_predictor_needs_value(self):
        config = small_config(predictors="scalar")
        with pytest.raises(ps.ValidationError, match="sigma-hat"):
            config.validate()


class TestRunExperiment:
    def test_rows_and_columns(self, tmp_path):
        result = run_experiment(small_config(out_dir=str(tmp_path)))
        assert len(result.rows) == 3  # bed + two lambda values
        header = result.report_path.read_text().splitlines()[0]
        assert header == (
            "algorithm,lambda,predictor,sigma,sigma_hat,beta,total_cost,"
            "opt_cost,empirical_cr,cost_reduction"
        )

    def test_ratios_dominate_oracle(self, tmp_path):
        result = run_experiment(small_config(out_dir=str(tmp_path), predictors="perfect,adversarial"))
        for row in result.rows:
            assert row["empirical_cr"] >= 1 - 1e-9

    def test_full_trust_row_equals_plain_rule(self):
        result = run_experiment(small_config(), write=False)
        bed = next(r for r in result.rows if r["algorithm"] == "bed")
        assisted = next(
            r for r in result.rows if r["algorithm"] == "lambda-bed" and r["lambda"] == 1.0
        )
        assert assisted["total_cost"] == bed["total_cost"]

    def test_manifest_records_instance_stats(self):
        result = run_experiment(small_config(), write=False)
        manifest = result.manifest
        assert {"sigma", "beta"} <= manifest["instance"].keys()
        assert "perfect" in manifest["predictor_sigma_hat"]
        assert manifest["oracle"]["total"] > 0
        assert manifest["errors"] == {}

    def test_byte_identical_reruns(self, tmp_path):
        config_a = small_config(out_dir=str(tmp_path / "a"), predictors="perfect,gaussian")
        config_b = small_config(out_dir=str(tmp_path / "b"), predictors="perfect,gaussian")
        ra = run_experiment(config_a)
        rb = run_experiment(config_b)
        assert ra.report_path.read_bytes() == rb.report_path.read_bytes()
        ma = json.loads(ra.manifest_path.read_text())
        mb = json.loads(rb.manifest_path.read_text())
        ma["config"]["out_dir"] = mb["config"]["out_dir"] = ""
        assert ma == mb

    def test_ramp_configuration_uses_ramp_oracle(self):
        result = run_experiment(small_config(ramp_ratio=0.4), write=False)
        assert result.manifest["params"]["ramp"] is not None
        for row in result.rows:
            assert row["empirical_cr"] >= 1 - 1e-9

    def test_cell_errors_recorded_without_aborting(self):
        # a zero-demand cycle has no oracle cost and no savings baseline;
        # every cell fails individually and the run still completes
        config = small_config(peak_level=0.0, base_level=0.0, noise=0.0)
        result = run_experiment(config, write=False)
        assert result.rows == ()
        assert len(result.manifest["errors"]) == 3
        assert all("optimum" in msg or "baseline" in msg for msg in result.manifest["errors"].values())

    def test_csv_source(self, tmp_path):
        trace = synth_trace(days=2, seed=4)
        write_trace_csv(trace, tmp_path / "p.csv", tmp_path / "d.csv")
        config = small_config(
            price_csv=str(tmp_path / "p.csv"), demand_csv=str(tmp_path / "d.csv")
        )
        result = run_experiment(config, write=False)
        assert result.manifest["trace"]["source"] == "csv"
        assert result.manifest["trace"]["horizon"] == 48


class TestRunSweep:
    def test_capacity_sweep_tags_rows(self):
        result = run_sweep(small_config(), "capacity", values=(0.5, 1.0), write=False)
        values = {row["axis_value"] for row in result.rows}
        assert values == {0.5, 1.0}
        assert all(row["axis"] == "capacity" for row in result.rows)

    def test_lambda_sweep_uses_lambda_column(self):
        result = run_sweep(small_config(), "lambda", values=(0.2, 0.9), write=False)
        assisted = [r for r in result.rows if r["algorithm"] == "lambda-bed"]
        assert {r["lambda"] for r in assisted} == {0.2, 0.9}

    def test_peak_sweep_scales_peak_price(self):
        result = run_sweep(small_config(), "peak", values=(1.0, 2.0), write=False)
        sigmas = sorted({row["sigma"] for row in result.rows})
        assert sigmas[0] == pytest.approx(sigmas[1] / 2)

    def test_unknown_axis_rejected(self):
        with pytest.raises(ps.DomainError):
            run_sweep(small_config(), "voltage", write=False)
