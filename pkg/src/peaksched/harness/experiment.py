"""Experiment orchestration: one cell per (algorithm, lambda, predictor).

Each cell runs the layered algorithm on the configured trace, projects onto
the ramp-feasible set when a ramp limit is configured, and reports total
cost, empirical ratio against the exact offline oracle, and cost reduction
against the no-generator baseline.  Outputs are a CSV table plus a JSON
manifest; identical configurations and seeds produce byte-identical files.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import DomainError, PeakSchedError, ValidationError
from ..layering import (
    flipped_layer_sigma_hats,
    predicted_layer_sigma_hats,
    run_layered,
    project_ramp,
    true_layer_sigma_hats,
)
from ..model import BillingParams, Trace, beta as beta_of, cost_of, cost_reduction, sigma as sigma_of
from ..offline import optimal_general, optimal_with_ramp
from ..online import Algorithm
from ..analysis import empirical_ratio
from ..prediction import gaussian_predictor, sigma_hat as sigma_hat_of
from .traces import parse_trace_csv, synth_trace

REPORT_COLUMNS = (
    "algorithm",
    "lambda",
    "predictor",
    "sigma",
    "sigma_hat",
    "beta",
    "total_cost",
    "opt_cost",
    "empirical_cr",
    "cost_reduction",
)

_PREDICTORS = ("perfect", "gaussian", "adversarial", "scalar")


@dataclass
class ExperimentConfig:
    """Flat experiment description; every field mirrors a kebab-case config
    key and CLI flag (``capacity_ratio`` <-> ``capacity-ratio``)."""

    price_csv: str | None = None
    demand_csv: str | None = None
    days: int = 30
    peak_level: float = 12.0
    base_level: float = 2.0
    noise: float = 1.0
    algorithms: tuple[str, ...] = ("bed", "lambda-bed")
    lambdas: tuple[float, ...] = (0.5,)
    predictors: tuple[str, ...] = ("perfect",)
    sigma_hat: float | None = None
    sigma1: float | None = None
    sigma2: float | None = None
    peak_multiplier: float = 100.0
    capacity_ratio: float = 0.6
    ramp_ratio: float | None = None
    seed: int | None = None
    out_dir: str = "out"

    def validate(self) -> None:
        for name in self.algorithms:
            try:
                Algorithm(name)
            except ValueError as exc:
                raise ValidationError(f"unknown algorithm {name!r}") from exc
        for lam in self.lambdas:
            if not 0 < lam <= 1:
                raise ValidationError(f"lambda values must lie in (0, 1], got {lam}")
        for pred in self.predictors:
            if pred not in _PREDICTORS:
                raise ValidationError(f"unknown predictor {pred!r}; pick from {_PREDICTORS}")
        if "scalar" in self.predictors and self.sigma_hat is None:
            raise ValidationError("the scalar predictor needs sigma-hat")
        if not 0 < self.capacity_ratio <= 1:
            raise ValidationError(f"capacity-ratio must lie in (0, 1], got {self.capacity_ratio}")
        if self.ramp_ratio is not None and not 0 < self.ramp_ratio <= 1:
            raise ValidationError(f"ramp-ratio must lie in (0, 1], got {self.ramp_ratio}")
        if self.peak_multiplier <= 0:
            raise ValidationError(f"peak-multiplier must be > 0, got {self.peak_multiplier}")
        needs_seed = "gaussian" in self.predictors or any(
            Algorithm(name).is_randomized for name in self.algorithms
        )
        if needs_seed and self.seed is None:
            raise ValidationError("a seed is required for randomized algorithms or noisy predictors")
        if (self.price_csv is None) != (self.demand_csv is None):
            raise ValidationError("price-csv and demand-csv must be given together")


_TUPLE_FIELDS = {"algorithms", "predictors"}
_FLOAT_TUPLE_FIELDS = {"lambdas"}
_INT_FIELDS = {"days", "seed"}
_FLOAT_FIELDS = {
    "peak_level", "base_level", "noise", "sigma_hat", "sigma1", "sigma2",
    "peak_multiplier", "capacity_ratio", "ramp_ratio",
}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def config_from_sources(file_values: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from parsed file values and CLI overrides (which win)."""
    merged: dict = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            merged[key.replace("-", "_")] = value
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(merged) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    kwargs: dict = {}
    for key, value in merged.items():
        if isinstance(value, str):
            if key in _TUPLE_FIELDS:
                value = tuple(part.strip() for part in value.split(",") if part.strip())
            elif key in _FLOAT_TUPLE_FIELDS:
                value = tuple(float(part) for part in value.split(",") if part.strip())
            elif key in _INT_FIELDS:
                value = int(value)
            elif key in _FLOAT_FIELDS:
                value = float(value)
        elif key in _TUPLE_FIELDS or key in _FLOAT_TUPLE_FIELDS:
            value = tuple(value)
        kwargs[key] = value
    return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[dict, ...]
    manifest: dict
    report_path: Path | None
    manifest_path: Path | None


def _build_trace(config: ExperimentConfig) -> tuple[Trace, dict]:
    provenance: dict = {}
    if config.price_csv is not None:
        loaded = parse_trace_csv(config.price_csv, config.demand_csv)
        trace = loaded.trace
        provenance["source"] = "csv"
        provenance["dropped_price_rows"] = loaded.dropped_price_rows
        provenance["dropped_demand_rows"] = loaded.dropped_demand_rows
    else:
        trace = synth_trace(
            days=config.days,
            seed=config.seed or 0,
            peak_level=config.peak_level,
            base_level=config.base_level,
            noise=config.noise,
        )
        provenance["source"] = "synthetic"
    if not trace.has_integer_demands():
        # layering needs integer demand; record that we rounded
        trace = Trace(prices=trace.prices, demands=np.rint(trace.demands))
        provenance["demands_rounded"] = True
    else:
        provenance["demands_rounded"] = False
    return trace, provenance


def _build_params(trace: Trace, config: ExperimentConfig) -> BillingParams:
    capacity = max(1.0, math.ceil(config.capacity_ratio * trace.max_demand))
    ramp = None
    if config.ramp_ratio is not None:
        ramp = max(1.0, math.ceil(config.ramp_ratio * capacity))
    return BillingParams(
        p_g=trace.max_price,
        p_m=config.peak_multiplier * trace.max_price,
        capacity=capacity,
        ramp=ramp,
    )


def _gaussian_seed(seed: int) -> int:
    return int(np.random.SeedSequence([seed, 7919]).generate_state(1)[0])


def _predictor_hats(
    name: str, trace: Trace, params: BillingParams, config: ExperimentConfig
) -> tuple[list[float] | float | None, float]:
    """Per-layer predicted premium masses and the global predicted mass."""
    if name == "perfect":
        hats = true_layer_sigma_hats(trace, params)
        return hats, sigma_of(trace, params)
    if name == "adversarial":
        hats = flipped_layer_sigma_hats(trace, params)
        return hats, (0.0 if sigma_of(trace, params) > 1 else 2.0)
    if name == "scalar":
        return config.sigma_hat, config.sigma_hat
    if name == "gaussian":
        prediction = gaussian_predictor(
            trace, sigma1=config.sigma1, sigma2=config.sigma2, seed=_gaussian_seed(config.seed)
        )
        depth = int(trace.max_demand)
        hats = predicted_layer_sigma_hats(prediction, params, depth)
        return hats, sigma_hat_of(prediction, params)
    raise DomainError(f"unknown predictor {name!r}")


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run every (algorithm, lambda, predictor) cell of a configuration.

    Cell failures are recorded in the manifest and do not abort the other
    cells.  Rows come out sorted by cell key; with ``write`` the report CSV
    and manifest JSON land in ``config.out_dir``.
    """
    config.validate()
    trace, provenance = _build_trace(config)
    params = _build_params(trace, config)
    oracle = optimal_with_ramp(trace, params) if params.ramp is not None else optimal_general(trace, params)
    instance_sigma = sigma_of(trace, params)
    instance_beta = beta_of(trace, params)

    rows: list[dict] = []
    errors: dict[str, str] = {}
    predictor_global_hats: dict[str, float | None] = {}
    for predictor in config.predictors:
        try:
            layer_hats, global_hat = _predictor_hats(predictor, trace, params, config)
        except PeakSchedError as exc:
            errors[f"predictor:{predictor}"] = str(exc)
            continue
        predictor_global_hats[predictor] = global_hat
        for name in config.algorithms:
            algorithm = Algorithm(name)
            lambda_grid: tuple[float | None, ...] = (
                tuple(config.lambdas) if algorithm.uses_prediction else (None,)
            )
            for lam in lambda_grid:
                key = f"{algorithm.value}|{'' if lam is None else lam}|{predictor}"
                try:
                    schedule = run_layered(
                        trace,
                        params,
                        algorithm,
                        lam=lam,
                        sigma_hats=layer_hats if algorithm.uses_prediction else None,
                        seed=config.seed,
                    )
                    if params.ramp is not None:
                        schedule = project_ramp(schedule, trace, params)
                    total = cost_of(schedule, trace, params).total
                    rows.append(
                        {
                            "algorithm": algorithm.value,
                            "lambda": lam,
                            "predictor": predictor,
                            "sigma": instance_sigma,
                            "sigma_hat": global_hat,
                            "beta": instance_beta,
                            "total_cost": total,
                            "opt_cost": oracle.total,
                            "empirical_cr": empirical_ratio(total, oracle.total),
                            "cost_reduction": cost_reduction(total, trace, params),
                        }
                    )
                except PeakSchedError as exc:
                    errors[key] = str(exc)
    rows.sort(key=lambda r: (r["algorithm"], r["lambda"] if r["lambda"] is not None else -1.0, r["predictor"]))

    manifest = {
        "config": asdict(config),
        "seed": config.seed,
        "trace": {
            "horizon": len(trace),
            "max_demand": trace.max_demand,
            "max_price": trace.max_price,
            **provenance,
        },
        "params": {
            "p_g": params.p_g,
            "p_m": params.p_m,
            "capacity": params.capacity,
            "ramp": params.ramp,
        },
        "instance": {"sigma": instance_sigma, "beta": instance_beta},
        "predictor_sigma_hat": predictor_global_hats,
        "oracle": {"total": oracle.total, "peak_level": oracle.peak_level},
        "errors": errors,
    }

    report_path = manifest_path = None
    if write:
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / "report.csv"
        manifest_path = out_dir / "manifest.json"
        write_report(rows, report_path)
        manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return ExperimentResult(
        rows=tuple(rows), manifest=manifest, report_path=report_path, manifest_path=manifest_path
    )


def write_report(rows: list[dict], path: Path, extra_columns: tuple[str, ...] = ()) -> None:
    columns = REPORT_COLUMNS + extra_columns
    with Path(path).open("w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(row.get(col)) for col in columns) + "\n")


SWEEP_AXES = {
    "lambda": "lambda values for prediction-assisted algorithms",
    "peak": "scale factors on the configured peak multiplier",
    "ramp": "ramp-to-capacity ratios",
    "capacity": "capacity-to-peak-demand ratios",
}

_DEFAULT_AXIS_VALUES = {
    "lambda": tuple(round(0.1 * i, 1) for i in range(1, 11)),
    "peak": tuple(float(i) for i in range(1, 21)),
    "ramp": tuple(round(0.1 * i, 1) for i in range(1, 11)),
    "capacity": tuple(round(0.1 * i, 1) for i in range(1, 11)),
}


def run_sweep(
    config: ExperimentConfig,
    axis: str,
    values: tuple[float, ...] | None = None,
    write: bool = True,
) -> ExperimentResult:
    """Repeat an experiment along one axis and tag rows with the axis value.

    ``lambda`` replaces the lambda grid wholesale; the other axes derive a
    fresh configuration per value.
    """
    if axis not in SWEEP_AXES:
        raise DomainError(f"unknown sweep axis {axis!r}; pick from {sorted(SWEEP_AXES)}")
    if values is None:
        values = _DEFAULT_AXIS_VALUES[axis]
    if axis == "lambda":
        variants = [replace(config, lambdas=values, out_dir=config.out_dir)]
        tags = [None]
    else:
        field_name = {"peak": "peak_multiplier", "ramp": "ramp_ratio", "capacity": "capacity_ratio"}[axis]
        variants = []
        for value in values:
            if axis == "peak":
                variants.append(replace(config, peak_multiplier=config.peak_multiplier * value))
            else:
                variants.append(replace(config, **{field_name: value}))
        tags = list(values)

    rows: list[dict] = []
    manifests = []
    for variant, tag in zip(variants, tags):
        result = run_experiment(variant, write=False)
        for row in result.rows:
            tagged = dict(row)
            tagged["axis"] = axis
            tagged["axis_value"] = tag if tag is not None else row["lambda"]
            rows.append(tagged)
        manifests.append(result.manifest)

    manifest = {"axis": axis, "values": list(values), "cells": manifests}
    report_path = manifest_path = None
    if write:
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / f"sweep_{axis}.csv"
        manifest_path = out_dir / f"sweep_{axis}_manifest.json"
        write_report(rows, report_path, extra_columns=("axis", "axis_value"))
        manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return ExperimentResult(
        rows=tuple(rows), manifest=manifest, report_path=report_path, manifest_path=manifest_path
    )
