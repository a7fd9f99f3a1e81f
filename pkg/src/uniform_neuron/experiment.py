"""Experiment configuration, orchestration and JSON reports."""

import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .activations import make_activation
from .data import Dataset, load_dataset, minmax_normalize
from .errors import (
    DatasetError,
    EnumerationCapExceeded,
    NumericFailure,
    UniformFitError,
)
from .stationarity import certify
from .stepwise import fit_stepwise

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CAP = 4


@dataclass
class ExperimentConfig:
    input: str
    format: str = "csv"
    target: str | None = None
    activation: str = "leaky_relu"
    alpha: float | None = 0.01
    eps: float = 1e-6
    tau: float | None = None
    steps: int = 1
    stall_tol: float | None = None
    continue_past_tolerance: bool = False
    normalize: bool = False
    report: str | None = None
    seed: int | None = None
    lp_method: str = "simplex"
    timings: bool = True

    def validate(self):
        if self.format not in ("ucr", "csv"):
            raise ValueError(f"format must be 'ucr' or 'csv', got {self.format!r}")
        if self.format == "csv" and not self.target:
            raise ValueError("csv input needs --target")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.stall_tol is not None and self.stall_tol < 0:
            raise ValueError("stall_tol must be non-negative")
        if self.lp_method not in ("simplex", "highs"):
            raise ValueError(f"unknown LP method {self.lp_method!r}")
        return make_activation(self.activation, self.alpha)


def exit_code_for(exc):
    if isinstance(exc, EnumerationCapExceeded):
        return EXIT_CAP
    if isinstance(exc, NumericFailure):
        return EXIT_NUMERIC
    if isinstance(exc, (DatasetError, ValueError, OSError, json.JSONDecodeError)):
        return EXIT_CONFIG
    if isinstance(exc, UniformFitError):
        return EXIT_NUMERIC
    raise exc


def error_object(exc):
    return {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code_for(exc)}


def _trace_record(trace):
    return {
        "l0": trace.l0,
        "u0": trace.u0,
        "epsilon": trace.epsilon,
        "iterations": len(trace.iterations),
        "levels": [s.level for s in trace.iterations],
        "lower": [float(s.lower) for s in trace.iterations],
        "upper": [float(s.upper) for s in trace.iterations],
        "feasible": [s.feasible for s in trace.iterations],
    }


def _stall_agreement(steps):
    """Count consecutive step pairs where a stationary step k is followed by a stalled step k+1."""
    pairs = [(a, b) for a, b in zip(steps, steps[1:]) if a["certificate"]["verdict"] == "stationary"]
    return {"stationary_followed": len(pairs), "stalled_after": sum(b["stalled"] for _, b in pairs)}


def run_experiment(config):
    """Load, fit step by step, certify every step and return ``(report, exit_code)``."""
    report = {"schema_version": SCHEMA_VERSION, "config": asdict(config), "status": "ok"}
    clock = {}
    t0 = time.perf_counter()
    try:
        act = config.validate()
        data = load_dataset(config.input, config.format, config.target)
        if config.normalize:
            data = minmax_normalize(data)
        report["dataset"] = {**data.summary(), "normalized": config.normalize}
        clock["load"] = time.perf_counter() - t0

        t1 = time.perf_counter()
        model = fit_stepwise(
            data,
            act,
            config.steps,
            config.eps,
            stall_tol=config.stall_tol,
            continue_past_tolerance=config.continue_past_tolerance,
            method=config.lp_method,
        )
        clock["fit"] = time.perf_counter() - t1

        # record the fit before certifying so a certificate failure keeps it
        report["steps"] = steps = [
            {
                "index": step.index,
                "objective": step.objective,
                "weights": step.weights.as_array().tolist(),
                "eps": step.eps,
                "stalled": step.stalled,
                "bisection": _trace_record(step.trace),
                "certificate": None,
            }
            for step in model.steps
        ]
        report["step_objectives"] = list(model.step_objectives)
        report["stop_reason"] = model.stop_reason

        t2 = time.perf_counter()
        for record, step in zip(steps, model.steps):
            cert = certify(Dataset(data.features, step.targets), act, step.weights, config.tau)
            record["certificate"] = cert.to_dict()
        clock["certify"] = time.perf_counter() - t2
        report["stall_agreement"] = _stall_agreement(steps)
        code = EXIT_OK
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes, unknown errors re-raise
        code = exit_code_for(exc)
        report["status"] = "error"
        report["error"] = error_object(exc)
    if config.timings:
        clock["total"] = time.perf_counter() - t0
        report["timings"] = clock
    return report, code


def dumps(report):
    # json writes floats with repr, i.e. the shortest string that round-trips exactly
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_report(report, path):
    text = dumps(report)
    if path in (None, "-"):
        print(text, end="")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def load_weights(path):
    with open(path) as fh:
        arr = json.load(fh)
    if not isinstance(arr, list) or not all(isinstance(v, (int, float)) for v in arr):
        raise ValueError(f"{path}: weights file must be a JSON array [w0, w1, ..., wd]")
    return np.array(arr, dtype=float)
