"""Accelerated primal-dual solvers for PL-concave min-max problems."""

import json

from ._saddle import (
    ConfigError,
    DivergenceError,
    InstabilityError,
    InvalidArgument,
    Problem,
    SaddleError,
    ScheduleError,
    gap,
    project_box_ball,
    project_spectral_box,
    rate_fit,
    run,
    schedule,
    stationarity,
)
from ._saddle import run_experiment as _run_experiment

__all__ = [
    "ConfigError",
    "DivergenceError",
    "InstabilityError",
    "InvalidArgument",
    "Problem",
    "SaddleError",
    "ScheduleError",
    "gap",
    "make_problem",
    "project_box_ball",
    "project_spectral_box",
    "rate_fit",
    "run",
    "run_experiment",
    "schedule",
    "stationarity",
]


def make_problem(kind, **params):
    """Builds a problem from the same block a JSON spec uses."""
    return Problem.from_json(json.dumps({"kind": kind, **params}))


def run_experiment(spec, out_dir):
    """Runs a spec dict, writes trace.csv and summary.json, returns (exit_code, summary)."""
    code, summary = _run_experiment(json.dumps(spec), str(out_dir))
    return code, json.loads(summary)
