"""Trust-region interior-point stochastic SQP solver and benchmark harness."""

import csv
import io
import json

from ._tripssqp import (
    ConfigError,
    DatasetError,
    Error,
    analytic_problem_names,
    evaluate,
    gradient_batch_size,
    kappa_f_bound,
    problem_info,
    quantile,
    value_batch_size,
)
from . import _tripssqp

__all__ = [
    "ConfigError",
    "DatasetError",
    "Error",
    "analytic_problem_names",
    "evaluate",
    "gradient_batch_size",
    "kappa_f_bound",
    "performance_profile",
    "problem_info",
    "quantile",
    "residual_summary",
    "run_experiment",
    "solve",
    "value_batch_size",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def _rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def solve(problem, config=None, seed=0, algorithm="adaptive"):
    """Runs one solve and returns the trace as a dict (columnar iterations)."""
    return json.loads(_tripssqp._solve(problem, _config_text(config), seed, algorithm))


def run_experiment(experiment, config=None):
    """Runs a sweep and returns (rows, csv_text)."""
    text = _tripssqp._bench(experiment, _config_text(config))
    return _rows(text), text


def performance_profile(results_csv, grid=()):
    return _rows(_tripssqp._profile(results_csv, list(grid)))


def residual_summary(results_csv):
    return _rows(_tripssqp._summary(results_csv))
