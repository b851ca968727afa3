"""Invariant Gaussian random fields on homogeneous spaces and their zero sets."""

import json

from ._core import (
    CertificationError,
    ConfigError,
    DomainError,
    Field,
    NumericError,
    chi_mean,
    covariance,
    distance,
    eigenvalue,
    minimal_hyperbolic_waves,
    predicted_constant,
    run_cli,
)
from ._core import run_experiment_json as _run_experiment_json

__all__ = [
    "CertificationError",
    "ConfigError",
    "DomainError",
    "Field",
    "NumericError",
    "chi_mean",
    "covariance",
    "distance",
    "eigenvalue",
    "minimal_hyperbolic_waves",
    "predicted_constant",
    "run_cli",
    "run_experiment",
]


def run_experiment(config, workers=1):
    """Run an experiment described by a config dict; returns the report dict."""
    return json.loads(_run_experiment_json(json.dumps(config), workers))
