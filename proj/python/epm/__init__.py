"""Edge partition models (EPM, CEPM, DEPM, IDEPM) for binary matrices."""

from ._core import (
    BinaryMatrix,
    canonical_config,
    cv_folds,
    expectation_suite,
    load_edge_list,
    log_marginal_likelihood,
    moment_suite,
    pr_auc,
    save_edge_list,
    synthetic,
    tdll,
)
from . import _core


def _config_text(**options):
    lines = []
    for key, value in options.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines)


def run_chain(train, test=(), T=128, seed=1, **options):
    """One chain; options are config keys such as model, iterations, retained."""
    return _core.run_chain(train, list(test), _config_text(**options), T, seed)


def run_experiment(**options):
    """Cross-validated runs; returns one dict per (T, fold) chain."""
    return _core.run_experiment(_config_text(**options))


__all__ = [
    "BinaryMatrix",
    "canonical_config",
    "cv_folds",
    "expectation_suite",
    "load_edge_list",
    "log_marginal_likelihood",
    "moment_suite",
    "pr_auc",
    "run_chain",
    "run_experiment",
    "save_edge_list",
    "synthetic",
    "tdll",
]
