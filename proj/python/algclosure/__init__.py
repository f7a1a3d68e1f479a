"""Algebraic closure toolkit."""

import json

from ._core import (
    BudgetExceeded,
    GroupError,
    InvariantViolation,
    ScenarioError,
    __version__,
    catalog_names,
    closure,
    evaluate_mf,
    is_supernormal,
    subgroups,
)
from ._core import run_command as _run_command


def run(command, scenario, **options):
    """Run a CLI command in-process. Returns (exit code, report dict)."""
    code, text = _run_command(command, str(scenario), **options)
    return code, json.loads(text)


__all__ = [
    "BudgetExceeded",
    "GroupError",
    "InvariantViolation",
    "ScenarioError",
    "__version__",
    "catalog_names",
    "closure",
    "evaluate_mf",
    "is_supernormal",
    "run",
    "subgroups",
]
