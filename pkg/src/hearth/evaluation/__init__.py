"""Evaluation harness: fixtures, trial runner, rating, and reports."""

from .fixtures import (
    COMMAND_DISPLAY,
    COMMAND_NAMES,
    COMMAND_TEXTS,
    CONTEXT_NAMES,
    TABLE_CELLS,
    Scenario,
    UnknownFixtureError,
    all_cells,
    build_fixture,
    fixture_registry,
)
from .reporting import (
    CellStats,
    DuplicateRaterError,
    LabelOutOfDomainError,
    ScenarioReport,
    UnratedTrialsError,
    aggregate,
    rate_trials,
    render_csv,
    render_table,
)
from .runner import TrialRecord, load_records, run_matrix, save_records

__all__ = [
    "COMMAND_DISPLAY",
    "COMMAND_NAMES",
    "COMMAND_TEXTS",
    "CONTEXT_NAMES",
    "TABLE_CELLS",
    "Scenario",
    "UnknownFixtureError",
    "all_cells",
    "build_fixture",
    "fixture_registry",
    "CellStats",
    "DuplicateRaterError",
    "LabelOutOfDomainError",
    "ScenarioReport",
    "UnratedTrialsError",
    "aggregate",
    "rate_trials",
    "render_csv",
    "render_table",
    "TrialRecord",
    "load_records",
    "run_matrix",
    "save_records",
]
