"""Trial execution over the evaluation grid.

Trials within a cell run sequentially so backend contention never skews
the latency measurement. Each record lands on disk the moment its trial
completes (one JSON document per line, flushed), so a crash loses at most
the trial in flight. Backend and processing failures are recorded in the
trial rather than raised: a failed trial is data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from ..context import validate_context
from ..gateway import BackendConfig, GatewayError, complete
from ..processing import (
    ChangeSet,
    ValidationPolicy,
    extract_payload,
    parse_proposal,
    validate_and_diff,
)
from ..prompting import build_prompt
from .fixtures import Scenario, build_fixture, fixture_registry

__all__ = ["TrialRecord", "run_matrix", "load_records", "save_records", "RECORDS_FILENAME"]

RECORDS_FILENAME = "records.jsonl"


@dataclass
class TrialRecord:
    """One trial: the raw response, its latency, and what validation made of it."""

    context_name: str
    command_name: str
    trial_index: int
    raw_response: str
    latency: float
    changeset: ChangeSet | None = None
    error: str | None = None
    labels: dict[str, int] = field(default_factory=dict)

    @property
    def record_id(self) -> str:
        return f"{self.context_name}-{self.command_name}-{self.trial_index:02d}"

    @property
    def cell(self) -> tuple[str, str]:
        return (self.context_name, self.command_name)

    def to_document(self) -> dict[str, Any]:
        return {
            "record_id": self.record_id,
            "context": self.context_name,
            "command": self.command_name,
            "trial": self.trial_index,
            "raw_response": self.raw_response,
            "latency": self.latency,
            "changeset": self.changeset.to_document() if self.changeset else None,
            "error": self.error,
            "labels": dict(self.labels),
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "TrialRecord":
        changeset = doc.get("changeset")
        return cls(
            context_name=doc["context"],
            command_name=doc["command"],
            trial_index=doc["trial"],
            raw_response=doc["raw_response"],
            latency=doc["latency"],
            changeset=ChangeSet.from_document(changeset) if changeset else None,
            error=doc.get("error"),
            labels={k: int(v) for k, v in doc.get("labels", {}).items()},
        )


def _process_response(scenario: Scenario, text: str) -> ChangeSet:
    registry = fixture_registry(scenario.context_name)
    overlay = parse_proposal(extract_payload(text))
    return validate_and_diff(
        scenario.context, overlay, registry, ValidationPolicy.DROP_INVALID_FIELDS
    )


def run_matrix(
    cells: Iterable[Scenario],
    trials: int,
    cfg: BackendConfig,
    out_path: str | Path | None = None,
) -> list[TrialRecord]:
    """Run every cell for the given number of trials against one backend.

    When ``out_path`` is given, records are appended there incrementally.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records: list[TrialRecord] = []
    sink = open(out_path, "a", encoding="utf-8") if out_path is not None else None
    try:
        for scenario in cells:
            validate_context(scenario.context, fixture_registry(scenario.context_name))
            prompt = build_prompt(scenario.context, scenario.command)
            for trial_index in range(1, trials + 1):
                raw = ""
                latency = 0.0
                changeset = None
                error = None
                try:
                    completion = complete(prompt, cfg)
                    raw = completion.text
                    latency = completion.latency
                    changeset = _process_response(scenario, raw)
                except GatewayError as exc:
                    error = f"{type(exc).__name__}: {exc}"
                except ValueError as exc:
                    # Extraction / parse / structure failures on the response.
                    error = f"{type(exc).__name__}: {exc}"
                record = TrialRecord(
                    context_name=scenario.context_name,
                    command_name=scenario.command_name,
                    trial_index=trial_index,
                    raw_response=raw,
                    latency=latency,
                    changeset=changeset,
                    error=error,
                )
                records.append(record)
                if sink is not None:
                    sink.write(json.dumps(record.to_document(), ensure_ascii=False) + "\n")
                    sink.flush()
    finally:
        if sink is not None:
            sink.close()
    return records


def save_records(records: Iterable[TrialRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for record in records:
            fp.write(json.dumps(record.to_document(), ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[TrialRecord]:
    records = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                records.append(TrialRecord.from_document(json.loads(line)))
    return records


def cells_from_names(names: Iterable[tuple[str, str]]) -> list[Scenario]:
    return [build_fixture(ctx, cmd) for ctx, cmd in names]
