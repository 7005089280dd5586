"""Rating collection and result aggregation.

Raters review trials asynchronously through a review file (one record per
line with an empty label slot) and assign a binary quality label: 0 for a
response that does not reflect the command's intent or is malformed, 1 for
one a user could plausibly be satisfied with. A cell's quality is the mean
over every label from every rater across its trials; latency is the mean
trial latency in seconds.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .fixtures import COMMAND_DISPLAY, TABLE_CELLS
from .runner import TrialRecord

__all__ = [
    "DuplicateRaterError",
    "LabelOutOfDomainError",
    "UnratedTrialsError",
    "CellStats",
    "ScenarioReport",
    "rate_trials",
    "aggregate",
    "render_table",
    "render_csv",
    "write_review_file",
    "read_review_labels",
]

LABEL_POOR = 0
LABEL_GOOD = 1

REPORT_COLUMNS = ("Context", "Command", "Avg. Quality", "Avg Latency (sec)")


class DuplicateRaterError(ValueError):
    """This rater has already labeled these records."""


class LabelOutOfDomainError(ValueError):
    """Labels are binary: 0 (poor) or 1 (good)."""


class UnratedTrialsError(ValueError):
    """Aggregation requires at least one label on every record."""


def _check_label(label: Any) -> int:
    if isinstance(label, bool) or not isinstance(label, int) or label not in (0, 1):
        raise LabelOutOfDomainError(f"label must be 0 or 1, got {label!r}")
    return label


def rate_trials(
    records: Sequence[TrialRecord], rater_id: str, labels: Sequence[int]
) -> list[TrialRecord]:
    """Attach one rater's labels to records, one label per record, in order."""
    if len(labels) != len(records):
        raise ValueError(f"need {len(records)} labels, got {len(labels)}")
    for record in records:
        if rater_id in record.labels:
            raise DuplicateRaterError(f"rater {rater_id!r} already labeled {record.record_id}")
    checked = [_check_label(label) for label in labels]
    for record, label in zip(records, checked):
        record.labels[rater_id] = label
    return list(records)


@dataclass(frozen=True)
class CellStats:
    context_name: str
    command_name: str
    avg_quality: float
    avg_latency: float
    trials: int
    raters: int

    @property
    def command_display(self) -> str:
        return COMMAND_DISPLAY.get(self.command_name, self.command_name)


@dataclass(frozen=True)
class ScenarioReport:
    cells: tuple[CellStats, ...]

    def to_document(self) -> list[dict[str, Any]]:
        return [
            {
                "context": c.context_name,
                "command": c.command_display,
                "avg_quality": c.avg_quality,
                "avg_latency": c.avg_latency,
                "trials": c.trials,
                "raters": c.raters,
            }
            for c in self.cells
        ]


def aggregate(records: Iterable[TrialRecord]) -> ScenarioReport:
    """Mean quality over all labels and mean latency, per cell, in table order."""
    by_cell: dict[tuple[str, str], list[TrialRecord]] = {}
    for record in records:
        if not record.labels:
            raise UnratedTrialsError(f"record {record.record_id} has no labels")
        by_cell.setdefault(record.cell, []).append(record)

    cells = []
    ordered = [cell for cell in TABLE_CELLS if cell in by_cell]
    ordered += [cell for cell in by_cell if cell not in TABLE_CELLS]
    for cell in ordered:
        cell_records = by_cell[cell]
        all_labels = [label for r in cell_records for label in r.labels.values()]
        latencies = [r.latency for r in cell_records]
        raters = {rater for r in cell_records for rater in r.labels}
        cells.append(
            CellStats(
                context_name=cell[0],
                command_name=cell[1],
                avg_quality=sum(all_labels) / len(all_labels),
                avg_latency=sum(latencies) / len(latencies),
                trials=len(cell_records),
                raters=len(raters),
            )
        )
    return ScenarioReport(cells=tuple(cells))


def render_table(report: ScenarioReport) -> str:
    """Plain-text result table: quality and latency to two decimals."""
    rows = [
        (
            c.context_name,
            c.command_display,
            f"{c.avg_quality:.2f}",
            f"{c.avg_latency:.2f}",
        )
        for c in report.cells
    ]
    widths = [
        max(len(REPORT_COLUMNS[i]), *(len(row[i]) for row in rows)) if rows else len(REPORT_COLUMNS[i])
        for i in range(4)
    ]
    lines = [
        "  ".join(REPORT_COLUMNS[i].ljust(widths[i]) for i in range(4)).rstrip(),
        "  ".join("-" * widths[i] for i in range(4)),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(4)).rstrip())
    return "\n".join(lines)


def render_csv(report: ScenarioReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(REPORT_COLUMNS)
    for c in report.cells:
        writer.writerow(
            [c.context_name, c.command_display, f"{c.avg_quality:.2f}", f"{c.avg_latency:.2f}"]
        )
    return out.getvalue()


def review_path(directory: str | Path, rater_id: str) -> Path:
    return Path(directory) / f"review_{rater_id}.jsonl"


def write_review_file(records: Sequence[TrialRecord], path: str | Path) -> None:
    """One reviewable line per record with an empty label slot to fill in."""
    with open(path, "w", encoding="utf-8") as fp:
        for record in records:
            fp.write(
                json.dumps(
                    {
                        "record_id": record.record_id,
                        "raw_response": record.raw_response,
                        "changes": (
                            record.changeset.to_document()["changes"]
                            if record.changeset
                            else None
                        ),
                        "dropped": (
                            record.changeset.to_document()["dropped"]
                            if record.changeset
                            else None
                        ),
                        "error": record.error,
                        "label": None,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_review_labels(path: str | Path, records: Sequence[TrialRecord]) -> list[int]:
    """Labels from a filled review file, aligned with ``records`` order."""
    by_id: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            by_id[doc["record_id"]] = doc.get("label")
    labels = []
    for record in records:
        if record.record_id not in by_id:
            raise ValueError(f"review file is missing record {record.record_id}")
        label = by_id[record.record_id]
        if label is None:
            raise ValueError(f"record {record.record_id} has no label yet")
        labels.append(_check_label(label))
    return labels
