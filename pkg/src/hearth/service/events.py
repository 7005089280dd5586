"""Append-only event log.

One self-describing JSON document per line, flushed as soon as it is
written, so the log survives a crash with at most the in-flight record
lost. Replaying a log reconstructs service state exactly; see
:mod:`hearth.service.controller`.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

__all__ = ["EventKind", "EventRecord", "EventLog", "read_events"]


class EventKind(str, Enum):
    COMMAND_RECEIVED = "command_received"
    COMPLETION_RECEIVED = "completion_received"
    PROPOSAL_CREATED = "proposal_created"
    PROPOSAL_APPLIED = "proposal_applied"
    PROPOSAL_REJECTED = "proposal_rejected"
    VALIDATION_VIOLATION = "validation_violation"
    ADAPTER_ERROR = "adapter_error"


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: str
    kind: EventKind
    payload: dict[str, Any]

    def to_document(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "payload": self.payload,
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "EventRecord":
        return cls(
            seq=doc["seq"],
            timestamp=doc["timestamp"],
            kind=EventKind(doc["kind"]),
            payload=doc.get("payload", {}),
        )


class EventLog:
    """Strictly ordered, append-only event sink backed by a JSONL file.

    ``path=None`` keeps the log in memory only (tests, throwaway sessions).
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self._lock = threading.Lock()
        self._records: list[EventRecord] = []
        self._path = Path(path) if path is not None else None
        self._fp = None
        if self._path is not None:
            if self._path.exists():
                self._records = read_events(self._path)
            self._fp = open(self._path, "a", encoding="utf-8")

    def append(self, kind: EventKind, payload: dict[str, Any]) -> EventRecord:
        with self._lock:
            record = EventRecord(
                seq=len(self._records) + 1,
                timestamp=datetime.now(timezone.utc).isoformat(),
                kind=kind,
                payload=payload,
            )
            self._records.append(record)
            if self._fp is not None:
                self._fp.write(json.dumps(record.to_document(), ensure_ascii=False) + "\n")
                self._fp.flush()
            return record

    def since(self, seq: int) -> list[EventRecord]:
        """Records with sequence numbers strictly greater than ``seq``."""
        with self._lock:
            return [r for r in self._records if r.seq > seq]

    def all(self) -> list[EventRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def close(self) -> None:
        with self._lock:
            if self._fp is not None:
                self._fp.close()
                self._fp = None


def read_events(path: str | Path) -> list[EventRecord]:
    records = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                records.append(EventRecord.from_document(json.loads(line)))
    return records
