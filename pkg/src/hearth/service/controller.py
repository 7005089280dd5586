"""The command-to-state pipeline behind the HTTP service.

A command becomes a prompt over live state, the backend's completion is
validated into a change set, and the result is wrapped in a proposal. In
``auto`` mode proposals apply immediately; in ``review`` mode (the
default: model responses vary too much to trust blindly) they wait for a
human to approve or reject. Every step appends to the event log, and
replaying that log reproduces the final state and every proposal status.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Any, Iterable

from ..context import (
    HomeContext,
    SchemaRegistry,
    parse_context,
    validate_context,
)
from ..gateway import GatewayError, complete
from ..processing import (
    ChangeSet,
    ValidationPolicy,
    extract_payload,
    parse_proposal,
    validate_and_diff,
)
from ..prompting import Command, EmptyCommandError, build_prompt
from ..simulator import (
    AdapterBinding,
    HomeSimulator,
    StaleChangeError,
    TransportError,
    UnboundDeviceError,
    UnsupportedPropertyError,
    apply_changes,
    load_bindings,
)
from .config import ServiceConfig
from .events import EventKind, EventLog, EventRecord

__all__ = [
    "NotFoundError",
    "NotPendingError",
    "Proposal",
    "Controller",
    "replay_events",
]

_APPLY_ERRORS = (StaleChangeError, UnboundDeviceError, UnsupportedPropertyError, TransportError)


class NotFoundError(KeyError):
    """No proposal with this id."""


class NotPendingError(RuntimeError):
    """The proposal has already been resolved."""


@dataclass(frozen=True)
class Proposal:
    """One command's validated outcome and its lifecycle status.

    ``pending`` may move to ``applied``, ``rejected`` or ``failed``;
    ``auto_applied`` and creation-time ``failed`` are terminal.
    """

    id: str
    command: str
    changeset: ChangeSet
    latency: float
    status: str
    created_at: str
    error: str | None = None

    def to_document(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "command": self.command,
            "changeset": self.changeset.to_document(),
            "latency": self.latency,
            "status": self.status,
            "created_at": self.created_at,
            "error": self.error,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Controller:
    """Live service state: simulator, proposal ledger, event log."""

    def __init__(
        self,
        context: HomeContext,
        registry: SchemaRegistry,
        config: ServiceConfig,
        bindings: Iterable[AdapterBinding] = (),
        event_log: EventLog | None = None,
        policy: ValidationPolicy = ValidationPolicy.DROP_INVALID_FIELDS,
    ) -> None:
        report = validate_context(context, registry)
        if not report.ok:
            problems = ", ".join(v.full_path for v in report.violations)
            raise ValueError(f"context does not satisfy the registry: {problems}")
        self.config = config
        self.registry = registry
        self.policy = policy
        self.events = event_log if event_log is not None else EventLog(config.event_log_path)
        self._proposals: dict[str, Proposal] = {}
        self._order: list[str] = []
        self._ids = itertools.count(1)
        self._proposal_lock = threading.Lock()
        # Serializes the whole command pipeline: one in-flight completion,
        # later commands queue behind it.
        self._command_lock = threading.Lock()

        bindings = list(bindings)
        initial = context
        if len(self.events):
            initial, statuses = replay_events(self.events.all(), context)
            self._restore_proposals(self.events.all(), statuses)
        self.simulator = HomeSimulator(
            initial,
            bindings=bindings,
            implicit_in_memory=not bindings,
        )

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "Controller":
        config.check_paths()
        with open(config.context_path, encoding="utf-8") as fp:
            context = parse_context(fp.read())
        registry = SchemaRegistry.from_file(config.registry_path)
        bindings = load_bindings(config.bindings_path) if config.bindings_path else []
        return cls(context=context, registry=registry, config=config, bindings=bindings)

    # -- command pipeline ---------------------------------------------------

    def handle_command(self, text: str) -> Proposal:
        """Run one command through prompt, completion, validation, and policy."""
        if not text.strip():
            raise EmptyCommandError("command text must be non-empty")
        with self._command_lock:
            self.events.append(EventKind.COMMAND_RECEIVED, {"text": text})
            prompt = build_prompt(self.simulator.context, Command(text=text))
            try:
                completion = complete(prompt, self.config.backend)
            except GatewayError as exc:
                self.events.append(
                    EventKind.COMPLETION_RECEIVED,
                    {"error": f"{type(exc).__name__}: {exc}"},
                )
                return self._create_proposal(
                    command=text,
                    changeset=ChangeSet(),
                    latency=0.0,
                    status="failed",
                    error=f"{type(exc).__name__}: {exc}",
                )
            self.events.append(
                EventKind.COMPLETION_RECEIVED,
                {
                    "latency": completion.latency,
                    "backend_kind": completion.backend_kind,
                    "chars": len(completion.text),
                },
            )
            try:
                overlay = parse_proposal(extract_payload(completion.text))
            except ValueError as exc:
                return self._create_proposal(
                    command=text,
                    changeset=ChangeSet(),
                    latency=completion.latency,
                    status="failed",
                    error=f"{type(exc).__name__}: {exc}",
                )
            changeset = validate_and_diff(
                self.simulator.context, overlay, self.registry, self.policy
            )
            proposal = self._create_proposal(
                command=text,
                changeset=changeset,
                latency=completion.latency,
                status="pending",
            )
            if self.config.mode == "auto":
                proposal = self._apply(proposal, auto=True)
            return proposal

    def resolve_proposal(self, proposal_id: str, decision: str) -> Proposal:
        """Approve or reject a pending proposal."""
        if decision not in ("approve", "reject"):
            raise ValueError(f"decision must be approve or reject, got {decision!r}")
        with self._command_lock:
            proposal = self.get_proposal(proposal_id)
            if proposal.status != "pending":
                raise NotPendingError(f"proposal {proposal_id} is {proposal.status}")
            if decision == "reject":
                proposal = self._update(replace(proposal, status="rejected"))
                self.events.append(
                    EventKind.PROPOSAL_REJECTED, {"id": proposal.id, "status": "rejected"}
                )
                return proposal
            return self._apply(proposal, auto=False)

    def _apply(self, proposal: Proposal, auto: bool) -> Proposal:
        target_status = "auto_applied" if auto else "applied"
        try:
            self.simulator.apply_changeset(proposal.changeset)
        except _APPLY_ERRORS as exc:
            proposal = self._update(
                replace(proposal, status="failed", error=f"{type(exc).__name__}: {exc}")
            )
            self.events.append(
                EventKind.ADAPTER_ERROR,
                {
                    "id": proposal.id,
                    "status": "failed",
                    "error": f"{type(exc).__name__}: {exc}",
                },
            )
            return proposal
        proposal = self._update(replace(proposal, status=target_status))
        self.events.append(
            EventKind.PROPOSAL_APPLIED,
            {
                "id": proposal.id,
                "status": target_status,
                "wire_commands": [
                    {"method": w.method, "path": w.path, "body": w.body}
                    for w in self.simulator.last_wire_commands
                ],
            },
        )
        return proposal

    def _create_proposal(
        self,
        command: str,
        changeset: ChangeSet,
        latency: float,
        status: str,
        error: str | None = None,
    ) -> Proposal:
        with self._proposal_lock:
            proposal = Proposal(
                id=f"p-{next(self._ids):04d}",
                command=command,
                changeset=changeset,
                latency=latency,
                status=status,
                created_at=_now(),
                error=error,
            )
            self._proposals[proposal.id] = proposal
            self._order.append(proposal.id)
        self.events.append(
            EventKind.PROPOSAL_CREATED,
            {
                "id": proposal.id,
                "command": command,
                "latency": latency,
                "status": status,
                "error": error,
                "changeset": changeset.to_document(),
            },
        )
        if changeset.dropped:
            self.events.append(
                EventKind.VALIDATION_VIOLATION,
                {
                    "id": proposal.id,
                    "dropped": [d.to_document() for d in changeset.dropped],
                },
            )
        return proposal

    def _update(self, proposal: Proposal) -> Proposal:
        with self._proposal_lock:
            self._proposals[proposal.id] = proposal
        return proposal

    # -- reads ----------------------------------------------------------------

    def get_state(self) -> HomeContext:
        return self.simulator.context

    def get_proposal(self, proposal_id: str) -> Proposal:
        with self._proposal_lock:
            proposal = self._proposals.get(proposal_id)
        if proposal is None:
            raise NotFoundError(proposal_id)
        return proposal

    def get_history(self, limit: int | None = None) -> list[Proposal]:
        """Proposals, newest first."""
        with self._proposal_lock:
            ids = list(reversed(self._order))
        if limit is not None:
            ids = ids[: max(limit, 0)]
        return [self._proposals[i] for i in ids]

    def close(self) -> None:
        self.events.close()

    # -- crash recovery ---------------------------------------------------------

    def _restore_proposals(
        self, events: list[EventRecord], statuses: dict[str, str]
    ) -> None:
        highest = 0
        for event in events:
            if event.kind is EventKind.PROPOSAL_CREATED:
                payload = event.payload
                pid = payload["id"]
                highest = max(highest, int(pid.split("-")[-1]))
                proposal = Proposal(
                    id=pid,
                    command=payload["command"],
                    changeset=ChangeSet.from_document(payload["changeset"]),
                    latency=payload["latency"],
                    status=statuses.get(pid, payload["status"]),
                    created_at=event.timestamp,
                    error=payload.get("error"),
                )
                self._proposals[pid] = proposal
                self._order.append(pid)
        self._ids = itertools.count(highest + 1)


def replay_events(
    events: Iterable[EventRecord], initial: HomeContext
) -> tuple[HomeContext, dict[str, str]]:
    """Fold an event log over the initial context.

    Returns the reconstructed final state and every proposal's final
    status. Only proposal_applied events mutate state; their changesets
    replay in log order, so the result matches what the live service held.
    """
    context = initial
    statuses: dict[str, str] = {}
    changesets: dict[str, ChangeSet] = {}
    for event in events:
        payload = event.payload
        if event.kind is EventKind.PROPOSAL_CREATED:
            statuses[payload["id"]] = payload["status"]
            changesets[payload["id"]] = ChangeSet.from_document(payload["changeset"])
        elif event.kind is EventKind.PROPOSAL_APPLIED:
            pid = payload["id"]
            context = apply_changes(context, changesets[pid].changes)
            statuses[pid] = payload["status"]
        elif event.kind is EventKind.PROPOSAL_REJECTED:
            statuses[payload["id"]] = "rejected"
        elif event.kind is EventKind.ADAPTER_ERROR and "id" in payload:
            statuses[payload["id"]] = "failed"
    return context, statuses
