"""Long-running controller service: command intake, proposals, event log."""

from .api import create_app, create_app_from_config
from .config import ServiceConfig
from .controller import Controller, NotFoundError, NotPendingError, Proposal, replay_events
from .events import EventKind, EventLog, EventRecord, read_events

__all__ = [
    "create_app",
    "create_app_from_config",
    "ServiceConfig",
    "Controller",
    "NotFoundError",
    "NotPendingError",
    "Proposal",
    "replay_events",
    "EventKind",
    "EventLog",
    "EventRecord",
    "read_events",
]
