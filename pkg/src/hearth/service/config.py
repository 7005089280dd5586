"""Service configuration.

A config file is a JSON object naming the operating mode, the completion
backend, and the data files (context, schema registry, optional adapter
bindings, event log). Credentials never appear here; the backend section
only names the environment variable that holds the secret.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..gateway import BackendConfig

__all__ = ["ServiceConfig", "DEFAULT_LISTEN"]

DEFAULT_LISTEN = "127.0.0.1:8000"

_MODES = ("auto", "review")


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the controller service needs to start."""

    context_path: str
    registry_path: str
    mode: str = "review"
    backend: BackendConfig = field(default_factory=BackendConfig)
    bindings_path: str | None = None
    event_log_path: str | None = None
    listen: str = DEFAULT_LISTEN
    static_dir: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        self.host_port()

    def host_port(self) -> tuple[str, int]:
        host, sep, port = self.listen.rpartition(":")
        if not sep or not host:
            raise ValueError(f"listen address {self.listen!r} must be host:port")
        try:
            return host, int(port)
        except ValueError:
            raise ValueError(f"listen address {self.listen!r} has a non-numeric port") from None

    def check_paths(self) -> None:
        """Fail fast when a configured input file is missing or unreadable."""
        required = {"context": self.context_path, "registry": self.registry_path}
        if self.bindings_path is not None:
            required["bindings"] = self.bindings_path
        for name, path in required.items():
            p = Path(path)
            if not p.is_file():
                raise FileNotFoundError(f"{name} file not found: {path}")
        if self.event_log_path is not None:
            parent = Path(self.event_log_path).parent
            if not parent.is_dir():
                raise FileNotFoundError(f"event log directory not found: {parent}")

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "mode": self.mode,
            "backend": self.backend.to_document(),
            "context_path": self.context_path,
            "registry_path": self.registry_path,
            "listen": self.listen,
        }
        if self.bindings_path is not None:
            doc["bindings_path"] = self.bindings_path
        if self.event_log_path is not None:
            doc["event_log_path"] = self.event_log_path
        if self.static_dir is not None:
            doc["static_dir"] = self.static_dir
        return doc

    @classmethod
    def from_document(cls, doc: dict[str, Any], base_dir: str | Path | None = None) -> "ServiceConfig":
        """Build a config; relative paths resolve against ``base_dir``."""

        def _resolve(value: str | None) -> str | None:
            if value is None or base_dir is None:
                return value
            return str((Path(base_dir) / value).resolve()) if not Path(value).is_absolute() else value

        backend_doc = doc.get("backend", {"kind": "mock"})
        return cls(
            context_path=_resolve(doc["context_path"]),
            registry_path=_resolve(doc["registry_path"]),
            mode=doc.get("mode", "review"),
            backend=BackendConfig.from_document(backend_doc),
            bindings_path=_resolve(doc.get("bindings_path")),
            event_log_path=_resolve(doc.get("event_log_path")),
            listen=doc.get("listen", DEFAULT_LISTEN),
            static_dir=_resolve(doc.get("static_dir")),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fp:
            doc = json.load(fp)
        return cls.from_document(doc, base_dir=path.parent)
