"""Generator for a ready-to-run demo deployment.

Writes a single-room context (a color light group plus a smart plug
powering a stereo), its schema registry, adapter bindings pointing at
nothing (in-memory), and a service config wired for the mock backend.
"""

from __future__ import annotations

import json
from pathlib import Path

from .context import document_to_context, serialize_context
from .registries import demo_registry

__all__ = ["demo_context_document", "demo_context", "write_demo_files"]


def demo_context_document() -> dict:
    return {
        "user": {"location": "living_room"},
        "devices": {
            "living_room": {
                "lights": {
                    "hue_group_1": {"state": "off", "brightness": 128, "effect": "none"},
                },
                "plugs": {
                    "stereo_plug": {"state": "off"},
                },
            }
        },
    }


def demo_context():
    return document_to_context(demo_context_document())


def write_demo_files(
    directory: str | Path, mode: str = "review", static_dir: str | None = None
) -> Path:
    """Write context/registry/config files into a directory; returns the config path.

    ``static_dir`` points the service at built dashboard assets (served
    under /ui).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    context_path = directory / "context.json"
    context_path.write_text(serialize_context(demo_context()) + "\n", encoding="utf-8")

    registry_path = directory / "registry.json"
    registry_path.write_text(
        json.dumps(demo_registry().to_document(), indent=2) + "\n", encoding="utf-8"
    )

    config_path = directory / "config.json"
    config = {
        "mode": mode,
        "backend": {"kind": "mock"},
        "context_path": "context.json",
        "registry_path": "registry.json",
        "event_log_path": "events.jsonl",
        "listen": "127.0.0.1:8000",
    }
    if static_dir is not None:
        config["static_dir"] = str(Path(static_dir).resolve())
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return config_path
