"""Fixed context and command fixtures for the evaluation grid.

Three contexts of increasing complexity (state-only lights; lights with
color channels; color lights plus TVs and a smart speaker) crossed with
five commands of increasing ambiguity. Fixture construction is
deterministic: the same name always yields a byte-identical context
serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from ..context import HomeContext, SchemaRegistry, document_to_context
from ..prompting import Command
from ..registries import complex_registry, medium_registry, simple_registry

__all__ = [
    "UnknownFixtureError",
    "Scenario",
    "CONTEXT_NAMES",
    "COMMAND_NAMES",
    "COMMAND_TEXTS",
    "COMMAND_DISPLAY",
    "TABLE_CELLS",
    "build_fixture",
    "fixture_registry",
    "all_cells",
]


class UnknownFixtureError(ValueError):
    """No fixture is defined under this context or command name."""


CONTEXT_NAMES = ("Simple", "Medium", "Complex")

COMMAND_TEXTS = {
    "Direct": "Turn on the light.",
    "Indirect": "Get ready for a party.",
    "Ambiguous": "I am tired.",
    "AmbiguousWork": "I am tired and I need to work.",
    "AmbiguousSleep": "I am tired and I want to sleep.",
}
COMMAND_NAMES = tuple(COMMAND_TEXTS)

# Display names used in the report; the amended ambiguous commands are
# starred variants of the base one.
COMMAND_DISPLAY = {
    "Direct": "Direct",
    "Indirect": "Indirect",
    "Ambiguous": "Ambiguous",
    "AmbiguousWork": "Ambiguous*",
    "AmbiguousSleep": "Ambiguous**",
}
_DISPLAY_TO_NAME = {v: k for k, v in COMMAND_DISPLAY.items()}

# Report row order: the 3x3 grid, then the amended commands on Complex.
TABLE_CELLS: tuple[tuple[str, str], ...] = tuple(
    (ctx, cmd) for ctx in CONTEXT_NAMES for cmd in ("Direct", "Indirect", "Ambiguous")
) + (("Complex", "AmbiguousWork"), ("Complex", "AmbiguousSleep"))

# All fixtures share the user's location; both rooms exist in every context.
_USER = {"location": "living_room"}

_FIXTURE_EPOCH = datetime(2023, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Scenario:
    """One (context, command) cell of the evaluation grid."""

    context_name: str
    command_name: str
    context: HomeContext
    command: Command

    @property
    def cell(self) -> tuple[str, str]:
        return (self.context_name, self.command_name)


def _simple_devices() -> dict:
    return {
        "bedroom": {
            "lights": {
                "bedside_lamp": {"state": "off"},
            }
        },
        "living_room": {
            "lights": {
                "overhead": {"state": "off"},
                "lamp": {"state": "off"},
            }
        },
    }


def _with_color(devices: dict) -> dict:
    for room in devices.values():
        for props in room.get("lights", {}).values():
            props.update({"r": 0, "g": 0, "b": 0})
    return devices


def _with_media(devices: dict) -> dict:
    devices["bedroom"]["tvs"] = {"bedroom_tv": {"state": "off", "volume": 20}}
    devices["living_room"]["tvs"] = {"living_room_tv": {"state": "off", "volume": 20}}
    devices["living_room"]["speakers"] = {
        "living_room_speaker": {"state": "off", "volume": 20}
    }
    return devices


_CONTEXT_BUILDERS = {
    "Simple": _simple_devices,
    "Medium": lambda: _with_color(_simple_devices()),
    "Complex": lambda: _with_media(_with_color(_simple_devices())),
}

_REGISTRY_BUILDERS = {
    "Simple": simple_registry,
    "Medium": medium_registry,
    "Complex": complex_registry,
}


def normalize_command_name(name: str) -> str:
    """Accept both internal and starred display spellings."""
    if name in COMMAND_TEXTS:
        return name
    if name in _DISPLAY_TO_NAME:
        return _DISPLAY_TO_NAME[name]
    raise UnknownFixtureError(f"unknown command fixture {name!r}")


def build_fixture(context_name: str, command_name: str) -> Scenario:
    """The exact scenario for one grid cell; raises UnknownFixtureError otherwise."""
    if context_name not in _CONTEXT_BUILDERS:
        raise UnknownFixtureError(f"unknown context fixture {context_name!r}")
    command_name = normalize_command_name(command_name)
    context = document_to_context(
        {"user": dict(_USER), "devices": _CONTEXT_BUILDERS[context_name]()}
    )
    command = Command(text=COMMAND_TEXTS[command_name], issued_at=_FIXTURE_EPOCH)
    return Scenario(
        context_name=context_name,
        command_name=command_name,
        context=context,
        command=command,
    )


def fixture_registry(context_name: str) -> SchemaRegistry:
    if context_name not in _REGISTRY_BUILDERS:
        raise UnknownFixtureError(f"unknown context fixture {context_name!r}")
    return _REGISTRY_BUILDERS[context_name]()


def all_cells() -> list[Scenario]:
    """Every report cell, in report row order."""
    return [build_fixture(ctx, cmd) for ctx, cmd in TABLE_CELLS]
