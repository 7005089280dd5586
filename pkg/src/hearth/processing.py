"""Turning raw model text into a validated set of device-state changes.

Models wrap their JSON in prose ("Sure! Here are the changes: ..."), echo
full state or send only the subtree they changed, and sometimes invent
fields that no device has. This module extracts the first balanced JSON
object from the response, normalizes whichever of the accepted shapes
arrived into a partial overlay, and diffs that overlay against current
state under schema and mutability rules. Violations are data: depending on
policy they are either dropped field-by-field or poison the whole proposal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .context import (
    DocumentSyntaxError,
    HomeContext,
    PropertyValue,
    SchemaRegistry,
    StructureError,
    ViolationKind,
    device_path,
)

__all__ = [
    "NoPayloadError",
    "StructureMismatchError",
    "RawPayload",
    "ProposalOverlay",
    "Change",
    "DroppedField",
    "ChangeSet",
    "ValidationPolicy",
    "extract_payload",
    "parse_proposal",
    "validate_and_diff",
    "diff_oracle",
]


class NoPayloadError(ValueError):
    """No balanced JSON object could be found in the completion text."""


class StructureMismatchError(ValueError):
    """Two contexts do not share the same room/device/property structure."""


@dataclass(frozen=True)
class RawPayload:
    """The first balanced top-level object found in a completion.

    Offsets are character positions into the original completion text, so
    the surrounding prose can be reconstructed.
    """

    text: str
    start_offset: int
    end_offset: int


def extract_payload(completion_text: str) -> RawPayload:
    """Scan left to right for the first balanced top-level ``{...}`` object.

    String literals and escape sequences are honored, so braces inside
    quoted values do not confuse the scan.
    """
    start = completion_text.find("{")
    if start == -1:
        raise NoPayloadError("no opening brace in completion text")
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(completion_text)):
        ch = completion_text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                end = i + 1
                return RawPayload(
                    text=completion_text[start:end], start_offset=start, end_offset=end
                )
    raise NoPayloadError("no balanced closing brace in completion text")


class ProposalShape(str, Enum):
    FULL_CONTEXT = "full_context"
    DEVICES_ONLY = "devices_only"
    DEVICES_SUBTREE = "devices_subtree"


@dataclass(frozen=True)
class ProposalOverlay:
    """A proposal normalized to a partial devices tree.

    ``devices`` nests room -> device_type -> device -> property map and may
    cover any subset of the home. ``user`` carries the proposed user block
    verbatim when the payload included one, so attempts to alter it can be
    reported downstream.
    """

    devices: dict[str, dict[str, dict[str, dict[str, Any]]]]
    user: dict[str, Any] | None
    shape: ProposalShape


def _check_subtree(devices: Any, where: str) -> None:
    """Validate room -> type -> device -> scalar-property nesting."""
    if not isinstance(devices, dict):
        raise StructureError(f"{where} must be an object of rooms")
    for room_name, room_doc in devices.items():
        if not isinstance(room_doc, dict):
            raise StructureError(f"room {room_name!r} must map to an object of device types")
        for type_name, type_doc in room_doc.items():
            if not isinstance(type_doc, dict):
                raise StructureError(
                    f"device type {room_name}.{type_name} must map to an object of devices"
                )
            for dev_name, props in type_doc.items():
                if not isinstance(props, dict):
                    raise StructureError(
                        f"device {device_path(room_name, type_name, dev_name)} must map "
                        "to a property object"
                    )
                for prop, value in props.items():
                    if isinstance(value, (dict, list)):
                        raise StructureError(
                            f"property {device_path(room_name, type_name, dev_name)}.{prop} "
                            "must be a scalar"
                        )


def parse_proposal(raw: RawPayload) -> ProposalOverlay:
    """Parse an extracted payload into a device overlay.

    Three shapes are accepted: a full context document (user + devices), a
    devices-only document, or a bare devices subtree holding just the
    changed rooms/devices. Anything else is a StructureError. Extra
    top-level keys next to a ``devices`` block (models like to add
    commentary fields) are ignored.
    """
    try:
        doc = json.loads(raw.text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise StructureError("proposal must be a JSON object")

    if "devices" in doc and isinstance(doc["devices"], dict):
        devices = doc["devices"]
        _check_subtree(devices, "'devices' block")
        user = doc.get("user")
        if user is not None and not isinstance(user, dict):
            raise StructureError("'user' block must be an object")
        shape = ProposalShape.FULL_CONTEXT if user is not None else ProposalShape.DEVICES_ONLY
        return ProposalOverlay(devices=devices, user=user, shape=shape)

    _check_subtree(doc, "proposal")
    return ProposalOverlay(devices=doc, user=None, shape=ProposalShape.DEVICES_SUBTREE)


@dataclass(frozen=True)
class Change:
    """One validated property change.

    ``old`` is None when the proposal adds a schema-known property the
    device did not previously carry.
    """

    room: str
    device_type: str
    device: str
    property: str
    old: PropertyValue | None
    new: PropertyValue

    @property
    def path(self) -> str:
        return f"{device_path(self.room, self.device_type, self.device)}.{self.property}"

    def to_document(self) -> dict[str, Any]:
        return {
            "room": self.room,
            "device_type": self.device_type,
            "device": self.device,
            "property": self.property,
            "old": self.old,
            "new": self.new,
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "Change":
        return cls(
            room=doc["room"],
            device_type=doc["device_type"],
            device=doc["device"],
            property=doc["property"],
            old=doc["old"],
            new=doc["new"],
        )


@dataclass(frozen=True)
class DroppedField:
    """A proposal entry rejected by validation: where, and why."""

    path: str
    kind: ViolationKind

    def to_document(self) -> dict[str, Any]:
        return {"path": self.path, "kind": self.kind.value}

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "DroppedField":
        return cls(path=doc["path"], kind=ViolationKind(doc["kind"]))


@dataclass(frozen=True)
class ChangeSet:
    """Validated changes in overlay document order, plus what was rejected."""

    changes: tuple[Change, ...] = ()
    dropped: tuple[DroppedField, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.changes

    def to_document(self) -> dict[str, Any]:
        return {
            "changes": [c.to_document() for c in self.changes],
            "dropped": [d.to_document() for d in self.dropped],
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "ChangeSet":
        return cls(
            changes=tuple(Change.from_document(c) for c in doc.get("changes", [])),
            dropped=tuple(DroppedField.from_document(d) for d in doc.get("dropped", [])),
        )


class ValidationPolicy(str, Enum):
    """How violations affect the rest of the proposal.

    ``drop_invalid_fields`` salvages valid changes and reports the rest;
    ``reject_all_on_violation`` empties the change list if anything is wrong.
    """

    DROP_INVALID_FIELDS = "drop_invalid_fields"
    REJECT_ALL_ON_VIOLATION = "reject_all_on_violation"


def validate_and_diff(
    current: HomeContext,
    overlay: ProposalOverlay,
    reg: SchemaRegistry,
    pol: ValidationPolicy = ValidationPolicy.DROP_INVALID_FIELDS,
) -> ChangeSet:
    """Diff a proposal overlay against current state under schema rules.

    Walks the overlay in document order. Values equal to current state are
    ignored. Unknown rooms and device names are InventedField; device types
    missing from the registry are UnknownDeviceType; value failures map to
    WrongKind / OutOfRange / DisallowedValue; changes to immutable
    properties or to the user block are ImmutableViolation. Switch values
    are lowercased and whole-number floats coerced before comparison.
    """
    changes: list[Change] = []
    dropped: list[DroppedField] = []

    for room_name, room_doc in overlay.devices.items():
        room = current.rooms.get(room_name)
        if room is None:
            dropped.append(DroppedField(path=room_name, kind=ViolationKind.INVENTED_FIELD))
            continue
        for type_name, type_doc in room_doc.items():
            schema = reg.get(type_name)
            if schema is None:
                dropped.append(
                    DroppedField(
                        path=f"{room_name}.{type_name}",
                        kind=ViolationKind.UNKNOWN_DEVICE_TYPE,
                    )
                )
                continue
            by_name = room.devices.get(type_name, {})
            for dev_name, props in type_doc.items():
                path = device_path(room_name, type_name, dev_name)
                device = by_name.get(dev_name)
                if device is None:
                    dropped.append(DroppedField(path=path, kind=ViolationKind.INVENTED_FIELD))
                    continue
                for prop, value in props.items():
                    full = f"{path}.{prop}"
                    pschema = schema.properties.get(prop)
                    if pschema is None:
                        dropped.append(
                            DroppedField(path=full, kind=ViolationKind.INVENTED_FIELD)
                        )
                        continue
                    normalized = pschema.normalize(value)
                    old = device.properties.get(prop)
                    if prop in device.properties and normalized == old:
                        continue
                    kind = pschema.check(normalized)
                    if kind is not None:
                        dropped.append(DroppedField(path=full, kind=kind))
                        continue
                    if not pschema.mutable:
                        dropped.append(
                            DroppedField(path=full, kind=ViolationKind.IMMUTABLE_VIOLATION)
                        )
                        continue
                    changes.append(
                        Change(
                            room=room_name,
                            device_type=type_name,
                            device=dev_name,
                            property=prop,
                            old=old,
                            new=normalized,
                        )
                    )

    if overlay.user is not None:
        current_user = current.user.to_document()
        keys = list(overlay.user) + [k for k in current_user if k not in overlay.user]
        for key in keys:
            if overlay.user.get(key) != current_user.get(key):
                dropped.append(
                    DroppedField(path=f"user.{key}", kind=ViolationKind.IMMUTABLE_VIOLATION)
                )

    if pol is ValidationPolicy.REJECT_ALL_ON_VIOLATION and dropped:
        return ChangeSet(changes=(), dropped=tuple(dropped))
    return ChangeSet(changes=tuple(changes), dropped=tuple(dropped))


def diff_oracle(current: HomeContext, proposed_full: HomeContext) -> ChangeSet:
    """Brute-force diff of two structurally identical contexts.

    Enumerates every (room, type, device, property) and emits a change
    wherever values differ. Test oracle only: it performs no schema
    validation and requires both contexts to share the exact same
    room/device/property structure.
    """
    if _structure_signature(current) != _structure_signature(proposed_full):
        raise StructureMismatchError("contexts do not share the same structure")
    changes: list[Change] = []
    for room_name, type_name, dev_name, prop, old in current.iter_properties():
        new = proposed_full.rooms[room_name].devices[type_name][dev_name].properties[prop]
        if new != old:
            changes.append(
                Change(
                    room=room_name,
                    device_type=type_name,
                    device=dev_name,
                    property=prop,
                    old=old,
                    new=new,
                )
            )
    return ChangeSet(changes=tuple(changes), dropped=())


def _structure_signature(c: HomeContext) -> list[tuple[str, str, str, tuple[str, ...]]]:
    sig = []
    for room_name, room in sorted(c.rooms.items()):
        for type_name, by_name in sorted(room.devices.items()):
            for dev_name, dev in sorted(by_name.items()):
                sig.append((room_name, type_name, dev_name, tuple(sorted(dev.properties))))
    return sig
