"""Structured home context: user state plus per-room device state.

The context document is JSON with two top-level blocks. The ``user`` block
carries immutable facts about the user (at minimum ``location``); the
``devices`` block nests room -> device type -> device -> property map.
Contexts are immutable value objects: applying changes means constructing
a new context.

Property constraints (kind, integer range, allowed text values, mutability)
live in a :class:`SchemaRegistry`, not on the values themselves. Parsing is
deliberately permissive about property content so that invalid fields can be
observed and reported by :func:`validate_context` instead of vanishing at
the parse step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

__all__ = [
    "DocumentSyntaxError",
    "StructureError",
    "SchemaError",
    "PropertyValue",
    "PropertySchema",
    "DeviceSchema",
    "SchemaRegistry",
    "Device",
    "Room",
    "UserContext",
    "HomeContext",
    "ViolationKind",
    "Violation",
    "ValidationReport",
    "parse_context",
    "serialize_context",
    "validate_context",
    "context_to_document",
    "document_to_context",
    "devices_block",
    "user_block",
]

# Scalar property value. Valid kinds are narrower (switch "on"/"off",
# integers, text); floats and booleans survive parsing so the validator
# can flag them rather than a parser silently rewriting them.
PropertyValue = str | int | float | bool

SWITCH_ON = "on"
SWITCH_OFF = "off"

_KINDS = ("switch", "integer", "text")


class DocumentSyntaxError(ValueError):
    """The input is not a well-formed JSON document."""


class StructureError(ValueError):
    """The document is well-formed JSON but does not have the expected nesting."""


class SchemaError(ValueError):
    """A property or device schema violates its own invariants."""


def _is_scalar(value: Any) -> bool:
    return isinstance(value, (str, int, float, bool))


@dataclass(frozen=True)
class PropertySchema:
    """Constraint set for one device property.

    ``min_value``/``max_value`` apply to integer properties, ``allowed``
    to text properties. ``mutable`` marks whether a proposal may change it.
    """

    name: str
    kind: str
    min_value: int | None = None
    max_value: int | None = None
    allowed: tuple[str, ...] | None = None
    mutable: bool = True

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise SchemaError(f"unknown property kind {self.kind!r} for {self.name!r}")
        if self.kind == "integer" and self.min_value is not None and self.max_value is not None:
            if self.min_value > self.max_value:
                raise SchemaError(
                    f"property {self.name!r}: lower bound {self.min_value} exceeds "
                    f"upper bound {self.max_value}"
                )
        if self.kind == "text" and self.allowed is not None and len(self.allowed) == 0:
            raise SchemaError(f"property {self.name!r}: allowed set must be non-empty")

    def check(self, value: PropertyValue) -> "ViolationKind | None":
        """Return the violation a value would incur, or None if it satisfies the schema."""
        if self.kind == "switch":
            if not isinstance(value, str) or value not in (SWITCH_ON, SWITCH_OFF):
                return ViolationKind.WRONG_KIND
            return None
        if self.kind == "integer":
            coerced = _as_whole_number(value)
            if coerced is None:
                return ViolationKind.WRONG_KIND
            if self.min_value is not None and coerced < self.min_value:
                return ViolationKind.OUT_OF_RANGE
            if self.max_value is not None and coerced > self.max_value:
                return ViolationKind.OUT_OF_RANGE
            return None
        if not isinstance(value, str):
            return ViolationKind.WRONG_KIND
        if self.allowed is not None and value not in self.allowed:
            return ViolationKind.DISALLOWED_VALUE
        return None

    def normalize(self, value: PropertyValue) -> PropertyValue:
        """Canonicalize a proposed value before comparison.

        Switch values are lowercased; whole-number floats become ints.
        Values that cannot be normalized are returned unchanged (they will
        fail :meth:`check`).
        """
        if self.kind == "switch" and isinstance(value, str):
            return value.lower()
        if self.kind == "integer":
            coerced = _as_whole_number(value)
            if coerced is not None:
                return coerced
        return value


def _as_whole_number(value: Any) -> int | None:
    """Integer view of a value, or None. Booleans and fractional floats are rejected."""
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return None


@dataclass(frozen=True)
class DeviceSchema:
    """Property constraints for one device type (e.g. all ``lights``)."""

    device_type: str
    properties: dict[str, PropertySchema]

    def __post_init__(self) -> None:
        for name, prop in self.properties.items():
            if name != prop.name:
                raise SchemaError(
                    f"device type {self.device_type!r}: property keyed {name!r} "
                    f"but named {prop.name!r}"
                )


@dataclass(frozen=True)
class SchemaRegistry:
    """All device-type schemas known to the home."""

    schemas: dict[str, DeviceSchema] = field(default_factory=dict)

    def get(self, device_type: str) -> DeviceSchema | None:
        return self.schemas.get(device_type)

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "SchemaRegistry":
        """Build a registry from its document form.

        The document maps device_type -> property name -> constraint object
        with keys ``kind`` and optional ``min``, ``max``, ``allowed``,
        ``mutable``.
        """
        if not isinstance(doc, dict):
            raise SchemaError("registry document must be an object")
        schemas: dict[str, DeviceSchema] = {}
        for device_type, props in doc.items():
            if not isinstance(props, dict):
                raise SchemaError(f"device type {device_type!r} must map to an object")
            properties: dict[str, PropertySchema] = {}
            for name, spec in props.items():
                if not isinstance(spec, dict) or "kind" not in spec:
                    raise SchemaError(f"property {device_type}.{name} needs a 'kind'")
                allowed = spec.get("allowed")
                properties[name] = PropertySchema(
                    name=name,
                    kind=spec["kind"],
                    min_value=spec.get("min"),
                    max_value=spec.get("max"),
                    allowed=tuple(allowed) if allowed is not None else None,
                    mutable=spec.get("mutable", True),
                )
            schemas[device_type] = DeviceSchema(device_type=device_type, properties=properties)
        return cls(schemas=schemas)

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        for device_type, schema in self.schemas.items():
            props: dict[str, Any] = {}
            for name, p in schema.properties.items():
                spec: dict[str, Any] = {"kind": p.kind}
                if p.min_value is not None:
                    spec["min"] = p.min_value
                if p.max_value is not None:
                    spec["max"] = p.max_value
                if p.allowed is not None:
                    spec["allowed"] = list(p.allowed)
                spec["mutable"] = p.mutable
                props[name] = spec
            doc[device_type] = props
        return doc

    @classmethod
    def from_file(cls, path: str) -> "SchemaRegistry":
        with open(path, encoding="utf-8") as fp:
            try:
                doc = json.load(fp)
            except json.JSONDecodeError as exc:
                raise DocumentSyntaxError(f"registry file {path}: {exc}") from exc
        return cls.from_document(doc)


@dataclass(frozen=True)
class Device:
    """One device instance and its current property values."""

    name: str
    device_type: str
    properties: dict[str, PropertyValue]


@dataclass(frozen=True)
class Room:
    """Devices in one room, grouped by device type."""

    name: str
    devices: dict[str, dict[str, Device]]

    def iter_devices(self) -> Iterator[Device]:
        for by_name in self.devices.values():
            yield from by_name.values()


@dataclass(frozen=True)
class UserContext:
    """Immutable facts about the user. Never altered by a proposal."""

    location: str
    extra: dict[str, PropertyValue] = field(default_factory=dict)

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"location": self.location}
        doc.update(self.extra)
        return doc


@dataclass(frozen=True)
class HomeContext:
    """The whole home: user context plus rooms of devices."""

    user: UserContext
    rooms: dict[str, Room]

    def __post_init__(self) -> None:
        if not self.rooms:
            raise StructureError("context must contain at least one room")
        if self.user.location not in self.rooms:
            raise StructureError(
                f"user location {self.user.location!r} is not a room in the device context"
            )

    def device(self, room: str, device_type: str, name: str) -> Device | None:
        r = self.rooms.get(room)
        if r is None:
            return None
        return r.devices.get(device_type, {}).get(name)

    def iter_properties(self) -> Iterator[tuple[str, str, str, str, PropertyValue]]:
        """Yield (room, device_type, device, property, value) in document order."""
        for room_name, room in self.rooms.items():
            for type_name, by_name in room.devices.items():
                for dev_name, dev in by_name.items():
                    for prop, value in dev.properties.items():
                        yield room_name, type_name, dev_name, prop, value


class ViolationKind(str, Enum):
    UNKNOWN_DEVICE_TYPE = "UnknownDeviceType"
    INVENTED_FIELD = "InventedField"
    OUT_OF_RANGE = "OutOfRange"
    WRONG_KIND = "WrongKind"
    DISALLOWED_VALUE = "DisallowedValue"
    IMMUTABLE_VIOLATION = "ImmutableViolation"


@dataclass(frozen=True)
class Violation:
    """One schema violation at a device path.

    ``path`` is dotted ``room.device_type.device``; ``prop`` is the property
    name when the violation is property-level, None for device-level ones.
    """

    path: str
    prop: str | None
    kind: ViolationKind
    message: str = ""

    @property
    def full_path(self) -> str:
        return f"{self.path}.{self.prop}" if self.prop else self.path


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def device_path(room: str, device_type: str, device: str) -> str:
    return f"{room}.{device_type}.{device}"


def parse_context(text: str) -> HomeContext:
    """Parse a context document.

    Raises :class:`DocumentSyntaxError` for malformed JSON and
    :class:`StructureError` when the nesting is not
    user/devices -> room -> type -> device -> property map. Unknown
    properties are preserved; checking them against a registry is
    :func:`validate_context`'s job.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(str(exc)) from exc
    return document_to_context(doc)


def document_to_context(doc: Any) -> HomeContext:
    if not isinstance(doc, dict):
        raise StructureError("context document must be a JSON object")
    unknown = set(doc) - {"user", "devices"}
    if unknown:
        raise StructureError(f"unexpected top-level keys: {sorted(unknown)}")
    if "user" not in doc:
        raise StructureError("missing 'user' block")
    if "devices" not in doc:
        raise StructureError("missing 'devices' block")

    user_doc = doc["user"]
    if not isinstance(user_doc, dict):
        raise StructureError("'user' block must be an object")
    if "location" not in user_doc:
        raise StructureError("'user' block must carry a 'location'")
    location = user_doc["location"]
    if not isinstance(location, str):
        raise StructureError("'location' must be a string")
    extra: dict[str, PropertyValue] = {}
    for key, value in user_doc.items():
        if key == "location":
            continue
        if not _is_scalar(value):
            raise StructureError(f"user fact {key!r} must be a scalar")
        extra[key] = value

    devices_doc = doc["devices"]
    rooms = devices_document_to_rooms(devices_doc)
    if not rooms:
        raise StructureError("'devices' block must contain at least one room")
    return HomeContext(user=UserContext(location=location, extra=extra), rooms=rooms)


def devices_document_to_rooms(devices_doc: Any) -> dict[str, Room]:
    """Convert a devices block (room -> type -> device -> property map) to Rooms."""
    if not isinstance(devices_doc, dict):
        raise StructureError("'devices' block must be an object")
    rooms: dict[str, Room] = {}
    for room_name, room_doc in devices_doc.items():
        if not isinstance(room_doc, dict):
            raise StructureError(f"room {room_name!r} must map to an object of device types")
        by_type: dict[str, dict[str, Device]] = {}
        for type_name, type_doc in room_doc.items():
            if not isinstance(type_doc, dict):
                raise StructureError(
                    f"device type {room_name}.{type_name} must map to an object of devices"
                )
            by_name: dict[str, Device] = {}
            for dev_name, props_doc in type_doc.items():
                if not isinstance(props_doc, dict):
                    raise StructureError(
                        f"device {device_path(room_name, type_name, dev_name)} must map "
                        "to a property object"
                    )
                props: dict[str, PropertyValue] = {}
                for prop, value in props_doc.items():
                    if not _is_scalar(value):
                        raise StructureError(
                            f"property {device_path(room_name, type_name, dev_name)}.{prop} "
                            "must be a scalar"
                        )
                    props[prop] = value
                by_name[dev_name] = Device(name=dev_name, device_type=type_name, properties=props)
            by_type[type_name] = by_name
        rooms[room_name] = Room(name=room_name, devices=by_type)
    return rooms


def rooms_to_document(rooms: dict[str, Room]) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    for room_name, room in rooms.items():
        room_doc: dict[str, Any] = {}
        for type_name, by_name in room.devices.items():
            room_doc[type_name] = {
                dev_name: dict(dev.properties) for dev_name, dev in by_name.items()
            }
        doc[room_name] = room_doc
    return doc


def context_to_document(c: HomeContext) -> dict[str, Any]:
    return {"user": c.user.to_document(), "devices": rooms_to_document(c.rooms)}


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def serialize_context(c: HomeContext) -> str:
    """Canonical serialization: two-space indent, keys in insertion order.

    The output re-parses to a structurally equal context.
    """
    return _dumps(context_to_document(c))


def devices_block(c: HomeContext) -> str:
    """The devices portion alone, wrapped in its ``devices`` key."""
    return _dumps({"devices": rooms_to_document(c.rooms)})


def user_block(c: HomeContext) -> str:
    """The user portion alone, wrapped in its ``user`` key."""
    return _dumps({"user": c.user.to_document()})


def validate_context(c: HomeContext, reg: SchemaRegistry) -> ValidationReport:
    """Check every device property against the registry.

    Violations are data, not errors: the report is empty iff the context is
    schema-valid. Devices of a type absent from the registry yield one
    UnknownDeviceType violation each; properties absent from their device
    schema are InventedField; value failures are WrongKind / OutOfRange /
    DisallowedValue.
    """
    violations: list[Violation] = []
    for room_name, room in c.rooms.items():
        for type_name, by_name in room.devices.items():
            schema = reg.get(type_name)
            for dev_name, dev in by_name.items():
                path = device_path(room_name, type_name, dev_name)
                if schema is None:
                    violations.append(
                        Violation(
                            path=path,
                            prop=None,
                            kind=ViolationKind.UNKNOWN_DEVICE_TYPE,
                            message=f"device type {type_name!r} not in registry",
                        )
                    )
                    continue
                for prop, value in dev.properties.items():
                    pschema = schema.properties.get(prop)
                    if pschema is None:
                        violations.append(
                            Violation(
                                path=path,
                                prop=prop,
                                kind=ViolationKind.INVENTED_FIELD,
                                message=f"property {prop!r} not in {type_name!r} schema",
                            )
                        )
                        continue
                    kind = pschema.check(value)
                    if kind is not None:
                        violations.append(
                            Violation(
                                path=path,
                                prop=prop,
                                kind=kind,
                                message=f"value {value!r} fails {prop!r} constraints",
                            )
                        )
    return ValidationReport(violations=tuple(violations))
