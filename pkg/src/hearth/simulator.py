"""Ground-truth device state, atomic change application, and device adapters.

The simulator holds the home's current context and applies validated
change sets all-or-nothing under a single-writer lock. Devices may be
bound to adapters: ``hue_group`` speaks the light-bridge group-action
dialect (PUT /groups/{id}/action), ``smart_plug`` a minimal plug dialect
(PUT /plug/{id}), and ``in_memory`` is plain storage with no wire format.
A loopback :class:`SimulatedBridge` implements both network dialects over
real HTTP so wire payloads are testable byte-for-byte.

Each change carries the old value it expects; if the stored value moved
since the proposal was made, application fails with StaleChangeError and
the stored state is left untouched.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Iterable

import requests

from .context import HomeContext, PropertyValue, Room
from .processing import Change, ChangeSet

__all__ = [
    "StaleChangeError",
    "UnboundDeviceError",
    "UnsupportedPropertyError",
    "TransportError",
    "AdapterBinding",
    "WireCommand",
    "hue_group_payload",
    "smart_plug_payload",
    "apply_changes",
    "HomeSimulator",
    "SimulatedBridge",
    "load_bindings",
]


class StaleChangeError(RuntimeError):
    """A change's expected old value no longer matches stored state."""


class UnboundDeviceError(RuntimeError):
    """A change targets a device that has no adapter binding."""


class UnsupportedPropertyError(RuntimeError):
    """The adapter dialect has no mapping for this property."""


class TransportError(RuntimeError):
    """The adapter endpoint could not be reached or refused the command."""


@dataclass(frozen=True)
class AdapterBinding:
    """Binds one device path to an adapter.

    ``address`` is a base URL for network adapters (the simulated bridge or
    real hardware) or a local identifier; ``group_id`` applies to hue_group
    bindings only. For smart plugs, ``plug_id`` names the plug on its
    endpoint (defaults to the device name).
    """

    room: str
    device_type: str
    device: str
    kind: str
    address: str = ""
    group_id: int | None = None
    plug_id: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("hue_group", "smart_plug", "in_memory"):
            raise ValueError(f"unknown adapter kind {self.kind!r}")
        if self.kind == "hue_group" and self.group_id is None:
            raise ValueError("hue_group binding requires group_id")

    @property
    def path(self) -> tuple[str, str, str]:
        return (self.room, self.device_type, self.device)


@dataclass(frozen=True)
class WireCommand:
    """One HTTP-shaped command an adapter sends to its device endpoint."""

    method: str
    path: str
    body: str


# hue group-action dialect: context property -> (wire key, encoder).
_HUE_GROUP_FIELDS = {
    "state": ("on", lambda v: v == "on"),
    "brightness": ("bri", int),
    "effect": ("effect", str),
}
# Fixed key order in group-action bodies.
_HUE_KEY_ORDER = ("on", "bri", "effect")


def hue_group_payload(changes: Iterable[Change], group_id: int) -> WireCommand:
    """Build the single group-action command for one light group.

    Only on/brightness/effect have wire mappings; color channels are not
    part of this dialect and raise UnsupportedPropertyError.
    """
    fields: dict[str, Any] = {}
    for change in changes:
        mapping = _HUE_GROUP_FIELDS.get(change.property)
        if mapping is None:
            raise UnsupportedPropertyError(
                f"property {change.property!r} has no group-action mapping"
            )
        key, encode = mapping
        fields[key] = encode(change.new)
    body = {key: fields[key] for key in _HUE_KEY_ORDER if key in fields}
    return WireCommand(
        method="PUT",
        path=f"/groups/{group_id}/action",
        body=json.dumps(body),
    )


def smart_plug_payload(changes: Iterable[Change], plug_id: str) -> WireCommand:
    """Build the plug command; plugs understand only on/off state."""
    state: str | None = None
    for change in changes:
        if change.property != "state":
            raise UnsupportedPropertyError(
                f"property {change.property!r} has no plug mapping"
            )
        state = str(change.new)
    if state is None:
        raise UnsupportedPropertyError("plug command needs a state change")
    return WireCommand(method="PUT", path=f"/plug/{plug_id}", body=json.dumps({"state": state}))


def apply_changes(context: HomeContext, changes: Iterable[Change]) -> HomeContext:
    """Fold changes into a context, returning a new context.

    Pure function: the input context is never mutated. Raises
    StaleChangeError when a change's old value does not match.
    """
    rooms = {
        name: Room(
            name=name,
            devices={
                t: dict(by_name) for t, by_name in room.devices.items()
            },
        )
        for name, room in context.rooms.items()
    }
    for change in changes:
        room = rooms.get(change.room)
        by_name = room.devices.get(change.device_type) if room else None
        device = by_name.get(change.device) if by_name else None
        if device is None:
            raise StaleChangeError(f"device {change.path} is not in the context")
        current = device.properties.get(change.property)
        if current != change.old:
            raise StaleChangeError(
                f"{change.path}: expected {change.old!r}, stored value is {current!r}"
            )
        props = dict(device.properties)
        props[change.property] = change.new
        by_name[change.device] = replace(device, properties=props)
    return HomeContext(user=context.user, rooms=rooms)


class HomeSimulator:
    """Holds the home's state and pushes applied changes to bound adapters.

    apply_changeset calls are serialized by an internal lock (single
    writer); reads return immutable snapshots and never block behind a
    writer for longer than one state fold.
    """

    def __init__(
        self,
        context: HomeContext,
        bindings: Iterable[AdapterBinding] = (),
        implicit_in_memory: bool = True,
        transport_timeout: float = 5.0,
    ) -> None:
        self._lock = threading.Lock()
        self._context = context
        self._bindings: dict[tuple[str, str, str], AdapterBinding] = {}
        for binding in bindings:
            if binding.path in self._bindings:
                raise ValueError(f"duplicate binding for {binding.path}")
            self._bindings[binding.path] = binding
        self._implicit_in_memory = implicit_in_memory
        self._timeout = transport_timeout
        self.last_wire_commands: tuple[WireCommand, ...] = ()

    @property
    def context(self) -> HomeContext:
        return self._context

    def binding_for(self, room: str, device_type: str, device: str) -> AdapterBinding:
        binding = self._bindings.get((room, device_type, device))
        if binding is None:
            if self._implicit_in_memory:
                return AdapterBinding(
                    room=room, device_type=device_type, device=device, kind="in_memory"
                )
            raise UnboundDeviceError(f"no adapter binding for {room}.{device_type}.{device}")
        return binding

    def apply_changeset(self, cs: ChangeSet) -> HomeContext:
        """Apply all changes atomically and emit adapter wire commands.

        Either every change lands or none does: stale values, unbound
        devices, unmappable properties, and transport failures all abort
        before the stored state is replaced.
        """
        with self._lock:
            new_context = apply_changes(self._context, cs.changes)
            wires = self._build_wire_commands(cs.changes)
            for address, command in wires:
                self._send(address, command)
            self._context = new_context
            self.last_wire_commands = tuple(command for _, command in wires)
            return new_context

    def _build_wire_commands(
        self, changes: Iterable[Change]
    ) -> list[tuple[str, WireCommand]]:
        # One command per touched adapter: hue groups merge all their
        # changes into a single group action, plugs get one command each.
        hue_groups: dict[tuple[str, int], list[Change]] = {}
        plugs: dict[tuple[str, str], list[Change]] = {}
        order: list[tuple[str, tuple]] = []
        for change in changes:
            binding = self.binding_for(change.room, change.device_type, change.device)
            if binding.kind == "in_memory":
                continue
            if binding.kind == "hue_group":
                key = (binding.address, binding.group_id or 0)
                if key not in hue_groups:
                    hue_groups[key] = []
                    order.append(("hue_group", key))
                hue_groups[key].append(change)
            else:
                plug_id = binding.plug_id or binding.device
                key = (binding.address, plug_id)
                if key not in plugs:
                    plugs[key] = []
                    order.append(("smart_plug", key))
                plugs[key].append(change)
        commands: list[tuple[str, WireCommand]] = []
        for kind, key in order:
            if kind == "hue_group":
                address, group_id = key
                commands.append((address, hue_group_payload(hue_groups[key], group_id)))
            else:
                address, plug_id = key
                commands.append((address, smart_plug_payload(plugs[key], plug_id)))
        return commands

    def _send(self, address: str, command: WireCommand) -> None:
        url = address.rstrip("/") + command.path
        try:
            resp = requests.request(
                command.method,
                url,
                data=command.body.encode("utf-8"),
                headers={"Content-Type": "application/json"},
                timeout=self._timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"{command.method} {url}: {exc}") from exc
        if resp.status_code >= 400:
            raise TransportError(f"{command.method} {url}: HTTP {resp.status_code}")

    def read_adapter_state(self, binding: AdapterBinding) -> dict[str, PropertyValue]:
        """Current property map as the adapter reports it.

        Network adapters are queried over HTTP and translated back into
        context properties; in_memory bindings read the stored context.
        """
        if binding.kind == "in_memory":
            device = self._context.device(binding.room, binding.device_type, binding.device)
            if device is None:
                raise UnboundDeviceError(f"no stored device at {binding.path}")
            return dict(device.properties)
        if binding.kind == "hue_group":
            doc = self._get(binding.address, f"/groups/{binding.group_id}")
            action = doc.get("action", {})
            props: dict[str, PropertyValue] = {}
            if "on" in action:
                props["state"] = "on" if action["on"] else "off"
            if "bri" in action:
                props["brightness"] = action["bri"]
            if "effect" in action:
                props["effect"] = action["effect"]
            return props
        plug_id = binding.plug_id or binding.device
        doc = self._get(binding.address, f"/plug/{plug_id}")
        return {"state": doc["state"]}

    def _get(self, address: str, path: str) -> dict[str, Any]:
        url = address.rstrip("/") + path
        try:
            resp = requests.get(url, timeout=self._timeout)
        except requests.RequestException as exc:
            raise TransportError(f"GET {url}: {exc}") from exc
        if resp.status_code >= 400:
            raise TransportError(f"GET {url}: HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise TransportError(f"GET {url}: non-JSON response") from exc


def load_bindings(path: str) -> list[AdapterBinding]:
    """Read an adapter bindings file: a JSON list of binding objects."""
    with open(path, encoding="utf-8") as fp:
        doc = json.load(fp)
    if not isinstance(doc, list):
        raise ValueError("bindings file must be a JSON list")
    bindings = []
    for entry in doc:
        bindings.append(
            AdapterBinding(
                room=entry["room"],
                device_type=entry["device_type"],
                device=entry["device"],
                kind=entry["kind"],
                address=entry.get("address", ""),
                group_id=entry.get("group_id"),
                plug_id=entry.get("plug_id"),
            )
        )
    return bindings


class _BridgeState:
    def __init__(self) -> None:
        self.groups: dict[int, dict[str, Any]] = {}
        self.plugs: dict[str, dict[str, Any]] = {}
        self.received: list[WireCommand] = []
        self.lock = threading.Lock()


class _BridgeHandler(BaseHTTPRequestHandler):
    state: _BridgeState

    def log_message(self, format: str, *args: Any) -> None:
        pass

    def _reply(self, code: int, doc: Any) -> None:
        data = json.dumps(doc).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_PUT(self) -> None:
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length).decode("utf-8")
        parts = [p for p in self.path.split("/") if p]
        with self.state.lock:
            self.state.received.append(WireCommand(method="PUT", path=self.path, body=body))
            if len(parts) == 3 and parts[0] == "groups" and parts[2] == "action":
                try:
                    gid = int(parts[1])
                    fields = json.loads(body)
                except ValueError:
                    self._reply(400, {"error": "bad group action"})
                    return
                group = self.state.groups.setdefault(gid, {})
                group.update(fields)
                self._reply(200, [{"success": {f"/groups/{gid}/action": fields}}])
                return
            if len(parts) == 2 and parts[0] == "plug":
                try:
                    fields = json.loads(body)
                except ValueError:
                    self._reply(400, {"error": "bad plug body"})
                    return
                if not isinstance(fields, dict) or fields.get("state") not in ("on", "off"):
                    self._reply(400, {"error": "plug accepts state on/off"})
                    return
                self.state.plugs[parts[1]] = {"state": fields["state"]}
                self._reply(200, {"ok": True})
                return
        self._reply(404, {"error": "unknown path"})

    def do_GET(self) -> None:
        parts = [p for p in self.path.split("/") if p]
        with self.state.lock:
            if len(parts) == 2 and parts[0] == "groups":
                try:
                    gid = int(parts[1])
                except ValueError:
                    self._reply(400, {"error": "bad group id"})
                    return
                if gid not in self.state.groups:
                    self._reply(404, {"error": "no such group"})
                    return
                self._reply(200, {"action": dict(self.state.groups[gid])})
                return
            if len(parts) == 2 and parts[0] == "plug":
                plug = self.state.plugs.get(parts[1])
                if plug is None:
                    self._reply(404, {"error": "no such plug"})
                    return
                self._reply(200, dict(plug))
                return
        self._reply(404, {"error": "unknown path"})


class SimulatedBridge:
    """Loopback HTTP listener speaking the group-action and plug dialects.

    Stores whatever it is told and records every received command verbatim,
    so tests can assert exact wire bytes and read state back.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0) -> None:
        self.state = _BridgeState()
        handler = type("BoundBridgeHandler", (_BridgeHandler,), {"state": self.state})
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def received(self) -> list[WireCommand]:
        with self.state.lock:
            return list(self.state.received)

    def seed_group(self, group_id: int, **fields: Any) -> None:
        with self.state.lock:
            self.state.groups[group_id] = dict(fields)

    def seed_plug(self, plug_id: str, state: str) -> None:
        with self.state.lock:
            self.state.plugs[plug_id] = {"state": state}

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "SimulatedBridge":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
