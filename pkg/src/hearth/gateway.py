"""Completion backends behind one interface.

``remote`` posts the assembled prompt to an HTTPS text-completion endpoint;
``mock`` is a deterministic rule table that stands in for the model during
tests and offline demos. Both report wall-clock round-trip latency, which
covers transmission plus inference for the remote backend.

Credentials are never stored in configs or logs: a config only names the
environment variable that holds the secret, and the value is read at call
time.
"""

from __future__ import annotations

import copy
import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterator

import requests

from .processing import extract_payload
from .prompting import COMMAND_PREFIX, FORMATTING, Prompt

__all__ = [
    "GatewayError",
    "CompletionTimeoutError",
    "AuthError",
    "TransportError",
    "OversizeResponseError",
    "UnparseablePromptError",
    "BackendConfig",
    "Completion",
    "complete",
    "mock_rules",
    "in_flight_requests",
]


class GatewayError(Exception):
    """Base class for completion-backend failures."""


class CompletionTimeoutError(GatewayError):
    """The backend did not answer within the configured timeout."""


class AuthError(GatewayError):
    """Credential missing from the environment or rejected by the backend."""


class TransportError(GatewayError):
    """Connection failure or a response the backend contract does not allow."""


class OversizeResponseError(GatewayError):
    """The response exceeds the configured maximum length."""


class UnparseablePromptError(GatewayError):
    """The mock backend could not recognize the prompt's segments."""


@dataclass(frozen=True)
class BackendConfig:
    """Which backend to call and how.

    ``credential_env_var`` names the environment variable holding the API
    secret; the secret itself never appears in a config document or log.
    """

    kind: str = "mock"
    endpoint: str | None = None
    model_name: str | None = None
    credential_env_var: str | None = None
    credential_header: str = "Authorization"
    timeout: float = 30.0
    max_response_length: int = 65536
    max_tokens: int = 1024
    stop: tuple[str, ...] | None = None
    retry_transport_errors: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("remote", "mock"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_response_length <= 0:
            raise ValueError("max_response_length must be positive")
        if self.kind == "remote":
            missing = [
                name
                for name, value in (
                    ("endpoint", self.endpoint),
                    ("model_name", self.model_name),
                    ("credential_env_var", self.credential_env_var),
                )
                if not value
            ]
            if missing:
                raise ValueError(f"remote backend config missing: {', '.join(missing)}")

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind}
        if self.kind == "remote":
            doc.update(
                endpoint=self.endpoint,
                model_name=self.model_name,
                credential_env_var=self.credential_env_var,
                credential_header=self.credential_header,
            )
        doc.update(
            timeout=self.timeout,
            max_response_length=self.max_response_length,
            max_tokens=self.max_tokens,
        )
        if self.stop is not None:
            doc["stop"] = list(self.stop)
        if self.retry_transport_errors:
            doc["retry_transport_errors"] = True
        return doc

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "BackendConfig":
        stop = doc.get("stop")
        return cls(
            kind=doc.get("kind", "mock"),
            endpoint=doc.get("endpoint"),
            model_name=doc.get("model_name"),
            credential_env_var=doc.get("credential_env_var"),
            credential_header=doc.get("credential_header", "Authorization"),
            timeout=doc.get("timeout", 30.0),
            max_response_length=doc.get("max_response_length", 65536),
            max_tokens=doc.get("max_tokens", 1024),
            stop=tuple(stop) if stop is not None else None,
            retry_transport_errors=doc.get("retry_transport_errors", False),
        )


@dataclass(frozen=True)
class Completion:
    """Raw backend text plus the measured round-trip latency in seconds."""

    text: str
    latency: float
    backend_kind: str


_in_flight = 0
_in_flight_lock = threading.Lock()


def in_flight_requests() -> int:
    """Number of complete() calls currently executing. Metrics only."""
    return _in_flight


def complete(p: Prompt, cfg: BackendConfig) -> Completion:
    """Run one completion and measure its wall-clock latency.

    Retries are off by default so the latency of a trial reflects a single
    round trip; ``retry_transport_errors`` allows one retry on connection
    failure only.
    """
    global _in_flight
    with _in_flight_lock:
        _in_flight += 1
    try:
        started = time.perf_counter()
        if cfg.kind == "mock":
            text = mock_rules(p)
        else:
            try:
                text = _remote_completion(p, cfg)
            except TransportError:
                if not cfg.retry_transport_errors:
                    raise
                text = _remote_completion(p, cfg)
        latency = time.perf_counter() - started
        if len(text) > cfg.max_response_length:
            raise OversizeResponseError(
                f"response of {len(text)} chars exceeds limit {cfg.max_response_length}"
            )
        return Completion(text=text, latency=latency, backend_kind=cfg.kind)
    finally:
        with _in_flight_lock:
            _in_flight -= 1


def _remote_completion(p: Prompt, cfg: BackendConfig) -> str:
    secret = os.environ.get(cfg.credential_env_var or "")
    if not secret:
        raise AuthError(f"environment variable {cfg.credential_env_var!r} is not set")
    if cfg.credential_header.lower() == "authorization":
        headers = {cfg.credential_header: f"Bearer {secret}"}
    else:
        headers = {cfg.credential_header: secret}
    body: dict[str, Any] = {
        "model": cfg.model_name,
        "prompt": p.assembled,
        "max_tokens": cfg.max_tokens,
    }
    if cfg.stop is not None:
        body["stop"] = list(cfg.stop)
    try:
        resp = requests.post(cfg.endpoint, json=body, headers=headers, timeout=cfg.timeout)
    except requests.Timeout as exc:
        raise CompletionTimeoutError(f"no response within {cfg.timeout}s") from exc
    except requests.RequestException as exc:
        raise TransportError(str(exc)) from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"backend rejected credential (HTTP {resp.status_code})")
    if resp.status_code >= 400:
        raise TransportError(f"backend returned HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        payload = resp.json()
        choice = payload["choices"][0]
        text = choice.get("text")
        if text is None:
            text = choice["message"]["content"]
    except (ValueError, LookupError, TypeError) as exc:
        raise TransportError(f"unexpected completion response shape: {exc}") from exc
    if not isinstance(text, str):
        raise TransportError("completion text is not a string")
    return text


# ---------------------------------------------------------------------------
# Mock backend: a fixed rule table keyed by command substring.

_LIGHT_TYPES = ("lights",)
_MEDIA_TYPES = ("tvs", "speakers")
_PLUG_TYPES = ("plugs",)

_PARTY_COLOR = {"r": 255, "g": 0, "b": 255}
_WARM_WHITE = {"r": 255, "g": 147, "b": 41}
_FULL_BRIGHTNESS = 254
_DIM_BRIGHTNESS = 64


def _for_each_device(devices: dict, types: tuple[str, ...]) -> Iterator[tuple[str, str, dict]]:
    for room_name, room in devices.items():
        for type_name, by_name in room.items():
            if type_name in types:
                for dev_name, props in by_name.items():
                    yield room_name, dev_name, props


def _set_if_present(props: dict, assignments: dict[str, Any]) -> None:
    for key, value in assignments.items():
        if key in props:
            props[key] = value


def _rule_turn_on_light(devices: dict, location: str) -> None:
    room = devices.get(location, {})
    for props in room.get("lights", {}).values():
        _set_if_present(props, {"state": "on"})


def _rule_party(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES):
        _set_if_present(props, {"state": "on", **_PARTY_COLOR, "effect": "colorloop"})
    for _, _, props in _for_each_device(devices, ("speakers",) + _PLUG_TYPES):
        _set_if_present(props, {"state": "on"})


def _rule_sleep(devices: dict, location: str) -> None:
    for room_name, room in devices.items():
        for type_name, by_name in room.items():
            for dev_name, props in by_name.items():
                is_sleep_light = type_name in _LIGHT_TYPES and (
                    "bedside" in dev_name or "bedroom" in room_name
                )
                _set_if_present(props, {"state": "on" if is_sleep_light else "off"})


def _rule_leaving(devices: dict, location: str) -> None:
    for room in devices.values():
        for by_name in room.values():
            for props in by_name.values():
                _set_if_present(props, {"state": "off"})


def _rule_work(devices: dict, location: str) -> None:
    room = devices.get(location, {})
    for props in room.get("lights", {}).values():
        _set_if_present(props, {"state": "on"})
    for _, _, props in _for_each_device(devices, _MEDIA_TYPES):
        _set_if_present(props, {"state": "off"})


def _rule_bright(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES):
        _set_if_present(
            props,
            {"state": "on", "brightness": _FULL_BRIGHTNESS, "r": 255, "g": 255, "b": 255},
        )


def _rule_groovy(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES):
        _set_if_present(props, {"state": "on", "effect": "colorloop"})
    for _, dev_name, props in _for_each_device(devices, _PLUG_TYPES):
        if "stereo" in dev_name:
            props["genre"] = "groovy"


def _rule_relax(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES):
        _set_if_present(props, {"state": "on", "brightness": _DIM_BRIGHTNESS})
    for _, _, props in _for_each_device(devices, _PLUG_TYPES):
        _set_if_present(props, {"state": "on"})


def _rule_cold(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES):
        _set_if_present(props, {"state": "on", **_WARM_WHITE})
    for _, _, props in _for_each_device(devices, _PLUG_TYPES):
        _set_if_present(props, {"state": "on"})


def _rule_home(devices: dict, location: str) -> None:
    for _, _, props in _for_each_device(devices, _LIGHT_TYPES + _PLUG_TYPES):
        _set_if_present(props, {"state": "on"})


# Checked in order; the first key contained in the lowercased command wins.
_RULES: tuple[tuple[str, Callable[[dict, str], None]], ...] = (
    ("turn on the light", _rule_turn_on_light),
    ("party", _rule_party),
    ("sleep", _rule_sleep),
    ("leaving", _rule_leaving),
    ("work", _rule_work),
    ("bright", _rule_bright),
    ("groovy", _rule_groovy),
    ("relax", _rule_relax),
    ("cold", _rule_cold),
    ("home", _rule_home),
)


def mock_rules(p: Prompt) -> str:
    """Deterministic stand-in for the model.

    Recognizes the prompt segments produced by build_prompt, applies a
    fixed rule table keyed by command substring, and returns a full devices
    document. An unmatched command echoes the input state unchanged, and
    identical prompts always yield byte-identical responses.
    """
    devices, location, command = _parse_prompt(p.assembled)
    mutated = copy.deepcopy(devices)
    lowered = command.lower()
    for key, rule in _RULES:
        if key in lowered:
            rule(mutated, location)
            break
    return json.dumps({"devices": mutated}, indent=2, ensure_ascii=False)


def _parse_prompt(text: str) -> tuple[dict, str, str]:
    """Recover (devices tree, user location, command text) from an assembled prompt."""
    devices_marker = "in JSON format: "
    at = text.find(devices_marker)
    if at == -1:
        raise UnparseablePromptError("context segment not found")
    try:
        devices_payload = extract_payload(text[at:])
    except ValueError as exc:
        raise UnparseablePromptError("device context not found") from exc
    user_start = at + devices_payload.end_offset
    try:
        user_payload = extract_payload(text[user_start:])
    except ValueError as exc:
        raise UnparseablePromptError("user context not found") from exc

    try:
        devices_doc = json.loads(devices_payload.text)
        user_doc = json.loads(user_payload.text)
        devices = devices_doc["devices"]
        location = user_doc["user"]["location"]
    except (ValueError, KeyError, TypeError) as exc:
        raise UnparseablePromptError(f"context blocks malformed: {exc}") from exc

    tail = text[user_start + user_payload.end_offset :]
    suffix = ". Change the device state as appropriate. " + FORMATTING
    start_marker = " " + COMMAND_PREFIX
    if not tail.startswith(start_marker) or not tail.endswith(suffix):
        raise UnparseablePromptError("command segment not found")
    command = tail[len(start_marker) : len(tail) - len(suffix)]
    return devices, location, command
