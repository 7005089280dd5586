from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from hearth.context import parse_context
from hearth.gateway import (
    AuthError,
    BackendConfig,
    CompletionTimeoutError,
    OversizeResponseError,
    TransportError,
    UnparseablePromptError,
    complete,
    in_flight_requests,
    mock_rules,
)
from hearth.prompting import Command, Prompt, build_prompt

from .conftest import TWO_ROOM_TEXT


class _FakeCompletionHandler(BaseHTTPRequestHandler):
    behavior: dict

    def log_message(self, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length) or b"{}")
        self.behavior.setdefault("requests", []).append(
            {"body": body, "auth": self.headers.get("Authorization")}
        )
        mode = self.behavior.get("mode", "ok")
        if mode == "fail_once":
            self.behavior["mode"] = "ok"
            self.send_response(500)
            self.end_headers()
            return
        if mode == "reject":
            self.send_response(401)
            self.end_headers()
            return
        if mode == "slow":
            time.sleep(self.behavior.get("delay", 1.0))
        if mode == "garbage":
            data = b"not json"
        else:
            data = json.dumps(
                {"choices": [{"text": self.behavior.get("text", '{"devices": {}}')}]}
            ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


@pytest.fixture
def fake_backend():
    behavior: dict = {}
    handler = type("Handler", (_FakeCompletionHandler,), {"behavior": behavior})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    server.handle_error = lambda *args: None  # client hangs up in the timeout test
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}/v1/completions", behavior
    server.shutdown()
    server.server_close()


def remote_config(url: str, **overrides) -> BackendConfig:
    defaults = dict(
        kind="remote",
        endpoint=url,
        model_name="test-model",
        credential_env_var="HEARTH_TEST_KEY",
        timeout=5.0,
    )
    defaults.update(overrides)
    return BackendConfig(**defaults)


@pytest.fixture
def two_room_prompt(two_room_context):
    return build_prompt(two_room_context, Command(text="Turn on the light."))


class TestConfig:
    def test_remote_requires_endpoint_model_and_credential(self):
        with pytest.raises(ValueError):
            BackendConfig(kind="remote")

    @pytest.mark.parametrize("field,value", [("timeout", 0), ("max_response_length", 0)])
    def test_positive_limits(self, field, value):
        with pytest.raises(ValueError):
            BackendConfig(kind="mock", **{field: value})

    def test_document_round_trip(self):
        cfg = remote_config("https://example.invalid/v1", stop=("\n\n",))
        assert BackendConfig.from_document(cfg.to_document()) == cfg

    def test_secret_never_serialized(self, monkeypatch):
        secret = "sk-super-secret-value-1234"
        monkeypatch.setenv("HEARTH_TEST_KEY", secret)
        cfg = remote_config("https://example.invalid/v1")
        dumped = json.dumps(cfg.to_document()) + repr(cfg) + str(cfg)
        assert secret not in dumped


class TestRemote:
    def test_missing_credential_is_auth_error(self, monkeypatch, two_room_prompt):
        monkeypatch.delenv("HEARTH_TEST_KEY", raising=False)
        cfg = remote_config("http://127.0.0.1:9/v1/completions")
        with pytest.raises(AuthError):
            complete(two_room_prompt, cfg)

    def test_successful_completion(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["text"] = '{"devices": {"bedroom": {}}}'
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        completion = complete(two_room_prompt, remote_config(url))
        assert completion.text == '{"devices": {"bedroom": {}}}'
        assert completion.latency > 0
        assert completion.backend_kind == "remote"
        sent = behavior["requests"][0]
        assert sent["body"]["model"] == "test-model"
        assert sent["body"]["prompt"] == two_room_prompt.assembled
        assert sent["auth"] == "Bearer k"

    def test_rejected_credential(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["mode"] = "reject"
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(AuthError):
            complete(two_room_prompt, remote_config(url))

    def test_connection_failure(self, monkeypatch, two_room_prompt):
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(TransportError):
            complete(two_room_prompt, remote_config("http://127.0.0.1:9/nope"))

    def test_timeout(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior.update(mode="slow", delay=1.5)
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(CompletionTimeoutError):
            complete(two_room_prompt, remote_config(url, timeout=0.3))

    def test_malformed_response(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["mode"] = "garbage"
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(TransportError):
            complete(two_room_prompt, remote_config(url))

    def test_no_retry_by_default(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["mode"] = "fail_once"
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(TransportError):
            complete(two_room_prompt, remote_config(url))

    def test_single_retry_when_enabled(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["mode"] = "fail_once"
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        completion = complete(
            two_room_prompt, remote_config(url, retry_transport_errors=True)
        )
        assert completion.text
        assert len(behavior["requests"]) == 2

    def test_oversize_response(self, monkeypatch, fake_backend, two_room_prompt):
        url, behavior = fake_backend
        behavior["text"] = "x" * 500
        monkeypatch.setenv("HEARTH_TEST_KEY", "k")
        with pytest.raises(OversizeResponseError):
            complete(two_room_prompt, remote_config(url, max_response_length=100))


class TestMock:
    def test_direct_command_turns_on_user_room_lights(self, two_room_prompt):
        completion = complete(two_room_prompt, BackendConfig(kind="mock"))
        devices = json.loads(completion.text)["devices"]
        assert devices["living_room"]["lights"]["overhead"]["state"] == "on"
        assert devices["living_room"]["lights"]["lamp"]["state"] == "on"
        assert devices["bedroom"]["lights"]["bedside_lamp"]["state"] == "off"
        assert devices["living_room"]["tvs"]["living_room_tv"]["state"] == "off"
        assert completion.backend_kind == "mock"

    def test_leaving_turns_everything_off(self, two_room_context):
        prompt = build_prompt(two_room_context, Command(text="I'm leaving"))
        devices = json.loads(mock_rules(prompt))["devices"]
        states = [
            props["state"]
            for room in devices.values()
            for devs in room.values()
            for props in devs.values()
        ]
        assert states == ["off"] * 4

    def test_unmatched_command_echoes_input(self, two_room_context):
        prompt = build_prompt(two_room_context, Command(text="do a backflip"))
        devices = json.loads(mock_rules(prompt))["devices"]
        assert devices == json.loads(TWO_ROOM_TEXT)["devices"]

    def test_party_sets_colorloop_where_effect_exists(self):
        context = parse_context(
            json.dumps(
                {
                    "user": {"location": "den"},
                    "devices": {
                        "den": {
                            "lights": {"group": {"state": "off", "effect": "none"}},
                            "plugs": {"stereo_plug": {"state": "off"}},
                        }
                    },
                }
            )
        )
        prompt = build_prompt(context, Command(text="set up for a party"))
        devices = json.loads(mock_rules(prompt))["devices"]
        assert devices["den"]["lights"]["group"]["effect"] == "colorloop"
        assert devices["den"]["lights"]["group"]["state"] == "on"
        assert devices["den"]["plugs"]["stereo_plug"]["state"] == "on"

    def test_party_sets_color_channels(self):
        from hearth.evaluation import build_fixture

        scenario = build_fixture("Medium", "Indirect")
        prompt = build_prompt(scenario.context, scenario.command)
        devices = json.loads(mock_rules(prompt))["devices"]
        lamp = devices["living_room"]["lights"]["lamp"]
        assert (lamp["r"], lamp["g"], lamp["b"]) == (255, 0, 255)
        assert lamp["state"] == "on"

    def test_sleep_rule(self):
        from hearth.evaluation import build_fixture

        scenario = build_fixture("Complex", "AmbiguousSleep")
        prompt = build_prompt(scenario.context, scenario.command)
        devices = json.loads(mock_rules(prompt))["devices"]
        assert devices["bedroom"]["lights"]["bedside_lamp"]["state"] == "on"
        assert devices["living_room"]["lights"]["overhead"]["state"] == "off"
        assert devices["living_room"]["speakers"]["living_room_speaker"]["state"] == "off"

    def test_work_rule(self):
        from hearth.evaluation import build_fixture

        scenario = build_fixture("Complex", "AmbiguousWork")
        prompt = build_prompt(scenario.context, scenario.command)
        devices = json.loads(mock_rules(prompt))["devices"]
        assert devices["living_room"]["lights"]["overhead"]["state"] == "on"
        assert devices["living_room"]["lights"]["lamp"]["state"] == "on"
        assert devices["bedroom"]["lights"]["bedside_lamp"]["state"] == "off"
        assert devices["bedroom"]["tvs"]["bedroom_tv"]["state"] == "off"
        assert devices["living_room"]["tvs"]["living_room_tv"]["state"] == "off"

    def test_determinism(self, two_room_prompt):
        assert mock_rules(two_room_prompt) == mock_rules(two_room_prompt)

    def test_latency_accounting(self, two_room_prompt):
        before = time.perf_counter()
        completion = complete(two_room_prompt, BackendConfig(kind="mock"))
        wall = time.perf_counter() - before
        assert 0 <= completion.latency <= wall + 0.001

    def test_unparseable_prompt(self):
        bogus = Prompt.assemble("hi", "there", "general", "kenobi")
        with pytest.raises(UnparseablePromptError):
            mock_rules(bogus)

    def test_in_flight_counter_settles(self, two_room_prompt):
        complete(two_room_prompt, BackendConfig(kind="mock"))
        assert in_flight_requests() == 0
