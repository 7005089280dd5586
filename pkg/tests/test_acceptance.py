"""Acceptance gate: one test per release criterion.

Each criterion runs at its stated tolerance; the conftest hook prints one
PASS/FAIL line per criterion. The remote-path check needs live credentials
and skips cleanly without them.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import re
import time
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from hearth.context import (
    SchemaRegistry,
    ViolationKind,
    context_to_document,
    document_to_context,
    parse_context,
    serialize_context,
)
from hearth.demo import demo_context
from hearth.evaluation import build_fixture, fixture_registry
from hearth.evaluation.cli import evalrate, evalrun, evalreport
from hearth.evaluation.reporting import aggregate
from hearth.evaluation.runner import load_records, run_matrix
from hearth.gateway import BackendConfig
from hearth.processing import (
    Change,
    ChangeSet,
    ValidationPolicy,
    diff_oracle,
    extract_payload,
    parse_proposal,
    validate_and_diff,
)
from hearth.prompting import Command, build_prompt
from hearth.registries import demo_registry
from hearth.service import Controller, EventLog, ServiceConfig, create_app, replay_events
from hearth.simulator import AdapterBinding, HomeSimulator, SimulatedBridge, WireCommand

from .conftest import TWO_ROOM_REGISTRY_DOC, TWO_ROOM_TEXT
from .contextgen import random_context

GOLDEN = Path(__file__).parent / "golden"


def test_schema_round_trip_1000_contexts():
    """1,000 randomized schema-valid contexts re-parse to equal values in <10s."""
    rng = random.Random(2023)
    started = time.perf_counter()
    for i in range(1000):
        context = random_context(rng, max_rooms=4, max_devices=4)
        assert parse_context(serialize_context(context)) == context
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"round-trip run took {elapsed:.2f}s"


def test_prompt_golden_bytes():
    """The assembled prompt is byte-identical to the committed golden file."""
    context = parse_context(TWO_ROOM_TEXT)
    prompt = build_prompt(context, Command(text="Turn on the light."))
    golden = (GOLDEN / "prompt_two_room_direct.txt").read_text(encoding="utf-8")
    assert prompt.assembled == golden
    assert prompt.assembled.startswith("You are an AI that controls a smart home.")
    assert prompt.assembled.endswith("Provide your response in JSON format.")


def test_validation_catches_invented_genre_field():
    """genre:"groovy" on the stereo is dropped as one InventedField; the valid change survives."""
    current = document_to_context(
        {
            "user": {"location": "living_room"},
            "devices": {
                "living_room": {"tvs": {"stereo": {"state": "off", "volume": 10}}}
            },
        }
    )
    registry = SchemaRegistry.from_document(TWO_ROOM_REGISTRY_DOC)
    overlay = parse_proposal(
        extract_payload(
            'Sure thing! {"living_room": {"tvs": {"stereo": {"state": "on", "genre": "groovy"}}}}'
        )
    )
    cs = validate_and_diff(current, overlay, registry, ValidationPolicy.DROP_INVALID_FIELDS)
    assert len(cs.dropped) == 1
    assert cs.dropped[0].kind is ViolationKind.INVENTED_FIELD
    assert cs.dropped[0].path == "living_room.tvs.stereo.genre"
    assert [(c.property, c.old, c.new) for c in cs.changes] == [("state", "off", "on")]


def _alternatives(prop: str, current):
    pools = {
        "state": ["on", "off"],
        "volume": [0, 55, 100],
        "r": [0, 128, 255],
        "g": [0, 128, 255],
        "b": [0, 128, 255],
    }
    return [v for v in pools[prop] if v != current]


def _exhaustive_cases(context):
    """Every single and double property mutation of a context."""
    paths = list(context.iter_properties())
    for (room, t, dev, prop, value) in paths:
        for alt in _alternatives(prop, value):
            yield [(room, t, dev, prop, alt)]
    for a, b in itertools.combinations(paths, 2):
        for alt_a in _alternatives(a[3], a[4]):
            for alt_b in _alternatives(b[3], b[4]):
                yield [
                    (a[0], a[1], a[2], a[3], alt_a),
                    (b[0], b[1], b[2], b[3], alt_b),
                ]


def test_diff_oracle_equivalence_exhaustive():
    """validate_and_diff matches the brute-force oracle on all 1- and 2-property mutations."""
    started = time.perf_counter()
    cases = [
        (parse_context(TWO_ROOM_TEXT), SchemaRegistry.from_document(TWO_ROOM_REGISTRY_DOC)),
        (build_fixture("Simple", "Direct").context, fixture_registry("Simple")),
        (build_fixture("Medium", "Direct").context, fixture_registry("Medium")),
    ]
    total = 0
    for current, registry in cases:
        assert sum(1 for _ in current.iter_properties()) <= 12
        for mutations in _exhaustive_cases(current):
            doc = context_to_document(current)
            for room, t, dev, prop, alt in mutations:
                doc["devices"][room][t][dev][prop] = alt
            proposed = document_to_context(doc)
            overlay = parse_proposal(
                extract_payload(json.dumps({"devices": doc["devices"]}))
            )
            fast = validate_and_diff(current, overlay, registry)
            oracle = diff_oracle(current, proposed)
            assert fast.dropped == ()
            assert set(fast.changes) == set(oracle.changes)
            assert len(fast.changes) == len(mutations)
            total += 1
    elapsed = time.perf_counter() - started
    assert total > 200
    assert elapsed < 30.0, f"exhaustive equivalence took {elapsed:.2f}s"


def test_wire_bit_exactness_against_simulated_bridge():
    """The colorloop change set hits the bridge as exactly one exact group action."""
    with SimulatedBridge() as bridge:
        binding = AdapterBinding(
            room="living_room",
            device_type="lights",
            device="hue_group_1",
            kind="hue_group",
            address=bridge.base_url,
            group_id=1,
        )
        sim = HomeSimulator(demo_context(), bindings=[binding])
        cs = ChangeSet(
            changes=(
                Change("living_room", "lights", "hue_group_1", "state", "off", "on"),
                Change("living_room", "lights", "hue_group_1", "effect", "none", "colorloop"),
            )
        )
        sim.apply_changeset(cs)
        assert bridge.received == [
            WireCommand(
                method="PUT",
                path="/groups/1/action",
                body='{"on": true, "effect": "colorloop"}',
            )
        ]


DEMO_COMMANDS = {
    "make it bright in here": "make_it_bright_in_here",
    "make it groovy": "make_it_groovy",
    "gotta relax": "gotta_relax",
    "I'm cold": "i_m_cold",
    "I'm leaving": "i_m_leaving",
    "I'm home": "i_m_home",
}


def test_end_to_end_mock_regression():
    """Each demo command auto-applies and lands on its committed expected state in <5s."""
    started = time.perf_counter()
    for command, slug in DEMO_COMMANDS.items():
        controller = Controller(
            context=demo_context(),
            registry=demo_registry(),
            config=ServiceConfig(context_path="unused", registry_path="unused", mode="auto"),
            event_log=EventLog(),
        )
        client = TestClient(create_app(controller))
        proposal = client.post("/command", json={"text": command}).json()
        assert proposal["status"] == "auto_applied", (command, proposal)
        state = client.get("/state").json()
        expected = json.loads((GOLDEN / "e2e_demo" / f"{slug}.json").read_text())
        assert state == expected, command
        if command == "I'm leaving":
            states = [
                props["state"]
                for room in state["devices"].values()
                for devs in room.values()
                for props in devs.values()
            ]
            assert all(s == "off" for s in states)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"mock regression took {elapsed:.2f}s"


EXPECTED_TABLE_ROWS = [
    ("Simple", "Direct"),
    ("Simple", "Indirect"),
    ("Simple", "Ambiguous"),
    ("Medium", "Direct"),
    ("Medium", "Indirect"),
    ("Medium", "Ambiguous"),
    ("Complex", "Direct"),
    ("Complex", "Indirect"),
    ("Complex", "Ambiguous"),
    ("Complex", "Ambiguous*"),
    ("Complex", "Ambiguous**"),
]


def test_harness_reproduces_table_shape(tmp_path):
    """10 mock trials over all 11 cells -> the report grid, exact to 1e-9."""
    runner = CliRunner()
    out = str(tmp_path / "results")
    result = runner.invoke(
        evalrun, ["--backend", "mock", "--trials", "10", "--cells", "all", "--out", out]
    )
    assert result.exit_code == 0, result.output
    records_path = Path(out) / "records.jsonl"
    assert len(load_records(records_path)) == 110

    # Synthetic ratings: three raters, deterministic alternating labels.
    for rater_index, rater in enumerate(["r1", "r2", "r3"]):
        result = runner.invoke(evalrate, ["--in", out, "--rater", rater])
        assert result.exit_code == 0, result.output
        review = Path(out) / f"review_{rater}.jsonl"
        filled = []
        for record_index, line in enumerate(review.read_text().splitlines()):
            doc = json.loads(line)
            doc["label"] = (record_index + rater_index) % 2
            filled.append(json.dumps(doc))
        review.write_text("\n".join(filled) + "\n")
        result = runner.invoke(evalrate, ["--in", out, "--rater", rater])
        assert result.exit_code == 0, result.output

    result = runner.invoke(evalreport, ["--in", out, "--format", "table"])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    header = re.split(r"\s{2,}", lines[0])
    assert header == ["Context", "Command", "Avg. Quality", "Avg Latency (sec)"]
    rows = [re.split(r"\s{2,}", line) for line in lines[2:]]
    assert [(r[0], r[1]) for r in rows] == EXPECTED_TABLE_ROWS
    assert all(re.fullmatch(r"\d+\.\d{2}", r[2]) for r in rows), "quality to two decimals"
    assert all(re.fullmatch(r"\d+\.\d{2}", r[3]) for r in rows)

    # Aggregation against an independent recomputation from the data file.
    records = load_records(records_path)
    report = aggregate(records)
    assert len(report.cells) == 11
    for cell in report.cells:
        labels = []
        latencies = []
        for record in records:
            if record.cell == (cell.context_name, cell.command_name):
                labels.extend(record.labels.values())
                latencies.append(record.latency)
        assert len(labels) == 30
        assert abs(cell.avg_quality - sum(labels) / len(labels)) <= 1e-9
        assert abs(cell.avg_latency - sum(latencies) / len(latencies)) <= 1e-9
        displayed = next(
            r for r in rows if (r[0], r[1]) == (cell.context_name, cell.command_display)
        )
        assert displayed[2] == f"{cell.avg_quality:.2f}"


def test_replay_determinism(tmp_path):
    """Replaying the event log reconstructs final state and statuses exactly."""
    log_path = tmp_path / "events.jsonl"
    controller = Controller(
        context=demo_context(),
        registry=demo_registry(),
        config=ServiceConfig(context_path="unused", registry_path="unused", mode="review"),
        event_log=EventLog(log_path),
    )
    party = controller.handle_command("get ready for a party")
    groovy = controller.handle_command("make it groovy")
    stale = controller.handle_command("I'm home")
    controller.resolve_proposal(party.id, "approve")
    controller.resolve_proposal(groovy.id, "reject")
    resolved = controller.resolve_proposal(stale.id, "approve")  # raced: now stale
    assert resolved.status == "failed"
    controller.handle_command("do a backflip")  # left pending
    leaving = controller.handle_command("I'm leaving")
    controller.resolve_proposal(leaving.id, "approve")
    controller.close()

    from hearth.service import read_events

    final, statuses = replay_events(read_events(log_path), demo_context())
    assert serialize_context(final) == serialize_context(controller.get_state())
    assert statuses == {p.id: p.status for p in controller.get_history()}


_REMOTE_READY = bool(
    os.environ.get("HEARTH_COMPLETIONS_URL") and os.environ.get("HEARTH_API_KEY")
)


@pytest.mark.skipif(
    not _REMOTE_READY,
    reason="set HEARTH_COMPLETIONS_URL and HEARTH_API_KEY to run the live remote check",
)
def test_remote_path_structural_check():
    """One live (Simple, Direct) trial: measured latency, handled outcome."""
    cfg = BackendConfig(
        kind="remote",
        endpoint=os.environ["HEARTH_COMPLETIONS_URL"],
        model_name=os.environ.get("HEARTH_MODEL", "text-davinci-003"),
        credential_env_var="HEARTH_API_KEY",
        timeout=60.0,
    )
    records = run_matrix([build_fixture("Simple", "Direct")], trials=1, cfg=cfg)
    assert len(records) == 1
    record = records[0]
    if record.error is None:
        assert record.latency > 0
        assert record.changeset is not None
    else:
        known = (
            "CompletionTimeoutError",
            "AuthError",
            "TransportError",
            "OversizeResponseError",
            "NoPayloadError",
            "DocumentSyntaxError",
            "StructureError",
        )
        assert record.error.startswith(known), record.error
