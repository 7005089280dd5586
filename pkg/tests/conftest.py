from __future__ import annotations

import pytest

from hearth.context import SchemaRegistry, parse_context

# The canonical two-room home used across the suite: one light in the
# bedroom, two lights and a TV in the living room, user in the living room.
TWO_ROOM_TEXT = """\
{
  "user": {
    "location": "living_room"
  },
  "devices": {
    "bedroom": {
      "lights": {
        "bedside_lamp": {
          "state": "off"
        }
      }
    },
    "living_room": {
      "lights": {
        "overhead": {
          "state": "on"
        },
        "lamp": {
          "state": "off"
        }
      },
      "tvs": {
        "living_room_tv": {
          "state": "off",
          "volume": 20
        }
      }
    }
  }
}"""

TWO_ROOM_REGISTRY_DOC = {
    "lights": {"state": {"kind": "switch"}},
    "tvs": {
        "state": {"kind": "switch"},
        "volume": {"kind": "integer", "min": 0, "max": 100},
    },
}


@pytest.fixture
def two_room_context():
    return parse_context(TWO_ROOM_TEXT)


@pytest.fixture
def two_room_registry():
    return SchemaRegistry.from_document(TWO_ROOM_REGISTRY_DOC)


def pytest_runtest_logreport(report):
    # One visible verdict line per acceptance criterion.
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "setup" and report.skipped:
        outcome = "SKIP"
    elif report.when == "call":
        outcome = "PASS" if report.passed else "FAIL"
    else:
        return
    name = report.nodeid.split("::")[-1]
    print(f"\n[acceptance] {outcome}: {name}", flush=True)
