"""hearth: natural-language smart home control through a language model.

The pipeline: structured home context and a user command become a
four-segment prompt; a completion backend proposes new device state; the
proposal is parsed, validated against per-device-type schemas, and diffed
into an explicit change set; changes apply atomically to the home's state
and fan out to device adapters. An evaluation harness measures response
quality and latency over a fixed scenario grid, and an HTTP service plus
dashboard run the loop live with optional human review.
"""

from .context import (
    Device,
    DeviceSchema,
    HomeContext,
    PropertySchema,
    Room,
    SchemaRegistry,
    UserContext,
    ValidationReport,
    Violation,
    ViolationKind,
    parse_context,
    serialize_context,
    validate_context,
)
from .gateway import BackendConfig, Completion, complete, mock_rules
from .processing import (
    Change,
    ChangeSet,
    DroppedField,
    ValidationPolicy,
    diff_oracle,
    extract_payload,
    parse_proposal,
    validate_and_diff,
)
from .prompting import Command, Prompt, build_prompt, estimate_prompt_size
from .simulator import AdapterBinding, HomeSimulator, SimulatedBridge, WireCommand

__version__ = "0.1.0"

__all__ = [
    "Device",
    "DeviceSchema",
    "HomeContext",
    "PropertySchema",
    "Room",
    "SchemaRegistry",
    "UserContext",
    "ValidationReport",
    "Violation",
    "ViolationKind",
    "parse_context",
    "serialize_context",
    "validate_context",
    "BackendConfig",
    "Completion",
    "complete",
    "mock_rules",
    "Change",
    "ChangeSet",
    "DroppedField",
    "ValidationPolicy",
    "diff_oracle",
    "extract_payload",
    "parse_proposal",
    "validate_and_diff",
    "Command",
    "Prompt",
    "build_prompt",
    "estimate_prompt_size",
    "AdapterBinding",
    "HomeSimulator",
    "SimulatedBridge",
    "WireCommand",
    "__version__",
]
