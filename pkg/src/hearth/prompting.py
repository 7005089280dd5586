"""Prompt assembly for the smart-home completion request.

A prompt has four segments in fixed order: framing (the controller's role),
context (serialized device and user state), command (the user's words), and
formatting (response format request). Segments are joined with single
spaces; assembly is a pure function, so identical inputs produce
byte-identical prompts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .context import HomeContext, devices_block, user_block

__all__ = [
    "EmptyCommandError",
    "Command",
    "Prompt",
    "build_prompt",
    "estimate_prompt_size",
    "FRAMING",
    "FORMATTING",
]

FRAMING = "You are an AI that controls a smart home."
CONTEXT_TEMPLATE = (
    "Here is the state of the devices in the home, in JSON format: "
    "{devices} Here is information about the user: {user}"
)
COMMAND_TEMPLATE = "The user issues the command: {command}. Change the device state as appropriate."
FORMATTING = "Provide your response in JSON format."

# Fixed prefix of the command segment; the command text starts right after it.
COMMAND_PREFIX = "The user issues the command: "


class EmptyCommandError(ValueError):
    """The command text is empty after trimming whitespace."""


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Command:
    """A natural-language user command."""

    text: str
    issued_at: datetime = field(default_factory=_utcnow)

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise EmptyCommandError("command text must be non-empty")


@dataclass(frozen=True)
class Prompt:
    framing: str
    context_segment: str
    command_segment: str
    formatting: str
    assembled: str

    @classmethod
    def assemble(
        cls, framing: str, context_segment: str, command_segment: str, formatting: str
    ) -> "Prompt":
        return cls(
            framing=framing,
            context_segment=context_segment,
            command_segment=command_segment,
            formatting=formatting,
            assembled=" ".join((framing, context_segment, command_segment, formatting)),
        )


def build_prompt(c: HomeContext, cmd: Command) -> Prompt:
    """Assemble the four-segment prompt for a context and command.

    The command text is inserted verbatim, punctuation included; no escaping
    is applied. The serialized device and user blocks appear verbatim inside
    the context segment.
    """
    if not cmd.text.strip():
        raise EmptyCommandError("command text must be non-empty")
    context_segment = CONTEXT_TEMPLATE.format(devices=devices_block(c), user=user_block(c))
    command_segment = COMMAND_TEMPLATE.format(command=cmd.text)
    return Prompt.assemble(FRAMING, context_segment, command_segment, FORMATTING)


def estimate_prompt_size(p: Prompt) -> int:
    """Character count of the assembled prompt. Grows with context size."""
    return len(p.assembled)
