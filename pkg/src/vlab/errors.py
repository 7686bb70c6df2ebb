"""Exception types and the shared iteration-cap knob."""

from __future__ import annotations

import os


class ParseError(ValueError):
    """Malformed literal.  ``pos`` is the offending character offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        if text:
            message = f"{message} at position {pos}: {text!r}"
        super().__init__(message)


class PreconditionError(ValueError):
    """An operation was called outside its domain."""


class IterationCapError(RuntimeError):
    """A loop that is guaranteed to terminate hit its safety cap.

    This indicates a bug rather than bad input; ``state`` holds a diagnostic.
    """

    def __init__(self, message: str, state: object = None):
        self.state = state
        super().__init__(message)


def iteration_cap(default: int) -> int:
    """``default``, unless VLAB_MAX_ITERS overrides every cap."""
    value = os.environ.get("VLAB_MAX_ITERS")
    return int(value) if value else default
