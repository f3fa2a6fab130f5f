"""Shared result and error types.

Every structure in this package is immutable after construction and every
operation is a pure function, so values can be shared freely between threads.
Exhaustive scans always walk their search space in sorted order; the witness
attached to a failing check is therefore the lexicographically first one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class StructureError(ValueError):
    """Raised when input data violates a structural invariant (unknown cell,
    non-total table, depth out of range, malformed topology)."""


class HypothesisFailure(ValueError):
    """Raised when a construction's hypothesis gate fails.

    Carries the offending item so callers can report it without parsing the
    message.
    """

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class CheckResult:
    """Boolean verdict plus the first witness of failure, if any."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def passed() -> "CheckResult":
        return CheckResult(True)

    @staticmethod
    def failed(witness: Any) -> "CheckResult":
        return CheckResult(False, witness)
