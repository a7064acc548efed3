"""Three-valued check results."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable


class Status(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.

    ``TRUE`` and ``FALSE`` always carry a witness (a certificate or a
    counterexample); ``UNKNOWN`` always carries a reason.
    """

    status: Status
    witness: Any = None
    reason: str = ""
    details: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.status is Status.UNKNOWN:
            if not self.reason:
                raise ValueError("Unknown verdict needs a reason")
        elif self.witness is None:
            raise ValueError(f"{self.status.value} verdict needs a witness")

    @classmethod
    def true(cls, witness: Any, reason: str = "", details=()) -> "Verdict":
        return cls(Status.TRUE, witness, reason, tuple(details))

    @classmethod
    def false(cls, witness: Any, reason: str = "", details=()) -> "Verdict":
        return cls(Status.FALSE, witness, reason, tuple(details))

    @classmethod
    def unknown(cls, reason: str, details=()) -> "Verdict":
        return cls(Status.UNKNOWN, None, reason, tuple(details))

    @property
    def is_true(self) -> bool:
        return self.status is Status.TRUE

    @property
    def is_false(self) -> bool:
        return self.status is Status.FALSE

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    @property
    def conclusive(self) -> bool:
        return self.status is not Status.UNKNOWN

    def __bool__(self):
        raise TypeError("Verdict is three-valued; test .is_true / .is_false")

    def summary(self) -> str:
        text = self.status.value
        if self.reason:
            text += f" ({self.reason})"
        return text


def conjunction(verdicts: Iterable[Verdict], what: str = "") -> Verdict:
    """False on the first False, else Unknown if any Unknown, else True."""
    collected = []
    unknown = None
    for v in verdicts:
        collected.append(v)
        if v.is_false:
            return Verdict.false(v.witness, v.reason or what, details=collected)
        if v.is_unknown and unknown is None:
            unknown = v
    if unknown is not None:
        return Verdict.unknown(unknown.reason, details=collected)
    return Verdict.true([v.witness for v in collected], what, details=collected)
