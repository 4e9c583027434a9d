"""Pass/fail outcomes shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Verdict:
    """Result of a check; ``witness`` explains a failure in the scalar grammar."""

    name: str
    passed: bool
    witness: str = ""
    index: int | None = None
    details: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        out = {"check": self.name, "passed": self.passed}
        if self.witness:
            out["witness"] = self.witness
        if self.index is not None:
            out["index"] = self.index
        if self.details:
            out["details"] = self.details
        return out


def passed(name: str, **details) -> Verdict:
    return Verdict(name, True, details=details)


def failed(name: str, witness: str = "", index: int | None = None, **details) -> Verdict:
    return Verdict(name, False, witness, index, details)
