"""Structured verification results shared by every checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"
UNKNOWN = "unknown"
ASSUMED = "assumed"

VERDICTS = (PASS, FAIL, INAPPLICABLE, UNKNOWN, ASSUMED)

REPORT_SCHEMA_VERSION = 1


@dataclass
class Report:
    claim: str
    verdict: str
    detail: str = ""
    witness: Any = None
    counterexample: Any = None
    config: dict = field(default_factory=dict)
    children: list[Report] = field(default_factory=list)
    elapsed: float = 0.0

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, ASSUMED)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self, timing: bool = False) -> dict:
        """Plain-data form. Timing is left out unless asked for, so that
        repeated runs serialize identically."""
        d: dict[str, Any] = {"claim": self.claim, "verdict": self.verdict}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = _plain(self.witness)
        if self.counterexample is not None:
            d["counterexample"] = _plain(self.counterexample)
        if self.config:
            d["config"] = _plain(self.config)
        if self.children:
            d["children"] = [c.to_dict(timing) for c in self.children]
        if timing:
            d["elapsed"] = round(self.elapsed, 4)
        return d

    def lines(self, indent: int = 0) -> Iterator[str]:
        pad = "  " * indent
        s = f"{pad}[{self.verdict.upper():>12}] {self.claim}"
        if self.detail:
            s += f": {self.detail}"
        yield s
        if self.counterexample is not None:
            yield f"{pad}    counterexample: {_plain(self.counterexample)}"
        for c in self.children:
            yield from c.lines(indent + 1)


def combine(claim: str, children: list[Report], detail: str = "", **kw) -> Report:
    """Aggregate verdict: any fail wins, then unknown, then inapplicable-only."""
    verdicts = {c.verdict for c in children}
    if FAIL in verdicts:
        v = FAIL
    elif UNKNOWN in verdicts:
        v = UNKNOWN
    elif children and verdicts == {INAPPLICABLE}:
        v = INAPPLICABLE
    else:
        v = PASS
    cex = next((c.counterexample for c in children if c.verdict == FAIL), None)
    return Report(claim, v, detail=detail, children=children, counterexample=cex, **kw)


def _plain(x: Any) -> Any:
    """Convert numpy scalars, tuples and sets into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if hasattr(x, "tolist"):
        return x.tolist()
    return x
