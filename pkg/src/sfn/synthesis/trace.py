from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class SynthesisTrace:
    """Record of how a network was built.

    ``steps`` holds plain dicts so the trace serializes directly; fractions
    are stored as ``"p/q"`` strings with the denominator the construction
    actually used (``"2/8"`` stays ``"2/8"``).
    """

    method: str
    n: int
    steps: list[dict[str, Any]] = field(default_factory=list)
    splitter_count: int = 0

    def add(self, kind: str, **data) -> None:
        self.steps.append({"kind": kind, **data})

    def of_kind(self, kind: str) -> list[dict[str, Any]]:
        return [s for s in self.steps if s["kind"] == kind]

    def to_dict(self) -> dict[str, Any]:
        return {"method": self.method, "n": self.n, "splitter_count": self.splitter_count, "steps": self.steps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"method: {self.method}", f"n: {self.n}", f"splitters: {self.splitter_count}"]
        for step in self.steps:
            rest = ", ".join(f"{k}={_fmt(v)}" for k, v in step.items() if k != "kind")
            lines.append(f"  {step['kind']}: {rest}")
        return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, (list, tuple)):
        return "{" + ", ".join(_fmt(v) for v in value) + "}"
    return str(value)


def frac_str(num: int, den: int) -> str:
    return f"{num}/{den}" if num else "0"
