"""Flow-network data model: splitters, labeled outputs, validation and I/O.

Probabilities are ``fractions.Fraction`` throughout, which keeps every value
in lowest terms with an arbitrary-precision numerator and denominator.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

HALF = Fraction(1, 2)

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class NetworkFormatError(ValueError):
    """Raised when a network document cannot be parsed or violates the schema."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None,
                 column: int | None = None):
        self.field = field
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{'; '.join(where)}: " if where else ""
        super().__init__(prefix + message)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction. Decimals are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational of the form 'p/q': {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Target:
    """Where an edge leads: a splitter (``kind == "s"``) or an output label (``"o"``)."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("s", "o"):
            raise ValueError(f"target kind must be 's' or 'o', got {self.kind!r}")
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError(f"target index must be a non-negative int, got {self.index!r}")

    @classmethod
    def splitter(cls, index: int) -> "Target":
        return cls("s", index)

    @classmethod
    def output(cls, label: int) -> "Target":
        return cls("o", label)

    @classmethod
    def parse(cls, text: str) -> "Target":
        m = re.fullmatch(r"([so]):(\d+)", text.strip()) if isinstance(text, str) else None
        if m is None:
            raise ValueError(f"target must look like 's:<id>' or 'o:<label>', got {text!r}")
        return cls(m.group(1), int(m.group(2)))

    @property
    def is_output(self) -> bool:
        return self.kind == "o"

    @property
    def is_splitter(self) -> bool:
        return self.kind == "s"

    def __str__(self) -> str:
        return f"{self.kind}:{self.index}"


def S(index: int) -> Target:
    return Target("s", index)


def O(label: int) -> Target:  # noqa: E743
    return Target("o", label)


@dataclass(frozen=True)
class Splitter:
    id: int
    bias: Fraction
    branch0: Target
    branch1: Target

    def __post_init__(self):
        object.__setattr__(self, "bias", Fraction(self.bias))
        if not 0 < self.bias < 1:
            raise ValueError(f"splitter {self.id}: bias must lie strictly in (0, 1), got {self.bias}")

    @property
    def branches(self) -> tuple[tuple[Target, Fraction], tuple[Target, Fraction]]:
        """Both outgoing edges with their probabilities."""
        return (self.branch0, self.bias), (self.branch1, 1 - self.bias)


@dataclass(frozen=True)
class FlowNetwork:
    """Directed graph of splitters with a start edge and ``num_outputs`` labels.

    Splitters are stored sorted by id and ids must be dense in
    ``[0, len(splitters))``. Targets are *not* checked here so that broken
    networks can still be built and diagnosed with :func:`validate`.
    """

    splitters: tuple[Splitter, ...]
    start: Target
    num_outputs: int

    def __post_init__(self):
        ordered = tuple(sorted(self.splitters, key=lambda s: s.id))
        if [s.id for s in ordered] != list(range(len(ordered))):
            raise ValueError("splitter ids must be dense in [0, n)")
        object.__setattr__(self, "splitters", ordered)
        if self.num_outputs < 1:
            raise ValueError("num_outputs must be >= 1")

    @property
    def size(self) -> int:
        return len(self.splitters)

    def __len__(self) -> int:
        return len(self.splitters)

    def __getitem__(self, index: int) -> Splitter:
        return self.splitters[index]

    def __iter__(self) -> Iterator[Splitter]:
        return iter(self.splitters)

    def reachable(self) -> list[int]:
        """Ids of splitters reachable from the start edge, sorted."""
        seen: set[int] = set()
        stack = [self.start]
        while stack:
            t = stack.pop()
            if not t.is_splitter or t.index in seen or t.index >= len(self.splitters):
                continue
            seen.add(t.index)
            sp = self.splitters[t.index]
            stack.extend((sp.branch0, sp.branch1))
        return sorted(seen)

    def with_biases(self, biases: dict[int, Fraction]) -> "FlowNetwork":
        """Copy of the network with some splitter biases replaced."""
        splitters = tuple(
            Splitter(s.id, biases.get(s.id, s.bias), s.branch0, s.branch1) for s in self.splitters
        )
        return FlowNetwork(splitters, self.start, self.num_outputs)


def fair(id: int, branch0: Target, branch1: Target) -> Splitter:
    return Splitter(id, HALF, branch0, branch1)


@dataclass(frozen=True)
class Distribution:
    """Exact output distribution, one probability per label, summing to 1."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("distribution must have at least one entry")
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError(f"probabilities must lie in [0, 1]: {probs}")
        if sum(probs) != 1:
            raise ValueError(f"probabilities must sum to 1, got {sum(probs)}")

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        return cls(tuple(parse_rational(p) for p in text.split(",")))

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, index: int) -> Fraction:
        return self.probs[index]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.probs)

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(p) for p in self.probs) + ")"


@dataclass(frozen=True)
class ValidationReport:
    unreachable: tuple[int, ...] = ()
    traps: tuple[int, ...] = ()
    dangling: tuple[str, ...] = ()
    loop_free: bool = True

    @property
    def ok(self) -> bool:
        return not self.traps and not self.dangling

    def __bool__(self) -> bool:
        return self.ok

    def render(self) -> str:
        lines = [f"valid: {'yes' if self.ok else 'no'}", f"loop_free: {str(self.loop_free).lower()}"]
        if self.unreachable:
            lines.append("unreachable splitters (ignored): " + ", ".join(map(str, self.unreachable)))
        if self.traps:
            lines.append("trap splitters (no path to any output): " + ", ".join(map(str, self.traps)))
        for d in self.dangling:
            lines.append(f"dangling reference: {d}")
        return "\n".join(lines)


class InvalidNetwork(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("network failed validation:\n" + report.render())


def _dangling(network: FlowNetwork) -> list[str]:
    out = []
    n = len(network.splitters)

    def bad(t: Target) -> bool:
        return t.index >= (n if t.is_splitter else network.num_outputs)

    if bad(network.start):
        out.append(f"start -> {network.start}")
    for sp in network.splitters:
        for name, t in (("branch0", sp.branch0), ("branch1", sp.branch1)):
            if bad(t):
                out.append(f"splitter {sp.id}.{name} -> {t}")
    return out


def _has_cycle(network: FlowNetwork, nodes: Iterable[int]) -> bool:
    nodes = set(nodes)
    indeg = {i: 0 for i in nodes}
    for i in nodes:
        for t in (network[i].branch0, network[i].branch1):
            if t.is_splitter and t.index in nodes:
                indeg[t.index] += 1
    queue = deque(i for i, d in indeg.items() if d == 0)
    removed = 0
    while queue:
        i = queue.popleft()
        removed += 1
        for t in (network[i].branch0, network[i].branch1):
            if t.is_splitter and t.index in nodes:
                indeg[t.index] -= 1
                if indeg[t.index] == 0:
                    queue.append(t.index)
    return removed != len(nodes)


def validate(network: FlowNetwork) -> ValidationReport:
    """Structural diagnostics; never raises."""
    dangling = _dangling(network)
    n = len(network.splitters)

    def ok(t: Target) -> bool:
        return t.index < (n if t.is_splitter else network.num_outputs)

    reach = set()
    stack = [network.start] if ok(network.start) else []
    while stack:
        t = stack.pop()
        if t.is_output or t.index in reach:
            continue
        reach.add(t.index)
        stack.extend(b for b in (network[t.index].branch0, network[t.index].branch1) if ok(b))

    # reverse search from splitters that hit an output directly
    preds: dict[int, list[int]] = {i: [] for i in range(n)}
    exits = set()
    for sp in network.splitters:
        for t in (sp.branch0, sp.branch1):
            if not ok(t):
                continue
            if t.is_output:
                exits.add(sp.id)
            else:
                preds[t.index].append(sp.id)
    live = set(exits)
    stack = list(exits)
    while stack:
        i = stack.pop()
        for p in preds[i]:
            if p not in live:
                live.add(p)
                stack.append(p)
    traps = sorted(i for i in reach if i not in live)
    return ValidationReport(
        unreachable=tuple(sorted(set(range(n)) - reach)),
        traps=tuple(traps),
        dangling=tuple(dangling),
        loop_free=not _has_cycle(network, reach),
    )


def require_valid(network: FlowNetwork) -> ValidationReport:
    report = validate(network)
    if not report.ok:
        raise InvalidNetwork(report)
    return report


# ---------------------------------------------------------------------------
# serialization


def to_document(network: FlowNetwork) -> dict:
    return {
        "num_outputs": network.num_outputs,
        "start": str(network.start),
        "splitters": [
            {"id": s.id, "bias": format_rational(s.bias), "branch0": str(s.branch0), "branch1": str(s.branch1)}
            for s in network.splitters
        ],
    }


def serialize(network: FlowNetwork) -> str:
    """Canonical JSON text: splitters sorted by id, rationals in lowest terms."""
    return json.dumps(to_document(network), indent=2) + "\n"


def _field_target(value, path: str) -> Target:
    try:
        return Target.parse(value)
    except ValueError as exc:
        raise NetworkFormatError(str(exc), field=path) from None


def from_document(doc) -> FlowNetwork:
    if not isinstance(doc, dict):
        raise NetworkFormatError("document must be an object")
    for key in ("num_outputs", "start", "splitters"):
        if key not in doc:
            raise NetworkFormatError("missing required field", field=key)
    extra = set(doc) - {"num_outputs", "start", "splitters"}
    if extra:
        raise NetworkFormatError(f"unknown field(s) {sorted(extra)}", field=sorted(extra)[0])
    m = doc["num_outputs"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise NetworkFormatError(f"must be a positive integer, got {m!r}", field="num_outputs")
    start = _field_target(doc["start"], "start")
    records = doc["splitters"]
    if not isinstance(records, list):
        raise NetworkFormatError("must be a list", field="splitters")

    splitters = []
    for pos, rec in enumerate(records):
        path = f"splitters[{pos}]"
        if not isinstance(rec, dict):
            raise NetworkFormatError("splitter record must be an object", field=path)
        missing = {"id", "bias", "branch0", "branch1"} - set(rec)
        if missing:
            raise NetworkFormatError(f"missing {sorted(missing)}", field=path)
        sid = rec["id"]
        if not isinstance(sid, int) or isinstance(sid, bool) or sid < 0:
            raise NetworkFormatError(f"id must be a non-negative integer, got {sid!r}", field=f"{path}.id")
        try:
            bias = parse_rational(rec["bias"])
        except ValueError as exc:
            raise NetworkFormatError(str(exc), field=f"{path}.bias") from None
        if not 0 < bias < 1:
            raise NetworkFormatError(f"bias must lie strictly in (0, 1), got {bias}", field=f"{path}.bias")
        splitters.append(Splitter(sid, bias, _field_target(rec["branch0"], f"{path}.branch0"),
                                  _field_target(rec["branch1"], f"{path}.branch1")))

    ids = sorted(s.id for s in splitters)
    if ids != list(range(len(ids))):
        raise NetworkFormatError(f"splitter ids must be exactly 0..{len(ids) - 1}, got {ids}", field="splitters")
    n = len(splitters)
    by_id = {s.id: s for s in splitters}

    def check(t: Target, path: str):
        if t.is_splitter and t.index >= n:
            raise NetworkFormatError(f"references splitter {t.index} but only {n} splitter(s) exist", field=path)
        if t.is_output and t.index >= m:
            raise NetworkFormatError(f"references output {t.index} but num_outputs is {m}", field=path)

    check(start, "start")
    for pos, rec in enumerate(records):
        sp = by_id[rec["id"]]
        check(sp.branch0, f"splitters[{pos}].branch0")
        check(sp.branch1, f"splitters[{pos}].branch1")
    return FlowNetwork(tuple(splitters), start, m)


def deserialize(text: str) -> FlowNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return from_document(doc)


# ---------------------------------------------------------------------------
# graph export


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(network: FlowNetwork, annotations: Distribution | Sequence[Fraction] | None = None,
           name: str = "flow") -> str:
    """Render the network as a Graphviz ``digraph``.

    Splitters are circles labeled with their bias, outputs are boxes labeled
    with their index (and exact probability when ``annotations`` is given).
    """
    lines = [f"digraph {name} {{", "  rankdir=TB;", '  start [shape=point, label=""];']
    for sp in network.splitters:
        lines.append(f"  s{sp.id} [shape=circle, label={_quote(format_rational(sp.bias))}];")
    used = sorted({t.index for sp in network.splitters for t in (sp.branch0, sp.branch1) if t.is_output}
                  | ({network.start.index} if network.start.is_output else set()))
    labels = range(network.num_outputs) if annotations is not None else used
    for k in labels:
        text = str(k)
        if annotations is not None:
            text += f": {format_rational(annotations[k])}"
        lines.append(f"  o{k} [shape=box, label={_quote(text)}];")
    lines.append(f"  start -> {network.start.kind}{network.start.index};")
    for sp in network.splitters:
        for t, p in sp.branches:
            lines.append(f"  s{sp.id} -> {t.kind}{t.index} [label={_quote(format_rational(p))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "HALF", "Distribution", "FlowNetwork", "InvalidNetwork", "NetworkFormatError", "O", "S", "Splitter",
    "Target", "ValidationReport", "deserialize", "fair", "format_rational", "from_document",
    "parse_rational", "require_valid", "serialize", "to_document", "to_dot", "validate",
]
