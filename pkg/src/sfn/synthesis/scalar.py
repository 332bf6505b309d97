"""Constructions realizing a single rational probability a/b with fair splitters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from ..network import FlowNetwork, O, S, Target, parse_rational
from .errors import BadSum, DegenerateTarget, DyadicTarget, OutOfRange
from .trace import SynthesisTrace, frac_str
from .trees import knuth_yao_tree
from .wiring import Builder, close_feedback


def bits_needed(b: int) -> int:
    """Smallest n with b <= 2^n."""
    if b < 1:
        raise OutOfRange(f"denominator must be positive, got {b}")
    return (b - 1).bit_length()


def is_power_of_two(b: int) -> bool:
    return b > 0 and b & (b - 1) == 0


@dataclass(frozen=True)
class TargetProbability:
    a: int
    b: int

    def __post_init__(self):
        if self.b < 1 or not 0 <= self.a <= self.b:
            raise OutOfRange(f"need 0 <= a <= b and b >= 1, got {self.a}/{self.b}")
        g = gcd(self.a, self.b)
        object.__setattr__(self, "a", self.a // g)
        object.__setattr__(self, "b", self.b // g)

    @classmethod
    def of(cls, value) -> "TargetProbability":
        if isinstance(value, TargetProbability):
            return value
        try:
            f = parse_rational(value) if not isinstance(value, Fraction) else value
        except ValueError as exc:
            raise OutOfRange(str(exc)) from None
        if not 0 <= f <= 1:
            raise OutOfRange(f"probability must lie in [0, 1], got {f}")
        return cls(f.numerator, f.denominator)

    @property
    def n(self) -> int:
        return bits_needed(self.b)

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"


def binary_expansion(x: int, n: int) -> tuple[int, ...]:
    """Bits g_1..g_n with x / 2^n = sum g_i 2^-i."""
    if n < 0 or not 0 <= x < 1 << n:
        raise OutOfRange(f"need 0 <= x < 2^n, got x={x}, n={n}")
    return tuple((x >> (n - i)) & 1 for i in range(1, n + 1))


def _trivial(label: int, num_outputs: int) -> FlowNetwork:
    return FlowNetwork((), O(label), num_outputs)


def synth_dyadic(x: int, n: int) -> FlowNetwork:
    """Loop-free chain of ``n`` fair splitters with P(output 0) = x / 2^n.

    Splitter i (1-based) reaches terminal A_i with probability 2^-i; A_i goes
    to output 0 iff bit i of x / 2^n is set. The chain end A_{n+1} goes to
    output 1.
    """
    if n < 0 or not 0 <= x <= 1 << n:
        raise OutOfRange(f"need 0 <= x <= 2^n, got x={x}, n={n}")
    if x == 0:
        return _trivial(1, 2)
    if x == 1 << n:
        return _trivial(0, 2)
    bits = binary_expansion(x, n)
    b = Builder()
    for i in range(n):
        tail = S(i + 1) if i + 1 < n else O(1)
        b.add(O(0) if bits[i] else O(1), tail)
    return b.build(S(0), 2)


def _default_odd_wiring(even: int, second: int, third: int) -> tuple[int, int]:
    return second, third


def synth_three_way(x: int, y: int, z: int, k: int, *,
                    trace: SynthesisTrace | None = None,
                    odd_wiring: Callable[[int, int, int], tuple[int, int]] = _default_odd_wiring) -> FlowNetwork:
    """Network with at most ``k`` fair splitters and distribution (x, y, z) / 2^k.

    At each level with an odd pair, the extra splitter hangs on the smaller
    odd output and sends half of it into the larger one. ``odd_wiring`` picks
    the two labels the extra splitter feeds; it exists so tests can inject a
    broken variant.
    """
    vals = (x, y, z)
    if k < 0 or min(vals) < 0:
        raise OutOfRange(f"need non-negative entries and level, got {vals}, k={k}")
    if sum(vals) != 1 << k:
        raise BadSum(f"{x} + {y} + {z} != 2^{k}")

    # top-down: record the reduction chain, then wire bottom-up
    levels = []
    while True:
        total = 1 << k
        if total in vals:
            base = vals.index(total)
            break
        if trace is not None:
            trace.add("level", k=k, dist=[frac_str(v, total) for v in vals])
        if all(v % 2 == 0 for v in vals):
            levels.append(None)
            vals = tuple(v // 2 for v in vals)
        else:
            even = next(i for i in range(3) if vals[i] % 2 == 0)
            o1, o2 = (i for i in range(3) if i != even)
            second, third = (o2, o1) if vals[o1] < vals[o2] else (o1, o2)
            levels.append((even, second, third))
            if trace is not None:
                trace.add("reduce", k=k, order=[even, second, third])
            sub = [0, 0, 0]
            sub[even] = vals[even] // 2
            sub[second] = (vals[second] - vals[third]) // 2
            sub[third] = vals[third]
            vals = tuple(sub)
        k -= 1

    b = Builder()
    start: Target = O(base)
    for step in reversed(levels):
        if step is None:
            continue
        even, second, third = step
        t0, t1 = odd_wiring(even, second, third)
        sid = b.add(O(t0), O(t1))
        # every edge that used to reach output `third` now enters the new splitter
        for branches in b.branches[:-1]:
            for j in (0, 1):
                if branches[j] == O(third):
                    branches[j] = S(sid)
        if start == O(third):
            start = S(sid)
    return b.build(start, 3)


def synth_optimal(target, *, odd_wiring=_default_odd_wiring) -> tuple[FlowNetwork, SynthesisTrace]:
    """At most n fair splitters for a/b with b <= 2^n (feedback closes output 2)."""
    t = TargetProbability.of(target)
    n = t.n
    trace = SynthesisTrace("optimal", n)
    if t.a in (0, t.b) or is_power_of_two(t.b):
        net = synth_dyadic(t.a, n)
        trace.add("dyadic", x=t.a, n=n)
    else:
        x, y, z = t.a, t.b - t.a, (1 << n) - t.b
        trace.add("open", dist=[frac_str(v, 1 << n) for v in (x, y, z)])
        net = close_feedback(synth_three_way(x, y, z, n, trace=trace, odd_wiring=odd_wiring), 2)
        trace.add("feedback", label=2)
    trace.splitter_count = net.size
    return net, trace


def open_three_way(target) -> FlowNetwork:
    """The pre-feedback three-output network used by :func:`synth_optimal`."""
    t = TargetProbability.of(target)
    n = t.n
    return synth_three_way(t.a, t.b - t.a, (1 << n) - t.b, n)


def open_network(target, method: str) -> FlowNetwork:
    """Three-output network a feedback method builds before output 2 is closed.

    Defined whenever the method performs feedback: every 0 < a < b for the
    size-relaxed ladder, non-dyadic b for the other two.
    """
    t = TargetProbability.of(target)
    if not 0 < t.a < t.b or (method != "size-relaxed" and is_power_of_two(t.b)):
        raise DyadicTarget(f"{t} needs no feedback with method {method!r}")
    if method == "optimal":
        return open_three_way(t)
    if method == "size-relaxed":
        n = t.n
        ends = [_route(ai, ci) for ai, ci in zip(binary_expansion(t.a, n), binary_expansion(t.b - t.a, n))]
        return _ladder_network(n, ends)[0]
    if method == "latency-oriented":
        return _latency_open(t)[1]
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# size-relaxed construction and the universal probability generator

_MERGE_OUTPUTS = {"B1": (0, 1), "B2": (0, 2), "B3": (1, 2)}


def _ladder_network(n: int, endpoints: Sequence[str]) -> tuple[FlowNetwork, FlowNetwork]:
    """Ladder A_1..A_{n+1} feeding merge splitters; returns (open, closed).

    ``endpoints[i]`` is where A_{i+1} connects: one of B1, B2, B3, out2.
    A_{n+1} always connects to output 2. Unused merge splitters are omitted.
    """
    b = Builder()
    ladder = [b.add() for _ in range(n)]
    merge = {}
    for name in ("B1", "B2", "B3"):
        if name in endpoints:
            lo, hi = _MERGE_OUTPUTS[name]
            merge[name] = b.add(O(lo), O(hi))

    def node(name: str) -> Target:
        return O(2) if name == "out2" else S(merge[name])

    for i, sid in enumerate(ladder):
        tail = S(ladder[i + 1]) if i + 1 < n else O(2)
        b.set(sid, node(endpoints[i]), tail)
    start = S(ladder[0]) if n else O(2)
    opened = b.build(start, 3)
    return opened, close_feedback(opened, 2)


def _route(ai: int, ci: int) -> str:
    if ai and ci:
        return "B1"
    if ai:
        return "B2"
    if ci:
        return "B3"
    return "out2"


def synth_size_relaxed(target) -> tuple[FlowNetwork, SynthesisTrace]:
    """At most n + 3 fair splitters, expected latency at most 6 * 2^n / b."""
    t = TargetProbability.of(target)
    if not 0 < t.a < t.b:
        raise OutOfRange(f"need 0 < a < b, got {t}")
    n = t.n
    a_bits = binary_expansion(t.a, n)
    c_bits = binary_expansion(t.b - t.a, n)
    endpoints = [_route(ai, ci) for ai, ci in zip(a_bits, c_bits)]
    _, net = _ladder_network(n, endpoints)
    trace = SynthesisTrace("size-relaxed", n)
    trace.add("expansion", a="".join(map(str, a_bits)), c="".join(map(str, c_bits)))
    trace.add("connections", targets=[f"A{i + 1}->{e}" for i, e in enumerate(endpoints)] + [f"A{n + 1}->out2"])
    trace.add("feedback", label=2)
    trace.splitter_count = net.size
    return net, trace


@dataclass(frozen=True)
class Router:
    """Deterministic node: all tokens leave by ``one`` if the control bit is 1, else ``zero``."""

    control: str  # "a" or "c"
    bit: int  # 1-based position in the bit vector
    one: str
    zero: str


@dataclass(frozen=True)
class UpgTemplate:
    """Size-relaxed skeleton with a two-level router in front of every A_i.

    ``entry[i]`` names the router A_{i+1} feeds; router names map to
    :class:`Router` records in ``routers``. Terminal names are B1, B2, B3 and
    out2.
    """

    n: int
    entry: tuple[str, ...]
    routers: dict

    def resolve(self, i: int, a_bits: Sequence[int], c_bits: Sequence[int]) -> str:
        name = self.entry[i]
        while name in self.routers:
            r = self.routers[name]
            bit = (a_bits if r.control == "a" else c_bits)[r.bit - 1]
            name = r.one if bit else r.zero
        return name


def synth_upg(n: int) -> UpgTemplate:
    if n < 1:
        raise OutOfRange("UPG needs at least one bit")
    routers = {}
    entry = []
    for i in range(1, n + 1):
        top, left, right = f"a{i}", f"c{i}L", f"c{i}R"
        routers[top] = Router("a", i, one=left, zero=right)
        routers[left] = Router("c", i, one="B1", zero="B2")
        routers[right] = Router("c", i, one="B3", zero="out2")
        entry.append(top)
    return UpgTemplate(n, tuple(entry), routers)


def upg_instantiate(template: UpgTemplate, a_bits: Sequence[int], c_bits: Sequence[int]) -> FlowNetwork:
    """Resolve the routers for the given control bits; P(output 0) = a / (a + c)."""
    a_bits, c_bits = tuple(int(v) for v in a_bits), tuple(int(v) for v in c_bits)
    if len(a_bits) != template.n or len(c_bits) != template.n:
        raise OutOfRange(f"bit vectors must have length {template.n}")
    if any(v not in (0, 1) for v in a_bits + c_bits):
        raise OutOfRange("bit vectors must contain only 0 and 1")
    if not any(a_bits) and not any(c_bits):
        raise DegenerateTarget("a = c = 0 has no defined probability")
    endpoints = [template.resolve(i, a_bits, c_bits) for i in range(template.n)]
    return _ladder_network(template.n, endpoints)[1]


# ---------------------------------------------------------------------------


def _latency_open(t: TargetProbability):
    if not 0 < t.a < t.b:
        raise OutOfRange(f"need 0 < a < b, got {t}")
    if is_power_of_two(t.b):
        raise DyadicTarget(f"{t} is dyadic; use synth_dyadic")
    n = t.n
    probs = [Fraction(t.a, 1 << n), Fraction(t.b - t.a, 1 << n), Fraction((1 << n) - t.b, 1 << n)]
    _, atoms, opened = knuth_yao_tree(probs)
    return atoms, opened


def synth_latency_oriented(target) -> tuple[FlowNetwork, SynthesisTrace]:
    """Knuth-Yao tree for (a, b - a, 2^n - b) / 2^n with output 2 fed back."""
    t = TargetProbability.of(target)
    n = t.n
    atoms, opened = _latency_open(t)
    net = close_feedback(opened, 2)
    trace = SynthesisTrace("latency-oriented", n)
    trace.add("open", dist=[frac_str(t.a, 1 << n), frac_str(t.b - t.a, 1 << n), frac_str((1 << n) - t.b, 1 << n)])
    trace.add("atoms", atoms=[[str(x) for x in group] for group in atoms.atoms])
    trace.add("feedback", label=2)
    trace.splitter_count = net.size
    return net, trace


def adversarial_network(n: int) -> tuple[FlowNetwork, list[tuple[Fraction, Fraction, Fraction]]]:
    """Three-output network built by always hanging the next splitter on the largest output.

    The new splitter forwards both halves to the other two outputs, so each
    step adds at least 1/3 to the expected latency. Returns the open network
    and the distribution after each step.
    """
    if n < 1:
        raise OutOfRange("need at least one splitter")
    b = Builder()
    b.add(O(0), O(1))
    start = S(0)
    dist = [Fraction(1, 2), Fraction(1, 2), Fraction(0)]
    history = [tuple(dist)]
    for _ in range(n - 1):
        x = max(range(3), key=lambda i: (dist[i], -i))
        y, z = (i for i in range(3) if i != x)
        sid = b.add(O(y), O(z))
        for branches in b.branches[:-1]:
            for j in (0, 1):
                if branches[j] == O(x):
                    branches[j] = S(sid)
        dist[y] += dist[x] / 2
        dist[z] += dist[x] / 2
        dist[x] = Fraction(0)
        history.append(tuple(dist))
    return b.build(start, 3), history


METHODS = {
    "optimal": synth_optimal,
    "size-relaxed": synth_size_relaxed,
    "latency-oriented": synth_latency_oriented,
}


def synthesize(target, method: str = "optimal") -> tuple[FlowNetwork, SynthesisTrace]:
    """Dispatch by method name.

    Trivial targets, and dyadic targets for the latency-oriented method, use
    the loop-free chain.
    """
    t = TargetProbability.of(target)
    if method not in METHODS and method != "dyadic":
        raise ValueError(f"unknown method {method!r}")
    fallback = t.a in (0, t.b) or (method == "latency-oriented" and is_power_of_two(t.b))
    if method == "dyadic" or (method != "optimal" and fallback):
        if not is_power_of_two(t.b):
            raise OutOfRange(f"{t} is not dyadic")
        n = t.n
        trace = SynthesisTrace("dyadic", n)
        net = synth_dyadic(t.a, n)
        trace.add("dyadic", x=t.a, n=n)
        trace.splitter_count = net.size
        return net, trace
    return METHODS[method](t)
