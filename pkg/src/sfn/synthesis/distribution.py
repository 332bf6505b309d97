"""Networks for rational distributions over m >= 2 outputs."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from ..network import FlowNetwork, O, S, Splitter, Target, format_rational, parse_rational
from .errors import OutOfRange, TreeMismatch
from .scalar import bits_needed, synth_optimal
from .trace import SynthesisTrace, frac_str
from .trees import WeightedTree, huffman_merges, huffman_tree, knuth_yao_tree
from .wiring import close_feedback


@dataclass(frozen=True)
class TargetDistribution:
    """{a_1/b, ..., a_m/b} with b minimized."""

    numerators: tuple[int, ...]
    denominator: int

    def __post_init__(self):
        nums = tuple(int(a) for a in self.numerators)
        if len(nums) < 2:
            raise OutOfRange("a distribution needs at least two outputs")
        if any(a < 0 for a in nums):
            raise OutOfRange("numerators must be non-negative")
        if self.denominator < 1 or sum(nums) != self.denominator:
            raise OutOfRange(f"numerators sum to {sum(nums)}, expected {self.denominator}")
        g = reduce(gcd, nums, self.denominator)
        object.__setattr__(self, "numerators", tuple(a // g for a in nums))
        object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def of(cls, probs) -> "TargetDistribution":
        if isinstance(probs, TargetDistribution):
            return probs
        if isinstance(probs, str):
            try:
                probs = [parse_rational(p) for p in probs.split(",")]
            except ValueError as exc:
                raise OutOfRange(str(exc)) from None
        probs = [Fraction(p) for p in probs]
        if sum(probs) != 1:
            raise OutOfRange(f"probabilities sum to {sum(probs)}, not 1")
        b = lcm(*(p.denominator for p in probs))
        return cls(tuple(p.numerator * (b // p.denominator) for p in probs), b)

    @property
    def m(self) -> int:
        return len(self.numerators)

    @property
    def n(self) -> int:
        return bits_needed(self.denominator)

    @property
    def probs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.denominator) for a in self.numerators)

    def dyadic_extension(self) -> tuple[Fraction, ...]:
        """{a_1/2^n, ..., a_m/2^n, (2^n - b)/2^n}; the last entry is omitted when b = 2^n."""
        top = 1 << self.n
        ext = [Fraction(a, top) for a in self.numerators]
        if top != self.denominator:
            ext.append(Fraction(top - self.denominator, top))
        return tuple(ext)


def synth_distribution_ky(target) -> tuple[FlowNetwork, SynthesisTrace]:
    """Knuth-Yao tree over the dyadic extension; the extra label is fed back."""
    t = TargetDistribution.of(target)
    ext = t.dyadic_extension()
    _, atoms, opened = knuth_yao_tree(ext)
    net = close_feedback(opened, t.m) if len(ext) > t.m else opened
    trace = SynthesisTrace("knuth-yao", t.n)
    trace.add("open", dist=[frac_str(p.numerator * ((1 << t.n) // p.denominator), 1 << t.n) for p in ext])
    trace.add("atoms", atoms=[[str(x) for x in group] for group in atoms.atoms])
    if len(ext) > t.m:
        trace.add("feedback", label=t.m)
    trace.splitter_count = net.size
    return net, trace


def _subnetwork(w_left: Fraction, w_right: Fraction) -> FlowNetwork:
    return synth_optimal(w_left / (w_left + w_right))[0]


def synth_distribution_huffman(target, tree: WeightedTree | None = None) -> tuple[FlowNetwork, SynthesisTrace]:
    """Binary-tree method: every internal node becomes a two-way subnetwork.

    Zero-probability labels are left out of the tree. A given ``tree`` must
    have exactly the positive labels as leaves with matching weights.
    """
    t = TargetDistribution.of(target)
    probs = t.probs
    positive = [i for i, p in enumerate(probs) if p > 0]
    trace = SynthesisTrace("huffman", t.n)
    if tree is None:
        if len(positive) == 1:
            trace.add("trivial", label=positive[0])
            return FlowNetwork((), O(positive[0]), t.m), trace
        sub = huffman_tree([probs[i] for i in positive])
        tree = _relabel(sub, positive)
        trace.add("merges", order=[f"({format_rational(a)}, {format_rational(b)}) -> {format_rational(a + b)}"
                                   for a, b in huffman_merges([probs[i] for i in positive])])
    else:
        tree.check()
        labels = sorted(leaf.label for leaf in tree.leaves())
        if labels != positive:
            raise TreeMismatch(f"tree leaves {labels} do not match the positive labels {positive}")
        for leaf in tree.leaves():
            if leaf.weight != probs[leaf.label]:
                raise TreeMismatch(f"leaf {leaf.label} has weight {leaf.weight}, target is {probs[leaf.label]}")
    trace.add("tree", nested=str(tree.to_nested()))
    if tree.is_leaf:
        return FlowNetwork((), O(tree.label), t.m), trace

    inner = list(tree.internal_nodes())
    subnets = [_subnetwork(node.left.weight, node.right.weight) for node in inner]
    offsets, total = [], 0
    for net in subnets:
        offsets.append(total)
        total += net.size
    index = {id(node): k for k, node in enumerate(inner)}

    def entry(node: WeightedTree) -> Target:
        if node.is_leaf:
            return O(node.label)
        k = index[id(node)]
        start = subnets[k].start
        if start.is_splitter:
            return S(start.index + offsets[k])
        return entry(node.left if start.index == 0 else node.right)

    splitters = []
    for k, node in enumerate(inner):
        outs = {0: entry(node.left), 1: entry(node.right)}
        for sp in subnets[k].splitters:
            def move(x: Target) -> Target:
                return outs[x.index] if x.is_output else S(x.index + offsets[k])
            splitters.append(Splitter(sp.id + offsets[k], sp.bias, move(sp.branch0), move(sp.branch1)))
        w = node.left.weight + node.right.weight
        trace.add("split", weight=format_rational(w),
                  dist=[format_rational(node.left.weight / w), format_rational(node.right.weight / w)],
                  splitters=subnets[k].size)
    net = FlowNetwork(tuple(splitters), entry(tree), t.m)
    trace.splitter_count = net.size
    return net, trace


def _relabel(tree: WeightedTree, labels: Sequence[int]) -> WeightedTree:
    if tree.is_leaf:
        return WeightedTree.leaf(labels[tree.label], tree.weight)
    return WeightedTree.join(_relabel(tree.left, labels), _relabel(tree.right, labels))
