"""Weighted binary trees: Knuth-Yao generating trees and Huffman trees."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from ..network import HALF, FlowNetwork, O, S, Splitter, Target
from .errors import EmptyInput, NotDyadic, NotNormalized, TooManyLeaves, TreeMismatch


@dataclass(frozen=True)
class WeightedTree:
    """Full binary tree; leaves carry a label, internal weights are child sums."""

    weight: Fraction
    label: int | None = None
    left: "WeightedTree | None" = None
    right: "WeightedTree | None" = None

    @classmethod
    def leaf(cls, label: int, weight) -> "WeightedTree":
        return cls(Fraction(weight), label)

    @classmethod
    def join(cls, left: "WeightedTree", right: "WeightedTree") -> "WeightedTree":
        return cls(left.weight + right.weight, None, left, right)

    @classmethod
    def from_nested(cls, nested, weights: Sequence[Fraction]) -> "WeightedTree":
        """Build from nested pairs of labels, e.g. ``[0, [1, [2, 3]]]``."""
        if isinstance(nested, int) and not isinstance(nested, bool):
            if not 0 <= nested < len(weights):
                raise TreeMismatch(f"leaf label {nested} out of range")
            return cls.leaf(nested, weights[nested])
        if isinstance(nested, (list, tuple)) and len(nested) == 2:
            return cls.join(cls.from_nested(nested[0], weights), cls.from_nested(nested[1], weights))
        raise TreeMismatch(f"tree nodes must be a label or a [left, right] pair, got {nested!r}")

    def to_nested(self):
        if self.is_leaf:
            return self.label
        return [self.left.to_nested(), self.right.to_nested()]

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def leaves(self) -> Iterator["WeightedTree"]:
        if self.is_leaf:
            yield self
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()

    def internal_nodes(self) -> Iterator["WeightedTree"]:
        """Preorder."""
        if not self.is_leaf:
            yield self
            yield from self.left.internal_nodes()
            yield from self.right.internal_nodes()

    def internal_weight_product(self) -> Fraction:
        prod = Fraction(1)
        for node in self.internal_nodes():
            prod *= node.weight
        return prod

    def check(self) -> None:
        for node in self.internal_nodes():
            if node.weight != node.left.weight + node.right.weight:
                raise TreeMismatch("internal weight differs from the sum of its children")


@dataclass(frozen=True)
class AtomSet:
    """Per label, the dyadic atoms 2^-j of its binary expansion, largest first."""

    atoms: tuple[tuple[Fraction, ...], ...]

    def total(self, label: int) -> Fraction:
        return sum(self.atoms[label], Fraction(0))

    def kraft_sum(self) -> Fraction:
        return sum((sum(group, Fraction(0)) for group in self.atoms), Fraction(0))

    @property
    def count(self) -> int:
        return sum(len(g) for g in self.atoms)


def dyadic_atoms(probs: Sequence[Fraction]) -> AtomSet:
    probs = [Fraction(p) for p in probs]
    if not probs:
        raise EmptyInput("no probabilities given")
    for i, p in enumerate(probs):
        if p < 0 or p.denominator & (p.denominator - 1):
            raise NotDyadic(f"label {i}: {p} is not a dyadic probability")
    if sum(probs) != 1:
        raise NotNormalized(f"probabilities sum to {sum(probs)}, not 1")
    groups = []
    for p in probs:
        if p == 1:
            groups.append((Fraction(1),))
            continue
        n = p.denominator.bit_length() - 1
        groups.append(tuple(Fraction(1, 1 << j) for j in range(1, n + 1) if p.numerator >> (n - j) & 1))
    return AtomSet(tuple(groups))


def knuth_yao_tree(probs: Sequence[Fraction]) -> tuple[WeightedTree, AtomSet, FlowNetwork]:
    """Generating tree for a dyadic distribution (labels are positions).

    Atoms are allotted shallowest first; within one depth by ascending label,
    each into the leftmost free slot. Free slots left over at a depth become
    internal nodes (fair splitters), numbered breadth-first.
    """
    atoms = dyadic_atoms(probs)
    m = len(atoms.atoms)
    for label, group in enumerate(atoms.atoms):
        if group == (Fraction(1),):
            return WeightedTree.leaf(label, 1), atoms, FlowNetwork((), O(label), m)

    by_depth: dict[int, list[int]] = {}
    for label, group in enumerate(atoms.atoms):
        for atom in group:
            by_depth.setdefault(atom.denominator.bit_length() - 1, []).append(label)
    depth_max = max(by_depth)

    # children[sid] = [target0, target1]; leaves recorded as outputs
    children: list[list[Target | None]] = [[None, None]]
    frontier = [0]
    for depth in range(1, depth_max + 1):
        slots = [(sid, j) for sid in frontier for j in (0, 1)]
        labels = sorted(by_depth.get(depth, []))
        if len(labels) > len(slots) or (depth == depth_max and len(labels) != len(slots)):
            raise NotNormalized("atoms do not fill the tree")  # unreachable when Kraft holds
        for (sid, j), label in zip(slots, labels):
            children[sid][j] = O(label)
        frontier = []
        for sid, j in slots[len(labels):]:
            children.append([None, None])
            children[sid][j] = S(len(children) - 1)
            frontier.append(len(children) - 1)

    net = FlowNetwork(tuple(Splitter(i, HALF, c[0], c[1]) for i, c in enumerate(children)), S(0), m)

    def subtree(t: Target, depth: int) -> WeightedTree:
        if t.is_output:
            return WeightedTree.leaf(t.index, Fraction(1, 1 << depth))
        left, right = children[t.index]
        return WeightedTree.join(subtree(left, depth + 1), subtree(right, depth + 1))

    return subtree(S(0), 0), atoms, net


def _huffman(weights: Sequence[Fraction]) -> tuple[WeightedTree, list[tuple[Fraction, Fraction]]]:
    if not weights:
        raise EmptyInput("no weights given")
    weights = [Fraction(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    heap = [(w, i, WeightedTree.leaf(i, w)) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    counter = len(weights)
    merges = []
    while len(heap) > 1:
        w1, _, t1 = heapq.heappop(heap)
        w2, _, t2 = heapq.heappop(heap)
        merges.append((w1, w2))
        heapq.heappush(heap, (w1 + w2, counter, WeightedTree.join(t1, t2)))
        counter += 1
    return heap[0][2], merges


def huffman_tree(weights: Sequence[Fraction]) -> WeightedTree:
    """Huffman procedure over exact weights.

    The two lightest parentless nodes are merged, lighter one on the left;
    ties go to the node created (or listed) earlier.
    """
    return _huffman(weights)[0]


def huffman_merges(weights: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
    return _huffman(weights)[1]


def _all_trees(nodes: tuple[WeightedTree, ...]) -> Iterator[WeightedTree]:
    if len(nodes) == 1:
        yield nodes[0]
        return
    for i, j in combinations(range(len(nodes)), 2):
        rest = tuple(n for k, n in enumerate(nodes) if k not in (i, j))
        yield from _all_trees(rest + (WeightedTree.join(nodes[i], nodes[j]),))


def brute_force_optimal_tree(weights: Sequence[Fraction]) -> tuple[WeightedTree, Fraction]:
    """Tree minimizing the product of internal weights, by exhaustive search.

    Minimizing the product is the same as minimizing the sum of log2 of the
    internal weights, without rounding.
    """
    if not weights:
        raise EmptyInput("no weights given")
    if len(weights) > 6:
        raise TooManyLeaves(f"exhaustive search is limited to 6 leaves, got {len(weights)}")
    leaves = tuple(WeightedTree.leaf(i, w) for i, w in enumerate(weights))
    best, best_prod = None, None
    for tree in _all_trees(leaves):
        prod = tree.internal_weight_product()
        if best_prod is None or prod < best_prod:
            best, best_prod = tree, prod
    return best, best_prod
