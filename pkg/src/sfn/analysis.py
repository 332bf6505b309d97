"""Exact analysis of flow networks.

The workhorse treats splitters reachable from the start as transient states
of an absorbing Markov chain and output labels as absorbing states.  One
exact solve of ``x (I - Q) = e_start`` gives the expected number of visits to
every splitter; ``x R`` is the output distribution and ``sum(x)`` the
expected latency.  Mason's gain formula is implemented separately as an
independent cross-check.
"""
from __future__ import annotations

import math
import os
from math import lcm
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .linalg import SingularSystem, determinant, identity_minus, solve, solve_integer
from .network import Distribution, FlowNetwork, format_rational, require_valid

DEFAULT_CYCLE_BUDGET = 2 ** 20
SENSITIVITY_STEP = Fraction(1, 2 ** 40)


class PreconditionViolated(ValueError):
    pass


class NotLoopFree(PreconditionViolated):
    pass


class CycleBudgetExceeded(RuntimeError):
    """Too many simple cycles for Mason's rule; use the matrix method instead."""


def default_cycle_budget() -> int:
    env = os.environ.get("SFN_CYCLE_BUDGET")
    return int(env) if env else DEFAULT_CYCLE_BUDGET


@dataclass(frozen=True)
class TransitionDecomposition:
    order: tuple[int, ...]
    Q: tuple[tuple[Fraction, ...], ...]
    R: tuple[tuple[Fraction, ...], ...]


def decompose(network: FlowNetwork) -> TransitionDecomposition:
    """Q and R blocks over the reachable splitters, in id order."""
    order = network.reachable()
    pos = {sid: i for i, sid in enumerate(order)}
    n, m = len(order), network.num_outputs
    Q = [[Fraction(0)] * n for _ in range(n)]
    R = [[Fraction(0)] * m for _ in range(n)]
    for i, sid in enumerate(order):
        for t, p in network[sid].branches:
            if t.is_splitter:
                Q[i][pos[t.index]] += p
            else:
                R[i][t.index] += p
    return TransitionDecomposition(tuple(order), tuple(map(tuple, Q)), tuple(map(tuple, R)))


@dataclass(frozen=True)
class _Chain:
    """Solved chain: expected visits are ``y[i] / d``; ``scaled_r = scale * R``."""

    order: tuple[int, ...]
    d: int
    y: tuple[int, ...]
    scale: int
    scaled_r: tuple[tuple[int, ...], ...]

    @property
    def visits(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.d) for v in self.y)


@lru_cache(maxsize=8192)
def _chain(network: FlowNetwork) -> _Chain:
    require_valid(network)
    order = network.reachable()
    pos = {sid: i for i, sid in enumerate(order)}
    n, m = len(order), network.num_outputs
    scale = lcm(*(network[sid].bias.denominator for sid in order))
    # integer form of scale * (I - Q)^T, so that x (I - Q) = e_start
    kt = [[0] * n for _ in range(n)]
    r = [[0] * m for _ in range(n)]
    for i, sid in enumerate(order):
        kt[i][i] += scale
        for t, p in network[sid].branches:
            w = p.numerator * (scale // p.denominator)
            if t.is_splitter:
                kt[pos[t.index]][i] -= w
            else:
                r[i][t.index] += w
    s = pos[network.start.index]
    # solving (scale K^T) x' = scale e_s leaves x' = x
    d, y = solve_integer(kt, [[scale if i == s else 0] for i in range(n)])
    return _Chain(tuple(order), d, tuple(v[0] for v in y), scale, tuple(map(tuple, r)))


def absorption_distribution(network: FlowNetwork) -> Distribution:
    """Exact probability of absorption at each output label."""
    m = network.num_outputs
    if network.start.is_output:
        require_valid(network)
        return Distribution(tuple(Fraction(int(j == network.start.index)) for j in range(m)))
    ch = _chain(network)
    den = ch.d * ch.scale
    probs = [Fraction(sum(y * row[j] for y, row in zip(ch.y, ch.scaled_r)), den) for j in range(m)]
    return Distribution(tuple(probs))


def expected_visits(network: FlowNetwork) -> dict[int, Fraction]:
    """Expected number of visits to each reachable splitter."""
    if network.start.is_output:
        require_valid(network)
        return {}
    ch = _chain(network)
    return dict(zip(ch.order, ch.visits))


def expected_latency(network: FlowNetwork) -> Fraction:
    """Expected number of splitter visits (revisits count) before absorption."""
    if network.start.is_output:
        require_valid(network)
        return Fraction(0)
    ch = _chain(network)
    return Fraction(sum(ch.y), ch.d)


def latency_variance(network: FlowNetwork) -> Fraction:
    """Exact variance of the number of splitter visits."""
    if network.start.is_output:
        require_valid(network)
        return Fraction(0)
    ch = _chain(network)
    dec = decompose(network)
    n = len(ch.order)
    t = solve(identity_minus(dec.Q), [Fraction(1)] * n)
    s = ch.order.index(network.start.index)
    x = ch.visits
    return 2 * sum(x[i] * t[i] for i in range(n)) - t[s] - t[s] ** 2


def entropy(distribution: Distribution | Sequence[Fraction]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    return -sum(float(p) * math.log2(p) for p in distribution if p > 0) + 0.0


@dataclass(frozen=True)
class AnalysisReport:
    distribution: Distribution
    expected_latency: Fraction
    loop_free: bool
    reachable_splitter_count: int

    def to_dict(self) -> dict:
        return {
            "distribution": [format_rational(p) for p in self.distribution],
            "expected_latency": format_rational(self.expected_latency),
            "entropy_bits": repr(entropy(self.distribution)),
            "loop_free": self.loop_free,
            "reachable_splitter_count": self.reachable_splitter_count,
        }


def analyze(network: FlowNetwork) -> AnalysisReport:
    report = require_valid(network)
    return AnalysisReport(
        distribution=absorption_distribution(network),
        expected_latency=expected_latency(network),
        loop_free=report.loop_free,
        reachable_splitter_count=len(network.reachable()),
    )


# ---------------------------------------------------------------------------
# Mason's gain formula


def _gain_graph(network: FlowNetwork) -> dict[int, dict[tuple[str, int], Fraction]]:
    """Reachable splitters -> {(kind, index): summed branch gain}."""
    graph = {}
    for sid in network.reachable():
        edges: dict[tuple[str, int], Fraction] = {}
        for t, p in network[sid].branches:
            key = (t.kind, t.index)
            edges[key] = edges.get(key, Fraction(0)) + p
        graph[sid] = edges
    return graph


def simple_cycles(graph: dict[int, dict[tuple[str, int], Fraction]], budget: int) -> list[tuple[int, Fraction]]:
    """All simple cycles as (vertex bitmask, gain) pairs.

    Each cycle is found once, rooted at its smallest vertex; the search from
    root ``r`` only visits vertices greater than ``r``.
    """
    succ = {v: [(t[1], g) for t, g in e.items() if t[0] == "s"] for v, e in graph.items()}
    cycles: list[tuple[int, Fraction]] = []
    for root in sorted(succ):
        stack = [(root, 1 << root, Fraction(1), iter(succ[root]))]
        while stack:
            v, mask, gain, it = stack[-1]
            for w, g in it:
                if w == root:
                    cycles.append((mask, gain * g))
                    if len(cycles) > budget:
                        raise CycleBudgetExceeded(f"more than {budget} simple cycles")
                elif w > root and not mask >> w & 1:
                    stack.append((w, mask | 1 << w, gain * g, iter(succ[w])))
                    break
            else:
                stack.pop()
    return cycles


def _determinant(cycles: list[tuple[int, Fraction]], blocked: int) -> Fraction:
    """1 - sum L_i + sum L_i L_j - ... over loops not touching ``blocked``."""
    loops = [c for c in cycles if not c[0] & blocked]

    def rec(start: int, used: int) -> Fraction:
        total = Fraction(1)
        for j in range(start, len(loops)):
            mask, g = loops[j]
            if not mask & used:
                total -= g * rec(j + 1, used | mask)
        return total

    return rec(0, 0)


def mason_probability(network: FlowNetwork, label: int, cycle_budget: int | None = None) -> Fraction:
    """Probability of reaching ``label`` via Mason's gain formula."""
    require_valid(network)
    if not 0 <= label < network.num_outputs:
        raise ValueError(f"label {label} out of range")
    if network.start.is_output:
        return Fraction(int(network.start.index == label))
    budget = default_cycle_budget() if cycle_budget is None else cycle_budget
    graph = _gain_graph(network)
    cycles = simple_cycles(graph, budget)

    paths: list[tuple[int, Fraction]] = []
    start = network.start.index
    stack = [(start, 1 << start, Fraction(1), iter(graph[start].items()))]
    while stack:
        v, mask, gain, it = stack[-1]
        for (kind, idx), g in it:
            if kind == "o":
                if idx == label:
                    paths.append((mask, gain * g))
            elif not mask >> idx & 1:
                stack.append((idx, mask | 1 << idx, gain * g, iter(graph[idx].items())))
                break
        else:
            stack.pop()

    numerator = sum((g * _determinant(cycles, mask) for mask, g in paths), Fraction(0))
    delta = _determinant(cycles, 0)
    if delta == 0:
        raise SingularSystem("graph determinant is zero")
    return numerator / delta


def mason_distribution(network: FlowNetwork, cycle_budget: int | None = None) -> Distribution:
    return Distribution(tuple(mason_probability(network, j, cycle_budget) for j in range(network.num_outputs)))


# ---------------------------------------------------------------------------
# converse checks and oracles


def _fair_reachable(network: FlowNetwork) -> int:
    reach = network.reachable()
    if any(network[i].bias != Fraction(1, 2) for i in reach):
        raise PreconditionViolated("all reachable splitters must be fair (bias 1/2)")
    return len(reach)


def verify_loop_free_dyadic(network: FlowNetwork) -> bool:
    """Every output probability of a loop-free network is x / 2^n."""
    report = require_valid(network)
    if not report.loop_free:
        raise NotLoopFree("network contains a reachable cycle")
    n = _fair_reachable(network)
    return all((1 << n) % p.denominator == 0 for p in absorption_distribution(network))


def verify_denominator_bound(network: FlowNetwork) -> bool:
    """Every output probability has denominator at most 2^n."""
    n = _fair_reachable(network)
    return all(p.denominator <= 1 << n for p in absorption_distribution(network))


_ALLOWED = (Fraction(0), Fraction(1, 2), Fraction(1))


def det_bound_oracle(q: Sequence[Sequence[Fraction]]) -> Fraction:
    """det(I - Q) for Q with entries in {0, 1/2, 1} and row sums <= 1."""
    n = len(q)
    for i, row in enumerate(q):
        if len(row) != n:
            raise PreconditionViolated("Q must be square")
        if any(Fraction(v) not in _ALLOWED for v in row):
            raise PreconditionViolated(f"row {i} has an entry outside {{0, 1/2, 1}}")
        if sum(Fraction(v) for v in row) > 1:
            raise PreconditionViolated(f"row {i} sums to more than 1")
    return determinant(identity_minus(q))


# ---------------------------------------------------------------------------
# sensitivity


@dataclass(frozen=True)
class SensitivityReport:
    """Difference quotients dS_j/dp_i at step ``step`` (error O(step)).

    ``derivatives[i][j]`` is for splitter id ``i`` and output ``j``.
    """

    derivatives: tuple[tuple[Fraction, ...], ...]
    step: Fraction
    epsilon: Fraction
    bound: tuple[Fraction, ...] = field(default=())

    def error_bound(self, epsilon: Fraction) -> tuple[Fraction, ...]:
        """First-order bound on |shift| of each output when every bias moves by <= epsilon."""
        m = len(self.derivatives[0]) if self.derivatives else 0
        return tuple(Fraction(epsilon) * sum((abs(row[j]) for row in self.derivatives), Fraction(0))
                     for j in range(m))


def sensitivity(network: FlowNetwork, epsilon: Fraction, step: Fraction = SENSITIVITY_STEP) -> SensitivityReport:
    epsilon = Fraction(epsilon)
    require_valid(network)
    if epsilon < 0 or any(epsilon >= min(s.bias, 1 - s.bias) for s in network.splitters):
        raise PreconditionViolated("epsilon must satisfy 0 <= epsilon < min(bias, 1 - bias)")
    base = absorption_distribution(network)
    m = network.num_outputs
    reach = set(network.reachable())
    rows = []
    for sp in network.splitters:
        if sp.id not in reach:
            rows.append(tuple(Fraction(0) for _ in range(m)))
            continue
        h = step if sp.bias + step < 1 else -step
        moved = absorption_distribution(network.with_biases({sp.id: sp.bias + h}))
        rows.append(tuple((moved[j] - base[j]) / h for j in range(m)))
    rep = SensitivityReport(tuple(rows), step, epsilon)
    return SensitivityReport(rep.derivatives, step, epsilon, bound=rep.error_bound(epsilon))
