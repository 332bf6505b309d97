"""Sweeps that check every size, latency and structural bound at once.

Each check accumulates a case count, failures, the smallest observed margin
(bound minus value; negative means violated) and the first counterexample.
Exact bounds are compared as rationals; bounds involving logarithms are
compared in floating point with the bound rounded outward by ``FLOAT_SLACK``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable

from .analysis import (absorption_distribution, det_bound_oracle, entropy, expected_latency, mason_distribution,
                       verify_denominator_bound, verify_loop_free_dyadic)
from .network import HALF, FlowNetwork, O, S, Splitter, Target, format_rational, validate
from .synthesis import (TargetDistribution, adversarial_network, bits_needed, brute_force_optimal_tree,
                        huffman_tree, is_power_of_two, open_network, synth_distribution_huffman,
                        synth_distribution_ky, synth_dyadic, synth_optimal, synthesize)
from .synthesis.scalar import METHODS

FLOAT_SLACK = 1e-12
SCALAR_METHODS = tuple(METHODS)
B_MAX_LIMIT = 4096


@dataclass(frozen=True)
class BoundsConfig:
    b_max: int = 256
    methods: tuple[str, ...] = SCALAR_METHODS
    seed: int = 0
    random_networks: int = 1000
    max_random_size: int = 8
    det_cases: int = 10_000
    det_max_size: int = 8
    huffman_cases: int = 100
    dist_cases: int = 300
    dist_b_max: int = 64
    dist_m_max: int = 6
    chain_n_max: int = 10
    adversarial_n_max: int = 12
    mason_cases: int = 300

    def __post_init__(self):
        if not 1 <= self.b_max <= B_MAX_LIMIT:
            raise ValueError(f"b_max must lie in [1, {B_MAX_LIMIT}], got {self.b_max}")
        unknown = set(self.methods) - set(SCALAR_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    worst_margin: float | None = None
    counterexample: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, instance: str, margin: float | None = None) -> None:
        self.cases += 1
        if margin is not None and (self.worst_margin is None or margin < self.worst_margin):
            self.worst_margin = margin
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = instance

    def bound(self, value, limit, instance: str) -> None:
        """Record ``value <= limit`` (exact when both are rational)."""
        self.record(value <= limit, f"{instance}: {_show(value)} > {_show(limit)}", float(limit - value))

    def float_bound(self, value: float, limit: float, instance: str) -> None:
        self.record(value <= limit + FLOAT_SLACK, f"{instance}: {value!r} > {limit!r}", limit - value)

    def equal(self, value, expected, instance: str) -> None:
        self.record(value == expected, f"{instance}: got {_show(value)}, expected {_show(expected)}")

    def to_dict(self) -> dict:
        return {"name": self.name, "cases": self.cases, "failures": self.failures,
                "worst_margin": self.worst_margin, "counterexample": self.counterexample,
                "passed": self.passed}


def _show(value) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_show(v) for v in value) + ")"
    return str(value)


# ---------------------------------------------------------------------------
# random instances


def random_loop_free_network(rng: random.Random, n: int, m: int = 2) -> FlowNetwork:
    """Fair splitters whose branches only point to higher ids or outputs."""
    def pick(i: int) -> Target:
        later = n - i - 1
        k = rng.randrange(later + m)
        return S(i + 1 + k) if k < later else O(k - later)

    return FlowNetwork(tuple(Splitter(i, HALF, pick(i), pick(i)) for i in range(n)), S(0) if n else O(0), m)


def random_network(rng: random.Random, n: int, m: int = 2, max_tries: int = 1000) -> FlowNetwork:
    """Arbitrary fair-splitter wiring, redrawn until it passes validation."""
    for _ in range(max_tries):
        def pick() -> Target:
            k = rng.randrange(n + m)
            return S(k) if k < n else O(k - n)

        net = FlowNetwork(tuple(Splitter(i, HALF, pick(), pick()) for i in range(n)), S(rng.randrange(n)), m)
        if validate(net).ok:
            return net
    raise RuntimeError("no valid random network found")


def random_constrained_q(rng: random.Random, size: int) -> list[list[Fraction]]:
    """Square matrix with entries in {0, 1/2, 1} and every row sum at most 1."""
    q = []
    for _ in range(size):
        row = [Fraction(0)] * size
        kind = rng.randrange(4)
        if kind == 1:
            row[rng.randrange(size)] = Fraction(1)
        elif kind >= 2:
            for _ in range(kind - 1):
                row[rng.randrange(size)] += HALF
        q.append(row)
    return q


def random_weights(rng: random.Random, m: int, scale: int = 20) -> list[Fraction]:
    raw = [rng.randint(1, scale) for _ in range(m)]
    return [Fraction(r, sum(raw)) for r in raw]


def random_target_distribution(rng: random.Random, m_max: int = 6, b_max: int = 64) -> TargetDistribution:
    m = rng.randint(2, m_max)
    b = rng.randint(1, b_max)
    cuts = sorted(rng.randint(0, b) for _ in range(m - 1))
    parts = [hi - lo for lo, hi in zip([0] + cuts, cuts + [b])]
    return TargetDistribution(tuple(parts), b)


def fractions_up_to(b_max: int) -> Iterable[tuple[int, int]]:
    for b in range(2, b_max + 1):
        for a in range(1, b):
            if gcd(a, b) == 1:
                yield a, b


# ---------------------------------------------------------------------------
# individual sweeps


def _scalar_limits(method: str, n: int, b: int) -> tuple[int, Fraction | float]:
    scale = Fraction(1 << n, b)
    if method == "optimal":
        return n, (Fraction(3 * n, 4) + Fraction(1, 4)) * scale
    if method == "size-relaxed":
        return n + 3, 6 * scale
    # dyadic targets fall back to the chain, whose size bound is n
    size = n if is_power_of_two(b) else 2 * (n - 1)
    return size, (math.log2(3) + 2) * float(scale)


def check_scalar(config: BoundsConfig, method: str,
                 optimal: Callable = synth_optimal) -> list[CheckResult]:
    exact = CheckResult(f"{method}: exact probability")
    size = CheckResult(f"{method}: size")
    latency = CheckResult(f"{method}: latency")
    feedback = CheckResult(f"{method}: feedback identity")
    for a, b in fractions_up_to(config.b_max):
        target = Fraction(a, b)
        tag = f"{method} {a}/{b}"
        net = optimal(target)[0] if method == "optimal" else synthesize(target, method)[0]
        n = bits_needed(b)
        size_limit, et_limit = _scalar_limits(method, n, b)
        dist = absorption_distribution(net)
        exact.equal(dist[0], target, tag)
        size.bound(net.size, size_limit, tag)
        et = expected_latency(net)
        if isinstance(et_limit, float):
            latency.float_bound(float(et), et_limit, tag)
        else:
            latency.bound(et, et_limit, tag)
        if method == "size-relaxed" or not is_power_of_two(b):
            opened = open_network(target, method)
            q = absorption_distribution(opened)[2]
            feedback.equal(et * (1 - q), expected_latency(opened), tag)
    return [exact, size, latency, feedback]


def check_dyadic_chains(config: BoundsConfig) -> list[CheckResult]:
    exact = CheckResult("dyadic chain: exact probability and size")
    chain = CheckResult("dyadic chain: latency 2 - 2^(1-n)")
    for n in range(0, 7):
        for x in range(0, (1 << n) + 1):
            net = synth_dyadic(x, n)
            ok = absorption_distribution(net)[0] == Fraction(x, 1 << n) and net.size <= n
            exact.record(ok, f"x={x}, n={n}")
    for n in range(1, config.chain_n_max + 1):
        chain.equal(expected_latency(synth_dyadic(1, n)), 2 - Fraction(1, 1 << (n - 1)), f"n={n}")
    return [exact, chain]


def check_adversarial(config: BoundsConfig) -> CheckResult:
    res = CheckResult("adversarial witness: ET >= n/3 + 2/3")
    for n in range(3, config.adversarial_n_max + 1):
        net, _ = adversarial_network(n)
        lower = Fraction(n, 3) + Fraction(2, 3)
        et = expected_latency(net)
        res.record(et >= lower, f"n={n}: {_show(et)} < {_show(lower)}", float(et - lower))
    return res


def check_distributions(config: BoundsConfig) -> list[CheckResult]:
    rng = random.Random(config.seed + 1)
    ky_exact = CheckResult("knuth-yao distribution: exact")
    ky_size = CheckResult("knuth-yao distribution: size")
    ky_window = CheckResult("knuth-yao distribution: latency window")
    hf_exact = CheckResult("huffman distribution: exact")
    hf_size = CheckResult("huffman distribution: size")
    hf_latency = CheckResult("huffman distribution: latency")
    for _ in range(config.dist_cases):
        t = random_target_distribution(rng, config.dist_m_max, config.dist_b_max)
        tag = ",".join(format_rational(p) for p in t.probs)
        # zero-probability labels take no part in either construction
        n, m = t.n, sum(1 for a in t.numerators if a)
        scale = (1 << n) / t.denominator

        net, _ = synth_distribution_ky(t)
        ky_exact.equal(tuple(absorption_distribution(net)), t.probs, tag)
        ky_size.bound(net.size, m * (n - (m.bit_length() - 1) + 1), tag)
        h_ext = entropy(t.dyadic_extension())
        et = float(expected_latency(net))
        ky_window.float_bound(et, (h_ext + 2) * scale, tag + " (upper)")
        ky_window.float_bound(h_ext * scale, et, tag + " (lower)")

        net, _ = synth_distribution_huffman(t)
        hf_exact.equal(tuple(absorption_distribution(net)), t.probs, tag)
        hf_size.bound(net.size, (m - 1) * n, tag)
        positive = [p for p in t.probs if p > 0]
        if len(positive) > 1:
            inner = list(huffman_tree(positive).internal_nodes())
            sub = [expected_latency(synth_optimal(x.left.weight / x.weight)[0]) for x in inner]
            et = expected_latency(net)
            hf_latency.equal(et, sum(x.weight * e for x, e in zip(inner, sub)), tag + " (decomposition)")
            hf_latency.float_bound(float(et), (entropy(t.probs) + 1) * float(max(sub)), tag)
    return [ky_exact, ky_size, ky_window, hf_exact, hf_size, hf_latency]


def check_converse(config: BoundsConfig) -> list[CheckResult]:
    rng = random.Random(config.seed + 2)
    loop_free = CheckResult("loop-free networks: dyadic outputs")
    general = CheckResult("networks with feedback: denominators <= 2^n")
    for _ in range(config.random_networks):
        n = rng.randint(0, config.max_random_size)
        net = random_loop_free_network(rng, n, rng.randint(2, 4))
        loop_free.record(verify_loop_free_dyadic(net), str(absorption_distribution(net)))
        net = random_network(rng, max(n, 1), rng.randint(2, 4))
        general.record(verify_denominator_bound(net), str(absorption_distribution(net)))
    return [loop_free, general]


def check_mason(config: BoundsConfig) -> CheckResult:
    rng = random.Random(config.seed + 3)
    res = CheckResult("mason rule agrees with matrix solve")
    for _ in range(config.mason_cases):
        net = random_network(rng, rng.randint(1, config.max_random_size), rng.randint(2, 3))
        res.equal(tuple(mason_distribution(net)), tuple(absorption_distribution(net)), f"network {net}")
    return res


def check_determinant_range(config: BoundsConfig) -> CheckResult:
    rng = random.Random(config.seed + 4)
    res = CheckResult("0 <= det(I - Q) <= 1")
    for _ in range(config.det_cases):
        q = random_constrained_q(rng, rng.randint(1, config.det_max_size))
        d = det_bound_oracle(q)
        res.record(0 <= d <= 1, f"Q={[[format_rational(v) for v in r] for r in q]}: det={d}", float(min(d, 1 - d)))
    return res


def check_huffman_optimality(config: BoundsConfig) -> CheckResult:
    rng = random.Random(config.seed + 5)
    res = CheckResult("huffman minimizes the internal-weight product")
    for _ in range(config.huffman_cases):
        w = random_weights(rng, 5)
        res.equal(huffman_tree(w).internal_weight_product(), brute_force_optimal_tree(w)[1],
                  "weights " + ",".join(map(format_rational, w)))
    return res


def run_checks(config: BoundsConfig, *, optimal: Callable = synth_optimal,
               progress: Callable[[str], None] | None = None) -> list[CheckResult]:
    """Every sweep; ``optimal`` replaces the optimal-size construction (mutation testing)."""
    results: list[CheckResult] = []

    def step(label: str, fn):
        if progress:
            progress(label)
        out = fn()
        results.extend(out if isinstance(out, list) else [out])

    for method in config.methods:
        step(method, lambda: check_scalar(config, method, optimal))
    step("dyadic chains", lambda: check_dyadic_chains(config))
    step("adversarial", lambda: check_adversarial(config))
    step("distributions", lambda: check_distributions(config))
    step("converse", lambda: check_converse(config))
    step("mason", lambda: check_mason(config))
    step("determinant range", lambda: check_determinant_range(config))
    step("huffman optimality", lambda: check_huffman_optimality(config))
    return results


def render_table(results: list[CheckResult]) -> str:
    rows = [("check", "cases", "fail", "worst margin", "status")]
    for r in results:
        margin = "-" if r.worst_margin is None else f"{r.worst_margin:.6g}"
        rows.append((r.name, str(r.cases), str(r.failures), margin, "pass" if r.passed else "FAIL"))
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))
             for row in rows]
    lines.insert(1, "-" * len(lines[0]))
    for r in results:
        if not r.passed:
            lines.append(f"counterexample [{r.name}]: {r.counterexample}")
    return "\n".join(lines)
