"""Seeded Monte-Carlo token simulation.

Randomness is SplitMix64 (Steele, Lea & Flood 2014). Trial ``t`` under seed
``s`` owns an independent stream whose state starts at
``mix64(s + (t + 1) * GAMMA mod 2^64)``; each draw adds GAMMA to the state and
returns ``mix64(state)``. A splitter with bias ``p/q`` sends the token down
branch 0 iff ``u * q < p * 2^64`` for the 64-bit draw ``u``. Results depend
only on (network, seed, trial index), never on how trials are batched.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

from .network import FlowNetwork, require_valid

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TRUNCATED = -1


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def for_trial(cls, seed: int, trial: int) -> "SplitMix64":
        return cls(mix64(seed + (trial + 1) * GAMMA))

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int = 0
    max_steps: int = 10 ** 6

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class SimReport:
    counts: tuple[int, ...]
    truncated: int
    mean_latency: float
    latency_variance: float
    max_latency: int
    trials: int
    seed: int

    @property
    def empirical(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.counts)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "counts": list(self.counts),
            "empirical": [repr(p) for p in self.empirical],
            "mean_latency": repr(self.mean_latency),
            "latency_variance": repr(self.latency_variance),
            "max_latency": self.max_latency,
            "truncated": self.truncated,
        }


def _threshold(bias) -> int:
    """Draws strictly below this take branch 0; equals 2^64 only when the bias rounds to 1."""
    return -((-bias.numerator << 64) // bias.denominator)


def run_token(network: FlowNetwork, rng: SplitMix64, max_steps: int = 10 ** 6) -> tuple[int, int]:
    """Walk one token from the start; returns (label, splitter visits).

    The label is ``TRUNCATED`` when ``max_steps`` visits pass without absorption.
    """
    thresholds = [_threshold(s.bias) for s in network.splitters]
    t = network.start
    steps = 0
    while t.is_splitter:
        if steps >= max_steps:
            return TRUNCATED, steps
        steps += 1
        sp = network.splitters[t.index]
        t = sp.branch0 if rng.next() < thresholds[t.index] else sp.branch1
    return t.index, steps


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def trial_outcomes(network: FlowNetwork, config: SimConfig, first: int = 0,
                   count: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Labels and step counts for trials ``first .. first + count - 1``, vectorized."""
    require_valid(network)
    count = config.trials - first if count is None else count
    labels = np.full(count, TRUNCATED, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    if network.start.is_output:
        labels[:] = network.start.index
        return labels, steps

    def code(t):
        # splitter i -> i, output k -> -(k + 1)
        return t.index if t.is_splitter else -(t.index + 1)

    nxt0 = np.array([code(s.branch0) for s in network.splitters], dtype=np.int64)
    nxt1 = np.array([code(s.branch1) for s in network.splitters], dtype=np.int64)
    raw = [_threshold(s.bias) for s in network.splitters]
    always0 = np.array([t > MASK64 for t in raw], dtype=bool)
    thresh = np.array([min(t, MASK64) for t in raw], dtype=np.uint64)

    with np.errstate(over="ignore"):
        idx = np.arange(first, first + count, dtype=np.uint64)
        state = _mix64_array(np.uint64(config.seed & MASK64) + (idx + np.uint64(1)) * np.uint64(GAMMA))
        active = np.arange(count)
        node = np.full(count, network.start.index, dtype=np.int64)
        step = 0
        while active.size and step < config.max_steps:
            step += 1
            state[active] += np.uint64(GAMMA)
            u = _mix64_array(state[active])
            cur = node[active]
            take0 = (u < thresh[cur]) | always0[cur]
            node[active] = np.where(take0, nxt0[cur], nxt1[cur])
            steps[active] = step
            done = node[active] < 0
            finished = active[done]
            labels[finished] = -node[finished] - 1
            active = active[~done]
    return labels, steps


def simulate(network: FlowNetwork, config: SimConfig) -> SimReport:
    labels, steps = trial_outcomes(network, config)
    ok = labels >= 0
    counts = np.bincount(labels[ok], minlength=network.num_outputs)
    done_steps = steps[ok].astype(np.float64)
    return SimReport(
        counts=tuple(int(c) for c in counts),
        truncated=int((~ok).sum()),
        mean_latency=float(done_steps.mean()) if done_steps.size else 0.0,
        latency_variance=float(done_steps.var()) if done_steps.size else 0.0,
        max_latency=int(steps.max()) if steps.size else 0,
        trials=config.trials,
        seed=config.seed,
    )


def iter_trials(network: FlowNetwork, config: SimConfig) -> Iterator[tuple[int, int]]:
    """Scalar reference path: one (label, steps) pair per trial."""
    require_valid(network)
    for t in range(config.trials):
        yield run_token(network, SplitMix64.for_trial(config.seed, t), config.max_steps)


def write_trial_log(network: FlowNetwork, config: SimConfig, fh: IO[str]) -> None:
    """Line-delimited JSON records ``{"trial", "label", "steps"}``."""
    labels, steps = trial_outcomes(network, config)
    for t, (label, s) in enumerate(zip(labels.tolist(), steps.tolist())):
        fh.write(json.dumps({"trial": t, "label": label, "steps": s}) + "\n")
