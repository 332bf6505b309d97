"""Small helpers for assembling networks out of pieces."""
from __future__ import annotations

from typing import Callable, Mapping

from ..network import HALF, FlowNetwork, O, S, Splitter, Target


class Builder:
    """Mutable list of fair splitters; ids are allocated in insertion order."""

    def __init__(self):
        self.branches: list[list[Target | None]] = []

    def add(self, branch0: Target | None = None, branch1: Target | None = None) -> int:
        self.branches.append([branch0, branch1])
        return len(self.branches) - 1

    def set(self, sid: int, branch0: Target, branch1: Target) -> None:
        self.branches[sid] = [branch0, branch1]

    def __len__(self) -> int:
        return len(self.branches)

    def build(self, start: Target, num_outputs: int) -> FlowNetwork:
        splitters = []
        for sid, (b0, b1) in enumerate(self.branches):
            if b0 is None or b1 is None:
                raise ValueError(f"splitter {sid} left unwired")
            splitters.append(Splitter(sid, HALF, b0, b1))
        return FlowNetwork(tuple(splitters), start, num_outputs)


def retarget(network: FlowNetwork, fn: Callable[[Target], Target], num_outputs: int | None = None,
             offset: int = 0) -> tuple[list[Splitter], Target]:
    """Apply ``fn`` to every output target and shift splitter ids by ``offset``."""

    def move(t: Target) -> Target:
        return fn(t) if t.is_output else S(t.index + offset)

    splitters = [Splitter(s.id + offset, s.bias, move(s.branch0), move(s.branch1)) for s in network.splitters]
    return splitters, move(network.start)


def relabel(network: FlowNetwork, mapping: Mapping[int, Target], num_outputs: int) -> FlowNetwork:
    splitters, start = retarget(network, lambda t: mapping[t.index])
    return FlowNetwork(tuple(splitters), start, num_outputs)


def close_feedback(network: FlowNetwork, label: int) -> FlowNetwork:
    """Route every edge into output ``label`` back to the start; drop the label.

    Edges are retargeted rather than passing through a junction, so the
    splitter count is unchanged. Higher labels shift down by one.
    """
    if network.start.is_output and network.start.index == label:
        raise ValueError("cannot feed back the output the start edge targets")
    def shift(t: Target) -> Target:
        return O(t.index - 1) if t.is_output and t.index > label else t

    start = shift(network.start)

    def fn(t: Target) -> Target:
        return start if t.index == label else shift(t)

    splitters, _ = retarget(network, fn)
    return FlowNetwork(tuple(splitters), start, network.num_outputs - 1)
