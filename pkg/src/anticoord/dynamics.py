"""Synchronous and sequential best-response dynamics with limit-cycle detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import Mode, ThresholdSystem, UsageError, as_config, check_permutation, successor

DEFAULT_SEQ_SE_STEPS = 10_000
DEFAULT_VISITED_BUDGET = 1_000_000


@dataclass(frozen=True)
class Synchronous:
    name = "sync"


@dataclass(frozen=True)
class Sequential:
    order: tuple[int, ...]
    name = "seq"

    def __init__(self, order: Sequence[int]):
        object.__setattr__(self, "order", tuple(int(v) for v in order))

    @classmethod
    def identity(cls, n: int) -> "Sequential":
        return cls(range(n))


Scheme = Union[Synchronous, Sequential]


@dataclass(frozen=True)
class FixedPoint:
    config: np.ndarray
    kind = "fixed_point"


@dataclass(frozen=True)
class TwoCycle:
    first: np.ndarray
    second: np.ndarray
    kind = "two_cycle"


@dataclass(frozen=True)
class LongCycle:
    length: int
    entry_step: int
    kind = "long_cycle"


@dataclass(frozen=True)
class Unconverged:
    kind = "unconverged"


Terminal = Union[FixedPoint, TwoCycle, LongCycle, Unconverged]


@dataclass
class Trace:
    """Outcome of one simulation run.

    ``steps_taken`` is the index of the first configuration that lies on the
    terminal limit cycle (0 when the initial configuration is already there).
    ``flip_counts[t]`` is the Hamming distance between steps t and t+1 and
    ``two_step_flips[t]`` the distance between steps t and t+2.
    """

    steps_taken: int
    flip_counts: list[int]
    terminal: Terminal
    two_step_flips: list[int] = field(default_factory=list)
    configs_sampled: Optional[list[np.ndarray]] = None

    @property
    def kind(self) -> str:
        return self.terminal.kind

    @property
    def converged(self) -> bool:
        return not isinstance(self.terminal, Unconverged)


def step_sync(system: ThresholdSystem, config) -> np.ndarray:
    return successor(system, config)


def step_seq(system: ThresholdSystem, config, permutation: Sequence[int]) -> np.ndarray:
    order = check_permutation(system.n, permutation)
    c = as_config(system, config).copy()
    _seq_pass(system, c, _zero_inputs(system, c), order.tolist(), system.tau1.tolist())
    return c


def _zero_inputs(system: ThresholdSystem, c: np.ndarray) -> list[int]:
    # neighbor zero counts only; the SE self term is added per substep
    return (system.graph.matrix @ (1 - c.astype(np.int64))).tolist()


def _seq_pass(system, c: np.ndarray, zeros: list[int], order: list[int], tau: list[int]) -> int:
    """One in-place sequential step; returns the number of vertices that flipped."""
    out = system.graph.out_lists()
    se = system.mode is Mode.SE
    flips = 0
    for v in order:
        cur = c[v]
        z = zeros[v] + (1 if se and cur == 0 else 0)
        new = 1 if z >= tau[v] else 0
        if new != cur:
            c[v] = new
            flips += 1
            delta = -1 if new else 1
            for w in out[v]:
                zeros[w] += delta
    return flips


def default_max_steps(system: ThresholdSystem, scheme: Scheme) -> int:
    n, m = system.n, system.m
    if isinstance(scheme, Synchronous):
        return 8 * m + 2 * n + 16
    if system.mode is Mode.SN:
        return 3 * m + 16
    return DEFAULT_SEQ_SE_STEPS


def simulate(
    system: ThresholdSystem,
    scheme: Scheme,
    initial,
    max_steps: Optional[int] = None,
    record: bool = False,
    visited_budget: int = DEFAULT_VISITED_BUDGET,
) -> Trace:
    """Iterate the dynamics from ``initial`` until a limit cycle is recognised.

    Synchronous runs and sequential SN runs only need the C == C' and
    C == C'' tests.  Sequential SE runs can enter long cycles, so every visited
    configuration is remembered (up to ``visited_budget`` entries).
    """
    if max_steps is None:
        max_steps = default_max_steps(system, scheme)
    if max_steps < 1:
        raise UsageError("max_steps must be at least 1")
    c0 = as_config(system, initial).copy()
    if isinstance(scheme, Sequential):
        order = check_permutation(system.n, scheme.order).tolist()
        tau = system.tau1.tolist()
        track = system.mode is Mode.SE
    elif isinstance(scheme, Synchronous):
        order = None
        track = False
    else:
        raise UsageError(f"unknown scheme {scheme!r}")

    configs = [c0.copy()] if record else None
    flips: list[int] = []
    two_step: list[int] = []
    visited: dict[bytes, int] = {c0.tobytes(): 0} if track else {}
    prev: Optional[np.ndarray] = None
    cur = c0
    # step t computes C_{t+1}; a terminal at index s needs C_{s+1} or C_{s+2}
    for t in range(max_steps + 2):
        if order is None:
            nxt = successor(system, cur)
        else:
            nxt = cur.copy()
            _seq_pass(system, nxt, _zero_inputs(system, cur), order, tau)
        if record:
            configs.append(nxt.copy())
        if prev is not None:
            two_step.append(int(np.count_nonzero(prev != nxt)))
        if np.array_equal(nxt, cur):
            if t > max_steps:
                break
            two_step.append(0)
            return Trace(t, flips, FixedPoint(cur), two_step, configs)
        if prev is not None and np.array_equal(nxt, prev):
            return Trace(t - 1, flips[:-1], TwoCycle(prev, cur), two_step, configs)
        if track:
            key = nxt.tobytes()
            seen = visited.get(key)
            if seen is not None:
                length = t + 1 - seen
                # lengths 1 and 2 were caught by the cheap tests above
                return Trace(seen, flips[:seen], LongCycle(length, seen), two_step, configs)
            if len(visited) < visited_budget:
                visited[key] = t + 1
        flips.append(int(np.count_nonzero(nxt != cur)))
        prev, cur = cur, nxt
    return Trace(max_steps, flips[:max_steps], Unconverged(), two_step, configs)


def avg_flip_rate(trace: Trace) -> float:
    """Mean number of vertices whose state differs between steps t and t+2."""
    if len(trace.two_step_flips) < 1:
        raise UsageError("trace too short to compute a two-step flip rate")
    return float(np.mean(trace.two_step_flips))
