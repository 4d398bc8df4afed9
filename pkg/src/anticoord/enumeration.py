"""Exhaustive phase-space oracle for small systems.

Configurations are numbered as integers with vertex 0 in the least
significant bit and scanned in ascending order.  Local functions are
evaluated word-parallel: 64 configurations share one ``uint64`` word per
vertex, and the inverted-threshold test becomes an "at least k of these bit
planes" reduction.  :func:`fixed_points_naive` is the plain per-configuration
scan the fast path is checked against.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import BudgetError, Mode, ThresholdSystem, is_fixed_point

FP_LIMIT = 25
CYCLE_LIMIT = 20
CHUNK_BITS = 20

ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_LOW_PATTERNS = [
    np.uint64(0xAAAAAAAAAAAAAAAA),
    np.uint64(0xCCCCCCCCCCCCCCCC),
    np.uint64(0xF0F0F0F0F0F0F0F0),
    np.uint64(0xFF00FF00FF00FF00),
    np.uint64(0xFFFF0000FFFF0000),
    np.uint64(0xFFFFFFFF00000000),
]


@dataclass
class PhaseSpaceSummary:
    num_fixed_points: int
    fixed_points: list[np.ndarray]
    cycle_length_histogram: dict[int, int] = field(default_factory=dict)
    configs_scanned: int = 0

    def to_json(self) -> dict:
        return {
            "num_fixed_points": self.num_fixed_points,
            "fixed_points": [fp.astype(int).tolist() for fp in self.fixed_points],
            "cycle_length_histogram": {str(k): v for k, v in sorted(self.cycle_length_histogram.items())},
            "configs_scanned": self.configs_scanned,
        }


def index_to_config(index: int, n: int) -> np.ndarray:
    return np.array([(index >> v) & 1 for v in range(n)], dtype=np.uint8)


def config_to_index(config) -> int:
    return sum(int(b) << v for v, b in enumerate(config))


def _state_planes(n: int, low_bits: int, chunk: int) -> list[np.ndarray]:
    words = 1 << max(low_bits - 6, 0)
    planes = []
    widx = np.arange(words, dtype=np.uint64)
    for v in range(n):
        if v < min(low_bits, 6):
            planes.append(np.full(words, _LOW_PATTERNS[v], dtype=np.uint64))
        elif v < low_bits:
            bit = (widx >> np.uint64(v - 6)) & np.uint64(1)
            planes.append(np.where(bit == 1, ALL, np.uint64(0)).astype(np.uint64))
        else:
            on = (chunk >> (v - low_bits)) & 1
            planes.append(np.full(words, ALL if on else 0, dtype=np.uint64))
    return planes


def _at_least(inputs: list[np.ndarray], k: int, words: int) -> np.ndarray:
    """Bit plane of positions where at least ``k`` of ``inputs`` are set."""
    if k <= 0:
        return np.full(words, ALL, dtype=np.uint64)
    if k > len(inputs):
        return np.zeros(words, dtype=np.uint64)
    acc = [np.full(words, ALL, dtype=np.uint64)] + [np.zeros(words, dtype=np.uint64) for _ in range(k)]
    for i, x in enumerate(inputs):
        for j in range(min(k, i + 1), 0, -1):
            acc[j] |= acc[j - 1] & x
    return acc[k]


def _output_planes(system: ThresholdSystem, states: list[np.ndarray], words: int) -> list[np.ndarray]:
    zeros = [~s for s in states]
    adj = system.graph.adjacency_lists()
    out = []
    for v in range(system.n):
        inputs = [zeros[u] for u in adj[v]]
        if system.mode is Mode.SE:
            inputs.append(zeros[v])
        out.append(_at_least(inputs, int(system.tau1[v]), words))
    return out


def _chunks(n: int) -> Iterator[tuple[int, int, int]]:
    low = min(n, CHUNK_BITS)
    for chunk in range(1 << (n - low)):
        yield chunk, low, 1 << max(low - 6, 0)


def _valid_mask(low_bits: int) -> np.uint64:
    if low_bits >= 6:
        return ALL
    return np.uint64((1 << (1 << low_bits)) - 1)


def _fixed_point_words(system: ThresholdSystem, chunk: int, low: int, words: int) -> np.ndarray:
    states = _state_planes(system.n, low, chunk)
    outs = _output_planes(system, states, words)
    mask = np.full(words, _valid_mask(low), dtype=np.uint64)
    for s, o in zip(states, outs):
        mask &= ~(s ^ o)
    return mask


def _check_limit(n: int, n_limit: int) -> None:
    if n > n_limit:
        raise BudgetError(f"n={n} exceeds the enumeration budget n_limit={n_limit}")


def count_fixed_points(system: ThresholdSystem, n_limit: int = FP_LIMIT) -> int:
    _check_limit(system.n, n_limit)
    total = 0
    for chunk, low, words in _chunks(system.n):
        total += int(np.bitwise_count(_fixed_point_words(system, chunk, low, words)).sum())
    return total


def enumerate_fixed_points(system: ThresholdSystem, n_limit: int = FP_LIMIT) -> PhaseSpaceSummary:
    """All fixed points of ``system`` (identical for every update scheme)."""
    _check_limit(system.n, n_limit)
    n = system.n
    found = []
    for chunk, low, words in _chunks(n):
        mask = _fixed_point_words(system, chunk, low, words)
        for w in np.flatnonzero(mask):
            word = int(mask[w])
            base = (chunk << low) + 64 * int(w)
            while word:
                b = (word & -word).bit_length() - 1
                found.append(base + b)
                word &= word - 1
    fps = [index_to_config(i, n) for i in found]
    return PhaseSpaceSummary(len(fps), fps, {}, 1 << n)


def fixed_points_naive(system: ThresholdSystem) -> list[int]:
    """Reference scan: indices of fixed points, one configuration at a time."""
    n = system.n
    return [i for i in range(1 << n) if is_fixed_point(system, index_to_config(i, n))]


def successor_table(system: ThresholdSystem, n_limit: int = CYCLE_LIMIT) -> np.ndarray:
    """Synchronous successor of every configuration index."""
    _check_limit(system.n, n_limit)
    n = system.n
    low = n
    words = 1 << max(low - 6, 0)
    states = _state_planes(n, low, 0)
    outs = _output_planes(system, states, words)
    size = 1 << n
    succ = np.zeros(size, dtype=np.uint32)
    for v, o in enumerate(outs):
        bits = np.unpackbits(o.view(np.uint8), bitorder="little")[:size]
        succ |= bits.astype(np.uint32) << np.uint32(v)
    return succ


def functional_graph_cycles(succ: np.ndarray) -> dict[int, int]:
    """Histogram cycle-length -> number of cycles of the map ``i -> succ[i]``."""
    size = len(succ)
    succ = succ.astype(np.int64)
    alive = np.ones(size, dtype=bool)
    indeg = np.bincount(succ, minlength=size)
    # strip transient trees: repeatedly drop nodes nobody maps to
    frontier = np.flatnonzero(indeg == 0)
    while frontier.size:
        alive[frontier] = False
        targets = succ[frontier]
        np.subtract.at(indeg, targets, 1)
        cand = np.unique(targets)
        frontier = cand[(indeg[cand] == 0) & alive[cand]]
    cyclic = np.flatnonzero(alive)
    length = np.zeros(size, dtype=np.int64)
    cur = succ[cyclic]
    steps = 1
    pending = np.ones(cyclic.size, dtype=bool)
    while pending.any():
        hit = pending & (cur == cyclic)
        length[cyclic[hit]] = steps
        pending &= ~hit
        cur = np.where(pending, succ[cur], cur)
        steps += 1
    hist: dict[int, int] = {}
    if cyclic.size:
        lengths, counts = np.unique(length[cyclic], return_counts=True)
        for L, c in zip(lengths.tolist(), counts.tolist()):
            hist[L] = c // L
    return hist


def enumerate_sync_cycles(system: ThresholdSystem, n_limit: int = CYCLE_LIMIT) -> PhaseSpaceSummary:
    succ = successor_table(system, n_limit)
    hist = functional_graph_cycles(succ)
    idx = np.flatnonzero(succ == np.arange(len(succ), dtype=np.uint32))
    fps = [index_to_config(int(i), system.n) for i in idx]
    return PhaseSpaceSummary(len(fps), fps, hist, len(succ))


def _count_one(args: tuple[ThresholdSystem, int]) -> Optional[int]:
    system, budget = args
    if system.n > budget:
        return None
    return count_fixed_points(system, budget)


def worker_count() -> int:
    env = os.environ.get("ANTICOORD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def count_ne_batch(
    instances: Sequence[ThresholdSystem], budget: int = FP_LIMIT, workers: Optional[int] = None
) -> list[Optional[int]]:
    """Fixed-point count per instance, in input order; ``None`` marks over-budget entries."""
    jobs = [(s, budget) for s in instances]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) < 2:
        return [_count_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_count_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
