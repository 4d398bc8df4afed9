"""Instance representation for inverted-threshold anti-coordination systems.

A :class:`ThresholdSystem` couples a :class:`Graph` with per-vertex thresholds
``tau1`` and a decision :class:`Mode`.  Vertex ``v`` outputs 1 iff the number
of state-0 inputs is at least ``tau1[v]``; under ``Mode.SE`` the vertex's own
state is one of its inputs, under ``Mode.SN`` it is not.

Configurations are length-n ``numpy.uint8`` vectors of 0/1 entries.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class UsageError(ValueError):
    """Invalid arguments supplied by the caller."""


class PreconditionError(ValueError):
    """An operation was called on an instance outside its domain."""


class BudgetError(RuntimeError):
    """A brute-force operation would exceed its configured size budget."""


class Mode(str, enum.Enum):
    SE = "se"
    SN = "sn"

    @property
    def self_essential(self) -> bool:
        return self is Mode.SE

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, Mode):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise UsageError(f"unknown mode {value!r}; expected 'se' or 'sn'") from None


class Graph:
    """Simple graph on vertices ``0..n-1``.

    For undirected graphs ``neighbors(v)`` is the usual neighbor list.  For
    directed graphs it is the in-neighbor list (the inputs of ``v``) and
    ``out_neighbors(v)`` gives the vertices that read ``v``.
    """

    __slots__ = ("n", "edges", "directed", "_in_ptr", "_in_idx", "_out_ptr", "_out_idx", "_matrix", "_out_cache")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), directed: bool = False):
        n = int(n)
        if n < 0:
            raise UsageError("vertex count must be nonnegative")
        seen = set()
        clean = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise UsageError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise UsageError(f"self-loop at vertex {u}")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise UsageError(f"duplicate edge {key}")
            seen.add(key)
            clean.append(key)
        self.n = n
        self.directed = bool(directed)
        self.edges: tuple[tuple[int, int], ...] = tuple(clean)

        src = np.fromiter((e[0] for e in clean), dtype=np.int64, count=len(clean))
        dst = np.fromiter((e[1] for e in clean), dtype=np.int64, count=len(clean))
        if directed:
            self._in_ptr, self._in_idx = _csr(n, dst, src)
            self._out_ptr, self._out_idx = _csr(n, src, dst)
        else:
            rows = np.concatenate([src, dst])
            cols = np.concatenate([dst, src])
            self._in_ptr, self._in_idx = _csr(n, rows, cols)
            self._out_ptr, self._out_idx = self._in_ptr, self._in_idx
        self._matrix = None
        self._out_cache = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self._in_idx[self._in_ptr[v]:self._in_ptr[v + 1]]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self._out_idx[self._out_ptr[v]:self._out_ptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self._in_ptr[v + 1] - self._in_ptr[v])

    @property
    def degrees(self) -> np.ndarray:
        """Per-vertex input count (in-degree for directed graphs)."""
        return np.diff(self._in_ptr)

    def adjacency_lists(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def out_lists(self) -> list[list[int]]:
        if self._out_cache is None:
            self._out_cache = [self.out_neighbors(v).tolist() for v in range(self.n)]
        return self._out_cache

    @property
    def matrix(self) -> sp.csr_matrix:
        """Input matrix ``A`` with ``A[v, u] = 1`` iff ``u`` is an input of ``v``."""
        if self._matrix is None:
            data = np.ones(len(self._in_idx), dtype=np.int32)
            self._matrix = sp.csr_matrix((data, self._in_idx, self._in_ptr), shape=(self.n, self.n))
        return self._matrix

    def components(self) -> list[list[int]]:
        """Weakly connected components, each sorted, ordered by smallest vertex."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return [groups[k] for k in sorted(groups)]

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.directed, sorted(self.edges)) == (other.n, other.directed, sorted(other.edges))

    def __hash__(self) -> int:
        return hash((self.n, self.directed, tuple(sorted(self.edges))))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


def _csr(n: int, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, rows + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, cols.astype(np.int64)


@dataclass(frozen=True, eq=False)
class ThresholdSystem:
    graph: Graph
    tau1: np.ndarray
    mode: Mode = Mode.SN
    _closed: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau1, dtype=np.int64).copy()
        if tau.shape != (self.graph.n,):
            raise UsageError(f"need {self.graph.n} thresholds, got shape {tau.shape}")
        if (tau < 0).any():
            raise UsageError("thresholds must be nonnegative")
        tau.setflags(write=False)
        object.__setattr__(self, "tau1", tau)
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "_closed", 1 if self.mode is Mode.SE else 0)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def tau0(self) -> np.ndarray:
        """Minimum number of state-1 inputs that force output 0."""
        return self.graph.degrees + 1 + self._closed - self.tau1

    def input_count(self) -> np.ndarray:
        """Number of inputs per vertex (degree, plus one under SE)."""
        return self.graph.degrees + self._closed

    def constant_one(self) -> np.ndarray:
        return self.tau1 == 0

    def constant_zero(self) -> np.ndarray:
        return self.tau1 > self.input_count()

    def has_constants(self) -> bool:
        return bool(self.constant_one().any() or self.constant_zero().any())

    def with_mode(self, mode: Mode | str) -> "ThresholdSystem":
        return ThresholdSystem(self.graph, self.tau1, Mode.parse(mode))

    def with_tau1(self, tau1: Sequence[int]) -> "ThresholdSystem":
        return ThresholdSystem(self.graph, np.asarray(tau1), self.mode)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThresholdSystem):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.mode is other.mode
            and np.array_equal(self.tau1, other.tau1)
        )

    def __hash__(self) -> int:
        return hash((self.graph, self.mode, self.tau1.tobytes()))

    def __repr__(self) -> str:
        return f"ThresholdSystem({self.graph!r}, mode={self.mode.value})"


def as_config(system: ThresholdSystem, config: Sequence[int] | np.ndarray) -> np.ndarray:
    c = np.asarray(config)
    if c.shape != (system.n,):
        raise UsageError(f"configuration must have length {system.n}, got shape {c.shape}")
    if c.size and not np.isin(c, (0, 1)).all():
        raise UsageError("configuration entries must be 0 or 1")
    return c.astype(np.uint8, copy=False)


def check_permutation(n: int, order: Sequence[int]) -> np.ndarray:
    p = np.asarray(order, dtype=np.int64)
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise UsageError(f"order must be a permutation of 0..{n - 1}")
    return p


def eval_local(system: ThresholdSystem, config, v: int) -> int:
    """Next state of vertex ``v`` given the current configuration."""
    if not 0 <= int(v) < system.n:
        raise UsageError(f"vertex {v} outside 0..{system.n - 1}")
    c = as_config(system, config)
    zeros = int(system.graph.degree(v) - c[system.graph.neighbors(v)].sum())
    if system.mode is Mode.SE and c[v] == 0:
        zeros += 1
    return int(zeros >= system.tau1[v])


def zero_counts(system: ThresholdSystem, config: np.ndarray) -> np.ndarray:
    """Number of state-0 inputs of every vertex (closed neighborhood under SE)."""
    zeros = system.graph.matrix @ (1 - config.astype(np.int64))
    if system.mode is Mode.SE:
        zeros += 1 - config
    return zeros


def successor(system: ThresholdSystem, config) -> np.ndarray:
    c = as_config(system, config)
    return (zero_counts(system, c) >= system.tau1).astype(np.uint8)


def is_fixed_point(system: ThresholdSystem, config) -> bool:
    c = as_config(system, config)
    return bool(np.array_equal(successor(system, c), c))


def validate(system: ThresholdSystem) -> list[str]:
    """Human-readable warnings about degenerate parts of an instance."""
    warnings = []
    inputs = system.input_count()
    for v in range(system.n):
        t = int(system.tau1[v])
        if t == 0:
            warnings.append(f"constant-1 vertex {v}")
        elif t == inputs[v] + 1:
            warnings.append(f"constant-0 vertex {v}")
        elif t > inputs[v] + 1:
            warnings.append(
                f"threshold out of range at vertex {v}: tau1={t} > {inputs[v] + 1} (constant-0)"
            )
    if system.n > 1 and not system.graph.is_connected():
        comps = system.graph.components()
        warnings.append(f"graph is disconnected ({len(comps)} components)")
    return warnings
