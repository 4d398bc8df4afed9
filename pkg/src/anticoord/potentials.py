"""Potential functions certifying convergence of the best-response dynamics.

Two families are provided:

* the sequential SN potential (integer valued) whose value drops by at least
  one whenever a single vertex changes state;
* the synchronous potential (half-integer valued) which looks one step ahead
  and drops by at least 1/2 per step until a fixed point or 2-cycle is hit.

Half-integers are carried as doubled integers so every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Mode, PreconditionError, ThresholdSystem, as_config, check_permutation, successor


@dataclass(frozen=True)
class SdsPotentialReport:
    vertex_sum: int
    edge_sum: int

    @property
    def total(self) -> int:
        return self.vertex_sum + self.edge_sum


@dataclass(frozen=True)
class SydsPotentialReport:
    """Synchronous potential; ``*_x2`` fields hold twice the true value."""

    edge_sum: int
    vertex_sum_x2: int

    @property
    def total_x2(self) -> int:
        return 2 * self.edge_sum - self.vertex_sum_x2

    @property
    def vertex_sum(self) -> float:
        return self.vertex_sum_x2 / 2

    @property
    def total(self) -> float:
        return self.total_x2 / 2


def _require_nonconstant(system: ThresholdSystem) -> None:
    if system.has_constants():
        bad = np.flatnonzero(system.constant_one() | system.constant_zero())
        raise PreconditionError(f"potential undefined with constant vertices {bad[:10].tolist()}")


def _require_sds(system: ThresholdSystem) -> None:
    if system.mode is not Mode.SN:
        raise PreconditionError("the sequential potential is defined for SN systems only")
    if system.graph.directed:
        raise PreconditionError("the sequential potential needs an undirected graph")
    _require_nonconstant(system)


def _sds(system: ThresholdSystem, c: np.ndarray) -> SdsPotentialReport:
    vertex = int(np.where(c == 1, system.tau1, system.tau0).sum())
    edges = system.graph.edges
    if edges:
        e = np.asarray(edges)
        edge = int(np.count_nonzero(c[e[:, 0]] == c[e[:, 1]]))
    else:
        edge = 0
    return SdsPotentialReport(vertex, edge)


def sds_potential(system: ThresholdSystem, config) -> SdsPotentialReport:
    _require_sds(system)
    return _sds(system, as_config(system, config))


def sds_bounds(system: ThresholdSystem) -> tuple[int, int]:
    """Lower bound sum(min(tau0, tau1)) and upper bound 3m."""
    return int(np.minimum(system.tau0, system.tau1).sum()), 3 * system.m


def syds_potential(system: ThresholdSystem, config) -> SydsPotentialReport:
    """Synchronous potential of ``config``; the successor is computed internally.

    Under SE each vertex is treated as its own neighbor: the self term
    ``C(u) * C'(u)`` joins the edge sum and tau0 uses the closed neighborhood.
    """
    _require_nonconstant(system)
    if system.graph.directed:
        raise PreconditionError("the synchronous potential needs an undirected graph")
    c = as_config(system, config).astype(np.int64)
    nxt = successor(system, c).astype(np.int64)
    edge = 0
    if system.m:
        e = np.asarray(system.graph.edges)
        u, v = e[:, 0], e[:, 1]
        edge = int((c[u] * nxt[v] + c[v] * nxt[u]).sum())
    if system.mode is Mode.SE:
        edge += int((c * nxt).sum())
    # 2 * (C + C') * (tau0 - 1/2)
    vertex_x2 = int(((c + nxt) * (2 * system.tau0 - 1)).sum())
    return SydsPotentialReport(edge, vertex_x2)


def syds_bounds_x2(system: ThresholdSystem) -> tuple[int, int]:
    """Doubled (lower, upper) bounds: SN [-4m+n, 0]; SE [-4m-n, 0]."""
    n, m = system.n, system.m
    if system.mode is Mode.SN:
        return 2 * (-4 * m + n), 0
    return 2 * (-4 * m - n), 0


def check_decrease_seq(system: ThresholdSystem, config, permutation: Sequence[int]) -> list[int]:
    """Potential change of every flipping substep during one sequential pass."""
    _require_sds(system)
    order = check_permutation(system.n, permutation)
    c = as_config(system, config).copy()
    deltas = []
    before = _sds(system, c).total
    for v in order:
        nxt = int(system.graph.degree(v) - c[system.graph.neighbors(v)].sum() >= system.tau1[v])
        if nxt != c[v]:
            c[v] = nxt
            after = _sds(system, c).total
            deltas.append(after - before)
            before = after
    return deltas


def check_decrease_sync(system: ThresholdSystem, config, max_steps: int | None = None) -> list[tuple[int, bool]]:
    """Doubled potential change per synchronous step, paired with ``C == C''``.

    The run stops two steps after the first configuration with ``C == C''``
    so that the zero deltas on the limit cycle are visible too.
    """
    _require_nonconstant(system)
    if max_steps is None:
        max_steps = 8 * system.m + 2 * system.n + 16
    c = as_config(system, config).copy()
    out: list[tuple[int, bool]] = []
    after_converged = 0
    for _ in range(max_steps + 2):
        c1 = successor(system, c)
        c2 = successor(system, c1)
        converged = bool(np.array_equal(c, c2))
        delta = syds_potential(system, c1).total_x2 - syds_potential(system, c).total_x2
        out.append((delta, converged))
        if converged:
            after_converged += 1
            if after_converged >= 2:
                break
        c = c1
    return out
