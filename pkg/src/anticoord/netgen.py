"""Random networks, thresholds and initial configurations.

Graph generators delegate to networkx with an integer seed.  Variants:

* ``Gnp``: independent edges with probability ``p`` (``nx.gnp_random_graph``).
* ``BarabasiAlbert``: starts from a clique on ``attach_count`` vertices
  (no edges when ``attach_count == 1``) and attaches every later vertex to
  ``attach_count`` distinct existing vertices chosen proportionally to degree,
  giving ``C(k, 2) + k * (n - k)`` edges.
* ``WattsStrogatz``: ring lattice with ``k`` nearest neighbors, each edge
  rewired independently with ``rewire_prob`` (``nx.watts_strogatz_graph``).

Per-vertex draws (thresholds, initial states) use numpy's PCG64 generator
seeded from ``SeedSequence(seed)``; one uniform variate is drawn per vertex in
vertex order, so the draw for vertex ``v`` depends only on ``(seed, v)`` and
the vertex's range.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import networkx as nx
import numpy as np

from .core import Graph, Mode, UsageError


@dataclass(frozen=True)
class Gnp:
    n: int
    p: float

    def check(self):
        if self.n < 0 or not 0.0 <= self.p <= 1.0:
            raise UsageError(f"Gnp needs n >= 0 and 0 <= p <= 1, got n={self.n}, p={self.p}")


@dataclass(frozen=True)
class BarabasiAlbert:
    n: int
    attach_count: int

    def check(self):
        if self.attach_count < 1 or self.n < self.attach_count:
            raise UsageError(f"BarabasiAlbert needs 1 <= attach_count <= n, got {self.attach_count}, n={self.n}")

    def expected_edges(self) -> int:
        k = self.attach_count
        return k * (k - 1) // 2 + k * (self.n - k)


@dataclass(frozen=True)
class WattsStrogatz:
    n: int
    k: int
    rewire_prob: float

    def check(self):
        if self.k % 2 or not 0 <= self.k < self.n or not 0.0 <= self.rewire_prob <= 1.0:
            raise UsageError(
                f"WattsStrogatz needs even k < n and 0 <= rewire_prob <= 1, got k={self.k}, n={self.n}"
            )


GeneratorSpec = Union[Gnp, BarabasiAlbert, WattsStrogatz]


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def generate(spec: GeneratorSpec, seed: int) -> Graph:
    spec.check()
    seed = int(seed) % (2**32)
    if isinstance(spec, Gnp):
        G = nx.gnp_random_graph(spec.n, spec.p, seed=seed)
    elif isinstance(spec, BarabasiAlbert):
        k = spec.attach_count
        if spec.n <= k:
            G = nx.complete_graph(spec.n)
        elif k == 1:
            # a lone seed vertex has no degree to attach to; networkx starts from one edge
            G = nx.barabasi_albert_graph(spec.n, 1, seed=seed)
        else:
            G = nx.barabasi_albert_graph(spec.n, k, seed=seed, initial_graph=nx.complete_graph(k))
    elif isinstance(spec, WattsStrogatz):
        G = nx.watts_strogatz_graph(spec.n, spec.k, spec.rewire_prob, seed=seed)
    else:
        raise UsageError(f"unknown generator {spec!r}")
    g = Graph(spec.n, sorted(G.edges()))
    isolated = int(np.count_nonzero(g.degrees == 0))
    if isolated:
        warnings.warn(f"generated graph has {isolated} isolated vertices", stacklevel=2)
    return g


def gnp_for_degree(n: int, avg_degree: float) -> Gnp:
    if n < 2:
        raise UsageError("need at least two vertices")
    return Gnp(n, min(1.0, avg_degree / (n - 1)))


def random_thresholds(graph: Graph, mode: Mode | str, seed: int, degree_cap: bool = False) -> np.ndarray:
    """Uniform tau1 in ``[1, d+1]`` (SE) or ``[1, d]`` (SN); empty ranges give 1.

    ``degree_cap=True`` draws from ``[1, d]`` in both modes, the protocol used
    for the equilibrium-count study.
    """
    mode = Mode.parse(mode)
    d = graph.degrees.astype(np.int64)
    hi = d + 1 if mode is Mode.SE and not degree_cap else d
    if (hi == 0).any():
        warnings.warn("vertices with an empty threshold range get tau1 = 1", stacklevel=2)
    hi = np.maximum(hi, 1)
    u = rng_for(seed).random(graph.n)
    return (1 + np.floor(u * hi)).astype(np.int64)


def random_config(n: int, p_zero: float, seed: int) -> np.ndarray:
    if not 0.0 <= p_zero <= 1.0:
        raise UsageError(f"p_zero must lie in [0, 1], got {p_zero}")
    u = rng_for(seed).random(n)
    return (u >= p_zero).astype(np.uint8)
