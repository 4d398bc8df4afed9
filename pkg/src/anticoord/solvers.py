"""Nash-equilibrium (fixed-point) solvers.

``solve_sn_general`` works for every SN instance.  The remaining solvers cover
restricted classes where equilibria can be found, or ruled out, in linear
time: NAND/NOR threshold patterns, DAGs, graphs without even cycles, and
complete graphs.  Every ``Found`` answer is checked with ``is_fixed_point``
before it is returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

import networkx as nx
import numpy as np

from .core import Mode, ThresholdSystem, is_fixed_point
from .dynamics import Sequential, simulate, FixedPoint


class SolverInvariantError(AssertionError):
    """A solver produced a configuration that is not a fixed point."""


@dataclass(frozen=True)
class Found:
    config: np.ndarray
    kind = "found"


@dataclass(frozen=True)
class NoEquilibrium:
    reason: str = ""
    kind = "no_equilibrium"


@dataclass(frozen=True)
class NotApplicable:
    reason: str
    kind = "not_applicable"


SolveOutcome = Union[Found, NoEquilibrium, NotApplicable]


def _found(system: ThresholdSystem, config, solver: str) -> Found:
    c = np.asarray(config, dtype=np.uint8)
    if not is_fixed_point(system, c):
        raise SolverInvariantError(f"{solver} produced a non-fixed point {c.tolist()}")
    return Found(c)


def solve_sn_general(system: ThresholdSystem, seed: Optional[int] = None) -> SolveOutcome:
    """Sequential best response from all-zeros in identity order (or a seeded random start)."""
    if system.mode is not Mode.SN:
        return NotApplicable("general solver requires SN mode")
    n = system.n
    if seed is None:
        start = np.zeros(n, dtype=np.uint8)
        order = range(n)
    else:
        rng = np.random.default_rng(seed)
        start = rng.integers(0, 2, n).astype(np.uint8)
        order = rng.permutation(n)
    trace = simulate(system, Sequential(order), start)
    if not isinstance(trace.terminal, FixedPoint):
        raise SolverInvariantError(f"sequential SN dynamics ended in {trace.kind}")
    return _found(system, trace.terminal.config, "solve_sn_general")


def _nand_nor_pattern(system: ThresholdSystem) -> Optional[str]:
    top = system.input_count()
    for v in range(system.n):
        t = int(system.tau1[v])
        if t != 1 and t != top[v]:
            return f"vertex {v} has tau1={t}, expected 1 or {int(top[v])}"
    return None


def solve_nand_nor(system: ThresholdSystem) -> SolveOutcome:
    if system.graph.directed:
        return NotApplicable("NAND/NOR solver expects an undirected graph")
    problem = _nand_nor_pattern(system)
    if problem:
        return NotApplicable(problem)
    nand = system.tau1 == 1
    c = np.where(nand, 1, 0).astype(np.uint8)
    if system.mode is Mode.SE:
        # the only candidate: NAND vertices 1, NOR vertices 0
        if is_fixed_point(system, c):
            return Found(c)
        return NoEquilibrium("some NAND vertex has no NOR neighbor or vice versa")
    adj = system.graph.adjacency_lists()
    deg = system.graph.degrees
    for v in range(system.n):
        if system.tau1[v] == 1 and all(c[w] == 1 for w in adj[v]):
            c[v] = 0
        if system.tau1[v] == deg[v] and all(c[w] == 0 for w in adj[v]):
            c[v] = 1
    return _found(system, c, "solve_nand_nor")


def solve_dag(system: ThresholdSystem) -> SolveOutcome:
    """Resolve vertices in topological order; states are forced one by one."""
    g = system.graph
    if not g.directed:
        return NotApplicable("DAG solver requires a directed graph")
    indeg = g.degrees.astype(np.int64).copy()
    tau = system.tau1.astype(np.int64).copy()
    out = g.out_lists()
    c = np.zeros(g.n, dtype=np.uint8)
    frontier = deque(v for v in range(g.n) if indeg[v] == 0)
    done = 0
    dead: Optional[int] = None
    while frontier:
        v = frontier.popleft()
        done += 1
        if tau[v] == 0:
            c[v] = 1
        elif system.mode is Mode.SE and tau[v] == 1:
            # reads only itself: flips every step
            if dead is None:
                dead = v
            c[v] = 1
        else:
            c[v] = 0
        for w in out[v]:
            if c[v] == 0 and tau[w] > 0:
                tau[w] -= 1
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
    if done < g.n:
        return NotApplicable("graph has a directed cycle")
    if dead is not None:
        return NoEquilibrium(f"vertex {dead} has residual threshold 1 with no remaining inputs")
    return _found(system, c, "solve_dag")


def solve_complete(system: ThresholdSystem) -> SolveOutcome:
    """Scan the possible numbers of state-0 vertices on a complete graph."""
    g = system.graph
    n = g.n
    if g.directed or g.m != n * (n - 1) // 2:
        return NotApplicable("graph is not complete")
    tau = system.tau1
    counts = np.bincount(np.minimum(tau, n + 2), minlength=n + 3)
    order = np.argsort(tau, kind="stable")
    if system.mode is Mode.SE:
        # every vertex sees all a0 zeros, so exactly the vertices with tau1 <= a0 are 1
        for a0 in range(n + 1):
            ones = n - a0
            # ones must be exactly the vertices with tau1 <= a0
            if int(counts[: a0 + 1].sum()) == ones:
                c = np.zeros(n, dtype=np.uint8)
                c[order[:ones]] = 1
                return _found(system, c, "solve_complete")
        return NoEquilibrium("no threshold cut balances the number of state-0 vertices")
    for a0 in range(n + 1):
        # SN: tau1 < a0 forces 1, tau1 > a0 forces 0, tau1 == a0 may take either
        below = int(counts[:a0].sum())
        equal = int(counts[a0])
        forced_zero = n - below - equal
        if forced_zero <= a0 <= forced_zero + equal:
            c = np.zeros(n, dtype=np.uint8)
            ones = n - a0
            c[order[:ones]] = 1
            return _found(system, c, "solve_complete")
    raise SolverInvariantError("SN complete graph without a fixed point")


def even_cycle_free(graph) -> bool:
    """True iff every biconnected block is a single edge or an odd cycle."""
    if graph.directed:
        return False
    G = nx.Graph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(graph.edges)
    for block in nx.biconnected_component_edges(G):
        block = list(block)
        if len(block) == 1:
            continue
        verts = {x for e in block for x in e}
        if len(verts) != len(block) or len(block) % 2 == 0:
            return False
    return True


def _cycle_blocks(graph) -> list[list[int]]:
    """Vertex lists, in cyclic order, of the cycle blocks of a cactus graph."""
    G = nx.Graph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(graph.edges)
    cycles = []
    for block in nx.biconnected_component_edges(G):
        block = list(block)
        if len(block) < 3:
            continue
        H = nx.Graph(block)
        start = min(H.nodes)
        walk = [start]
        prev, cur = None, start
        while True:
            nbrs = sorted(w for w in H.neighbors(cur) if w != prev)
            nxt = nbrs[0]
            if nxt == start:
                break
            walk.append(nxt)
            prev, cur = cur, nxt
        cycles.append(walk)
    cycles.sort()
    return cycles


class _Peeler:
    """Exact elimination on a graph whose blocks are edges or cycles.

    Each live vertex ``v`` carries, per own state ``s``, whether ``s`` is still
    possible (``ok[v][s]``) and the best zero-count its already-eliminated
    children can supply: the maximum when ``v`` is 1 (more zeros only help a
    1-vertex) and the minimum when ``v`` is 0.  A vertex leaves the graph as a
    leaf (one live neighbor), as the body of a cycle hanging off a single gate
    vertex, or as an isolated root.  Back-substitution in reverse order then
    fixes every state.
    """

    def __init__(self, system: ThresholdSystem):
        self.system = system
        self.n = system.n
        self.tau = system.tau1.tolist()
        self.self_term = 1 if system.mode is Mode.SE else 0
        self.adj = [set(a) for a in system.graph.adjacency_lists()]
        self.ok = [[True, True] for _ in range(self.n)]
        self.best = [[0, 0] for _ in range(self.n)]  # [min zeros if 0, max zeros if 1]
        self.alive = [True] * self.n
        # plan entries: ("leaf", v, parent, table) | ("path", gate, path, table) | ("root", v)
        self.plan: list[tuple] = []

    def feasible(self, v: int, s: int, outside_zeros: int) -> bool:
        if not self.ok[v][s]:
            return False
        if s == 1:
            return outside_zeros + self.best[v][1] >= self.tau[v]
        return outside_zeros + self.best[v][0] + self.self_term < self.tau[v]

    def _attach(self, parent: int, t: int, zero_options: list[int]) -> None:
        """Merge a child's possible zero contributions into ``parent`` at state ``t``."""
        if not zero_options:
            self.ok[parent][t] = False
        elif t == 1:
            self.best[parent][1] += max(zero_options)
        else:
            self.best[parent][0] += min(zero_options)

    def remove_leaf(self, v: int) -> None:
        (p,) = self.adj[v]
        table = {}
        for t in (0, 1):
            allowed = [s for s in (0, 1) if self.feasible(v, s, 1 - t)]
            # pick the child state that best serves the parent
            if allowed:
                s = (0 if 0 in allowed else 1) if t == 1 else (1 if 1 in allowed else 0)
                table[t] = s
                self._attach(p, t, [1 - s])
            else:
                table[t] = None
                self._attach(p, t, [])
        self.plan.append(("leaf", v, p, table))
        self._drop(v)

    def remove_path(self, gate: int, path: list[int]) -> None:
        """Eliminate ``path`` (degree-2 vertices, both ends adjacent to ``gate``)."""
        table = {}
        for t in (0, 1):
            best = self._best_path(path, t)
            table[t] = best
            self._attach(gate, t, [] if best is None else [2 - best[0] - best[-1]])
        self.plan.append(("path", gate, path, table))
        for v in path:
            self._drop(v)

    def _best_path(self, path: list[int], t: int) -> Optional[list[int]]:
        # dynamic program over (state of previous, state of current); cycles
        # have length >= 3 so the path holds at least two vertices
        want_max = t == 1
        layer: dict[tuple[int, int], tuple[int, list[int]]] = {}
        for a in (0, 1):
            for b in (0, 1):
                layer[(a, b)] = (1 - a, [a, b])
        # the first vertex reads the gate and path[1]; check it once path[1] is known
        cand = {}
        for (a, b), (score, asg) in layer.items():
            if self.feasible(path[0], a, (1 - t) + (1 - b)):
                cand[(a, b)] = (score, asg)
        layer = cand
        for i in range(1, len(path) - 1):
            nxt_layer: dict[tuple[int, int], tuple[int, list[int]]] = {}
            for (a, b), (score, asg) in layer.items():
                for c in (0, 1):
                    if not self.feasible(path[i], b, (1 - a) + (1 - c)):
                        continue
                    key = (b, c)
                    if key not in nxt_layer or _better(score, nxt_layer[key][0], want_max):
                        nxt_layer[key] = (score, asg + [c])
            layer = nxt_layer
        result = None
        for (a, b), (score, asg) in layer.items():
            if not self.feasible(path[-1], b, (1 - a) + (1 - t)):
                continue
            total = score + (1 - b)
            if result is None or _better(total, result[0], want_max):
                result = (total, asg)
        return None if result is None else result[1]

    def _drop(self, v: int) -> None:
        self.alive[v] = False
        for w in self.adj[v]:
            self.adj[w].discard(v)
        self.adj[v] = set()

    def run(self, cycles: list[list[int]]) -> Optional[np.ndarray]:
        queue = deque(v for v in range(self.n) if len(self.adj[v]) <= 1)
        remaining_cycles = list(cycles)
        live = self.n
        while live:
            progressed = False
            while queue:
                v = queue.popleft()
                if not self.alive[v] or len(self.adj[v]) > 1:
                    continue
                if len(self.adj[v]) == 0:
                    self.plan.append(("root", v))
                    self._drop(v)
                else:
                    (p,) = self.adj[v]
                    self.remove_leaf(v)
                    if len(self.adj[p]) <= 1:
                        queue.append(p)
                live -= 1
                progressed = True
            if not live:
                break
            picked = self._pick_cycle(remaining_cycles)
            if picked is None:
                if not progressed:
                    raise SolverInvariantError("peeling stalled on a graph that is not a cactus")
                continue
            gate, path = picked
            self.remove_path(gate, path)
            live -= len(path)
            if len(self.adj[gate]) <= 1:
                queue.append(gate)
        return self.assign()

    def _pick_cycle(self, cycles: list[list[int]]):
        for i, cyc in enumerate(cycles):
            if not all(self.alive[v] for v in cyc):
                continue
            heavy = [j for j, v in enumerate(cyc) if len(self.adj[v]) > 2]
            if len(heavy) > 1:
                continue
            cycles.pop(i)
            j = heavy[0] if heavy else 0
            gate = cyc[j]
            path = cyc[j + 1:] + cyc[:j]
            return gate, path
        return None

    def assign(self) -> Optional[np.ndarray]:
        c = [-1] * self.n
        for entry in reversed(self.plan):
            if entry[0] == "root":
                v = entry[1]
                options = [s for s in (1, 0) if self.feasible(v, s, 0)]
                if not options:
                    return None
                c[v] = options[0]
            elif entry[0] == "leaf":
                _, v, p, table = entry
                s = table[c[p]]
                if s is None:
                    return None
                c[v] = s
            else:
                _, gate, path, table = entry
                asg = table[c[gate]]
                if asg is None:
                    return None
                for v, s in zip(path, asg):
                    c[v] = s
        return np.asarray(c, dtype=np.uint8)


def _better(score: int, other: int, want_max: bool) -> bool:
    return score > other if want_max else score < other


def solve_even_cycle_free(system: ThresholdSystem) -> SolveOutcome:
    g = system.graph
    if g.directed:
        return NotApplicable("even-cycle-free solver expects an undirected graph")
    if not even_cycle_free(g):
        return NotApplicable("graph contains an even cycle")
    peeler = _Peeler(system)
    config = peeler.run(_cycle_blocks(g))
    if config is None:
        return NoEquilibrium("elimination left a vertex with no consistent state")
    return _found(system, config, "solve_even_cycle_free")


SOLVERS = {
    "sn": solve_sn_general,
    "nand-nor": solve_nand_nor,
    "dag": solve_dag,
    "even-cycle-free": solve_even_cycle_free,
    "complete": solve_complete,
}


def solve_auto(system: ThresholdSystem) -> tuple[str, SolveOutcome]:
    """Pick the first special-case solver whose precondition holds."""
    g = system.graph
    if g.directed:
        return "dag", solve_dag(system)
    if g.m == g.n * (g.n - 1) // 2:
        return "complete", solve_complete(system)
    if _nand_nor_pattern(system) is None:
        return "nand-nor", solve_nand_nor(system)
    if even_cycle_free(g):
        return "even-cycle-free", solve_even_cycle_free(system)
    if system.mode is Mode.SN:
        return "sn", solve_sn_general(system)
    return "none", NotApplicable("no polynomial-time solver applies to this SE instance")
