import itertools
import sys

import networkx as nx
import numpy as np
import pytest

from anticoord.core import Graph, ThresholdSystem


def slow_successor(system, c):
    """Textbook local rule, one vertex at a time (independent of core.successor)."""
    out = []
    for v in range(system.n):
        zeros = sum(1 for u in system.graph.neighbors(v) if c[u] == 0)
        if system.mode.value == "se" and c[v] == 0:
            zeros += 1
        out.append(1 if zeros >= system.tau1[v] else 0)
    return out


def brute_fixed_points(system):
    """All fixed points as tuples, by direct evaluation."""
    return {
        c for c in itertools.product((0, 1), repeat=system.n)
        if slow_successor(system, c) == list(c)
    }


def random_graph(rng, n, p):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, edges)


def random_system(rng, n, p=0.4, mode=None, lo=0, extra=1):
    g = random_graph(rng, n, p)
    mode = mode or rng.choice(["se", "sn"])
    top = g.degrees + (1 if mode == "se" else 0)
    tau = np.array([rng.integers(lo, max(t + 1 + extra, lo + 1)) for t in top])
    return ThresholdSystem(g, tau, mode)


def connected_gnp(rng, n, avg_degree=None):
    """Connected Gnp sample; the default degree keeps rejection rare."""
    if avg_degree is None:
        avg_degree = rng.uniform(max(3.0, np.log(n) + 1.5), 12.0)
    p = min(1.0, avg_degree / (n - 1))
    while True:
        G = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if nx.is_connected(G):
            return Graph(n, sorted(G.edges()))


def random_cactus(rng, n, odd_only=True):
    """Tree with odd cycles glued on; every block is an edge or an odd cycle."""
    edges = []
    nxt = 1
    while nxt < n:
        a = int(rng.integers(0, nxt))
        room = n - nxt
        if rng.random() < 0.45 and room >= 2:
            L = int(rng.choice([3, 5, 7]))
            L = min(L, room + 1)
            if odd_only and L % 2 == 0:
                L -= 1
            if L >= 3:
                cyc = [a] + list(range(nxt, nxt + L - 1))
                nxt += L - 1
                edges += [(cyc[i], cyc[(i + 1) % L]) for i in range(L)]
                continue
        edges.append((a, nxt))
        nxt += 1
    return Graph(n, edges)


def random_dag(rng, n, p=0.35):
    perm = rng.permutation(n)
    edges = [(int(perm[i]), int(perm[j])) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, edges, directed=True)


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def k33():
    return Graph(6, [(a, b) for a in range(3) for b in range(3, 6)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
