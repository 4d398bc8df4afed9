import itertools

import networkx as nx
import numpy as np
import pytest

from anticoord.core import PreconditionError, ThresholdSystem, UsageError, is_fixed_point
from anticoord.enumeration import count_fixed_points
from anticoord.reduction import (
    CnfFormula, DimacsError, assignment_to_config, build_reduction, config_to_assignment, parse_dimacs,
    verify_parsimony,
)
from conftest import k33


def test_parse_dimacs_examples():
    f = parse_dimacs("p cnf 1 1\n1 1 1 0\n")
    assert f.num_vars == 1 and f.clauses == ((1, 1, 1),)
    f = parse_dimacs("c comment\np cnf 2 1\n1 -2 2 0\n")
    assert f.clauses == ((1, -2, 2),)
    assert parse_dimacs("p cnf 2 1\n1 -2 0\n").clauses == ((1, -2, -2),)
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 4 1\n1 2 3 4 0\n")
    with pytest.raises(DimacsError):
        parse_dimacs("p dnf 1 1\n1 0\n")
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 1 1\n2 0\n")
    with pytest.raises(DimacsError):
        parse_dimacs("1 0\n")


def test_formula_validation():
    with pytest.raises(UsageError):
        CnfFormula(1, ((1, 2, 1),))


def _structure_ok(art):
    s = art.system
    nv, nc = art.formula.num_vars, len(art.formula.clauses)
    assert s.n == 15 * nv + nc
    assert s.mode.value == "se"
    G = nx.Graph(list(s.graph.edges))
    G.add_nodes_from(range(s.n))
    assert nx.is_bipartite(G)
    for vv in art.var_to_vertices:
        assert [int(s.tau1[x]) for x in (vv.y, vv.z, vv.a, vv.d, vv.e)] == [3, 3, 1, 1, 3]
        for lit in (vv.y, vv.z):
            g1, g2, h1, h2, h3 = art.gadget_map[lit]
            assert all(s.tau1[x] == 3 for x in (g1, g2, h1, h2, h3))
            for left in (lit, g1, g2):
                for right in (h1, h2, h3):
                    assert G.has_edge(left, right)
            # auxiliaries only touch their own K(3,3)
            for x in (g1, g2, h1, h2, h3):
                assert set(G[x]) <= {lit, g1, g2, h1, h2, h3}
    for w in art.clause_to_vertex:
        assert s.tau1[w] == 1


def test_vertex_counts_and_structure():
    art = build_reduction(CnfFormula(1, ((1, 1, 1),)))
    assert art.system.n == 16
    _structure_ok(art)
    art = build_reduction(CnfFormula(3, ((1, -2, 3), (-1, 2, -3))))
    assert art.system.n == 47
    _structure_ok(art)
    art = build_reduction(CnfFormula(2, ()))
    assert art.system.n == 30
    for a in itertools.product((False, True), repeat=2):
        assert is_fixed_point(art.system, assignment_to_config(art, a))


def test_duplicate_literals_collapse():
    art = build_reduction(CnfFormula(1, ((1, 1, 1),)))
    w = art.clause_to_vertex[0]
    assert art.system.graph.degree(w) == 1


def test_assignment_images():
    art = build_reduction(CnfFormula(1, ((1, 1, 1),)))
    good = assignment_to_config(art, [True])
    assert is_fixed_point(art.system, good)
    assert config_to_assignment(art, good) == [True]
    bad = assignment_to_config(art, [False])
    assert not is_fixed_point(art.system, bad)
    with pytest.raises(PreconditionError):
        config_to_assignment(art, bad)
    with pytest.raises(UsageError):
        assignment_to_config(art, [True, False])


def test_gadget_alone_two_fixed_points():
    # literal vertex plus its five auxiliaries, all tau1 = 3
    assert count_fixed_points(ThresholdSystem(k33(), [3] * 6, "se")) == 2


def test_image_property_random(rng):
    for _ in range(60):
        nv = int(rng.integers(1, 5))
        clauses = tuple(
            tuple(int(rng.integers(1, nv + 1)) * int(rng.choice([-1, 1])) for _ in range(3))
            for _ in range(int(rng.integers(0, 6)))
        )
        f = CnfFormula(nv, clauses)
        art = build_reduction(f)
        _structure_ok(art)
        for a in itertools.product((False, True), repeat=nv):
            assert f.satisfied_by(a) == is_fixed_point(art.system, assignment_to_config(art, a))


def test_parsimony_examples():
    art = build_reduction(CnfFormula(1, ((1, 1, 1),)))
    r = verify_parsimony(art)
    assert (r.num_fixed_points, r.num_satisfying, r.ok) == (1, 1, True)
    art = build_reduction(CnfFormula(1, ((1, 1, 1), (-1, -1, -1))))
    r = verify_parsimony(art)
    assert (r.num_fixed_points, r.num_satisfying, r.ok) == (0, 0, True)
    art = build_reduction(CnfFormula(1, ()))
    assert verify_parsimony(art).num_fixed_points == 2


def test_parsimony_budget_and_sampled():
    art = build_reduction(CnfFormula(3, ((1, 2, 3),)))
    with pytest.raises(PreconditionError):
        verify_parsimony(art, exhaustive=True)
    r = verify_parsimony(art, exhaustive=False, restarts=50)
    assert r.ok and r.num_satisfying == 7 and r.num_fixed_points is None


def test_artifact_json():
    art = build_reduction(CnfFormula(1, ((1, -1, 1),)))
    d = art.to_json()
    assert d["n"] == 16 and len(d["roles"]) == 16 and d["roles"][0] == "y1" and d["roles"][15] == "w1"
    assert len(d["thresholds"]) == 16


@pytest.mark.slow
def test_two_variable_full_scan():
    f = CnfFormula(2, ((1, 2, 2),))
    assert f.count_satisfying() == 3
    art = build_reduction(f)
    assert art.system.n == 31
    assert count_fixed_points(art.system, n_limit=31) == 3
