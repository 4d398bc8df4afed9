import warnings

import numpy as np
import pytest

from anticoord.core import Graph, ThresholdSystem, UsageError
from anticoord.io import FormatError, read_edge_list, read_instance, write_edge_list, write_instance
from anticoord.netgen import (
    BarabasiAlbert, Gnp, WattsStrogatz, generate, gnp_for_degree, random_config, random_thresholds,
)
from conftest import k33


def test_gnp_extremes():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert generate(Gnp(10, 0.0), 1).m == 0
    assert generate(Gnp(10, 1.0), 1).m == 45


def test_gnp_edge_concentration():
    n, p = 1000, 0.02
    mean = p * n * (n - 1) / 2
    sd = np.sqrt(mean * (1 - p))
    for seed in range(3):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = generate(Gnp(n, p), seed).m
        assert abs(m - mean) <= 5 * sd


def test_barabasi_albert_edge_count():
    for k in (1, 2, 3, 5):
        spec = BarabasiAlbert(100, k)
        assert generate(spec, 4).m == spec.expected_edges()
    assert BarabasiAlbert(100, 3).expected_edges() == 3 + 3 * 97


def test_watts_strogatz_edge_count():
    assert generate(WattsStrogatz(20, 4, 0.3), 2).m == 40


def test_invalid_specs():
    for spec in (Gnp(5, 1.5), BarabasiAlbert(5, 0), WattsStrogatz(10, 3, 0.1), WattsStrogatz(4, 4, 0.1)):
        with pytest.raises(UsageError):
            generate(spec, 0)


def test_generators_deterministic():
    for spec in (Gnp(50, 0.1), BarabasiAlbert(50, 2), WattsStrogatz(50, 4, 0.2)):
        assert generate(spec, 11) == generate(spec, 11)


def test_threshold_ranges():
    g = Graph(5, [(0, 1), (0, 2), (0, 3)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        se = np.array([random_thresholds(g, "se", s) for s in range(400)])
        sn = np.array([random_thresholds(g, "sn", s) for s in range(400)])
        capped = np.array([random_thresholds(g, "se", s, degree_cap=True) for s in range(400)])
    assert set(se[:, 0]) == {1, 2, 3, 4}
    assert set(sn[:, 0]) == {1, 2, 3}
    assert set(capped[:, 0]) == {1, 2, 3}
    assert set(se[:, 4]) == {1}  # isolated: [1, 1]
    assert set(sn[:, 4]) == {1}


def test_threshold_uniform_chi_square():
    from scipy.stats import chisquare
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    draws = np.array([random_thresholds(g, "sn", s)[0] for s in range(10_000)])
    counts = np.bincount(draws, minlength=4)[1:]
    assert chisquare(counts).pvalue > 1e-3


def test_random_config():
    assert random_config(10, 1.0, 0).tolist() == [0] * 10
    assert random_config(10, 0.0, 0).tolist() == [1] * 10
    c = random_config(10_000, 0.5, 42)
    assert abs((c == 0).mean() - 0.5) <= 0.02
    assert np.array_equal(random_config(100, 0.3, 9), random_config(100, 0.3, 9))
    with pytest.raises(UsageError):
        random_config(3, 1.5, 0)


def test_gnp_for_degree():
    assert gnp_for_degree(11, 4).p == pytest.approx(0.4)


def test_edge_list_parse():
    g = read_edge_list("0 1\n1 2")
    assert g.n == 3 and g.edges == ((0, 1), (1, 2))
    with pytest.raises(FormatError, match="line 1"):
        read_edge_list("a b\n")
    with pytest.raises(FormatError, match="line 2"):
        read_edge_list("# c\n0 1 2\n")
    g = read_edge_list("# n 5\n0 1  # trailing comment\n")
    assert g.n == 5
    with pytest.raises(FormatError):
        read_edge_list("# n 2\n0 3\n")


def test_edge_list_round_trip():
    g = Graph(7, [(0, 1), (2, 5), (1, 4)])
    assert read_edge_list(write_edge_list(g)) == g


def test_instance_round_trip():
    s = ThresholdSystem(k33(), [3] * 6, "se")
    assert read_instance(write_instance(s)) == s
    d = ThresholdSystem(Graph(3, [(0, 1), (2, 1)], directed=True), [0, 2, 1], "sn")
    back = read_instance(write_instance(d))
    assert back == d and back.graph.directed


def test_instance_errors():
    with pytest.raises(FormatError):
        read_instance('{"thresholds": [1], "edges": [[0, 3]]}')
    with pytest.raises(FormatError, match="line"):
        read_instance("{\n  bad json")
    with pytest.raises(FormatError):
        read_instance('{"n": 3, "thresholds": [1]}')
