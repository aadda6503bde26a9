import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheafdeception.errors import ParseError
from sheafdeception.graph import (
    Graph,
    LoadStats,
    delete_vertex,
    erdos_renyi,
    graph_laplacian,
    load_edge_list,
    serialize,
)

from conftest import path


def test_load_maps_labels_in_first_seen_order():
    g = load_edge_list("a b\nb c\n")
    assert g.n == 3
    assert g.edges == ((0, 1), (1, 2))
    assert g.labels == ("a", "b", "c")


def test_load_drops_duplicates():
    stats = LoadStats()
    g = load_edge_list("1 2\n2 1\n", stats=stats)
    assert (g.n, g.edges) == (2, ((0, 1),))
    assert stats.duplicates == 1


def test_load_drops_self_loops():
    stats = LoadStats()
    g = load_edge_list("x x\n", stats=stats)
    assert (g.n, g.edges) == (1, ())
    assert stats.self_loops == 1


def test_load_comments_blanks_and_weights():
    g = load_edge_list("# header\n\n u v 0.5  # trailing\nv w\n")
    assert g.n == 3 and g.m == 2


@pytest.mark.parametrize("text, line", [("a b\nc\n", 2), ("a b x\n", 1), ("a b 1 2\n", 1)])
def test_load_malformed_line_reports_number(text, line):
    with pytest.raises(ParseError) as info:
        load_edge_list(text)
    assert info.value.line == line


def test_load_from_stream():
    assert load_edge_list(io.StringIO("0 1\n")).m == 1


@given(st.integers(0, 12), st.floats(0, 1), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_serialize_round_trip(n, p, seed):
    g = erdos_renyi(n, p, seed)
    back = load_edge_list(serialize(g, header="test"))
    assert back.n == g.n
    assert back.edges == g.edges


def test_graph_rejects_invalid_edges():
    with pytest.raises(ValueError):
        Graph(2, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        Graph(2, ((0, 2),))


def test_erdos_renyi_extremes():
    assert erdos_renyi(5, 0.0, 1).m == 0
    assert erdos_renyi(5, 1.0, 1).m == 10
    assert erdos_renyi(0, 0.5, 1).n == 0


def test_erdos_renyi_reproducible():
    assert erdos_renyi(60, 0.2, 9).edges == erdos_renyi(60, 0.2, 9).edges
    assert erdos_renyi(60, 0.2, 9).edges != erdos_renyi(60, 0.2, 10).edges


def test_erdos_renyi_mean_edge_count():
    n, p, trials = 100, 0.1, 1000
    pairs = n * (n - 1) // 2
    counts = np.array([erdos_renyi(n, p, s).m for s in range(trials)])
    sigma_mean = np.sqrt(pairs * p * (1 - p) / trials)
    assert abs(counts.mean() - p * pairs) < 3 * sigma_mean


def test_erdos_renyi_rejects_bad_p():
    with pytest.raises(ValueError):
        erdos_renyi(3, 1.5, 0)


def test_graph_laplacian_small_cases():
    np.testing.assert_array_equal(graph_laplacian(Graph(2, ((0, 1),))), [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(graph_laplacian(path(3)), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    np.testing.assert_array_equal(graph_laplacian(Graph(3)), np.zeros((3, 3)))


@given(st.integers(1, 25), st.floats(0, 1), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_graph_laplacian_properties(n, p, seed):
    lap = graph_laplacian(erdos_renyi(n, p, seed))
    np.testing.assert_array_equal(lap, lap.T)
    assert np.all(lap.sum(axis=1) == 0)
    lam = np.linalg.eigvalsh(lap)
    assert lam.min() >= -1e-10 * max(1.0, lam.max())


def test_delete_vertex_examples():
    assert delete_vertex(path(3), 1) == Graph(2, ())
    assert delete_vertex(path(3), 0).edges == ((0, 1),)
    tri = Graph(3, ((0, 1), (1, 2), (0, 2)))
    for v in range(3):
        assert delete_vertex(tri, v).m == 1


def test_delete_vertex_out_of_range():
    with pytest.raises(IndexError):
        delete_vertex(path(3), 3)


@given(st.integers(1, 20), st.floats(0, 1), st.integers(0, 2**32 - 1), st.data())
@settings(max_examples=40, deadline=None)
def test_delete_vertex_keeps_other_edges(n, p, seed, data):
    g = erdos_renyi(n, p, seed)
    v = data.draw(st.integers(0, n - 1))
    h = delete_vertex(g, v)
    assert h.m == g.m - g.degrees()[v]
    back = {(a + (a >= v), b + (b >= v)) for a, b in h.edges}
    assert back == {e for e in g.edges if v not in e}
