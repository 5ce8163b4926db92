from collections import Counter

import numpy as np
import pytest

from conftest import write_edges
from nesclust.errors import IngestError, StreamError
from nesclust.graph import Graph
from nesclust.ingest import (file_order_stream, generate_graph, load_source, parse_edge_list,
                             shuffle_stream)


def test_parse_triangle(tmp_path):
    f = tmp_path / "k3.txt"
    f.write_text("0 1\n1 2\n2 0\n")
    g, rep = parse_edge_list(f)
    assert (g.n, g.m) == (3, 3)
    assert rep.lines_read == 3 and rep.duplicates_dropped == 0


def test_parse_drops_duplicates_and_loops(tmp_path):
    f = tmp_path / "dup.txt"
    f.write_text("0 1\n1 0\n2 2\n")
    g, rep = parse_edge_list(f)
    assert g.m == 1 and g.edge(0) == (0, 1)
    assert rep.duplicates_dropped == 1 and rep.self_loops_dropped == 1
    # accounting identity
    assert g.m == rep.lines_read - rep.self_loops_dropped - rep.duplicates_dropped - rep.comment_lines


def test_parse_comments_extra_columns_and_sparse_ids(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("# SNAP header\n% konect header\n\n10\t30 1 1234\n30  20\n")
    g, rep = parse_edge_list(f)
    assert rep.comment_lines == 3
    assert g.labels.tolist() == [10, 20, 30]
    assert {g.edge(i) for i in range(g.m)} == {(0, 2), (1, 2)}


@pytest.mark.parametrize("body, line", [("0 1\n1 x\n", 2), ("0 1\n5\n", 2), ("-1 2\n", 1),
                                         ("0 1\n1 2.5\n", 2), ("99999999999999999999999 1\n", 1)])
def test_malformed_line_reports_line_number(tmp_path, body, line):
    f = tmp_path / "bad.txt"
    f.write_text(body)
    with pytest.raises(IngestError) as exc:
        parse_edge_list(f)
    assert exc.value.line_no == line
    assert f"{f}:{line}:" in str(exc.value)


@pytest.mark.parametrize("body", ["", "# only a comment\n", "3 3\n"])
def test_empty_graph_is_an_error(tmp_path, body):
    f = tmp_path / "empty.txt"
    f.write_text(body)
    with pytest.raises(IngestError):
        parse_edge_list(f)


def test_file_order_stream(tmp_path):
    g, _ = parse_edge_list(write_edges(tmp_path / "k3.txt", [(0, 1), (1, 2), (2, 0)]))
    assert file_order_stream(g).edge_list() == [(0, 1), (1, 2), (0, 2)]
    assert [lab for lab, _ in file_order_stream(g)] == [1, 2, 3]


def test_file_order_duplicate_keeps_first_position(tmp_path):
    g, _ = parse_edge_list(write_edges(tmp_path / "d.txt", [(2, 3), (0, 1), (1, 2), (1, 0)]))
    assert file_order_stream(g).edge_list() == [(2, 3), (0, 1), (1, 2)]


def test_shuffle_is_deterministic_permutation(k4):
    a = shuffle_stream(k4, 11).edge_list()
    assert a == shuffle_stream(k4, 11).edge_list()
    assert sorted(a) == sorted(k4.edge(i) for i in range(k4.m))


def test_shuffle_orders_are_uniform(k3):
    # 6000 seeds, 6 orders: each count within 1000 +- 150, plus a chi-square check
    counts = Counter(tuple(shuffle_stream(k3, s).order.tolist()) for s in range(6000))
    assert len(counts) == 6
    assert all(850 <= c <= 1150 for c in counts.values()), counts
    chi2 = sum((c - 1000) ** 2 / 1000 for c in counts.values())
    assert chi2 < 20.5  # 99.9% quantile, 5 dof


def test_stream_of_edgeless_graph():
    g = Graph(2, np.empty((0, 2), dtype=np.int64))
    with pytest.raises(StreamError):
        shuffle_stream(g, 0)
    with pytest.raises(StreamError):
        file_order_stream(g)


def test_generators_are_seeded():
    a = generate_graph("gnp", n=50, p=0.2, seed=4)
    b = load_source({"generator": "gnp", "n": 50, "p": 0.2, "seed": 4})
    assert np.array_equal(a.edges, b.edges)
    for kind, params in [("powerlaw_cluster", dict(n=60, m=3, p=0.5)),
                         ("geometric", dict(n=80, radius=0.2)),
                         ("caveman", dict(l=5, k=6, p=0.1))]:
        assert generate_graph(kind, seed=1, **params).m > 0
    with pytest.raises(ValueError):
        generate_graph("nope")
