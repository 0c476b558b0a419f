"""
Tests for cascade ingestion, windows and window graphs
"""

import json
import random

import networkx as nx
import pytest

from cascade_model import (
    CascadeDataError,
    CascadeTooSmallError,
    EmptyCascadeError,
    SocialNetwork,
    WindowGraph,
    build_social_network,
    build_window_graph,
    edge_key,
    ingest_cascade,
    read_cascade_records,
    read_social_edges,
    segment,
    window_statistics,
)


def chain_events(n, start=100.0):
    """u0 -> u1 -> ... -> u{n-1}, one second apart"""
    return [(f"u{i}", f"u{i + 1}", start + i + 1) for i in range(n - 1)]


def test_ingest_shifts_times_and_finds_root():
    cascade = ingest_cascade(chain_events(5), "c1")
    assert cascade.id == "c1"
    assert cascade.root == "u0"
    assert cascade.event_times == (0.0, 1.0, 2.0, 3.0)
    assert cascade.activations == ("u0", "u1", "u2", "u3", "u4")
    assert len(cascade) == 5
    assert cascade.duration == 3.0


def test_ingest_is_independent_of_input_order():
    events = chain_events(30) + [("u3", "x", 110.0), ("u4", "y", 110.0)]
    shuffled = list(events)
    random.Random(4).shuffle(shuffled)
    assert ingest_cascade(events, "c") == ingest_cascade(shuffled, "c")


def test_ingest_drops_self_loops_and_repeat_activations():
    events = [
        ("a", "b", 1.0),
        ("b", "b", 2.0),
        ("a", "c", 3.0),
        ("c", "b", 4.0),   # b already active
        ("b", "a", 5.0),   # root counts as active
    ]
    cascade = ingest_cascade(events)
    assert [(e.source, e.target) for e in cascade.events] == [("a", "b"), ("a", "c")]


def test_ingest_empty_cascade_raises():
    with pytest.raises(EmptyCascadeError):
        ingest_cascade([("a", "a", 1.0)], "loops")
    with pytest.raises(EmptyCascadeError):
        ingest_cascade([], "nothing")


def test_segment_exact_windows_and_discarded_tail():
    cascade = ingest_cascade(chain_events(17))
    windows = segment(cascade, window_size=5, motif_size=3)
    assert len(windows) == 3
    assert all(len(w.nodes) == 5 for w in windows)
    assert windows[0].members[0] == cascade.root
    assert windows[1].members == ("u5", "u6", "u7", "u8", "u9")
    assert windows[1].start_time == 4.0
    assert windows[1].end_time == 8.0
    covered = set().union(*(w.nodes for w in windows))
    assert "u15" not in covered and "u16" not in covered


def test_segment_windows_are_disjoint():
    windows = segment(ingest_cascade(chain_events(40)), window_size=8, motif_size=5)
    for a in windows:
        for b in windows:
            if a.index != b.index:
                assert not a.nodes & b.nodes


def test_segment_rejects_small_cascades_and_bad_sizes():
    cascade = ingest_cascade(chain_events(4))
    with pytest.raises(CascadeTooSmallError):
        segment(cascade, window_size=5, motif_size=3)
    with pytest.raises(ValueError):
        segment(cascade, window_size=4, motif_size=5)


def test_window_graph_keeps_in_window_reshares_only():
    cascade = ingest_cascade(chain_events(10))
    windows = segment(cascade, window_size=5, motif_size=3)
    graph = build_window_graph(cascade, windows[1])
    # u4 -> u5 crosses the window boundary
    assert graph.labels == ("u5", "u6", "u7", "u8", "u9")
    assert graph.edges == frozenset({(0, 1), (1, 2), (2, 3), (3, 4)})
    assert graph.reshare_edges == graph.edges
    assert not graph.historical_edges


def test_window_graph_adds_historical_edges_with_provenance():
    cascade = ingest_cascade(chain_events(5))
    window = segment(cascade, window_size=5, motif_size=3)[0]
    social = build_social_network(["u0 u2", "u1 u0", "u4 u9", "u3 u3"])
    graph = build_window_graph(cascade, window, social)

    assert (0, 2) in graph.edges
    assert graph.historical_edges == frozenset({(0, 1), (0, 2)})
    assert (0, 1) in graph.reshare_edges and (0, 1) in graph.historical_edges
    assert graph.edges == graph.reshare_edges | graph.historical_edges
    assert len(graph.edges) == 5


def test_window_graph_edges_stay_inside_window():
    cascade = ingest_cascade(chain_events(30))
    social = build_social_network(f"u{i} u{j}" for i in range(30) for j in range(i + 1, 30) if (i * j) % 7 == 1)
    for window in segment(cascade, window_size=10, motif_size=5):
        graph = build_window_graph(cascade, window, social)
        for u, v in graph.edges:
            assert graph.labels[u] in window.nodes and graph.labels[v] in window.nodes
            assert u != v


def test_from_edges_drops_self_loops_and_validates_range():
    graph = WindowGraph.from_edges(["a", "b", "c"], [(0, 1), (1, 0), (2, 2)])
    assert graph.edges == frozenset({(0, 1)})
    assert graph.degrees == (1, 1, 0)
    with pytest.raises(ValueError):
        WindowGraph.from_edges(["a"], [(0, 3)])


def test_networkx_round_trip():
    g = nx.petersen_graph()
    graph = WindowGraph.from_networkx(g)
    assert nx.is_isomorphic(graph.to_networkx(), g)
    assert graph.order == 10


def test_social_network_counts_malformed_and_dedupes():
    social = build_social_network(["a b", "b a", "a", "a b c", ("c", "d")])
    assert social.edges == frozenset({("a", "b"), ("c", "d")})
    assert social.malformed == 2
    assert ("b", "a") in social
    assert len(social) == 2
    assert edge_key("z", "y") == ("y", "z")


def test_window_statistics_counts_triangles():
    g = nx.complete_graph(4)
    g.add_edge(3, 4)
    stats = window_statistics(WindowGraph.from_networkx(g))
    assert stats["nodes"] == 5
    assert stats["edges"] == 7
    assert stats["triangles"] == 4
    assert stats["density"] == pytest.approx(0.7)


def test_read_csv_records_with_header_and_bad_lines(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text(
        "cascade_id,source,target,time\n"
        "c1,a,b,1.5\n"
        "c1,b,c,2\n"
        "c2,x,y,abc\n"
        "c2,x,y\n"
        "c2,x,z,3\n"
    )
    records, malformed = read_cascade_records(path)
    assert malformed == 2
    assert records == {"c1": [("a", "b", 1.5), ("b", "c", 2.0)], "c2": [("x", "z", 3.0)]}


def test_read_jsonl_records(tmp_path):
    path = tmp_path / "events.jsonl"
    lines = [
        json.dumps({"cascade": 7, "src": "a", "dst": "b", "t": 10}),
        json.dumps({"cascade": 7, "src": "b"}),
        "{not json",
    ]
    path.write_text("\n".join(lines) + "\n")
    records, malformed = read_cascade_records(path)
    assert records == {"7": [("a", "b", 10.0)]}
    assert malformed == 2


def test_read_social_edges(tmp_path):
    path = tmp_path / "social.txt"
    path.write_text("a b\n\nb c\nbroken\n")
    social = read_social_edges(path)
    assert isinstance(social, SocialNetwork)
    assert len(social) == 2
    assert social.malformed == 1


@pytest.mark.parametrize("bad_time", ["nan", "inf", "-inf"])
def test_non_finite_times_are_malformed(tmp_path, bad_time):
    path = tmp_path / "events.csv"
    path.write_text(f"c1,a,b,1\nc1,b,c,{bad_time}\nc1,c,d,2\n")
    records, malformed = read_cascade_records(path)
    assert malformed == 1
    cascade = ingest_cascade(records["c1"], "c1")
    assert cascade.event_times == (0.0, 1.0)
    assert cascade.duration == 1.0


def test_non_finite_json_time_is_malformed(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text('{"cascade": 1, "src": "a", "dst": "b", "t": NaN}\n{"cascade": 1, "src": "a", "dst": "c", "t": 4}\n')
    records, malformed = read_cascade_records(path)
    assert malformed == 1
    assert records == {"1": [("a", "c", 4.0)]}


def test_ingest_rejects_non_finite_time():
    with pytest.raises(CascadeDataError, match="Non-finite"):
        ingest_cascade([("a", "b", 1.0), ("b", "c", float("inf"))], "c1")


def test_undecodable_files_are_data_errors(tmp_path):
    path = tmp_path / "events.csv"
    path.write_bytes(b"\xff\xfe c1,a,b,1\n")
    with pytest.raises(CascadeDataError, match="UTF-8"):
        read_cascade_records(path)
    with pytest.raises(CascadeDataError, match="UTF-8"):
        read_social_edges(path)
