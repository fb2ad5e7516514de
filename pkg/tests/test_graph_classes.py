import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcheeger.classes import CapWarning, ClassEnumerator, EnumerationCaps, orbit_key
from qcheeger.graph import BoundaryMode, GraphError, MetricGraph, Segment, Subgraph, perimeter, perimeter_oracle
from qcheeger.io import GraphFileError, bundled_graph, graph_from_dict, graph_to_dict, parse_graph_file
from qcheeger.properties import CORPUS, lsc_instance, sample_subgraphs


def test_bundled_fig1_shape(fig1):
    assert len(fig1.vertices) == 4
    assert len(fig1.edges) == 6
    assert fig1.total_length == pytest.approx(4.0, abs=1e-15)


def test_bundled_fig7_shape(fig7):
    assert len(fig7.vertices) == 3
    assert len(fig7.edges) == 9
    assert all(e.length == 1.0 for e in fig7.edges)


def test_empty_edge_list_rejected():
    with pytest.raises(GraphFileError, match="edges"):
        graph_from_dict({"vertices": ["a"], "edges": []})


def test_disconnected_graph_names_components():
    doc = {
        "vertices": ["a", "b", "c", "d"],
        "edges": [{"id": "x", "u": "a", "v": "b", "length": 1}, {"id": "y", "u": "c", "v": "d", "length": 1}],
    }
    with pytest.raises(GraphFileError, match=r"\{a, b\}; \{c, d\}"):
        graph_from_dict(doc)


def test_bad_length_points_at_field():
    doc = {"vertices": ["a", "b"], "edges": [{"id": "x", "u": "a", "v": "b", "length": -2}]}
    with pytest.raises(GraphFileError, match=r"edges\[0\]\.length"):
        graph_from_dict(doc)


def test_malformed_json_reports_line(tmp_path):
    p = tmp_path / "g.json"
    p.write_text('{"vertices": ["a"],\n "edges": [}\n')
    with pytest.raises(GraphFileError, match="line 2"):
        parse_graph_file(p)


def test_round_trip(fig1):
    g = graph_from_dict(json.loads(json.dumps(graph_to_dict(fig1))))
    assert graph_to_dict(g) == graph_to_dict(fig1)


def test_subgraph_end_must_be_assigned(fig1):
    with pytest.raises(GraphError, match="not assigned"):
        Subgraph(fig1, (Segment(2, 0.0, 0.5),))


def test_effective_degree_of_pumpkin_part(fig1):
    om = Subgraph(
        fig1,
        tuple(Segment(i, 0.0, 0.5) for i in range(2, 6)),
        (tuple((j, 0) for j in range(4)), tuple((j, 1) for j in range(4))),
    )
    assert om.boundary_size(BoundaryMode.EFFECTIVE_DEGREE) == 2
    assert om.boundary_size(BoundaryMode.COUNT) == 1
    assert perimeter(om) == 2


@pytest.mark.parametrize("name", CORPUS)
def test_boundary_size_bounds(name):
    g = bundled_graph(name)
    for om in sample_subgraphs(g, 8, np.random.default_rng(3)):
        count = om.boundary_size(BoundaryMode.COUNT)
        eff = om.boundary_size(BoundaryMode.EFFECTIVE_DEGREE)
        assert 1 <= count <= eff <= sum(b.sub_degree for b in om.boundary)
        for b in om.boundary:
            assert 1 <= b.effective_degree <= b.parent_degree // 2


@given(st.integers(0, 2**16))
def test_perimeter_matches_lp_oracle(seed):
    rng = np.random.default_rng(seed)
    g = bundled_graph(CORPUS[seed % len(CORPUS)])
    for om in sample_subgraphs(g, 2, rng):
        if om.has_maximal_connectivity():
            assert perimeter(om) == pytest.approx(perimeter_oracle(om), abs=1e-9)


def test_boundary_drops_in_the_limit():
    assert lsc_instance(50) == (5, 1)
    assert lsc_instance(1000) == (5, 1)


def _classes(g, k, caps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CapWarning)
        return list(ClassEnumerator(g, k, caps))


@pytest.mark.parametrize("name,k", [("theta", 2), ("star3", 2), ("fig1", 2), ("lasso", 2)])
def test_symmetry_mode_picks_one_per_orbit(name, k):
    g = bundled_graph(name)
    full = _classes(g, k, EnumerationCaps(max_cuts_per_edge=1, gluing="all"))
    sym = _classes(g, k, EnumerationCaps(max_cuts_per_edge=1, gluing="all", symmetry=True))
    orbits = {orbit_key(c) for c in full}
    assert len({c.id for c in full}) == len(full)
    # a reduction, not an exact quotient: every orbit survives, most duplicates do not
    assert {orbit_key(c) for c in sym} == orbits
    assert len(orbits) <= len(sym) <= len(full)
    assert {c.id for c in sym} <= {c.id for c in full}


def test_enumeration_is_deterministic(fig1):
    caps = EnumerationCaps(max_cuts_per_edge=1, gluing="maximal", symmetry=True)
    assert [c.id for c in _classes(fig1, 3, caps)] == [c.id for c in _classes(fig1, 3, caps)]


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_realize_lengths_and_collapse(s, t):
    g = bundled_graph("path2")
    for cls in _classes(g, 2, EnumerationCaps(max_cuts_per_edge=1, gluing="all")):
        nested = [[x, 1 - x] if n == 2 else [1.0] for x, n in zip((s, t), cls.segment_counts)]
        P = cls.realize(nested)
        assert P.k == 2
        assert sum(p.total_length for p in P.parts) <= g.total_length + 1e-12
        if cls.segment_counts[0] == 2:
            # a vanishing segment merges away and may take its part with it
            Q = cls.realize([[0.0, 1.0], nested[1]])
            assert Q.configuration.n_segments < cls.n_segments
            assert Q.k <= P.k
            assert sum(p.total_length for p in Q.parts) <= g.total_length + 1e-12


def test_scaled_graph_lengths(fig1):
    h = fig1.scaled(3.0)
    assert h.total_length == pytest.approx(12.0)
    assert math.isclose(h.max_edge_length, 3.0)
