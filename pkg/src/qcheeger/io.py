"""JSON graph files, subgraph specs and result serialization."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from .graph import Edge, GraphError, MetricGraph, Partition, Segment, Subgraph


class GraphFileError(ValueError):
    pass


def _load(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def graph_from_dict(doc, source: str = "<graph>") -> MetricGraph:
    if not isinstance(doc, dict):
        raise GraphFileError(f"{source}: top level must be an object")
    for key in ("vertices", "edges"):
        if key not in doc:
            raise GraphFileError(f"{source}: missing field '{key}'")
    if not isinstance(doc["vertices"], list):
        raise GraphFileError(f"{source}: field 'vertices' must be a list")
    if not isinstance(doc["edges"], list) or not doc["edges"]:
        raise GraphFileError(f"{source}: field 'edges' must be a non-empty list")
    edges = []
    for i, e in enumerate(doc["edges"]):
        where = f"{source}: edges[{i}]"
        if not isinstance(e, dict):
            raise GraphFileError(f"{where}: must be an object")
        for key in ("id", "u", "v", "length"):
            if key not in e:
                raise GraphFileError(f"{where}: missing field '{key}'")
        try:
            length = float(e["length"])
        except (TypeError, ValueError):
            raise GraphFileError(f"{where}.length: not a number: {e['length']!r}") from None
        if not (math.isfinite(length) and length > 0):
            raise GraphFileError(f"{where}.length: must be positive and finite, got {e['length']!r}")
        edges.append(Edge(str(e["id"]), str(e["u"]), str(e["v"]), length))
    try:
        return MetricGraph(tuple(str(v) for v in doc["vertices"]), tuple(edges))
    except GraphError as exc:
        raise GraphFileError(f"{source}: {exc}") from exc


def parse_graph_file(path) -> MetricGraph:
    return graph_from_dict(_load(path), str(path))


def bundled_graph(name: str) -> MetricGraph:
    """Load a bundled graph (fig1, fig7, interval, path2, star3, lasso, theta)."""
    ref = resources.files("qcheeger") / "data" / f"{name}.json"
    return graph_from_dict(json.loads(ref.read_text()), f"{name}.json")


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "length": e.length} for e in g.edges],
    }


_SIDE = {"a": 0, "b": 1, 0: 0, 1: 1}


def subgraph_from_dict(g: MetricGraph, doc, source: str = "<subgraph>") -> Subgraph:
    """Spec with explicit segments and descendant blocks.

    ``{"segments": [{"edge": "e1", "a": 0, "b": 1}, ...],
       "descendants": [[[0, "a"], [1, "a"]], ...]}``

    An end is ``[segment index, "a" | "b"]``.  The string ``"whole"`` stands for
    the whole graph.
    """
    if doc == "whole":
        return g.whole()
    if not isinstance(doc, dict) or "segments" not in doc:
        raise GraphFileError(f"{source}: missing field 'segments'")
    segs = []
    for i, s in enumerate(doc["segments"]):
        try:
            ei = g.edge_index[str(s["edge"])]
        except KeyError:
            raise GraphFileError(f"{source}: segments[{i}].edge: unknown edge {s.get('edge')!r}") from None
        ell = g.edges[ei].length
        segs.append(Segment(ei, float(s.get("a", 0.0)), float(s.get("b", ell))))
    blocks = []
    for j, blk in enumerate(doc.get("descendants", [])):
        try:
            blocks.append(tuple((int(si), _SIDE[side]) for si, side in blk))
        except (KeyError, TypeError, ValueError):
            raise GraphFileError(f"{source}: descendants[{j}]: ends must be [segment, 'a'|'b']") from None
    try:
        return Subgraph(g, tuple(segs), tuple(blocks))
    except GraphError as exc:
        raise GraphFileError(f"{source}: {exc}") from exc


def parse_subgraph_file(g: MetricGraph, path) -> Subgraph:
    return subgraph_from_dict(g, _load(path), str(path))


def subgraph_to_dict(omega: Subgraph) -> dict:
    g = omega.parent
    return {
        "segments": [{"edge": g.edges[s.edge].id, "a": s.a, "b": s.b} for s in omega.segments],
        "descendants": [[[si, "ab"[side]] for si, side in blk] for blk in omega.blocks],
    }


def partition_to_dict(P: Partition) -> dict:
    out = {
        "k": P.k,
        "exhaustive": P.exhaustive,
        "parts": [subgraph_to_dict(p) for p in P.parts],
    }
    if P.configuration is not None:
        out["class_id"] = P.configuration.canonical
    if P.lengths is not None:
        out["segment_lengths"] = [list(x) for x in P.lengths]
    return out


def fmt(x: float) -> str:
    """Floats with 17 significant digits."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")
