"""Metric graphs, subgraphs with cut-through-vertex topology, and partitions."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

LENGTH_RTOL = 1e-12

# An end of an edge: (edge index, side) where side 0 sits at u (offset 0)
# and side 1 sits at v (offset = length).
End = tuple[int, int]


class BoundaryMode(str, Enum):
    EFFECTIVE_DEGREE = "effdeg"
    COUNT = "count"


class GraphError(ValueError):
    pass


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for i in range(len(self.parent)):
            out[self.find(i)].append(i)
        return list(out.values())


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: float

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """Compact connected metric graph. Loops and parallel edges are allowed.

    ``ambient_degree`` and ``ambient_point`` are only used when the graph is
    itself a subgraph viewed as a new parent (for h1): boundary sizes are then
    measured against the degree of the original vertex, and descendants of the
    same original vertex count as one point in COUNT mode.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    ambient_degree: Mapping[str, int] | None = field(default=None, repr=False)
    ambient_point: Mapping[str, str] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(
            self, "edges", tuple(Edge(str(e.id), str(e.u), str(e.v), float(e.length)) for e in self.edges)
        )
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        if not self.edges:
            raise GraphError("graph has no edges")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge ids")
        vset = set(self.vertices)
        for e in self.edges:
            if e.u not in vset or e.v not in vset:
                raise GraphError(f"edge {e.id}: unknown endpoint")
            if not (math.isfinite(e.length) and e.length > 0):
                raise GraphError(f"edge {e.id}: length must be positive and finite, got {e.length}")
        comps = self.components()
        if len(comps) > 1:
            names = "; ".join("{" + ", ".join(sorted(c)) + "}" for c in comps)
            raise GraphError(f"graph is disconnected, components: {names}")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, str, float]], vertices: Sequence[str] | None = None, **kw):
        es = tuple(Edge(*e) for e in edges)
        if vertices is None:
            seen: dict[str, None] = {}
            for e in es:
                seen.setdefault(e.u)
                seen.setdefault(e.v)
            vertices = tuple(seen)
        return cls(tuple(vertices), es, **kw)

    def components(self) -> list[set[str]]:
        index = {v: i for i, v in enumerate(self.vertices)}
        uf = _UnionFind(len(self.vertices))
        for e in self.edges:
            uf.union(index[e.u], index[e.v])
        return [{self.vertices[i] for i in g} for g in uf.groups()]

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def incident_ends(self) -> dict[str, tuple[End, ...]]:
        out: dict[str, list[End]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            out[e.u].append((i, 0))
            out[e.v].append((i, 1))
        return {v: tuple(ends) for v, ends in out.items()}

    def degree(self, v: str) -> int:
        return len(self.incident_ends[v])

    def parent_degree(self, v: str) -> int:
        """Degree used for boundary measures (the ambient degree if set)."""
        if self.ambient_degree is not None and v in self.ambient_degree:
            return int(self.ambient_degree[v])
        return self.degree(v)

    def parent_point(self, v: str) -> str:
        if self.ambient_point is not None and v in self.ambient_point:
            return str(self.ambient_point[v])
        return v

    def end_vertex(self, end: End) -> str:
        e = self.edges[end[0]]
        return e.u if end[1] == 0 else e.v

    @property
    def total_length(self) -> float:
        return float(sum(e.length for e in self.edges))

    @property
    def max_edge_length(self) -> float:
        return max(e.length for e in self.edges)

    def scaled(self, c: float) -> "MetricGraph":
        return MetricGraph(
            self.vertices,
            tuple(Edge(e.id, e.u, e.v, e.length * c) for e in self.edges),
            self.ambient_degree,
            self.ambient_point,
        )

    def whole(self) -> "Subgraph":
        """The whole graph as a subgraph of itself."""
        segs = tuple(Segment(i, 0.0, e.length) for i, e in enumerate(self.edges))
        blocks = [tuple((i, s) for i, s in self.incident_ends[v]) for v in self.vertices]
        return Subgraph(self, segs, tuple(tuple(b) for b in blocks))


@dataclass(frozen=True)
class Segment:
    edge: int
    a: float
    b: float

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class BoundaryVertex:
    descendant: int
    point: tuple
    sub_degree: int
    parent_degree: int

    @property
    def effective_degree(self) -> int:
        return min(self.sub_degree, self.parent_degree - self.sub_degree)


@dataclass(frozen=True, eq=False)
class Subgraph:
    """Closed connected subgraph: segments of parent edges plus descendant blocks.

    ``blocks`` lists glued groups of segment ends, an end being
    (segment index, side) with side 0 at ``a`` and side 1 at ``b``.  Every end
    lying at a parent vertex must appear in exactly one block; ends at interior
    points of an edge that are not listed become singleton descendants.
    """

    parent: MetricGraph
    segments: tuple[Segment, ...]
    blocks: tuple[tuple[tuple[int, int], ...], ...] = ()

    def __post_init__(self):
        segs = tuple(Segment(int(s.edge), float(s.a), float(s.b)) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise GraphError("subgraph has no segments")
        for s in segs:
            if not 0 <= s.edge < len(self.parent.edges):
                raise GraphError(f"segment on unknown edge index {s.edge}")
            ell = self.parent.edges[s.edge].length
            tol = LENGTH_RTOL * ell
            if not (-tol <= s.a < s.b <= ell + tol):
                raise GraphError(f"bad segment [{s.a}, {s.b}] on edge {self.parent.edges[s.edge].id}")
        by_edge: dict[int, list[Segment]] = defaultdict(list)
        for s in segs:
            by_edge[s.edge].append(s)
        for ei, lst in by_edge.items():
            lst.sort(key=lambda s: s.a)
            tol = LENGTH_RTOL * self.parent.edges[ei].length
            for s, t in zip(lst, lst[1:]):
                if t.a < s.b - tol:
                    raise GraphError(f"overlapping segments on edge {self.parent.edges[ei].id}")

        seen: set[tuple[int, int]] = set()
        blocks = []
        for blk in self.blocks:
            blk = tuple(sorted((int(i), int(side)) for i, side in blk))
            if not blk:
                raise GraphError("empty descendant block")
            pts = {self._end_point(end) for end in blk}
            if len(pts) != 1:
                raise GraphError(f"block {blk} glues ends at different points")
            for end in blk:
                if end in seen:
                    raise GraphError(f"segment end {end} in two blocks")
                if not (0 <= end[0] < len(segs)) or end[1] not in (0, 1):
                    raise GraphError(f"bad segment end {end}")
                seen.add(end)
            blocks.append(blk)
        for i in range(len(segs)):
            for side in (0, 1):
                if (i, side) in seen:
                    continue
                pt = self._end_point((i, side))
                if pt[0] == "v":
                    raise GraphError(
                        f"segment end {(i, side)} at vertex {pt[1]} is not assigned to a descendant"
                    )
                blocks.append(((i, side),))
        object.__setattr__(self, "blocks", tuple(blocks))

        uf = _UnionFind(len(segs))
        for blk in blocks:
            for end in blk[1:]:
                uf.union(blk[0][0], end[0])
        if len(uf.groups()) != 1:
            raise GraphError("subgraph is not connected")
        if self.total_length <= 0:
            raise GraphError("subgraph has empty interior")

    def _end_point(self, end: tuple[int, int]) -> tuple:
        s = self.segments[end[0]]
        edge = self.parent.edges[s.edge]
        x = s.a if end[1] == 0 else s.b
        tol = LENGTH_RTOL * edge.length
        if abs(x) <= tol:
            return ("v", edge.u)
        if abs(x - edge.length) <= tol:
            return ("v", edge.v)
        return ("e", s.edge, x)

    def descendant_point(self, i: int) -> tuple:
        return self._end_point(self.blocks[i][0])

    @property
    def total_length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def _grouping_key(self, pt: tuple) -> tuple:
        if pt[0] == "v":
            return ("v", self.parent.parent_point(pt[1]))
        return pt

    def _point_degree(self, pt: tuple) -> int:
        return self.parent.parent_degree(pt[1]) if pt[0] == "v" else 2

    @cached_property
    def boundary(self) -> tuple[BoundaryVertex, ...]:
        at_point: dict[tuple, list[int]] = defaultdict(list)
        for i in range(len(self.blocks)):
            at_point[self._grouping_key(self.descendant_point(i))].append(i)
        out = []
        for i, blk in enumerate(self.blocks):
            pt = self.descendant_point(i)
            deg_parent = self._point_degree(pt)
            d = len(blk)
            if d == deg_parent and len(at_point[self._grouping_key(pt)]) == 1:
                continue
            out.append(BoundaryVertex(i, pt, d, deg_parent))
        return tuple(out)

    def boundary_size(self, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE) -> int:
        mode = BoundaryMode(mode)
        if mode is BoundaryMode.EFFECTIVE_DEGREE:
            return sum(b.effective_degree for b in self.boundary)
        return len({self._grouping_key(b.point) for b in self.boundary})

    def boundary_weights(self, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE) -> dict[int, float]:
        """Per boundary descendant weight; weights sum to ``boundary_size(mode)``.

        COUNT splits the unit weight of a point evenly over its descendants.
        """
        mode = BoundaryMode(mode)
        if mode is BoundaryMode.EFFECTIVE_DEGREE:
            return {b.descendant: float(b.effective_degree) for b in self.boundary}
        groups: dict[tuple, list[int]] = defaultdict(list)
        for b in self.boundary:
            groups[self._grouping_key(b.point)].append(b.descendant)
        return {d: 1.0 / len(ds) for ds in groups.values() for d in ds}

    def has_maximal_connectivity(self) -> bool:
        """Each parent point carrying boundary has exactly one descendant."""
        count: dict[tuple, int] = defaultdict(int)
        for i in range(len(self.blocks)):
            count[self._grouping_key(self.descendant_point(i))] += 1
        return all(count[self._grouping_key(b.point)] == 1 for b in self.boundary)

    def as_graph(self) -> MetricGraph:
        """This subgraph as a metric graph in its own right.

        Vertices are the descendants; ambient data records the parent degree so
        boundary sizes of sub-subgraphs are still measured inside the parent.
        """
        names = [f"d{i}" for i in range(len(self.blocks))]
        where = {}
        for i, blk in enumerate(self.blocks):
            for end in blk:
                where[end] = names[i]
        edges = []
        for j, s in enumerate(self.segments):
            eid = self.parent.edges[s.edge].id
            edges.append(Edge(f"{eid}[{j}]", where[(j, 0)], where[(j, 1)], s.length))
        amb_deg, amb_pt = {}, {}
        for i in range(len(self.blocks)):
            pt = self.descendant_point(i)
            amb_deg[names[i]] = self._point_degree(pt)
            key = self._grouping_key(pt)
            amb_pt[names[i]] = repr(key)
        return MetricGraph(tuple(names), tuple(edges), amb_deg, amb_pt)

    def key(self) -> tuple:
        """Hashable description (rounded positions and gluing)."""
        segs = tuple((s.edge, round(s.a, 12), round(s.b, 12)) for s in self.segments)
        return (segs, tuple(sorted(self.blocks)))


def perimeter(omega: Subgraph) -> int:
    """Closed-form perimeter: sum of min(deg_sub, deg_parent - deg_sub) over boundary points."""
    if not omega.has_maximal_connectivity():
        raise GraphError("perimeter needs one descendant per boundary vertex")
    return sum(min(b.sub_degree, b.parent_degree - b.sub_degree) for b in omega.boundary)


def perimeter_oracle(omega: Subgraph) -> float:
    """Perimeter via one small LP per boundary point.

    At each boundary point the edge values f_e in [-1, 1] must sum to zero over
    all parent ends; the local contribution is max |sum of f_e over ends inside
    the subgraph|.
    """
    from scipy.optimize import linprog

    if not omega.has_maximal_connectivity():
        raise GraphError("perimeter needs one descendant per boundary vertex")
    total = 0.0
    for b in omega.boundary:
        n = b.parent_degree
        c = [-1.0 if i < b.sub_degree else 0.0 for i in range(n)]
        res = linprog(c, A_eq=[[1.0] * n], b_eq=[0.0], bounds=[(-1.0, 1.0)] * n, method="highs")
        if res.status != 0:
            raise RuntimeError(f"perimeter LP failed: {res.message}")
        total += -res.fun
    return total


@dataclass(frozen=True, eq=False)
class Partition:
    parts: tuple[Subgraph, ...]
    exhaustive: bool = False
    configuration: object | None = None
    lengths: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise GraphError("partition needs at least one part")
        parent = self.parts[0].parent
        if any(p.parent is not parent for p in self.parts):
            raise GraphError("parts live on different parent graphs")
        by_edge: dict[int, list[tuple[float, float]]] = defaultdict(list)
        for p in self.parts:
            for s in p.segments:
                by_edge[s.edge].append((s.a, s.b))
        for ei, ivs in by_edge.items():
            ivs.sort()
            tol = 1e-9 * parent.edges[ei].length
            for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
                if a1 < b0 - tol:
                    raise GraphError(f"parts overlap on edge {parent.edges[ei].id}")
        if self.exhaustive:
            for ei, e in enumerate(parent.edges):
                covered = sum(b - a for a, b in by_edge.get(ei, []))
                if abs(covered - e.length) > 1e-9 * e.length:
                    raise GraphError(f"exhaustive partition leaves a gap on edge {e.id}")

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def parent(self) -> MetricGraph:
        return self.parts[0].parent

    def cut_points(self) -> list[tuple[int, float]]:
        """Distinct (edge, offset) positions where parts end inside an edge."""
        pts = set()
        for p in self.parts:
            for i in range(len(p.blocks)):
                pt = p.descendant_point(i)
                if pt[0] == "e":
                    pts.add((pt[1], round(pt[2], 12)))
        return sorted(pts)
