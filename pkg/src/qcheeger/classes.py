"""Configuration classes: combinatorial types of partitions and their realizations.

A class stores, per edge, the ordered labels of its segments (1..k for parts,
0 for an unassigned gap) read from u to v, and per (vertex, part) the
set-partition of that part's edge ends into descendant blocks.

Enumeration uses three reductions, each of which never removes an optimum:

* gaps only occur as whole edges: a part bordering a gap inside an edge can
  always grow into it without increasing its boundary or its eigenvalue;
* consecutive segments of an edge carry different labels;
* a segment strictly inside an edge (both ends at cut points) is a whole part
  on its own, since it cannot be connected to anything else.

Set ``allow_interior_gaps`` to lift the first reduction.
"""

from __future__ import annotations

import itertools
import warnings
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .graph import (
    LENGTH_RTOL,
    BoundaryMode,
    End,
    GraphError,
    MetricGraph,
    Partition,
    Segment,
    Subgraph,
    _UnionFind,
)

GAP = 0
INTERIOR = -1  # placeholder for an edge-interior part during enumeration


class CapWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EnumerationCaps:
    max_cuts_per_edge: int = 2
    allow_interior_gaps: bool = False
    # "all": every connected gluing; "robin": drop gluings beaten by a finer
    # gluing for every Robin/Dirichlet problem; "maximal": one block per part
    # and vertex (enough for Cheeger problems).
    gluing: str = "all"
    # identify classes related by swapping interchangeable edges
    symmetry: bool = False
    max_classes: int | None = None

    def __post_init__(self):
        if self.max_cuts_per_edge < 0:
            raise ValueError("max_cuts_per_edge must be >= 0")
        if self.gluing not in ("all", "robin", "maximal"):
            raise ValueError(f"unknown gluing mode {self.gluing!r}")


Gluing = tuple[tuple[int, int, tuple[tuple[End, ...], ...]], ...]


def _flip_end(end: End, flipped: frozenset[int]) -> End:
    return (end[0], 1 - end[1]) if end[0] in flipped else end


def canonicalize(graph: MetricGraph, labels, gluing) -> tuple[tuple, Gluing, dict[int, int], frozenset[int]]:
    """Relabel parts by first occurrence and pick the smallest loop orientation.

    Returns (labels, gluing, part map old->new, flipped loop edges).
    """
    loops = [i for i, e in enumerate(graph.edges) if e.is_loop and len(labels[i]) > 1]
    best = None
    for flips in itertools.product((False, True), repeat=len(loops)):
        fl = frozenset(l for l, f in zip(loops, flips) if f)
        labs = [tuple(reversed(s)) if i in fl else tuple(s) for i, s in enumerate(labels)]
        mapping = {GAP: GAP}
        for s in labs:
            for x in s:
                if x not in mapping:
                    mapping[x] = len(mapping)
        new_labels = tuple(tuple(mapping[x] for x in s) for s in labs)
        new_gluing = tuple(
            sorted(
                (vi, mapping[p], tuple(sorted(tuple(sorted(_flip_end(e, fl) for e in b)) for b in blocks)))
                for vi, p, blocks in gluing
            )
        )
        enc = (new_labels, new_gluing)
        if best is None or enc < best[0]:
            best = (enc, mapping, fl)
    (lab, glu), mapping, fl = best
    return lab, glu, mapping, fl


def encode(labels, gluing) -> str:
    lab = "/".join("-".join(str(x) for x in s) for s in labels)
    glu = ";".join(
        f"{vi}.{p}:" + "|".join("+".join(f"{e}{'ab'[s]}" for e, s in b) for b in blocks)
        for vi, p, blocks in gluing
    )
    return f"E={lab} G={glu}"


class ConfigurationClass:
    """Combinatorial type of a partition, stored in canonical form."""

    def __init__(self, graph: MetricGraph, labels, gluing, exhaustive: bool = False, _canonical: bool = False):
        labels = tuple(tuple(int(x) for x in s) for s in labels)
        gluing = tuple(
            (int(vi), int(p), tuple(tuple((int(e), int(s)) for e, s in b) for b in blocks))
            for vi, p, blocks in gluing
        )
        if len(labels) != len(graph.edges):
            raise GraphError("one label sequence per edge is required")
        if not _canonical:
            labels, gluing, _, _ = canonicalize(graph, labels, gluing)
        self.graph = graph
        self.labels = labels
        self.gluing = gluing
        self.exhaustive = bool(exhaustive)
        self.canonical = encode(labels, gluing)

    def __repr__(self):
        return f"ConfigurationClass({self.canonical})"

    def __eq__(self, other):
        return isinstance(other, ConfigurationClass) and other.graph is self.graph and other.canonical == self.canonical

    def __hash__(self):
        return hash(self.canonical)

    @property
    def id(self) -> str:
        return self.canonical

    @cached_property
    def k(self) -> int:
        return max((x for s in self.labels for x in s), default=0)

    @cached_property
    def segment_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.labels)

    @property
    def n_segments(self) -> int:
        return sum(self.segment_counts)

    @property
    def n_cuts(self) -> int:
        return sum(n - 1 for n in self.segment_counts)

    @cached_property
    def _blocks(self) -> dict[tuple[int, int], tuple[tuple[End, ...], ...]]:
        return {(vi, p): blocks for vi, p, blocks in self.gluing}

    def boundary_sizes(self, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE) -> tuple[int, ...]:
        """Class-constant boundary size of every part (index 0 is part 1)."""
        mode = BoundaryMode(mode)
        g = self.graph
        eff = [0] * self.k
        points: list[set] = [set() for _ in range(self.k)]
        for vi, p, blocks in self.gluing:
            v = g.vertices[vi]
            D = g.parent_degree(v)
            for b in blocks:
                d = len(b)
                if d == D:
                    continue
                eff[p - 1] += min(d, D - d)
                points[p - 1].add(("v", g.parent_point(v)))
        for ei, seq in enumerate(self.labels):
            n = len(seq)
            for j, p in enumerate(seq):
                if p == GAP:
                    continue
                for side in (0, 1):
                    at_vertex = (j == 0 and side == 0) or (j == n - 1 and side == 1)
                    if not at_vertex:
                        eff[p - 1] += 1
                        points[p - 1].add(("e", ei, j + side))
        if mode is BoundaryMode.EFFECTIVE_DEGREE:
            return tuple(eff)
        return tuple(len(s) for s in points)

    def part_segments(self) -> list[list[tuple[int, int]]]:
        """(edge, position) of each segment, grouped by part."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.k)]
        for ei, seq in enumerate(self.labels):
            for j, p in enumerate(seq):
                if p != GAP:
                    out[p - 1].append((ei, j))
        return out

    def equal_lengths(self) -> list[list[float]]:
        return [[e.length / len(s)] * len(s) for e, s in zip(self.graph.edges, self.labels)]

    def split_lengths(self, flat: Sequence[float]) -> list[list[float]]:
        out, i = [], 0
        for n in self.segment_counts:
            out.append([float(x) for x in flat[i : i + n]])
            i += n
        if i != len(flat):
            raise ValueError(f"expected {i} segment lengths, got {len(flat)}")
        return out

    def realize(self, lengths) -> Partition:
        return realize(self, lengths)


def _as_nested(cls: ConfigurationClass, lengths) -> list[list[float]]:
    if len(lengths) == len(cls.labels) and all(isinstance(x, (list, tuple)) for x in lengths):
        nested = [[float(y) for y in x] for x in lengths]
    else:
        nested = cls.split_lengths(list(lengths))
    for ei, (xs, seq) in enumerate(zip(nested, cls.labels)):
        if len(xs) != len(seq):
            raise ValueError(f"edge {cls.graph.edges[ei].id}: expected {len(seq)} segment lengths")
    return nested


def realize(cls: ConfigurationClass, lengths, drop_tol: float = LENGTH_RTOL) -> Partition:
    """Build the partition with the given segment lengths.

    Segments not longer than ``drop_tol * edge length`` are dropped; equal
    neighbours then merge, and an end segment that now reaches a vertex gets its
    own descendant there (no new gluing appears in the limit).
    """
    g = cls.graph
    nested = _as_nested(cls, lengths)
    new_labels, kept = [], []
    for ei, (xs, seq) in enumerate(zip(nested, cls.labels)):
        ell = g.edges[ei].length
        tol = LENGTH_RTOL * ell
        if any(x < -tol for x in xs):
            raise ValueError(f"edge {g.edges[ei].id}: negative segment length")
        if abs(sum(xs) - ell) > tol:
            raise ValueError(f"edge {g.edges[ei].id}: segment lengths sum to {sum(xs)!r}, edge length {ell!r}")
        surv = [(p, x, j) for j, (p, x) in enumerate(zip(seq, xs)) if x > drop_tol * ell]
        merged: list[list] = []
        for p, x, j in surv:
            if merged and merged[-1][0] == p:
                merged[-1][1] += x
                merged[-1][3] = j
            else:
                merged.append([p, x, j, j])
        new_labels.append(tuple(m[0] for m in merged))
        kept.append(merged)

    blocks: dict[tuple[int, int], list[list[End]]] = defaultdict(list)
    n_seq = cls.segment_counts
    for vi, p, blist in cls.gluing:
        for b in blist:
            nb = []
            for ei, side in b:
                m = kept[ei][0] if side == 0 else kept[ei][-1]
                original = 0 if side == 0 else n_seq[ei] - 1
                still = m[2] == original if side == 0 else m[3] == original
                if still:
                    nb.append((ei, side))
            if nb:
                blocks[(vi, p)].append(nb)
    for ei, merged in enumerate(kept):
        e = g.edges[ei]
        for side in (0, 1):
            m = merged[0] if side == 0 else merged[-1]
            original = 0 if side == 0 else n_seq[ei] - 1
            still = m[2] == original if side == 0 else m[3] == original
            if not still and m[0] != GAP:
                vi = g.vertex_index[e.u if side == 0 else e.v]
                blocks[(vi, m[0])].append([(ei, side)])
    gluing = [(vi, p, [tuple(b) for b in bl]) for (vi, p), bl in blocks.items()]

    lab, glu, mapping, flipped = canonicalize(g, new_labels, gluing)
    new_cls = ConfigurationClass(g, lab, glu, cls.exhaustive, _canonical=True)
    seg_lengths = []
    for ei, merged in enumerate(kept):
        xs = [m[1] for m in merged]
        seg_lengths.append(tuple(reversed(xs)) if ei in flipped else tuple(xs))
    return _build_partition(new_cls, seg_lengths)


def _build_partition(cls: ConfigurationClass, seg_lengths) -> Partition:
    g = cls.graph
    k = cls.k
    segs: list[list[Segment]] = [[] for _ in range(k)]
    where: dict[tuple[int, int], tuple[int, int]] = {}
    fixed = []
    for ei, (seq, xs) in enumerate(zip(cls.labels, seg_lengths)):
        ell = g.edges[ei].length
        # make the lengths sum exactly to the edge length
        xs = list(xs)
        xs[-1] = ell - sum(xs[:-1])
        fixed.append(tuple(xs))
        pos = 0.0
        for j, (p, x) in enumerate(zip(seq, xs)):
            a, b = pos, (ell if j == len(seq) - 1 else pos + x)
            pos = b
            if p == GAP:
                continue
            where[(ei, j)] = (p - 1, len(segs[p - 1]))
            segs[p - 1].append(Segment(ei, a, b))
    part_blocks: list[list[tuple]] = [[] for _ in range(k)]
    for vi, p, blocks in cls.gluing:
        for b in blocks:
            ends = []
            for ei, side in b:
                j = 0 if side == 0 else len(cls.labels[ei]) - 1
                _, si = where[(ei, j)]
                ends.append((si, side))
            part_blocks[p - 1].append(tuple(ends))
    parts = tuple(Subgraph(g, tuple(segs[i]), tuple(part_blocks[i])) for i in range(k))
    return Partition(parts, cls.exhaustive, cls, tuple(fixed))


# ---------------------------------------------------------------- enumeration


def _twin_groups(g: MetricGraph) -> list[tuple[list[int], list[bool]]]:
    """Groups of interchangeable edges with the orientation used to compare them.

    Parallel edges of equal length, loops of equal length at one vertex, and
    pendant edges of equal length hanging off one vertex.
    """
    def same(a, b):
        return abs(a - b) <= LENGTH_RTOL * max(a, b)

    vidx = g.vertex_index
    pendant = {v for v in g.vertices if g.degree(v) == 1 and g.parent_degree(v) == 1}
    keyed: dict[tuple, list[tuple[int, bool]]] = defaultdict(list)
    for i, e in enumerate(g.edges):
        if e.is_loop:
            key = ("loop", e.u)
            flip = False
        elif e.v in pendant and e.u not in pendant:
            key = ("pend", e.u)
            flip = False
        elif e.u in pendant and e.v not in pendant:
            key = ("pend", e.v)
            flip = True
        else:
            a, b = sorted((e.u, e.v), key=vidx.get)
            key = ("par", a, b)
            flip = e.u != a
        keyed[key].append((i, flip))
    groups = []
    for members in keyed.values():
        # split by length
        buckets: list[list[tuple[int, bool]]] = []
        for i, flip in members:
            for bk in buckets:
                if same(g.edges[bk[0][0]].length, g.edges[i].length):
                    bk.append((i, flip))
                    break
            else:
                buckets.append([(i, flip)])
        for bk in buckets:
            groups.append(([i for i, _ in bk], [f for _, f in bk]))
    return groups


def _templates(cap: int, exhaustive: bool, interior_gaps: bool) -> list[tuple]:
    """Per-edge label patterns; 'H' marks a vertex-attached part to be named."""
    out = []
    if not exhaustive:
        out.append((GAP,))
    out.append(("H",))
    for cuts in range(1, cap + 1):
        n = cuts + 1
        if not interior_gaps or exhaustive:
            out.append(("H",) + (INTERIOR,) * (n - 2) + ("H",))
            continue
        for ends in itertools.product(("H", GAP), repeat=2):
            for inner in itertools.product((INTERIOR, GAP), repeat=n - 2):
                t = (ends[0],) + inner + (ends[1],)
                if any(a == GAP and b == GAP for a, b in zip(t, t[1:])):
                    continue
                out.append(t)
    return out


def _set_partitions(items: Sequence) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _connected_parts(g: MetricGraph, labels, gluing) -> bool:
    """Every part is connected given the gluing."""
    nodes: dict[End, int] = {}
    owners: list[int] = []
    for vi, p, blocks in gluing:
        for b in blocks:
            idx = len(owners)
            owners.append(p)
            for end in b:
                nodes[end] = idx
    uf = _UnionFind(len(owners))
    for ei, seq in enumerate(labels):
        if len(seq) == 1 and seq[0] != GAP:
            uf.union(nodes[(ei, 0)], nodes[(ei, 1)])
    roots: dict[int, set[int]] = defaultdict(set)
    for i, p in enumerate(owners):
        roots[p].add(uf.find(i))
    return all(len(r) == 1 for r in roots.values())


class ClassEnumerator:
    """Streams configuration classes of a graph; see ``enumerate_configuration_classes``."""

    def __init__(self, graph: MetricGraph, k: int, caps: EnumerationCaps | None = None, exhaustive: bool = False):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.graph = graph
        self.k = k
        self.caps = caps or EnumerationCaps()
        self.exhaustive = exhaustive
        self.warnings: list[str] = []
        self.truncated = False

    # -- skeletons
    def _plan(self):
        g = self.graph
        if self.caps.symmetry:
            groups = _twin_groups(g)
        else:
            groups = [([i], [False]) for i in range(len(g.edges))]
        groups.sort(key=lambda gr: min(gr[0]))
        plan = []
        for gi, (members, flips) in enumerate(groups):
            for pos, (i, f) in enumerate(zip(members, flips)):
                plan.append((i, f, gi, pos))
        return plan, groups

    def skeletons(self) -> Iterator[tuple[tuple, ...]]:
        g, k = self.graph, self.k
        caps = self.caps
        templates = _templates(caps.max_cuts_per_edge, self.exhaustive, caps.allow_interior_gaps)
        plan, groups = self._plan()
        n = len(plan)
        assign: list[tuple] = [()] * n
        seen: set = set()

        def instantiate(t, hubs, budget):
            slots = [i for i, x in enumerate(t) if x == "H"]
            inner = sum(1 for x in t if x == INTERIOR)
            if inner > budget:
                return

            def rec(si, cur, h, used_new):
                if si == len(slots):
                    out = tuple(cur)
                    # interior placeholders get distinct labels later
                    if any(a == b != INTERIOR for a, b in zip(out, out[1:])):
                        return
                    yield out, h, used_new + inner
                    return
                for lab in range(1, h + 2):
                    new = lab == h + 1
                    if new and used_new + inner + 1 > budget:
                        continue
                    cur[slots[si]] = lab
                    yield from rec(si + 1, cur, h + new, used_new + new)
                cur[slots[si]] = "H"

            yield from rec(0, list(t), hubs, 0)

        def dfs(pi, hubs, interior):
            if pi == n:
                if hubs + interior != k:
                    return
                yield from finish()
                return
            ei, flip, gi, pos = plan[pi]
            budget = k - hubs - interior
            prev = assign[pi - 1] if pos > 0 else None
            for t in templates:
                for pat, h2, used in instantiate(t, hubs, budget):
                    if prev is not None and pat < prev:
                        continue
                    assign[pi] = pat
                    yield from dfs(pi + 1, h2, interior + sum(1 for x in pat if x == INTERIOR))
            assign[pi] = ()

        def finish():
            labels: list[tuple] = [()] * len(g.edges)
            nxt = max([x for pat in assign for x in pat] + [0]) + 1
            for (ei, flip, _, _), pat in zip(plan, assign):
                seq = []
                for x in pat:
                    if x == INTERIOR:
                        seq.append(nxt)
                        nxt += 1
                    else:
                        seq.append(x)
                labels[ei] = tuple(reversed(seq)) if flip else tuple(seq)
            if not self._hubs_connected(labels):
                return
            key = self._skeleton_key(assign, plan, groups)
            if key in seen:
                return
            seen.add(key)
            yield tuple(labels)

        yield from dfs(0, 0, 0)

    def _skeleton_key(self, assign, plan, groups):
        hubs = sorted({x for pat in assign for x in pat if x > 0})
        loops = {i for i, e in enumerate(self.graph.edges) if e.is_loop}
        by_group: dict[int, list[tuple]] = defaultdict(list)
        for (ei, _, gi, _), pat in zip(plan, assign):
            by_group[gi].append((ei, pat))
        best = None
        for perm in itertools.permutations(hubs):
            m = dict(zip(hubs, perm))
            key = []
            for gi in sorted(by_group):
                encs = []
                for ei, pat in by_group[gi]:
                    enc = tuple(m.get(x, x) if x > 0 else x for x in pat)
                    if ei in loops:
                        enc = min(enc, tuple(reversed(enc)))
                    encs.append(enc)
                key.append(tuple(sorted(encs)) if self.caps.symmetry else tuple(encs))
            key = tuple(key)
            if best is None or key < best:
                best = key
        return best

    def _hubs_connected(self, labels) -> bool:
        g = self.graph
        gluing = self._maximal_gluing(labels)
        return _connected_parts(g, labels, gluing)

    def _ends_by_vertex_part(self, labels) -> dict[tuple[int, int], list[End]]:
        g = self.graph
        out: dict[tuple[int, int], list[End]] = defaultdict(list)
        for ei, seq in enumerate(labels):
            e = g.edges[ei]
            if seq[0] != GAP:
                out[(g.vertex_index[e.u], seq[0])].append((ei, 0))
            if seq[-1] != GAP:
                out[(g.vertex_index[e.v], seq[-1])].append((ei, 1))
        return out

    def _maximal_gluing(self, labels) -> Gluing:
        return tuple((vi, p, (tuple(sorted(ends)),)) for (vi, p), ends in self._ends_by_vertex_part(labels).items())

    # -- gluings
    def gluings(self, labels) -> Iterator[Gluing]:
        mode = self.caps.gluing
        if mode == "maximal":
            yield self._maximal_gluing(labels)
            return
        g = self.graph
        groups = sorted(self._ends_by_vertex_part(labels).items())
        options = []
        for (vi, p), ends in groups:
            options.append([tuple(tuple(sorted(b)) for b in sp) for sp in _set_partitions(sorted(ends))])
        for combo in itertools.product(*options):
            gluing = tuple((vi, p, blocks) for ((vi, p), _), blocks in zip(groups, combo))
            if not _connected_parts(g, labels, gluing):
                continue
            if mode == "robin" and self._refinable(labels, gluing):
                continue
            yield gluing

    def _refinable(self, labels, gluing) -> bool:
        """A block of size 2..D/2 that can be split while keeping the part connected.

        Splitting such a block enlarges the form domain and leaves the boundary
        potential unchanged, so the ground state can only go down.
        """
        g = self.graph
        for idx, (vi, p, blocks) in enumerate(gluing):
            D = g.parent_degree(g.vertices[vi])
            for bi, b in enumerate(blocks):
                if not (2 <= len(b) and 2 * len(b) <= D):
                    continue
                rest = b[1:]
                for mask in range(0, 2 ** len(rest)):
                    if mask == 2 ** len(rest) - 1:
                        continue
                    left = (b[0],) + tuple(x for j, x in enumerate(rest) if mask >> j & 1)
                    right = tuple(x for j, x in enumerate(rest) if not mask >> j & 1)
                    nb = blocks[:bi] + (left, right) + blocks[bi + 1 :]
                    trial = gluing[:idx] + ((vi, p, nb),) + gluing[idx + 1 :]
                    if _connected_parts(g, labels, trial):
                        return True
        return False

    def _stabilizer_perms(self, labels, limit: int = 120):
        """Edge permutations (within twin groups, identical label sequences)."""
        if not self.caps.symmetry:
            return [None]
        _, groups = self._plan()
        factors = []
        total = 1
        for members, flips in groups:
            by_seq: dict[tuple, list[int]] = defaultdict(list)
            for i, f in zip(members, flips):
                if len(labels[i]) == 1:
                    by_seq[labels[i]].append(i)
            for same in by_seq.values():
                if len(same) > 1:
                    factors.append(same)
                    for j in range(2, len(same) + 1):
                        total *= j
        if total > limit or not factors:
            return [None]
        perms = []
        for choice in itertools.product(*[list(itertools.permutations(f)) for f in factors]):
            m = {}
            for f, c in zip(factors, choice):
                m.update(zip(f, c))
            perms.append(m)
        return perms

    def __iter__(self) -> Iterator[ConfigurationClass]:
        g = self.graph
        emitted: set[str] = set()
        count = 0
        limit = self.caps.max_classes
        for labels in self.skeletons():
            perms = self._stabilizer_perms(labels)
            local: set = set()
            for gluing in self.gluings(labels):
                if perms[0] is not None:
                    key = min(
                        tuple(
                            sorted(
                                (vi, p, tuple(sorted(tuple(sorted((m.get(e, e), s) for e, s in b)) for b in blocks)))
                                for vi, p, blocks in gluing
                            )
                        )
                        for m in perms
                    )
                    if key in local:
                        continue
                    local.add(key)
                cls = ConfigurationClass(g, labels, gluing, self.exhaustive)
                if cls.canonical in emitted:
                    continue
                emitted.add(cls.canonical)
                count += 1
                yield cls
                if limit is not None and count >= limit:
                    self.truncated = True
                    msg = f"class enumeration stopped at max_classes={limit}"
                    self.warnings.append(msg)
                    warnings.warn(msg, CapWarning, stacklevel=2)
                    return


def enumerate_configuration_classes(
    graph: MetricGraph, k: int, caps: EnumerationCaps | None = None, exhaustive: bool = False
) -> Iterator[ConfigurationClass]:
    """Stream every configuration class with at most ``caps.max_cuts_per_edge`` cuts per edge.

    Output order is deterministic and free of duplicates up to relabeling parts
    and flipping loops.  ``caps.symmetry`` additionally drops most classes that
    differ only by swapping twin edges: every orbit keeps at least one member,
    but a few equivalent classes can survive (``orbit_key`` tells them apart).
    """
    return iter(ClassEnumerator(graph, k, caps, exhaustive))


def orbit_key(cls: ConfigurationClass) -> str:
    """Canonical form up to relabeling, loop flips and every twin-edge permutation.

    Brute force over the twin symmetry group; meant for checks on small graphs.
    """
    g = cls.graph
    groups = _twin_groups(g)
    per_group = []
    for members, flips in groups:
        orient = dict(zip(members, flips))
        per_group.append([(members, p, orient) for p in itertools.permutations(members)])
    best = None
    for choice in itertools.product(*per_group):
        emap: dict[int, tuple[int, bool]] = {}
        for members, perm, orient in choice:
            for i, j in zip(members, perm):
                emap[i] = (j, orient[i] != orient[j])
        labels: list = [None] * len(g.edges)
        for i, seq in enumerate(cls.labels):
            j, rev = emap[i]
            labels[j] = tuple(reversed(seq)) if rev else seq
        blocks: dict[tuple[int, int], list] = defaultdict(list)
        for vi, p, blist in cls.gluing:
            for b in blist:
                nb = []
                for e, s in b:
                    j, rev = emap[e]
                    nb.append((j, 1 - s if rev else s))
                v2 = g.vertex_index[g.end_vertex(nb[0])]
                blocks[(v2, p)].append(tuple(nb))
        gluing = [(vi, p, bl) for (vi, p), bl in blocks.items()]
        lab, glu, _, _ = canonicalize(g, labels, gluing)
        enc = encode(lab, glu)
        if best is None or enc < best:
            best = enc
    return best
