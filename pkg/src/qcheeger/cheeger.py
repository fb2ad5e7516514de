"""k-Cheeger constants by an exact LP inside every configuration class."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classes import GAP, ClassEnumerator, ConfigurationClass, EnumerationCaps
from .graph import BoundaryMode, MetricGraph, Partition, Segment, Subgraph
from .parallel import parallel_map
from .simplex import linprog_simplex

VALUE_TOL = 1e-12
CHEEGER_CAPS = EnumerationCaps(gluing="maximal", symmetry=True)


def cheeger_energy(P: Partition, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE) -> float:
    return max(_ratios(P, mode))


def cheeger_energy_p(P: Partition, p: float, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    r = np.asarray(_ratios(P, mode))
    if np.isinf(r).any():
        return math.inf
    return float(np.sum(r**p) ** (1.0 / p))


def _ratios(P: Partition, mode) -> list[float]:
    out = []
    for part in P.parts:
        L = part.total_length
        out.append(math.inf if L <= 0 else part.boundary_size(mode) / L)
    return out


@dataclass(frozen=True)
class ClassLP:
    """Variables and constraint data of the LP attached to a class."""

    free: list[tuple[int, int]]  # (edge, position) of segments on split edges
    fixed: np.ndarray  # per part: length of its whole edges
    member: np.ndarray  # parts x free incidence
    edges: list[tuple[int, list[int]]]  # split edge -> indices into free


def class_lp(cls: ConfigurationClass) -> ClassLP:
    g = cls.graph
    k = cls.k
    fixed = np.zeros(k)
    free, edges = [], []
    for ei, seq in enumerate(cls.labels):
        if len(seq) == 1:
            if seq[0] != GAP:
                fixed[seq[0] - 1] += g.edges[ei].length
            continue
        idx = []
        for j in range(len(seq)):
            idx.append(len(free))
            free.append((ei, j))
        edges.append((ei, idx))
    member = np.zeros((k, len(free)))
    for col, (ei, j) in enumerate(free):
        p = cls.labels[ei][j]
        if p != GAP:
            member[p - 1, col] = 1.0
    return ClassLP(free, fixed, member, edges)


def max_part_lengths(cls: ConfigurationClass) -> np.ndarray:
    """Upper bound on every part length over the class."""
    lp = class_lp(cls)
    out = lp.fixed.copy()
    for ei, idx in lp.edges:
        ell = cls.graph.edges[ei].length
        for p in {cls.labels[ei][lp.free[i][1]] for i in idx}:
            if p != GAP:
                out[p - 1] += ell
    return out


def _lengths_from(cls: ConfigurationClass, lp: ClassLP, x: np.ndarray) -> list[list[float]]:
    nested = [[cls.graph.edges[ei].length] if len(seq) == 1 else [0.0] * len(seq) for ei, seq in enumerate(cls.labels)]
    for ei, idx in lp.edges:
        ell = cls.graph.edges[ei].length
        vals = np.maximum(x[idx], 0.0)
        total = vals.sum()
        vals = vals * (ell / total) if total > 0 else np.full(len(idx), ell / len(idx))
        vals = list(vals)
        vals[-1] = ell - sum(vals[:-1])
        nested[ei] = vals
    return nested


def class_optimum(cls: ConfigurationClass, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE):
    """min over realizations of max_i c_i / L_i, solved as: max s with L_i >= c_i s.

    Returns (value, nested segment lengths).
    """
    c = np.asarray(cls.boundary_sizes(mode), dtype=float)
    lp = class_lp(cls)
    if not (c > 0).any():
        return 0.0, cls.equal_lengths()
    nf = len(lp.free)
    # variables: s, then free segment lengths
    obj = np.zeros(nf + 1)
    obj[0] = -1.0
    A_ub = np.zeros((cls.k, nf + 1))
    A_ub[:, 0] = c
    A_ub[:, 1:] = -lp.member
    b_ub = lp.fixed
    A_eq = np.zeros((len(lp.edges), nf + 1))
    b_eq = np.zeros(len(lp.edges))
    for r, (ei, idx) in enumerate(lp.edges):
        A_eq[r, [i + 1 for i in idx]] = 1.0
        b_eq[r] = cls.graph.edges[ei].length
    res = linprog_simplex(obj, A_ub, b_ub, A_eq, b_eq)
    if res.status != "optimal" or res.x[0] <= 0:
        return math.inf, cls.equal_lengths()
    s = res.x[0]
    return 1.0 / s, _lengths_from(cls, lp, res.x[1:])


def class_optimum_p(cls: ConfigurationClass, p: float, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE):
    """min over realizations of the p-norm of the ratios (a convex problem)."""
    from scipy.optimize import minimize

    c = np.asarray(cls.boundary_sizes(mode), dtype=float)
    lp = class_lp(cls)
    if not (c > 0).any():
        return 0.0, cls.equal_lengths()
    value0, start = class_optimum(cls, mode)
    if not lp.free:
        L = lp.fixed
        r = np.where(c > 0, c / np.maximum(L, 1e-300), 0.0)
        return float(np.sum(r**p) ** (1 / p)), start
    x0 = np.concatenate([start[ei] for ei, _ in lp.edges])
    scale = max(c.max(), 1.0)

    def f(x):
        L = lp.fixed + lp.member @ x
        r = np.where(c > 0, c / np.maximum(L, 1e-12), 0.0) / scale
        return float(np.sum(r**p) ** (1 / p))

    cons = []
    for ei, idx in lp.edges:
        ell = cls.graph.edges[ei].length
        cons.append({"type": "eq", "fun": lambda x, idx=idx, ell=ell: x[idx].sum() - ell})
    res = minimize(f, x0, method="SLSQP", bounds=[(0, None)] * len(x0), constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
    x = res.x if res.success or f(res.x) <= f(x0) else x0
    lengths = _lengths_from(cls, lp, x)
    return f(x) * scale, lengths


@dataclass
class ClassRecord:
    class_id: str
    value: float | None
    lower_bound: float
    status: str  # "optimal" | "pruned"


@dataclass
class CheegerResult:
    value: float
    argmin: Partition | None
    argmin_class: ConfigurationClass | None
    per_class: list[ClassRecord]
    mode: BoundaryMode
    p: float | None = None
    warnings: list[str] = field(default_factory=list)
    cap_check: dict | None = None

    @property
    def k(self) -> int:
        return self.argmin.k if self.argmin is not None else 0


def _evaluate(args):
    cls, mode, p = args
    if p is None:
        value, lengths = class_optimum(cls, mode)
    else:
        value, lengths = class_optimum_p(cls, p, mode)
    return value, lengths


def cheeger_constant(
    graph: MetricGraph,
    k: int,
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE,
    caps: EnumerationCaps | None = None,
    exhaustive: bool = False,
    p: float | None = None,
    jobs: int = 1,
    prune: bool = True,
    verify_cap: bool = False,
) -> CheegerResult:
    """Minimum over configuration classes of the exact class optimum.

    With ``prune`` a class is skipped when max_i c_i / (largest possible L_i)
    already exceeds the incumbent.  Ties within 1e-12 go to the smallest
    canonical id.
    """
    mode = BoundaryMode(mode)
    caps = caps or CHEEGER_CAPS
    enum = ClassEnumerator(graph, k, caps, exhaustive)
    if k == 1 and not exhaustive and graph.ambient_degree is None:
        whole = graph.whole()
        P = Partition((whole,), False)
        return CheegerResult(0.0, P, None, [], mode, p)

    records: list[ClassRecord] = []
    best = (math.inf, "", None, None)

    def consider(cls, value, lengths):
        nonlocal best
        if value < best[0] - VALUE_TOL * max(1.0, value) or (
            value <= best[0] + VALUE_TOL * max(1.0, value) and cls.canonical < best[1]
        ):
            best = (value, cls.canonical, cls, lengths)

    if jobs > 1:
        classes = list(enum)
        results = parallel_map(_evaluate, [(c, mode, p) for c in classes], jobs)
        for cls, (value, lengths) in zip(classes, results):
            records.append(ClassRecord(cls.canonical, value, value, "optimal"))
            consider(cls, value, lengths)
    else:
        for cls in enum:
            c = np.asarray(cls.boundary_sizes(mode), dtype=float)
            bound = float(np.max(c / max_part_lengths(cls))) if p is None else 0.0
            if prune and bound > best[0] * (1 + 1e-9):
                records.append(ClassRecord(cls.canonical, None, bound, "pruned"))
                continue
            value, lengths = _evaluate((cls, mode, p))
            records.append(ClassRecord(cls.canonical, value, bound, "optimal"))
            consider(cls, value, lengths)

    value, _, cls, lengths = best
    argmin = cls.realize(lengths) if cls is not None else None
    result = CheegerResult(value, argmin, cls, records, mode, p, list(enum.warnings))
    if verify_cap:
        bigger = EnumerationCaps(
            caps.max_cuts_per_edge + 1, caps.allow_interior_gaps, caps.gluing, caps.symmetry, caps.max_classes
        )
        other = cheeger_constant(graph, k, mode, bigger, exhaustive, p, jobs, prune, False)
        changed = other.value < value - 1e-9 * max(1.0, value)
        result.cap_check = {
            "max_cuts_per_edge": caps.max_cuts_per_edge,
            "value": value,
            "next_cap_value": other.value,
            "changed": changed,
        }
        if changed:
            result.warnings.append(
                f"raising max_cuts_per_edge to {bigger.max_cuts_per_edge} lowers the value to {other.value!r}"
            )
    return result


def _lift_subset(omega: Subgraph, E: Subgraph) -> Subgraph:
    """Map a subgraph of ``omega.as_graph()`` back into omega's parent."""
    segs = []
    for s in E.segments:
        base = omega.segments[s.edge]
        segs.append(Segment(base.edge, base.a + s.a, base.a + s.b))
    return Subgraph(omega.parent, tuple(segs), E.blocks)


def h1(omega: Subgraph, caps: EnumerationCaps | None = None, mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE):
    """inf |dE|/|E| over connected E inside omega, boundary measured in the parent.

    Returns (value, E) with E a subgraph of omega's parent.
    """
    G = omega.as_graph()
    caps = caps or EnumerationCaps(max_cuts_per_edge=1, gluing="maximal", symmetry=True)
    res = cheeger_constant(G, 1, mode, caps)
    E = res.argmin.parts[0]
    return res.value, _lift_subset(omega, E)


def cheeger_variant(
    graph: MetricGraph,
    k: int,
    caps: EnumerationCaps | None = None,
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE,
) -> float:
    """inf over k-partitions of max_i h1(part i), non-exhaustive.

    Every class is realized at its LP optimum and each part's h1 is computed
    by its own enumeration.
    """
    if k < 2:
        raise ValueError("the variant needs k >= 2")
    caps = caps or CHEEGER_CAPS
    cache: dict = {}
    best = math.inf
    for cls in ClassEnumerator(graph, k, caps, False):
        value, lengths = class_optimum(cls, mode)
        if not math.isfinite(value):
            continue
        P = cls.realize(lengths)
        if P.k < k:
            continue
        worst = 0.0
        for part in P.parts:
            key = part.key()
            if key not in cache:
                cache[key] = h1(part, mode=mode)[0]
            worst = max(worst, cache[key])
            if worst >= best:
                break
        best = min(best, worst)
    return best
