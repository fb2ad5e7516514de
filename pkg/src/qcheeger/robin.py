"""Robin and Dirichlet spectral minimal partitions and their limits in alpha.

Inside one configuration class the energy max_i lambda_1(part i) is a
function of the segment lengths on split edges.  A part's eigenvalue only
depends on its own segment lengths, so evaluations are cached per part.
Segments shorter than ``CONTRACT_RTOL * edge length`` are contracted into a
single vertex carrying the summed strength, which is the continuous limit of
the ground state as an edge shrinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .cheeger import CheegerResult, class_lp, class_optimum, cheeger_constant
from .classes import GAP, ClassEnumerator, ConfigurationClass, EnumerationCaps
from .graph import BoundaryMode, GraphError, MetricGraph, Partition, _UnionFind
from .parallel import parallel_map
from .simplex import linprog_simplex
from .spectral import Method, QuantumGraph, RobinProblem, dirichlet_lambda1, robin_lambda1, solve

DIRICHLET = "dirichlet"
CONTRACT_RTOL = 1e-9
ROBIN_CAPS = EnumerationCaps(gluing="robin", symmetry=True)


@dataclass(frozen=True)
class RobinOptions:
    restarts: int = 4
    max_iter: int = 500
    rtol: float = 1e-8
    seed: int = 0
    tol: float = 1e-10
    warm_start_alpha: float = 0.1  # Cheeger warm start at or below this alpha
    screen_keep: int = 48  # classes kept after the warm-start screen
    refine_keep: int = 6  # classes given the full multi-start treatment
    sweeps: int = 30
    p: float | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1:
            raise ValueError("restarts and max_iter must be positive")
        if self.tol <= 0 or self.rtol <= 0:
            raise ValueError("tolerances must be positive")
        if self.screen_keep < 1 or self.refine_keep < 1:
            raise ValueError("screen_keep and refine_keep must be positive")


# ----------------------------------------------------------------- energies


def _norm(values, p):
    v = np.asarray(values, dtype=float)
    if p is None:
        return float(v.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    if np.isinf(v).any():
        return math.inf
    return float(np.sum(v**p) ** (1.0 / p))


def robin_part_values(P: Partition, alpha: float, mode=BoundaryMode.EFFECTIVE_DEGREE, tol: float = 1e-10) -> list[float]:
    return [robin_lambda1(RobinProblem(part, alpha, mode=mode), Method.SECULAR, tol).lambda1 for part in P.parts]


def robin_energy(P: Partition, alpha: float, mode=BoundaryMode.EFFECTIVE_DEGREE, tol: float = 1e-10) -> float:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return _norm(robin_part_values(P, alpha, mode, tol), None)


def robin_energy_p(P: Partition, alpha: float, p: float, mode=BoundaryMode.EFFECTIVE_DEGREE, tol: float = 1e-10) -> float:
    return _norm(robin_part_values(P, alpha, mode, tol), p)


def dirichlet_energy(P: Partition, tol: float = 1e-10) -> float:
    return max(dirichlet_lambda1(part, Method.SECULAR, tol).lambda1 for part in P.parts)


# ------------------------------------------------------- per-class energy


class ClassEnergy:
    """Part eigenvalues of a class as functions of its segment lengths.

    ``alpha`` is a coupling constant or ``DIRICHLET``.
    """

    def __init__(self, cls: ConfigurationClass, alpha, mode=BoundaryMode.EFFECTIVE_DEGREE, tol: float = 1e-10):
        self.cls = cls
        self.alpha = alpha
        self.dirichlet = alpha == DIRICHLET
        if not self.dirichlet and not (alpha >= 0 and math.isfinite(alpha)):
            raise ValueError("alpha must be finite and >= 0")
        self.mode = BoundaryMode(mode)
        self.tol = tol
        self.cache: dict = {}
        self.evaluations = 0
        self._build()

    def _build(self):
        cls, g = self.cls, self.cls.graph
        k = cls.k
        self.part_segs = cls.part_segments()
        # per part: node weights and (head node, tail node) per segment
        self.topology = []
        for p in range(1, k + 1):
            nodes: list[float] = []
            end_node: dict[tuple[int, int], int] = {}
            vertex_blocks: dict[int, list[int]] = {}
            for vi, q, blocks in cls.gluing:
                if q != p:
                    continue
                D = g.parent_degree(g.vertices[vi])
                for b in blocks:
                    d = len(b)
                    w = 0.0 if d == D else float(min(d, D - d))
                    for end in b:
                        end_node[end] = len(nodes)
                    if w > 0:
                        vertex_blocks.setdefault(vi, []).append(len(nodes))
                    nodes.append(w)
            if self.mode is BoundaryMode.COUNT:
                for ids in vertex_blocks.values():
                    for i in ids:
                        nodes[i] = 1.0 / len(ids)
            segs = []
            for ei, j in self.part_segs[p - 1]:
                n = len(cls.labels[ei])
                ends = []
                for side in (0, 1):
                    at_vertex = (j == 0 and side == 0) or (j == n - 1 and side == 1)
                    if at_vertex:
                        ends.append(end_node[(ei, side)])
                    else:
                        ends.append(len(nodes))
                        nodes.append(1.0)
                segs.append((ei, j, ends[0], ends[1]))
            self.topology.append((np.array(nodes), segs))

    def _part_key(self, p: int, nested) -> tuple:
        return tuple(round(nested[ei][j], 15) for ei, j in self.part_segs[p])

    def part_graph(self, p: int, nested) -> QuantumGraph | None:
        weights, segs = self.topology[p]
        g = self.cls.graph
        uf = _UnionFind(len(weights))
        kept = []
        for ei, j, h, t in segs:
            x = nested[ei][j]
            if x <= CONTRACT_RTOL * g.edges[ei].length:
                uf.union(h, t)
            else:
                kept.append((h, t, x))
        if not kept:
            return None
        roots = sorted({uf.find(i) for i in range(len(weights))})
        index = {r: n for n, r in enumerate(roots)}
        beta = np.zeros(len(roots))
        pinned = np.zeros(len(roots), dtype=bool)
        for i, w in enumerate(weights):
            r = index[uf.find(i)]
            if self.dirichlet:
                pinned[r] |= w > 0
            else:
                beta[r] += self.alpha * w
        edges = [(index[uf.find(h)], index[uf.find(t)], x) for h, t, x in kept]
        # nodes touched by no remaining edge (all their segments contracted elsewhere) are harmless
        return QuantumGraph.build(len(roots), edges, beta, pinned)

    def part_value(self, p: int, nested) -> float:
        key = self._part_key(p, nested)
        hit = self.cache.get((p, key))
        if hit is not None:
            return hit
        qg = self.part_graph(p, nested)
        if qg is None:
            val = math.inf
        else:
            used = np.zeros(qg.n_nodes, dtype=bool)
            used[qg.heads] = True
            used[qg.tails] = True
            if not used.all():
                keep = np.flatnonzero(used)
                remap = -np.ones(qg.n_nodes, dtype=int)
                remap[keep] = np.arange(keep.size)
                qg = QuantumGraph.build(
                    keep.size,
                    [(remap[h], remap[t], x) for h, t, x in zip(qg.heads, qg.tails, qg.lengths)],
                    qg.beta[keep],
                    qg.dirichlet[keep],
                )
            val = solve(qg, Method.SECULAR, self.tol).lambda1
            self.evaluations += 1
        self.cache[(p, key)] = val
        return val

    def values(self, nested) -> np.ndarray:
        return np.array([self.part_value(p, nested) for p in range(self.cls.k)])

    def energy(self, nested, p_norm: float | None = None) -> float:
        return _norm(self.values(nested), p_norm)


# ----------------------------------------------------------- optimization


def _project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


class _Coordinates:
    """Flattened free segment lengths of split edges <-> nested lengths."""

    def __init__(self, cls: ConfigurationClass):
        self.cls = cls
        self.split = [ei for ei, seq in enumerate(cls.labels) if len(seq) > 1]
        self.ells = [cls.graph.edges[ei].length for ei in self.split]

    def flatten(self, nested) -> np.ndarray:
        return np.concatenate([np.asarray(nested[ei], dtype=float) for ei in self.split]) if self.split else np.zeros(0)

    def nest(self, flat) -> list[list[float]]:
        nested = [[self.cls.graph.edges[ei].length] if len(seq) == 1 else None for ei, seq in enumerate(self.cls.labels)]
        i = 0
        for ei, ell in zip(self.split, self.ells):
            n = len(self.cls.labels[ei])
            nested[ei] = list(_project_simplex(np.asarray(flat[i : i + n], dtype=float), ell))
            i += n
        return nested


def _equalize(E: ClassEnergy, nested, sweeps: int, rtol: float) -> tuple[list[list[float]], int]:
    """Gauss-Seidel over cuts: place each cut where its two neighbours' eigenvalues agree.

    Moving a cut into part q shrinks q and grows p, so lambda_p - lambda_q is
    monotone in the cut position and a bracketing root finder applies.
    """
    cls = E.cls
    nested = [list(x) for x in nested]
    prev = E.energy(nested)
    for sweep in range(sweeps):
        for ei, seq in enumerate(cls.labels):
            ell = cls.graph.edges[ei].length
            for j in range(len(seq) - 1):
                p, q = seq[j], seq[j + 1]
                if p == GAP or q == GAP:
                    continue
                pair = nested[ei][j] + nested[ei][j + 1]

                def F(t):
                    nested[ei][j], nested[ei][j + 1] = t, pair - t
                    return E.part_value(p - 1, nested) - E.part_value(q - 1, nested)

                # F is finite once both segments exceed the contraction length
                eps = 2 * CONTRACT_RTOL * ell
                lo, hi = min(eps, pair / 2), max(pair - eps, pair / 2)
                xtol = ell * max(1e-13, 1e-3 * 10.0 ** (-2 * sweep))
                if F(lo) <= 0:
                    t = 0.0 if F(0.0) <= 0 else lo
                elif F(hi) >= 0:
                    t = pair if F(pair) >= 0 else hi
                else:
                    t = brentq(F, lo, hi, xtol=xtol, rtol=1e-14)
                nested[ei][j], nested[ei][j + 1] = t, pair - t
        cur = E.energy(nested)
        if abs(prev - cur) <= rtol * max(abs(cur), 1e-300):
            return nested, sweep + 1
        prev = cur
    return nested, sweeps


def warm_start(cls: ConfigurationClass, alpha, opts: RobinOptions, mode=BoundaryMode.EFFECTIVE_DEGREE):
    if alpha != DIRICHLET and alpha <= opts.warm_start_alpha:
        value, lengths = class_optimum(cls, mode)
        if math.isfinite(value):
            return lengths
    return cls.equal_lengths()


@dataclass
class ClassRun:
    value: float
    lengths: list
    iterations: int
    restart: int
    spread: float
    part_values: tuple


def minimize_class(
    cls: ConfigurationClass,
    alpha,
    opts: RobinOptions | None = None,
    mode=BoundaryMode.EFFECTIVE_DEGREE,
    polish: bool = True,
    restarts: int | None = None,
) -> ClassRun:
    """Approximate min over realizations of the class of max_i lambda_1(part i)."""
    opts = opts or RobinOptions()
    E = ClassEnergy(cls, alpha, mode, opts.tol)
    coords = _Coordinates(cls)
    n_starts = opts.restarts if restarts is None else restarts
    runs = []
    for r in range(n_starts):
        if r == 0:
            start = warm_start(cls, alpha, opts, mode)
        else:
            if not coords.split:
                break
            rng = np.random.default_rng((opts.seed, r))
            start = coords.nest(np.concatenate([rng.dirichlet(np.ones(len(cls.labels[ei]))) * ell for ei, ell in zip(coords.split, coords.ells)]))
        iters = 0
        nested = start
        if coords.split:
            nested, iters = _equalize(E, start, opts.sweeps, opts.rtol)
        best_val = E.energy(nested, opts.p)
        best = nested
        if polish and coords.split and math.isfinite(best_val):
            x0 = coords.flatten(nested)
            f = lambda x: E.energy(coords.nest(x), opts.p)
            step = 0.05 * np.maximum(x0, 0.05 * np.repeat(coords.ells, [len(cls.labels[ei]) for ei in coords.split]))
            simplex = np.vstack([x0] + [x0 + step[i] * np.eye(x0.size)[i] for i in range(x0.size)])
            res = minimize(
                f,
                x0,
                method="Nelder-Mead",
                options={
                    "maxiter": opts.max_iter,
                    "initial_simplex": simplex,
                    "xatol": 1e-10 * max(coords.ells),
                    "fatol": opts.rtol * max(best_val, 1e-300),
                },
            )
            iters += int(res.nit)
            if res.fun < best_val:
                best_val, best = float(res.fun), coords.nest(res.x)
        vals = E.values(best)
        finite = vals[np.isfinite(vals)]
        spread = float(finite.max() - finite.min()) if finite.size else math.inf
        runs.append(ClassRun(best_val, best, iters, r, spread, tuple(float(v) for v in vals)))
    runs.sort(key=lambda c: (c.value, c.restart))
    return runs[0]


# ----------------------------------------------------------------- drivers


@dataclass
class SpectralClassRecord:
    class_id: str
    screen_value: float
    value: float | None
    stage: str  # "screened" | "equalized" | "refined"


@dataclass
class SpectralPartitionResult:
    alpha: object  # float or DIRICHLET
    value: float
    argmin: Partition
    argmin_class: ConfigurationClass
    lengths: list
    per_class: list[SpectralClassRecord]
    diagnostics: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def class_id(self) -> str:
        return self.argmin_class.canonical


def _screen(args):
    cls, alpha, opts, mode = args
    E = ClassEnergy(cls, alpha, mode, opts.tol)
    return E.energy(warm_start(cls, alpha, opts, mode), opts.p)


def _quick(args):
    cls, alpha, opts, mode = args
    return minimize_class(cls, alpha, opts, mode, polish=False, restarts=1)


def _full(args):
    cls, alpha, opts, mode = args
    return minimize_class(cls, alpha, opts, mode)


def spectral_minimal_partition(
    graph: MetricGraph,
    k: int,
    alpha,
    caps: EnumerationCaps | None = None,
    opts: RobinOptions | None = None,
    exhaustive: bool = False,
    mode=BoundaryMode.EFFECTIVE_DEGREE,
    jobs: int = 1,
) -> SpectralPartitionResult:
    """Three stages: warm-start screen of every class, equalization of the
    best ``screen_keep``, multi-start polish of the best ``refine_keep``.
    Ties go to the smaller value, then the smaller class id, then the restart index.
    """
    if k < 2:
        raise ValueError("spectral minimal partitions need k >= 2")
    if alpha != DIRICHLET and not alpha > 0:
        raise ValueError("alpha must be > 0")
    opts = opts or RobinOptions()
    caps = caps or ROBIN_CAPS
    enum = ClassEnumerator(graph, k, caps, exhaustive)
    classes = list(enum)
    if not classes:
        raise GraphError(f"no {k}-partition classes within the caps")
    screen = parallel_map(_screen, [(c, alpha, opts, mode) for c in classes], jobs)
    order = sorted(range(len(classes)), key=lambda i: (screen[i], classes[i].canonical))
    records = {i: SpectralClassRecord(classes[i].canonical, screen[i], None, "screened") for i in range(len(classes))}

    stage2 = [i for i in order[: opts.screen_keep] if math.isfinite(screen[i])]
    quick = parallel_map(_quick, [(classes[i], alpha, opts, mode) for i in stage2], jobs)
    for i, run in zip(stage2, quick):
        records[i].value, records[i].stage = run.value, "equalized"
    stage3 = sorted(range(len(stage2)), key=lambda j: (quick[j].value, classes[stage2[j]].canonical))[: opts.refine_keep]
    stage3 = [stage2[j] for j in stage3]
    full = parallel_map(_full, [(classes[i], alpha, opts, mode) for i in stage3], jobs)
    best = None
    for i, run in zip(stage3, full):
        q = quick[stage2.index(i)]
        if q.value < run.value:
            run = q
        records[i].value, records[i].stage = run.value, "refined"
        key = (run.value, classes[i].canonical, run.restart)
        if best is None or key < best[0]:
            best = (key, i, run)
    if best is None or not math.isfinite(best[2].value):
        raise GraphError("every class is infeasible")
    _, i, run = best
    cls = classes[i]
    argmin = cls.realize(run.lengths)
    # report the energy of the realized partition itself
    if alpha == DIRICHLET:
        parts = [dirichlet_lambda1(p, Method.SECULAR, opts.tol).lambda1 for p in argmin.parts]
    else:
        parts = robin_part_values(argmin, alpha, mode, opts.tol)
    value = _norm(parts, opts.p)
    diag = {
        "iterations": run.iterations,
        "restart": run.restart,
        "restarts": opts.restarts,
        "spread": run.spread,
        "part_values": parts,
        "optimizer_value": run.value,
        "n_classes": len(classes),
        "realized_class_id": argmin.configuration.canonical,
    }
    return SpectralPartitionResult(alpha, value, argmin, cls, run.lengths, [records[j] for j in order], diag, list(enum.warnings))


def robin_minimal_partition(graph, k, alpha, caps=None, opts=None, exhaustive=False, mode=BoundaryMode.EFFECTIVE_DEGREE, jobs=1):
    return spectral_minimal_partition(graph, k, float(alpha), caps, opts, exhaustive, mode, jobs)


def dirichlet_minimal_partition(graph, k, caps=None, opts=None, exhaustive=False, jobs=1):
    return spectral_minimal_partition(graph, k, DIRICHLET, caps, opts, exhaustive, BoundaryMode.EFFECTIVE_DEGREE, jobs)


# ------------------------------------------------------------ alpha studies


def lipschitz_constant(graph: MetricGraph, k: int) -> float:
    """2k * sum of vertex degrees / longest edge."""
    return 2.0 * k * sum(graph.degree(v) for v in graph.vertices) / graph.max_edge_length


@dataclass
class MonotonicityRow:
    alpha: float
    value: float
    increase: float | None  # value minus previous value
    slope: float | None  # |increase| / alpha step
    lipschitz: float
    ok: bool


def alpha_monotonicity_check(
    graph: MetricGraph,
    k: int,
    alpha_grid: Sequence[float],
    caps: EnumerationCaps | None = None,
    opts: RobinOptions | None = None,
    exhaustive: bool = False,
    margin: float = 1e-10,
    jobs: int = 1,
) -> list[MonotonicityRow]:
    grid = list(alpha_grid)
    if grid != sorted(grid) or len(set(grid)) != len(grid):
        raise ValueError("alpha grid must be strictly ascending")
    C = lipschitz_constant(graph, k)
    rows = []
    prev = None
    for a in grid:
        val = robin_minimal_partition(graph, k, a, caps, opts, exhaustive, jobs=jobs).value
        if prev is None:
            rows.append(MonotonicityRow(a, val, None, None, C, True))
        else:
            inc = val - prev[1]
            slope = abs(inc) / (a - prev[0])
            rows.append(MonotonicityRow(a, val, inc, slope, C, inc > margin and slope <= C))
        prev = (a, val)
    return rows


class Direction(str, Enum):
    TO_ZERO = "zero"
    TO_INFINITY = "infinity"


@dataclass
class StudyRow:
    alpha: float
    value: float
    value_over_alpha: float
    class_id: str
    partition_distance: float
    reference_class: bool  # argmin class is optimal for the reference problem
    realized_class_id: str
    min_part_length: float


@dataclass
class LimitStudy:
    direction: Direction
    k: int
    rows: list[StudyRow]
    reference: object  # CheegerResult or SpectralPartitionResult
    reference_value: float


def _cuts(cls: ConfigurationClass, nested) -> list[float]:
    out = []
    for ei, seq in enumerate(cls.labels):
        pos = 0.0
        for x in nested[ei][:-1]:
            pos += x
            out.append(pos)
    return out


def cheeger_distance(cls: ConfigurationClass, nested, cheeger_value: float, mode=BoundaryMode.EFFECTIVE_DEGREE) -> float:
    """Distance from the realization to the Cheeger-optimal realizations of the same class.

    Solves min t over realizations y with c_i / L_i(y) <= C, that is
    L_i(y) >= c_i / C, and |cut_j(x) - cut_j(y)| <= t for every cut.  +inf
    when the class cannot reach the Cheeger value.
    """
    if not (cheeger_value > 0 and math.isfinite(cheeger_value)):
        return math.inf
    lp = class_lp(cls)
    c = np.asarray(cls.boundary_sizes(mode), dtype=float)
    target = c / cheeger_value * (1 - 1e-9)
    if not lp.free:
        return 0.0 if (lp.fixed >= target).all() else math.inf
    nf = len(lp.free)
    x_cuts = _cuts(cls, nested)
    rows, rhs = [], []
    # cut j on edge e = sum of the first m free lengths of that edge
    j = 0
    for ei, idx in lp.edges:
        for m in range(1, len(idx)):
            a = np.zeros(nf + 1)
            a[[i + 1 for i in idx[:m]]] = 1.0
            a[0] = -1.0
            rows.append(a.copy())
            rhs.append(x_cuts[j])
            a[1:] *= -1
            rows.append(a)
            rhs.append(-x_cuts[j])
            j += 1
    for i in range(cls.k):
        a = np.zeros(nf + 1)
        a[1:] = -lp.member[i]
        rows.append(a)
        rhs.append(lp.fixed[i] - target[i])
    A_eq = np.zeros((len(lp.edges), nf + 1))
    b_eq = np.zeros(len(lp.edges))
    for r, (ei, idx) in enumerate(lp.edges):
        A_eq[r, [i + 1 for i in idx]] = 1.0
        b_eq[r] = cls.graph.edges[ei].length
    obj = np.zeros(nf + 1)
    obj[0] = 1.0
    res = linprog_simplex(obj, np.array(rows), np.array(rhs), A_eq, b_eq)
    if res.status != "optimal":
        return math.inf
    return float(res.x[0])


def dirichlet_distance(cls: ConfigurationClass, nested, ref: SpectralPartitionResult) -> float:
    if cls.canonical != ref.argmin_class.canonical:
        return math.inf
    a, b = _cuts(cls, nested), _cuts(ref.argmin_class, ref.lengths)
    return max((abs(x - y) for x, y in zip(a, b)), default=0.0)


def limit_study(
    graph: MetricGraph,
    k: int,
    direction: Direction | str,
    alpha_grid: Sequence[float],
    caps: EnumerationCaps | None = None,
    opts: RobinOptions | None = None,
    exhaustive: bool = False,
    jobs: int = 1,
) -> LimitStudy:
    direction = Direction(direction)
    # rows run in the direction of the limit
    grid = sorted((float(a) for a in alpha_grid), reverse=direction is Direction.TO_ZERO)
    if not grid or min(grid) <= 0:
        raise ValueError("alpha grid must be positive")
    if direction is Direction.TO_ZERO:
        ref = cheeger_constant(graph, k, exhaustive=exhaustive)
        ref_value = ref.value
    else:
        ref = dirichlet_minimal_partition(graph, k, caps, opts, exhaustive, jobs)
        ref_value = ref.value
    rows = []
    for a in grid:
        res = robin_minimal_partition(graph, k, a, caps, opts, exhaustive, jobs=jobs)
        if direction is Direction.TO_ZERO:
            dist = cheeger_distance(res.argmin_class, res.lengths, ref_value)
            ok = class_optimum(res.argmin_class)[0] <= ref_value * (1 + 1e-9)
        else:
            dist = dirichlet_distance(res.argmin_class, res.lengths, ref)
            ok = res.argmin_class.canonical == ref.argmin_class.canonical
        rows.append(
            StudyRow(
                a,
                res.value,
                res.value / a,
                res.class_id,
                dist,
                ok,
                res.diagnostics["realized_class_id"],
                min(p.total_length for p in res.argmin.parts),
            )
        )
    return LimitStudy(direction, k, rows, ref, ref_value)
