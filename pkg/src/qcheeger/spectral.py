"""Ground states of the Laplacian on metric graphs with delta (Robin) or Dirichlet vertices.

Vertex conditions: continuity, and sum of outgoing derivatives = beta * f(v),
with beta = alpha * effective degree at boundary descendants and Kirchhoff
(beta = 0) elsewhere.  Dirichlet vertices pin f(v) = 0.

Two solvers:

* SECULAR works with the per-edge basis c(x) = cos(kx), s(x) = sin(kx)/k,
  k = sqrt(lambda), which is entire in lambda.  Eliminating edge coefficients
  leaves a symmetric vertex matrix Q(lambda) (a Dirichlet-to-Neumann matrix
  plus the potentials).  On [0, (pi/l_max)^2) no edge has a Dirichlet
  eigenvalue, Q is analytic and decreasing, and its eigenvalue count below zero
  equals the number of graph eigenvalues below lambda.  So the ground state is
  the unique zero of the smallest eigenvalue of Q on that interval, and it lies
  there or at the right end (which is an upper bound for every ground state).
* MESH is a P1 finite element discretization with shifted inverse iteration
  and Richardson extrapolation over two mesh levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from .graph import BoundaryMode, GraphError, MetricGraph, Subgraph


class Method(str, Enum):
    SECULAR = "secular"
    MESH = "mesh"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuantumGraph:
    """Solver-level graph: nodes with potentials, edges with lengths."""

    n_nodes: int
    heads: np.ndarray
    tails: np.ndarray
    lengths: np.ndarray
    beta: np.ndarray
    dirichlet: np.ndarray
    # edge labels used for eigenfunction samples: (name, offset of x=0, direction)
    edge_info: tuple = ()

    @staticmethod
    def build(n_nodes, edges, beta=None, dirichlet=None, edge_info=()):
        edges = list(edges)
        heads = np.array([e[0] for e in edges], dtype=int)
        tails = np.array([e[1] for e in edges], dtype=int)
        lengths = np.array([e[2] for e in edges], dtype=float)
        beta = np.zeros(n_nodes) if beta is None else np.asarray(beta, dtype=float)
        dirichlet = np.zeros(n_nodes, dtype=bool) if dirichlet is None else np.asarray(dirichlet, dtype=bool)
        if (lengths <= 0).any():
            raise GraphError("edge lengths must be positive")
        if (beta < 0).any() or not np.isfinite(beta).all():
            raise GraphError("vertex strengths must be finite and nonnegative")
        return QuantumGraph(n_nodes, heads, tails, lengths, beta, dirichlet, tuple(edge_info))

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    @cached_property
    def free(self) -> np.ndarray:
        return np.flatnonzero(~self.dirichlet)

    @cached_property
    def pendants(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Short pendant edges, folded into their attachment node by the secular solver.

        A pendant edge of length at most l_max / 2 keeps k * l < pi / 2 below
        the solver's search cap, so its tip block stays positive there and the
        elimination is exact without changing eigenvalue counts.
        """
        deg = np.bincount(np.concatenate([self.heads, self.tails]), minlength=self.n_nodes)
        half = 0.5 * self.lengths.max()
        edges, tips, attach = [], [], []
        for e, (h, t, ell) in enumerate(zip(self.heads, self.tails, self.lengths)):
            if h == t or ell > half:
                continue
            for tip, other in ((h, t), (t, h)):
                if deg[tip] == 1 and deg[other] >= 2:
                    edges.append(e)
                    tips.append(tip)
                    attach.append(other)
                    break
        return np.array(edges, dtype=int), np.array(tips, dtype=int), np.array(attach, dtype=int)

    @cached_property
    def stencil(self):
        """Flat indices and masks used to assemble the vertex matrix."""
        n = self.n_nodes
        p_edges, p_tips, _ = self.pendants
        kept = np.ones(len(self.lengths), dtype=bool)
        kept[p_edges] = False
        h, t = self.heads[kept], self.tails[kept]
        loop = h == t
        idx = np.concatenate([h * n + h, t * n + t, h * n + t, t * n + h])
        rows = np.ones(n, dtype=bool)
        rows[p_tips] = False
        rows &= ~self.dirichlet
        return kept, idx, loop, (~loop).astype(float), np.arange(n) * (n + 1), np.flatnonzero(rows)


def quantum_graph(
    omega: Subgraph,
    alpha: float | None = None,
    strengths: Mapping[int, float] | None = None,
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE,
    dirichlet: bool = False,
) -> QuantumGraph:
    """Descendants become nodes, segments become edges.

    Boundary descendants get beta = alpha * weight (weight = effective degree)
    unless explicit per-descendant ``strengths`` are given, or are pinned to
    zero with ``dirichlet``.
    """
    n = len(omega.blocks)
    node_of = {}
    for i, blk in enumerate(omega.blocks):
        for end in blk:
            node_of[end] = i
    edges = [(node_of[(j, 0)], node_of[(j, 1)], s.length) for j, s in enumerate(omega.segments)]
    info = tuple((omega.parent.edges[s.edge].id, s.a) for s in omega.segments)
    beta = np.zeros(n)
    pinned = np.zeros(n, dtype=bool)
    if dirichlet:
        for b in omega.boundary:
            pinned[b.descendant] = True
    elif strengths is not None:
        for i, val in strengths.items():
            beta[i] = val
    elif alpha:
        for i, w in omega.boundary_weights(mode).items():
            beta[i] = alpha * w
    return QuantumGraph.build(n, edges, beta, pinned, info)


@dataclass(frozen=True)
class RobinProblem:
    domain: Subgraph
    alpha: float
    strengths: Mapping[int, float] | None = None
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE

    def __post_init__(self):
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be finite and >= 0")

    def graph(self) -> QuantumGraph:
        return quantum_graph(self.domain, self.alpha, self.strengths, self.mode)


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    method: Method
    error_estimate: float
    samples: tuple | None = None
    bracket: tuple[float, float] | None = None


# ----------------------------------------------------------------- secular


def fundamental(lam: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """c(x) and s(x) for -f'' = lam f with c(0)=1, c'(0)=0, s(0)=0, s'(0)=1."""
    x = np.asarray(x, dtype=float)
    if lam > 0:
        k = math.sqrt(lam)
        kx = k * x
        return np.cos(kx), np.sin(kx) / k
    if lam < 0:
        k = math.sqrt(-lam)
        kx = k * x
        return np.cosh(kx), np.sinh(kx) / k
    return np.ones_like(x), x.copy()


def vertex_matrix(qg: QuantumGraph, lam: float) -> np.ndarray:
    """Q(lam) on the free nodes, with short pendant edges folded into their attachment node."""
    kept, idx, loop, plain, diag, rows = qg.stencil
    c_all, s_all = fundamental(lam, qg.lengths)
    c, s = c_all[kept], s_all[kept]
    n = qg.n_nodes
    cs = c / s
    off = -plain / s
    # edges add c/s at both ends and -1/s across; a loop adds 2(c-1)/s at its vertex
    w = np.concatenate([np.where(loop, 2.0 * (c - 1.0) / s, cs), plain * cs, off, off])
    Q = np.bincount(idx, weights=w, minlength=n * n)
    Q[diag] += qg.beta
    p_edges, p_tips, p_attach = qg.pendants
    if p_edges.size:
        pc, ps, b = c_all[p_edges], s_all[p_edges], qg.beta[p_tips]
        pot = np.where(qg.dirichlet[p_tips], pc / ps, (b * pc - lam * ps) / (pc + b * ps))
        np.add.at(Q, diag[p_attach], pot)
    Q = Q.reshape(n, n)
    if rows.size == n:
        return Q
    return Q[np.ix_(rows, rows)]


def _node_values(qg: QuantumGraph, lam: float, vec: np.ndarray) -> np.ndarray:
    """Full vector of vertex values from a null vector of the vertex matrix."""
    a = np.zeros(qg.n_nodes)
    a[qg.stencil[-1]] = vec
    p_edges, p_tips, p_attach = qg.pendants
    if p_edges.size:
        c, s = fundamental(lam, qg.lengths[p_edges])
        b = qg.beta[p_tips]
        a[p_tips] = np.where(qg.dirichlet[p_tips], 0.0, a[p_attach] / (c + b * s))
    return a


def secular_matrix(qg: QuantumGraph, lam: float) -> np.ndarray:
    """Square system in the edge coefficients (A_e, B_e), f_e = A_e c + B_e s.

    Rows: continuity between the ends meeting at a node, one flux row per free
    node, and f = 0 rows at Dirichlet nodes.  Its determinant is entire in lam.
    """
    E = len(qg.lengths)
    c, s = fundamental(lam, qg.lengths)
    ends: list[list[tuple[int, int]]] = [[] for _ in range(qg.n_nodes)]
    for e in range(E):
        ends[qg.heads[e]].append((e, 0))
        ends[qg.tails[e]].append((e, 1))

    def value_row(e, side):
        r = np.zeros(2 * E)
        if side == 0:
            r[2 * e] = 1.0
        else:
            r[2 * e], r[2 * e + 1] = c[e], s[e]
        return r

    def flux_row(e, side):
        r = np.zeros(2 * E)
        if side == 0:
            r[2 * e + 1] = 1.0
        else:
            r[2 * e], r[2 * e + 1] = lam * s[e], -c[e]
        return r

    rows = []
    for node, lst in enumerate(ends):
        if not lst:
            continue
        if qg.dirichlet[node]:
            rows.extend(value_row(e, sd) for e, sd in lst)
            continue
        first = value_row(*lst[0])
        for e, sd in lst[1:]:
            rows.append(first - value_row(e, sd))
        flux = sum(flux_row(e, sd) for e, sd in lst) - qg.beta[node] * first
        rows.append(flux)
    return np.array(rows)


def secular_determinant(qg: QuantumGraph, lam: float) -> float:
    return float(np.linalg.det(secular_matrix(qg, lam)))


def _smallest(Q: np.ndarray) -> float:
    if Q.shape[0] == 0:
        return math.inf
    return float(np.linalg.eigvalsh(Q)[0])


def _secular_lambda1(qg: QuantumGraph, tol: float, n_samples: int) -> SpectralResult:
    if qg.total_length < 1e-12:
        raise GraphError("domain length below 1e-12")
    cap = (math.pi / qg.lengths.max()) ** 2
    if not qg.dirichlet.any() and not (qg.beta > 0).any():
        samples = _samples_from_nodes(qg, 0.0, np.ones(qg.n_nodes), n_samples) if n_samples else None
        return SpectralResult(0.0, Method.SECULAR, 0.0, samples, (0.0, 0.0))

    def g(lam):
        return _smallest(vertex_matrix(qg, lam))

    if qg.stencil[-1].size == 0:
        lam = cap
        return SpectralResult(lam, Method.SECULAR, 0.0, None, (lam, lam))
    hi = cap * (1.0 - 1e-12)
    g_hi = g(hi)
    if g_hi > 0:
        # no crossing below the first edge Dirichlet level: the ground state sits there
        return SpectralResult(cap, Method.SECULAR, cap - hi, None, (hi, cap))
    g_lo = g(0.0)
    if g_lo <= 0:
        return SpectralResult(0.0, Method.SECULAR, 0.0, None, (0.0, 0.0))
    lo = 0.0
    xtol = max(tol * 1e-6, 1e-300)
    rtol = max(min(tol, 1e-12), 4 * np.finfo(float).eps)
    lam, info = brentq(g, lo, hi, xtol=xtol, rtol=rtol, maxiter=500, full_output=True)
    if not info.converged:
        raise SolverError(f"secular root did not converge, bracket [{lo}, {hi}]")
    err = xtol + rtol * abs(lam)
    samples = None
    if n_samples:
        Q = vertex_matrix(qg, lam)
        w, V = np.linalg.eigh(Q)
        a = _node_values(qg, lam, V[:, 0])
        samples = _samples_from_nodes(qg, lam, a, n_samples)
    return SpectralResult(float(lam), Method.SECULAR, float(err), samples, (lam - err, lam + err))


def _samples_from_nodes(qg: QuantumGraph, lam: float, a: np.ndarray, n: int) -> tuple:
    c_l, s_l = fundamental(lam, qg.lengths)
    out = []
    values = []
    for e in range(len(qg.lengths)):
        ell = qg.lengths[e]
        fa, fb = a[qg.heads[e]], a[qg.tails[e]]
        B = (fb - fa * c_l[e]) / s_l[e]
        xs = (np.arange(n) + 0.5) / n * ell
        c, s = fundamental(lam, xs)
        vals = fa * c + B * s
        name, off = qg.edge_info[e] if qg.edge_info else (str(e), 0.0)
        for x, val in zip(xs, vals):
            out.append((name, float(off + x), float(val)))
            values.append(val)
    values = np.array(values)
    sign = 1.0 if values.sum() >= 0 else -1.0
    norm = math.sqrt(sum(v * v for v in values) / len(values)) or 1.0
    return tuple((name, x, sign * v / norm) for name, x, v in out)


# -------------------------------------------------------------------- mesh


def _assemble(qg: QuantumGraph, density: float):
    n_nodes = qg.n_nodes
    rows, cols, kv, mv = [], [], [], []
    pos = []  # (edge, offset) of every dof
    for i in range(n_nodes):
        pos.append(None)
    dof = n_nodes
    for e in range(len(qg.lengths)):
        ell = qg.lengths[e]
        m = max(1, int(math.ceil(density * ell - 1e-9)))
        h = ell / m
        chain = [qg.heads[e]]
        for j in range(1, m):
            chain.append(dof)
            pos.append((e, j * h))
            dof += 1
        chain.append(qg.tails[e])
        for a, b in zip(chain, chain[1:]):
            for (r, cc, kk, mm) in ((a, a, 1 / h, h / 3), (b, b, 1 / h, h / 3), (a, b, -1 / h, h / 6), (b, a, -1 / h, h / 6)):
                rows.append(r)
                cols.append(cc)
                kv.append(kk)
                mv.append(mm)
    for i in range(n_nodes):
        if qg.beta[i]:
            rows.append(i)
            cols.append(i)
            kv.append(qg.beta[i])
            mv.append(0.0)
    K = sp.csc_matrix((kv, (rows, cols)), shape=(dof, dof))
    M = sp.csc_matrix((mv, (rows, cols)), shape=(dof, dof))
    keep = np.ones(dof, dtype=bool)
    keep[:n_nodes] = ~qg.dirichlet
    idx = np.flatnonzero(keep)
    return K[idx][:, idx].tocsc(), M[idx][:, idx].tocsc(), idx, pos


def _inverse_iteration(K, M, max_iter: int = 20000, rtol: float = 1e-12):
    n = K.shape[0]
    x = np.ones(n)
    sigma = -1.0
    lu = splu((K - sigma * M).tocsc())
    lam_old = None
    refined = False
    best, stale = math.inf, 0
    for it in range(max_iter):
        y = lu.solve(M @ x)
        Ky, My = K @ y, M @ y
        lam = float(y @ Ky / (y @ My))
        x = y / math.sqrt(y @ My)
        if lam_old is not None:
            change = abs(lam - lam_old) / max(abs(lam), 1e-300)
            if not refined and change < 1e-4 and lam > 0:
                sigma = lam * (1 - 1e-3) - 1e-12
                lu = splu((K - sigma * M).tocsc())
                refined = True
            elif change < rtol or abs(lam - lam_old) < 1e-15:
                return lam, x
            elif refined:
                # round-off can leave the Rayleigh quotient cycling just above rtol
                if change < best:
                    best, stale = change, 0
                else:
                    stale += 1
                if stale >= 10 and best < 1e-10:
                    return lam, x
        lam_old = lam
    raise SolverError("inverse iteration did not converge")


def _mesh_lambda1(qg: QuantumGraph, density: float, n_samples: int) -> SpectralResult:
    if qg.total_length < 1e-12:
        raise GraphError("domain length below 1e-12")
    if not qg.dirichlet.any() and not (qg.beta > 0).any():
        return SpectralResult(0.0, Method.MESH, 0.0, None)
    lams = []
    for level in (1, 2):
        K, M, idx, pos = _assemble(qg, density * level)
        if K.shape[0] == 0:
            lam, x = math.inf, None
        else:
            lam, x = _inverse_iteration(K, M)
        lams.append(lam)
    coarse, fine = lams
    extrap = (4.0 * fine - coarse) / 3.0
    err = abs(extrap - fine)
    samples = None
    if n_samples and x is not None:
        sign = 1.0 if x.sum() >= 0 else -1.0
        samples = []
        for v, d in zip(x, idx):
            p = pos[d]
            if p is not None:
                name, off = qg.edge_info[p[0]] if qg.edge_info else (str(p[0]), 0.0)
                samples.append((name, float(off + p[1]), float(sign * v)))
        samples = tuple(samples)
    return SpectralResult(float(extrap), Method.MESH, float(err), samples)


def solve(qg: QuantumGraph, method: Method = Method.SECULAR, tol: float = 1e-10, n_samples: int = 0, density: float = 64.0):
    method = Method(method)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method is Method.SECULAR:
        return _secular_lambda1(qg, tol, n_samples)
    return _mesh_lambda1(qg, density, n_samples)


def robin_lambda1(p: RobinProblem, method: Method = Method.SECULAR, tol: float = 1e-10, n_samples: int = 0) -> SpectralResult:
    return solve(p.graph(), method, tol, n_samples)


def dirichlet_lambda1(omega: Subgraph, method: Method = Method.SECULAR, tol: float = 1e-10, n_samples: int = 0) -> SpectralResult:
    return solve(quantum_graph(omega, dirichlet=True), method, tol, n_samples)


# ------------------------------------------------------------ alpha toolkit


def robin_lower_bound(omega: Subgraph, alpha: float) -> float:
    """alpha pi^2 / (|omega| (pi^2 + 4 alpha |omega|)), valid when omega has boundary."""
    L = omega.total_length
    return alpha * math.pi**2 / (L * (math.pi**2 + 4 * alpha * L))


def interval_graph(length: float, beta_left: float = 0.0, beta_right: float = 0.0) -> QuantumGraph:
    return QuantumGraph.build(2, [(0, 1, length)], [beta_left, beta_right])


def nicaise_comparison(omega: Subgraph, alpha: float, tol: float = 1e-10) -> tuple[float, float]:
    """(ground state with every boundary weight set to one, Robin-Neumann interval of length |omega|)."""
    if not omega.boundary:
        raise ValueError("comparison needs a nonempty boundary")
    strengths = {b.descendant: alpha for b in omega.boundary}
    lhs = solve(quantum_graph(omega, strengths=strengths), Method.SECULAR, tol).lambda1
    rhs = solve(interval_graph(omega.total_length, alpha, 0.0), Method.SECULAR, tol).lambda1
    return lhs, rhs


def alpha_profile(
    omega: Subgraph,
    alpha_grid: Sequence[float],
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE,
    method: Method = Method.SECULAR,
    tol: float = 1e-10,
) -> list[tuple[float, float]]:
    grid = list(alpha_grid)
    if any(a < 0 for a in grid) or grid != sorted(grid):
        raise ValueError("alpha grid must be ascending and nonnegative")
    return [(a, robin_lambda1(RobinProblem(omega, a, mode=mode), method, tol).lambda1) for a in grid]


@dataclass(frozen=True)
class GlueFamily:
    """Graphs that differ in the length t of one edge.

    ``edge`` joins v_beta (its u end) and v_gamma (its v end); ``strengths``
    holds fixed deltas at other vertices and ``dirichlet`` pinned vertices.
    """

    graph: MetricGraph
    edge: str
    strengths: Mapping[str, float] = field(default_factory=dict)
    dirichlet: frozenset[str] = frozenset()

    def at(self, t: float, beta: float, gamma: float) -> QuantumGraph:
        g = self.graph
        ei = g.edge_index[self.edge]
        vb, vg = g.edges[ei].u, g.edges[ei].v
        if t > 0:
            index = dict(g.vertex_index)
        else:
            index, n = {}, 0
            for v in g.vertices:
                if v == vg:
                    continue
                index[v] = n
                n += 1
            index[vg] = index[vb]
        n_nodes = max(index.values()) + 1
        pot = np.zeros(n_nodes)
        pinned = np.zeros(n_nodes, dtype=bool)
        for v, val in self.strengths.items():
            pot[index[v]] += val
        pot[index[vb]] += beta
        pot[index[vg]] += gamma
        for v in self.dirichlet:
            pinned[index[v]] = True
        edges, info = [], []
        for i, e in enumerate(g.edges):
            if i == ei:
                if t <= 0:
                    continue
                edges.append((index[e.u], index[e.v], t))
            else:
                edges.append((index[e.u], index[e.v], e.length))
            info.append((e.id, 0.0))
        return QuantumGraph.build(n_nodes, edges, pot, pinned, info)


def glue_limit_check(
    family: GlueFamily, beta: float, gamma: float, t_grid: Sequence[float], tol: float = 1e-10
) -> list[tuple[float, float]]:
    """Ground states along the family; include t = 0 for the glued graph."""
    return [(t, solve(family.at(t, beta, gamma), Method.SECULAR, tol).lambda1) for t in t_grid]
