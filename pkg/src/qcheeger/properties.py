"""Property suites run by ``qcheeger check``.

Each suite samples subgraphs or graph families, evaluates an inequality or
identity that must hold, and reports how many cases passed.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .classes import CapWarning, ClassEnumerator, ConfigurationClass, EnumerationCaps
from .graph import MetricGraph, Subgraph, perimeter, perimeter_oracle
from .io import bundled_graph
from .spectral import (
    GlueFamily,
    Method,
    QuantumGraph,
    RobinProblem,
    alpha_profile,
    glue_limit_check,
    nicaise_comparison,
    quantum_graph,
    robin_lambda1,
    robin_lower_bound,
    solve,
)

TOL = 1e-10
SLACK = 10 * TOL
CORPUS = ("fig1", "fig7", "star3", "lasso", "theta")
ALPHA_GRID = (0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
SAMPLE_CAPS = EnumerationCaps(max_cuts_per_edge=1, gluing="all", symmetry=True, max_classes=400)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0


def corpus() -> dict[str, MetricGraph]:
    return {name: bundled_graph(name) for name in CORPUS}


def sample_subgraphs(graph: MetricGraph, n: int, rng: np.random.Generator) -> list[Subgraph]:
    """Parts of random 2-partitions at random cut positions, all with nonempty boundary."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CapWarning)
        classes = list(ClassEnumerator(graph, 2, SAMPLE_CAPS))
    out = []
    tries = 0
    while len(out) < n and tries < 50 * n:
        tries += 1
        cls = classes[rng.integers(len(classes))]
        lengths = []
        for e, seq in zip(graph.edges, cls.labels):
            w = rng.dirichlet(np.ones(len(seq))) * 0.9 + 0.1 / len(seq)
            lengths.append(list(w * e.length))
        P = cls.realize(lengths)
        part = P.parts[rng.integers(P.k)]
        if part.boundary:
            out.append(part)
    return out


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        items = res if isinstance(res, list) else [res]
        for r in items:
            r.seconds = (time.perf_counter() - t0) / len(items)
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_alpha_profile(graphs: dict[str, MetricGraph], rng, grid=ALPHA_GRID) -> list[CheckResult]:
    """Strict increase, concavity and the slope bound |dOmega|/|Omega| along alpha."""
    mono = CheckResult("alpha-monotone", True, 0)
    conc = CheckResult("alpha-concave", True, 0)
    deriv = CheckResult("derivative-bound", True, 0)
    for name, g in graphs.items():
        omega = sample_subgraphs(g, 1, rng)[0]
        prof = alpha_profile(omega, grid, tol=TOL)
        a = np.array([p[0] for p in prof])
        lam = np.array([p[1] for p in prof])
        slopes = np.diff(lam) / np.diff(a)
        ratio = omega.boundary_size() / omega.total_length
        slope_tol = 2 * SLACK / np.diff(a).min()
        mono.cases += 1
        if not (np.diff(lam) > SLACK).all():
            mono.failures.append(f"{name}: increments {np.diff(lam).min()!r}")
        conc.cases += 1
        if not (np.diff(slopes) <= slope_tol).all():
            conc.failures.append(f"{name}: slope increase {np.diff(slopes).max()!r}")
        deriv.cases += 1
        if not (slopes <= ratio + slope_tol).all():
            deriv.failures.append(f"{name}: slope {slopes.max()!r} > {ratio!r}")
    for r in (mono, conc, deriv):
        r.passed = not r.failures
    return [mono, conc, deriv]


@_timed
def check_lower_bounds(samples: list[Subgraph], alphas=(0.5, 2.0)) -> list[CheckResult]:
    low = CheckResult("robin-lower-bound", True, 0)
    nic = CheckResult("nicaise-comparison", True, 0)
    for i, omega in enumerate(samples):
        for a in alphas:
            lam = robin_lambda1(RobinProblem(omega, a), tol=TOL).lambda1
            bound = robin_lower_bound(omega, a)
            low.cases += 1
            if lam < bound - SLACK:
                low.failures.append(f"sample {i}, alpha {a}: {lam!r} < {bound!r}")
            lhs, rhs = nicaise_comparison(omega, a, TOL)
            nic.cases += 1
            if lhs < rhs - SLACK:
                nic.failures.append(f"sample {i}, alpha {a}: {lhs!r} < {rhs!r}")
    low.passed, nic.passed = not low.failures, not nic.failures
    return [low, nic]


@_timed
def check_edge_shortening(samples: list[Subgraph], rng, alpha: float = 1.0) -> CheckResult:
    """Shrinking one edge of a part never lowers its ground state."""
    res = CheckResult("edge-shortening", True, 0)
    for i, omega in enumerate(samples):
        qg = quantum_graph(omega, alpha)
        e = int(rng.integers(len(qg.lengths)))
        base = solve(qg, tol=TOL).lambda1
        prev = base
        for factor in (0.8, 0.5, 0.2):
            lengths = qg.lengths.copy()
            lengths[e] *= factor
            short = replace(qg, lengths=lengths)
            lam = solve(short, tol=TOL).lambda1
            res.cases += 1
            if lam < prev - SLACK:
                res.failures.append(f"sample {i}, edge {e}, factor {factor}: {lam!r} < {prev!r}")
            prev = lam
    res.passed = not res.failures
    return res


def glue_families() -> list[tuple[str, GlueFamily, float, float]]:
    path = MetricGraph.from_edges([("main", "a", "b", 1.0), ("t", "b", "c", 1.0)])
    star = MetricGraph.from_edges([("l1", "c", "x", 1.0), ("l2", "c", "y", 0.6), ("t", "c", "d", 1.0)])
    theta = MetricGraph.from_edges([("m1", "u", "v", 1.0), ("m2", "u", "v", 0.7), ("t", "u", "v", 1.0)])
    return [
        ("path", GlueFamily(path, "t", {"a": 1.0}), 0.5, 1.0),
        # gamma = 0 at a dummy tip: the standard domain-monotonicity case
        ("star-dummy-tip", GlueFamily(star, "t", {"x": 1.0, "y": 2.0}), 0.0, 0.0),
        ("theta", GlueFamily(theta, "t"), 1.0, 2.0),
    ]


T_GRID = (1.0, 0.5, 0.25, 0.1, 1e-2, 1e-3, 1e-4, 1e-6, 0.0)


@_timed
def check_glue_limit() -> CheckResult:
    res = CheckResult("glue-limit", True, 0)
    for name, fam, beta, gamma in glue_families():
        rows = glue_limit_check(fam, beta, gamma, T_GRID, TOL)
        lam = [r[1] for r in rows]
        res.cases += 1
        if any(b < a - SLACK for a, b in zip(lam, lam[1:-1])):
            res.failures.append(f"{name}: not nondecreasing as t shrinks: {lam}")
        limit = lam[-1]
        if abs(lam[-2] - limit) > 1e-5 * max(1.0, limit):
            res.failures.append(f"{name}: t={T_GRID[-2]} gives {lam[-2]!r}, glued graph {limit!r}")
        if lam[-2] > limit + SLACK:
            res.failures.append(f"{name}: overshoots the glued value")
    res.passed = not res.failures
    return res


@_timed
def check_perimeter(samples: list[Subgraph]) -> CheckResult:
    res = CheckResult("perimeter-oracle", True, 0)
    for i, omega in enumerate(samples):
        if not omega.has_maximal_connectivity():
            continue
        res.cases += 1
        a, b = perimeter(omega), perimeter_oracle(omega)
        if abs(a - b) > 1e-9 or a != omega.boundary_size():
            res.failures.append(f"sample {i}: closed form {a}, oracle {b!r}, boundary {omega.boundary_size()}")
    res.passed = not res.failures and res.cases > 0
    return res


def lsc_instance(n: int = 50) -> tuple[int, int]:
    """Boundary size of the part holding pendant e2, along a cut sequence of the fig1 graph and in its limit.

    Along the sequence the part carries stubs of length 1/n of e1 and of the
    four parallel edges, glued at v; in the limit the stubs vanish.
    """
    g = bundled_graph("fig1")
    a, b, v, w = (g.vertex_index[x] for x in "abvw")
    labels = [(2, 1), (2,), (2, 3), (2, 3), (2, 3), (2, 3)]
    gluing = [
        (v, 2, [((0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (5, 0))]),
        (w, 3, [((2, 1), (3, 1), (4, 1), (5, 1))]),
        (a, 1, [((0, 1),)]),
        (b, 2, [((1, 1),)]),
    ]
    cls = ConfigurationClass(g, labels, gluing)

    def part_with_e2(P):
        return next(p for p in P.parts if any(s.edge == 1 for s in p.segments))

    h = 1.0 / n
    seq = cls.realize([[h, 1 - h], [1.0]] + [[h, 0.5 - h]] * 4)
    lim = cls.realize([[0.0, 1.0], [1.0]] + [[0.0, 0.5]] * 4)
    return part_with_e2(seq).boundary_size(), part_with_e2(lim).boundary_size()


@_timed
def check_lsc() -> CheckResult:
    res = CheckResult("boundary-lsc", True, 1)
    seq, lim = lsc_instance()
    if (seq, lim) != (5, 1):
        res.failures.append(f"expected 5 -> 1, got {seq} -> {lim}")
    res.passed = not res.failures
    return res


@_timed
def check_solver_agreement(samples: list[Subgraph], alpha: float = 1.0) -> CheckResult:
    res = CheckResult("secular-vs-mesh", True, 0)
    for i, omega in enumerate(samples):
        p = RobinProblem(omega, alpha)
        s = robin_lambda1(p, Method.SECULAR, TOL)
        m = robin_lambda1(p, Method.MESH)
        res.cases += 1
        if abs(s.lambda1 - m.lambda1) > s.error_estimate + m.error_estimate + 1e-9:
            res.failures.append(f"sample {i}: secular {s.lambda1!r}, mesh {m.lambda1!r} +- {m.error_estimate!r}")
    res.passed = not res.failures
    return res


def run_checks(seed: int = 0, n_samples: int = 20) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    graphs = corpus()
    names = list(graphs)
    samples = []
    for i in range(n_samples):
        g = graphs[names[i % len(names)]]
        samples.extend(sample_subgraphs(g, 1, rng))
    results: list[CheckResult] = []
    results.extend(check_alpha_profile(graphs, rng))
    results.extend(check_lower_bounds(samples))
    results.append(check_edge_shortening(samples, rng))
    results.append(check_glue_limit())
    results.append(check_perimeter(samples))
    results.append(check_lsc())
    results.append(check_solver_agreement(samples[:10]))
    return results

