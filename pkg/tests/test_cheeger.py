import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from conftest import random_graph
from qcheeger.cheeger import cheeger_constant, cheeger_energy, cheeger_energy_p, cheeger_variant, class_optimum, h1
from qcheeger.classes import CapWarning, ClassEnumerator, EnumerationCaps
from qcheeger.graph import BoundaryMode, Segment, Subgraph
from qcheeger.io import bundled_graph
from qcheeger.simplex import linprog_simplex

EFF, COUNT = BoundaryMode.EFFECTIVE_DEGREE, BoundaryMode.COUNT


@st.composite
def lp_problems(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(0, 4))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    c = rng.integers(-5, 6, n).astype(float)
    A_ub = rng.integers(-3, 4, (m, n)).astype(float)
    b_ub = rng.integers(-2, 8, m).astype(float)
    # a box keeps most instances bounded; some stay infeasible
    A_ub = np.vstack([A_ub, np.eye(n)])
    b_ub = np.concatenate([b_ub, np.full(n, 10.0)])
    eq = draw(st.booleans())
    A_eq = rng.integers(-2, 3, (1, n)).astype(float) if eq else None
    b_eq = rng.integers(0, 5, 1).astype(float) if eq else None
    return c, A_ub, b_ub, A_eq, b_eq


@given(lp_problems())
def test_simplex_matches_scipy(prob):
    c, A_ub, b_ub, A_eq, b_eq = prob
    ours = linprog_simplex(c, A_ub, b_ub, A_eq, b_eq)
    ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * len(c), method="highs")
    if ref.status == 2:
        assert ours.status == "infeasible"
        return
    assert ref.status == 0
    assert ours.status == "optimal"
    assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
    assert (A_ub @ ours.x <= b_ub + 1e-8).all()
    if A_eq is not None:
        assert A_eq @ ours.x == pytest.approx(b_eq, abs=1e-8)


def test_simplex_unbounded():
    assert linprog_simplex([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0]).status == "unbounded"


def test_simplex_degenerate_cycle_free():
    # Beale's cycling example; Bland's rule must terminate
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = linprog_simplex(c, A, [0, 0, 1])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-0.05)


def test_fig1_three_cut(fig1):
    res = cheeger_constant(fig1, 3)
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert cheeger_energy(res.argmin) == pytest.approx(res.value, abs=1e-12)
    assert sorted(p.boundary_size() for p in res.argmin.parts) == [1, 1, 2]


def test_fig7_modes(fig7):
    assert cheeger_constant(fig7, 2, EFF).value == pytest.approx(1.0, abs=1e-9)
    assert cheeger_constant(fig7, 2, COUNT).value == pytest.approx(0.25, abs=1e-9)


def test_interval_closed_form(interval):
    # k parts of a unit interval: two end pieces with one boundary point each,
    # inner pieces with two; the optimum equalizes the ratios
    for k in (2, 3, 4):
        caps = EnumerationCaps(max_cuts_per_edge=k - 1, gluing="maximal")
        assert cheeger_constant(interval, k, caps=caps).value == pytest.approx(2 * (k - 1), abs=1e-9)


def test_cut_cap_too_small_gives_infinity(interval):
    assert cheeger_constant(interval, 4).value == math.inf


@pytest.mark.parametrize("name", ["star3", "lasso", "theta", "path2"])
def test_count_never_exceeds_effdeg(name):
    g = bundled_graph(name)
    for k in (2, 3):
        assert cheeger_constant(g, k, COUNT).value <= cheeger_constant(g, k, EFF).value + 1e-12


@given(st.integers(0, 50), st.floats(0.2, 5.0))
def test_scaling_covariance(seed, c):
    g = random_graph(seed)
    base = cheeger_constant(g, 2).value
    assert cheeger_constant(g.scaled(c), 2).value == pytest.approx(base / c, rel=1e-9)


@given(st.integers(0, 50))
def test_value_monotone_in_k(seed):
    g = random_graph(seed)
    v2, v3 = cheeger_constant(g, 2).value, cheeger_constant(g, 3).value
    assert v2 <= v3 + 1e-12


def test_pruning_does_not_change_value(fig1):
    a = cheeger_constant(fig1, 3, prune=True)
    b = cheeger_constant(fig1, 3, prune=False)
    assert a.value == b.value
    assert a.argmin_class.canonical == b.argmin_class.canonical
    assert any(r.status == "pruned" for r in a.per_class)


def test_parallel_matches_serial(fig1):
    a = cheeger_constant(fig1, 2, jobs=1, prune=False)
    b = cheeger_constant(fig1, 2, jobs=2)
    assert a.value == b.value
    assert a.argmin_class.canonical == b.argmin_class.canonical


def test_realized_class_optimum_never_worse(fig1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CapWarning)
        classes = list(ClassEnumerator(fig1, 2, EnumerationCaps(max_cuts_per_edge=1, gluing="maximal", max_classes=60)))
    for cls in classes:
        value, lengths = class_optimum(cls)
        if math.isfinite(value):
            # zero-length segments merge away on realization, which can only drop boundary
            assert cheeger_energy(cls.realize(lengths)) <= value * (1 + 1e-9)


@pytest.mark.parametrize("p", [1.0, 2.0, 7.5, 64.0])
def test_p_norm_energy_brackets_max(fig1, p):
    P = cheeger_constant(fig1, 3).argmin
    top = cheeger_energy(P)
    assert top - 1e-12 <= cheeger_energy_p(P, p) <= 3 ** (1 / p) * top + 1e-12


def test_h1_of_pumpkin(fig1):
    om = Subgraph(
        fig1,
        tuple(Segment(i, 0.0, 0.5) for i in range(2, 6)),
        (tuple((j, 0) for j in range(4)), tuple((j, 1) for j in range(4))),
    )
    value, E = h1(om)
    assert value <= om.boundary_size() / om.total_length + 1e-12
    assert value == pytest.approx(E.boundary_size() / E.total_length, rel=1e-9)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_variant_equals_constant_on_random_graphs(seed):
    g = random_graph(seed)
    assert cheeger_variant(g, 2) == pytest.approx(cheeger_constant(g, 2).value, abs=1e-9)
