import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcheeger.cheeger import cheeger_constant
from qcheeger.io import bundled_graph
from qcheeger.robin import (
    DIRICHLET,
    ClassEnergy,
    Direction,
    RobinOptions,
    _project_simplex,
    alpha_monotonicity_check,
    cheeger_distance,
    dirichlet_energy,
    dirichlet_minimal_partition,
    limit_study,
    lipschitz_constant,
    minimize_class,
    robin_energy,
    robin_energy_p,
    robin_minimal_partition,
)
from qcheeger.spectral import interval_graph, robin_lower_bound, solve

FAST = RobinOptions(restarts=2)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(0.1, 5))
def test_simplex_projection(v, total):
    x = _project_simplex(np.array(v), total)
    assert (x >= 0).all()
    assert x.sum() == pytest.approx(total)
    # projection is idempotent
    assert _project_simplex(x, total) == pytest.approx(x)


def test_options_validated():
    with pytest.raises(ValueError):
        RobinOptions(restarts=0)
    with pytest.raises(ValueError):
        RobinOptions(tol=0.0)


def test_lipschitz_constant_of_interval(interval):
    assert lipschitz_constant(interval, 2) == 8.0


def test_interval_two_parts(interval):
    res = robin_minimal_partition(interval, 2, 1.0, opts=FAST)
    half = solve(interval_graph(0.5, 1.0, 0.0)).lambda1
    assert res.value == pytest.approx(half, rel=1e-9)
    assert sorted(p.total_length for p in res.argmin.parts) == pytest.approx([0.5, 0.5], abs=1e-6)
    assert res.diagnostics["spread"] < 1e-8


def test_interval_three_parts(interval):
    # tips are interior, so the end pieces keep Neumann there and are half as long
    res = robin_minimal_partition(interval, 3, 1.0, opts=FAST)
    assert sorted(p.total_length for p in res.argmin.parts) == pytest.approx([0.25, 0.25, 0.5], abs=1e-6)
    assert res.value == pytest.approx(solve(interval_graph(0.25, 1.0, 0.0)).lambda1, rel=1e-9)


def test_dirichlet_closed_forms(interval):
    assert dirichlet_minimal_partition(interval, 2, opts=FAST).value == pytest.approx(math.pi**2, rel=1e-9)
    path2 = bundled_graph("path2")
    assert dirichlet_minimal_partition(path2, 2, opts=FAST).value == pytest.approx(math.pi**2 / 4, rel=1e-9)


@pytest.mark.parametrize("name", ["interval", "path2", "star3"])
def test_bounded_by_cheeger_partition_and_dirichlet(name):
    g = bundled_graph(name)
    cheeger = cheeger_constant(g, 2)
    dvalue = dirichlet_minimal_partition(g, 2, opts=FAST).value
    for a in (0.05, 1.0, 20.0):
        value = robin_minimal_partition(g, 2, a, opts=FAST).value
        assert value <= robin_energy(cheeger.argmin, a) + 1e-9
        assert value <= dvalue + 1e-9
        assert value <= a * cheeger.value + 1e-9


def test_energy_row_bounds(interval):
    res = robin_minimal_partition(interval, 2, 0.5, opts=FAST)
    P = res.argmin
    assert robin_energy(P, 0.5) == pytest.approx(res.value, rel=1e-12)
    assert robin_energy_p(P, 0.5, 2.0) >= res.value
    assert dirichlet_energy(P) >= res.value
    smallest = min(P.parts, key=lambda p: p.total_length)
    assert res.value >= robin_lower_bound(smallest, 0.5)


def test_seed_determinism(fig1):
    a = robin_minimal_partition(fig1, 2, 0.7, opts=RobinOptions(restarts=2, seed=5))
    b = robin_minimal_partition(fig1, 2, 0.7, opts=RobinOptions(restarts=2, seed=5))
    assert a.value == b.value
    assert a.class_id == b.class_id
    assert a.argmin.lengths == b.argmin.lengths


def test_parallel_matches_serial():
    g = bundled_graph("star3")
    a = robin_minimal_partition(g, 2, 1.0, opts=FAST, jobs=1)
    b = robin_minimal_partition(g, 2, 1.0, opts=FAST, jobs=2)
    assert a.value == b.value
    assert a.class_id == b.class_id


def test_class_energy_matches_realized_partition(fig1):
    res = robin_minimal_partition(fig1, 3, 0.5, opts=FAST)
    E = ClassEnergy(res.argmin_class, 0.5)
    assert E.energy(res.lengths) == pytest.approx(res.value, rel=1e-9)


def test_minimize_class_reports_spread(interval):
    cls = robin_minimal_partition(interval, 2, 2.0, opts=FAST).argmin_class
    run = minimize_class(cls, 2.0, FAST)
    assert run.spread < 1e-8
    assert len(run.part_values) == 2
    dirichlet_run = minimize_class(cls, DIRICHLET, FAST)
    assert dirichlet_run.value == pytest.approx(math.pi**2, rel=1e-9)


def test_monotonicity_rows(interval):
    rows = alpha_monotonicity_check(interval, 2, (0.1, 1.0, 10.0), opts=FAST)
    assert all(r.ok for r in rows)
    assert rows[0].increase is None
    assert all(r.slope <= r.lipschitz for r in rows[1:])
    with pytest.raises(ValueError):
        alpha_monotonicity_check(interval, 2, (1.0, 0.5))


def test_cheeger_distance_is_zero_at_cheeger_cut(interval):
    res = cheeger_constant(interval, 2)
    cls = res.argmin.configuration
    nested = [list(x) for x in res.argmin.lengths]
    assert cheeger_distance(cls, nested, res.value) == pytest.approx(0.0, abs=1e-9)
    assert cheeger_distance(cls, [[0.3, 0.7]], res.value) == pytest.approx(0.2, abs=1e-9)
    assert cheeger_distance(cls, [[0.3, 0.7]], math.inf) == math.inf


def test_limit_to_infinity_on_interval(interval):
    study = limit_study(interval, 2, Direction.TO_INFINITY, (1.0, 100.0, 1e4), opts=FAST)
    assert study.reference_value == pytest.approx(math.pi**2, rel=1e-9)
    values = [r.value for r in study.rows]
    assert [r.alpha for r in study.rows] == [1.0, 100.0, 1e4]
    assert values == sorted(values)
    assert all(r.value <= study.reference_value for r in study.rows)
    assert all(r.partition_distance < 1e-6 for r in study.rows)


def test_limit_to_zero_on_interval(interval):
    study = limit_study(interval, 2, Direction.TO_ZERO, (0.1, 0.01, 0.001), opts=FAST)
    ratios = [r.value_over_alpha for r in study.rows]
    assert all(r.reference_class for r in study.rows)
    assert [r.alpha for r in study.rows] == [0.1, 0.01, 0.001]
    # cheeger constant 2; the ratio climbs towards it from below
    assert ratios == sorted(ratios)
    distances = [r.partition_distance for r in study.rows]
    assert max(distances) < 1e-6
    assert abs(ratios[-1] - 2.0) < 2e-3
    for r in study.rows:
        assert r.min_part_length >= interval.max_edge_length / 4 - 1e-9


@settings(max_examples=5)
@given(st.floats(0.05, 5.0), st.floats(1.1, 3.0))
def test_monotone_in_alpha_property(a, factor):
    g = bundled_graph("path2")
    lo = robin_minimal_partition(g, 2, a, opts=FAST).value
    hi = robin_minimal_partition(g, 2, a * factor, opts=FAST).value
    assert hi > lo + 1e-10
    assert (hi - lo) / (a * factor - a) <= lipschitz_constant(g, 2)
