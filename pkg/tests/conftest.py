import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qcheeger.graph import MetricGraph
from qcheeger.io import bundled_graph

settings.register_profile("default", deadline=None, max_examples=30, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_graph(seed: int, n_min: int = 3, n_max: int = 4) -> MetricGraph:
    """Random spanning tree plus one or two extra edges, lengths in [0.3, 1.5]."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    verts = [f"v{i}" for i in range(n)]
    edges = [(f"t{i}", verts[i], verts[int(rng.integers(0, i))], float(rng.uniform(0.3, 1.5))) for i in range(1, n)]
    for j in range(int(rng.integers(1, 3))):
        a, b = rng.choice(n, 2, replace=False)
        edges.append((f"x{j}", verts[a], verts[b], float(rng.uniform(0.3, 1.5))))
    return MetricGraph.from_edges(edges)


@pytest.fixture(scope="session")
def fig1():
    return bundled_graph("fig1")


@pytest.fixture(scope="session")
def fig7():
    return bundled_graph("fig7")


@pytest.fixture(scope="session")
def interval():
    return bundled_graph("interval")
