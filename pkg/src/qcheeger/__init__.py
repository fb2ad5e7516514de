"""Cheeger constants, Robin ground states and spectral minimal partitions on metric graphs."""

from .graph import BoundaryMode, Edge, MetricGraph, Partition, Segment, Subgraph, perimeter, perimeter_oracle
from .classes import ConfigurationClass, EnumerationCaps, enumerate_configuration_classes, realize
from .io import bundled_graph, parse_graph_file
from .cheeger import cheeger_constant, cheeger_variant, h1
from .spectral import Method, QuantumGraph, RobinProblem, dirichlet_lambda1, quantum_graph, robin_lambda1
from .robin import (
    Direction,
    RobinOptions,
    alpha_monotonicity_check,
    dirichlet_minimal_partition,
    limit_study,
    robin_minimal_partition,
)

__all__ = [
    "BoundaryMode",
    "ConfigurationClass",
    "Direction",
    "Edge",
    "EnumerationCaps",
    "Method",
    "MetricGraph",
    "Partition",
    "QuantumGraph",
    "RobinOptions",
    "RobinProblem",
    "Segment",
    "Subgraph",
    "alpha_monotonicity_check",
    "bundled_graph",
    "cheeger_constant",
    "cheeger_variant",
    "dirichlet_lambda1",
    "dirichlet_minimal_partition",
    "enumerate_configuration_classes",
    "h1",
    "limit_study",
    "parse_graph_file",
    "perimeter",
    "perimeter_oracle",
    "quantum_graph",
    "realize",
    "robin_lambda1",
    "robin_minimal_partition",
]
