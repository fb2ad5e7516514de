"""Exact Cheeger constants of the bundled graphs, in both boundary modes."""

from _common import exit_with, finish, parser

from qcheeger import BoundaryMode, bundled_graph, cheeger_constant, cheeger_variant
from qcheeger.classes import EnumerationCaps


def main():
    args = parser(__doc__).parse_args()
    values = {}
    fig1 = bundled_graph("fig1")
    res = cheeger_constant(fig1, 3)
    values["fig1_k3"] = float(res.value)
    values["fig1_k3_class"] = res.argmin_class.id
    values["fig1_k3_boundary_sizes"] = ",".join(str(p.boundary_size()) for p in res.argmin.parts)
    fig7 = bundled_graph("fig7")
    values["fig7_k2_effdeg"] = float(cheeger_constant(fig7, 2, BoundaryMode.EFFECTIVE_DEGREE).value)
    values["fig7_k2_count"] = float(cheeger_constant(fig7, 2, BoundaryMode.COUNT).value)
    interval = bundled_graph("interval")
    for k in (2, 3, 4):
        caps = EnumerationCaps(max_cuts_per_edge=k - 1, gluing="maximal")
        values[f"interval_k{k}"] = float(cheeger_constant(interval, k, caps=caps).value)
    for name in ("star3", "lasso", "theta", "path2"):
        g = bundled_graph(name)
        values[f"{name}_k2"] = float(cheeger_constant(g, 2).value)
        values[f"{name}_k2_variant"] = float(cheeger_variant(g, 2))
    exit_with(finish("cheeger_examples", values, args.out, args.update, rtol=0.0, atol=1e-9))


if __name__ == "__main__":
    main()
