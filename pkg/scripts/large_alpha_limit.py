"""Robin 2-partitions of the unit interval and the two-edge path as alpha grows."""

from _common import exit_with, finish, parser

from qcheeger import Direction, bundled_graph, limit_study


def main():
    args = parser(__doc__).parse_args()
    values = {}
    for name in ("interval", "path2"):
        study = limit_study(bundled_graph(name), 2, Direction.TO_INFINITY, (1.0, 10.0, 100.0, 1e4))
        values[f"{name}:dirichlet"] = study.reference_value
        for r in study.rows:
            values[f"{name}:Lambda@{r.alpha:g}"] = r.value
        gap = (study.reference_value - study.rows[-1].value) / study.reference_value
        print(f"{name}: Dirichlet minimum {study.reference_value:.12g}, relative gap at alpha=1e4 {gap:.2e}")
    exit_with(finish("large_alpha_limit", values, args.out, args.update, rtol=1e-8))


if __name__ == "__main__":
    main()
