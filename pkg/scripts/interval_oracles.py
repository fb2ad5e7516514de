"""Robin and Dirichlet ground states of intervals against the transcendental-root oracle."""

import csv
import math
from pathlib import Path

from _common import exit_with, finish, parser
from scipy.optimize import brentq

from qcheeger.io import fmt
from qcheeger.spectral import Method, QuantumGraph, interval_graph, solve


def oracle(L, a):
    k = brentq(lambda k: k * math.tan(k * L / 2) - a, 1e-14, math.pi / L - 1e-14, xtol=1e-15, rtol=1e-15)
    return k * k


def main():
    args = parser(__doc__).parse_args()
    rows, values = [], {}
    for L in (0.5, 1.0, 2.0):
        for a in (0.1, 1.0, 10.0):
            exact = oracle(L, a)
            qg = interval_graph(L, a, a)
            sec, mesh = solve(qg, Method.SECULAR).lambda1, solve(qg, Method.MESH).lambda1
            rows.append([L, a, exact, sec, mesh, abs(sec / exact - 1), abs(mesh / exact - 1)])
            values[f"L={L},alpha={a}"] = exact
        d = solve(QuantumGraph.build(2, [(0, 1, L)], dirichlet=[True, True])).lambda1
        values[f"L={L},dirichlet"] = d
    Path(args.out).mkdir(parents=True, exist_ok=True)
    with open(Path(args.out) / "interval_oracles.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["length", "alpha", "oracle", "secular", "mesh", "secular_rel_err", "mesh_rel_err"])
        w.writerows([[fmt(x) for x in r] for r in rows])
    worst_sec = max(r[5] for r in rows)
    worst_mesh = max(r[6] for r in rows)
    print(f"worst relative error: secular {worst_sec:.2e}, mesh {worst_mesh:.2e}")
    code = finish("interval_oracles", values, args.out, args.update, rtol=1e-8)
    exit_with(code or int(worst_sec > 1e-8 or worst_mesh > 1e-4))


if __name__ == "__main__":
    main()
