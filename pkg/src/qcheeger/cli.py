"""Command line front end: ``qcheeger <command> ...``.

Every command prints its main result to stdout and can also write JSON
and CSV artifacts.  Failures exit with status 2 and print a one-line JSON
error record to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cheeger import cheeger_constant, h1
from .classes import EnumerationCaps
from .graph import BoundaryMode, GraphError, MetricGraph
from .io import GraphFileError, bundled_graph, fmt, parse_graph_file, parse_subgraph_file, partition_to_dict, subgraph_to_dict
from .parallel import default_jobs
from .robin import (
    Direction,
    RobinOptions,
    dirichlet_minimal_partition,
    limit_study,
    robin_minimal_partition,
)
from .spectral import Method, RobinProblem, dirichlet_lambda1, robin_lambda1

STUDY_COLUMNS = ("alpha", "Lambda", "Lambda_over_alpha", "class_id", "partition_distance")
CLASS_COLUMNS = ("class_id", "value", "lower_bound", "status")
SPECTRAL_CLASS_COLUMNS = ("class_id", "screen_value", "value", "stage")
EIG_COLUMNS = ("edge", "offset", "value")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    k: int | None = None
    alpha: float | None = None
    grid: list[float] = field(default_factory=list)
    mode: BoundaryMode = BoundaryMode.EFFECTIVE_DEGREE
    exhaustive: bool = False
    p: float | None = None
    caps: EnumerationCaps | None = None
    tol: float = 1e-10
    json_out: str | None = None
    csv_out: str | None = None
    seed: int = 0
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValueError("--k must be >= 1")
        if self.alpha is not None and not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError("--alpha must be finite and >= 0")
        if self.p is not None and self.p < 1:
            raise ValueError("--p must be >= 1")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be >= 1")


def load_graph(spec: str) -> MetricGraph:
    """A path, or the name of a bundled graph (``fig1`` or ``fig1.json``)."""
    path = Path(spec)
    if path.exists():
        return parse_graph_file(path)
    name = path.name[:-5] if path.name.endswith(".json") else path.name
    try:
        return bundled_graph(name)
    except FileNotFoundError:
        raise GraphFileError(f"{spec}: no such file or bundled graph") from None


def parse_grid(text: str) -> list[float]:
    """``a:b:n`` gives n log-spaced points from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:n, got {text!r}") from None
    if a <= 0 or b <= 0 or n < 1:
        raise argparse.ArgumentTypeError("grid end points must be positive and n >= 1")
    if n == 1:
        return [a]
    return [float(x) for x in np.geomspace(a, b, n)]


def _clean(obj):
    """JSON-safe copy: infinities become strings."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else ("inf" if obj > 0 else ("-inf" if obj < 0 else "nan"))
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(doc, path: str | None) -> str:
    text = json.dumps(_clean(doc), indent=2, sort_keys=False)
    if path:
        Path(path).write_text(text + "\n")
    return text


def _csv_text(columns, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else ("" if x is None else x) for x in row])
    return buf.getvalue()


def _write_csv(path: str | None, columns, rows) -> None:
    if path:
        Path(path).write_text(_csv_text(columns, rows))


def _caps(args, gluing: str | None = None) -> EnumerationCaps | None:
    if args.max_cuts is None and gluing is None:
        return None
    base = EnumerationCaps(gluing=gluing or "maximal", symmetry=True)
    if args.max_cuts is not None:
        base = EnumerationCaps(args.max_cuts, base.allow_interior_gaps, base.gluing, base.symmetry)
    return base


def _options(args) -> RobinOptions:
    return RobinOptions(restarts=args.restarts, seed=args.seed, tol=args.tol, p=getattr(args, "p", None))


# ----------------------------------------------------------------- commands


def cmd_eig(args, out) -> int:
    g = load_graph(args.graph)
    omega = g.whole() if args.subgraph in (None, "whole") else parse_subgraph_file(g, args.subgraph)
    method = Method(args.method)
    if args.dirichlet:
        res = dirichlet_lambda1(omega, method, args.tol, args.samples)
    else:
        if args.alpha is None:
            raise ValueError("eig needs --alpha or --dirichlet")
        res = robin_lambda1(RobinProblem(omega, args.alpha, mode=BoundaryMode(args.mode)), method, args.tol, args.samples)
    out.write(f"{fmt(res.lambda1)},{res.method.value},{fmt(res.error_estimate)}\n")
    if args.samples_csv:
        _write_csv(args.samples_csv, EIG_COLUMNS, res.samples or [])
    if args.json:
        _dump_json(
            {
                "lambda1": res.lambda1,
                "method": res.method.value,
                "error_estimate": res.error_estimate,
                "subgraph": subgraph_to_dict(omega),
            },
            args.json,
        )
    return 0


def cmd_cheeger(args, out) -> int:
    g = load_graph(args.graph)
    caps = _caps(args)
    t0 = time.perf_counter()
    res = cheeger_constant(
        g, args.k, BoundaryMode(args.mode), caps, args.exhaustive, args.p, args.jobs, verify_cap=args.verify_cap
    )
    doc = {
        "value": res.value,
        "k": args.k,
        "mode": res.mode.value,
        "p": res.p,
        "exhaustive": args.exhaustive,
        "argmin": partition_to_dict(res.argmin) if res.argmin is not None else None,
        "argmin_boundary_sizes": [p.boundary_size(res.mode) for p in res.argmin.parts] if res.argmin else None,
        "argmin_lengths": [p.total_length for p in res.argmin.parts] if res.argmin else None,
        "n_classes": len(res.per_class),
        "per_class": [[r.class_id, r.value, r.lower_bound, r.status] for r in res.per_class],
        "cap_check": res.cap_check,
        "warnings": res.warnings,
        "seconds": time.perf_counter() - t0,
    }
    if args.json:
        _dump_json(doc, args.json)
    _write_csv(args.csv, CLASS_COLUMNS, [[r.class_id, r.value, r.lower_bound, r.status] for r in res.per_class])
    summary = {k: doc[k] for k in ("value", "k", "mode", "exhaustive", "argmin", "argmin_boundary_sizes", "argmin_lengths", "n_classes", "cap_check", "warnings")}
    out.write(_dump_json(summary, None) + "\n")
    return 0


def cmd_h1(args, out) -> int:
    g = load_graph(args.graph)
    omega = g.whole() if args.subgraph in (None, "whole") else parse_subgraph_file(g, args.subgraph)
    value, E = h1(omega, mode=BoundaryMode(args.mode))
    calibrable = abs(E.total_length - omega.total_length) <= 1e-12 * omega.total_length
    doc = {"value": value, "argmin": subgraph_to_dict(E), "calibrable": calibrable}
    out.write(_dump_json(doc, args.json) + "\n")
    return 0


def _spectral_doc(res) -> dict:
    return {
        "alpha": res.alpha,
        "value": res.value,
        "class_id": res.class_id,
        "argmin": partition_to_dict(res.argmin),
        "diagnostics": res.diagnostics,
        "warnings": res.warnings,
    }


def _spectral_rows(res):
    return [[r.class_id, r.screen_value, r.value, r.stage] for r in res.per_class]


def cmd_robin_partition(args, out) -> int:
    g = load_graph(args.graph)
    if args.alpha is None or args.alpha <= 0:
        raise ValueError("robin-partition needs --alpha > 0")
    res = robin_minimal_partition(
        g, args.k, args.alpha, _caps(args, "robin"), _options(args), args.exhaustive, BoundaryMode(args.mode), args.jobs
    )
    doc = _spectral_doc(res)
    _write_csv(args.csv, SPECTRAL_CLASS_COLUMNS, _spectral_rows(res))
    out.write(_dump_json(doc, args.json) + "\n")
    return 0


def cmd_dirichlet_partition(args, out) -> int:
    g = load_graph(args.graph)
    res = dirichlet_minimal_partition(g, args.k, _caps(args, "robin"), _options(args), args.exhaustive, args.jobs)
    doc = _spectral_doc(res)
    _write_csv(args.csv, SPECTRAL_CLASS_COLUMNS, _spectral_rows(res))
    out.write(_dump_json(doc, args.json) + "\n")
    return 0


def cmd_limit_study(args, out) -> int:
    g = load_graph(args.graph)
    direction = Direction(args.direction)
    grid = args.grid or (parse_grid("1e-1:1e-4:4") if direction is Direction.TO_ZERO else parse_grid("1:1e4:5"))
    study = limit_study(g, args.k, direction, grid, _caps(args, "robin"), _options(args), args.exhaustive, args.jobs)
    rows = [[r.alpha, r.value, r.value_over_alpha, r.class_id, r.partition_distance] for r in study.rows]
    text = _csv_text(STUDY_COLUMNS, rows)
    if args.csv:
        Path(args.csv).write_text(text)
    if args.json:
        _dump_json(
            {
                "direction": direction.value,
                "k": args.k,
                "reference_value": study.reference_value,
                "rows": [r.__dict__ for r in study.rows],
            },
            args.json,
        )
    out.write(text)
    return 0


def cmd_check(args, out) -> int:
    from .properties import run_checks

    t0 = time.perf_counter()
    results = run_checks(seed=args.seed, n_samples=args.samples)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        out.write(f"{status} {r.name} cases={r.cases} seconds={r.seconds:.2f}\n")
        for f in r.failures[:5]:
            out.write(f"    {f}\n")
    total = time.perf_counter() - t0
    out.write(f"total seconds={total:.2f}\n")
    if args.json:
        _dump_json([r.__dict__ for r in results], args.json)
    return 0 if all(r.passed for r in results) else 1


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcheeger", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: QC_JOBS or 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for optimizer restarts and sampling")
    common.add_argument("--json", help="write the JSON result here")
    common.add_argument("--csv", help="write the CSV table here")
    common.add_argument("--tol", type=float, default=1e-10, help="eigenvalue tolerance")

    sub = parser.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("graph", help="graph file, or a bundled name such as fig1.json")
        return p

    p = graph_cmd("eig", "ground state of a subgraph")
    p.add_argument("--subgraph", help="subgraph spec file, or 'whole' (default)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--dirichlet", action="store_true")
    p.add_argument("--method", choices=[m.value for m in Method], default="secular")
    p.add_argument("--mode", choices=[m.value for m in BoundaryMode], default="effdeg")
    p.add_argument("--samples", type=int, default=0, help="eigenfunction samples per edge")
    p.add_argument("--samples-csv", help="write eigenfunction samples (edge,offset,value)")
    p.set_defaults(func=cmd_eig)

    def partition_opts(p, spectral=False):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--exhaustive", action="store_true")
        p.add_argument("--max-cuts", type=int, default=None, help="cap on cuts per edge (default 2)")
        p.add_argument("--mode", choices=[m.value for m in BoundaryMode], default="effdeg")
        if spectral:
            p.add_argument("--restarts", type=int, default=4)

    p = graph_cmd("cheeger", "k-Cheeger constant and cut")
    partition_opts(p)
    p.add_argument("--p", type=float, default=None, help="use the p-norm of the ratios")
    p.add_argument("--verify-cap", action="store_true", help="rerun with one more cut per edge")
    p.set_defaults(func=cmd_cheeger)

    p = graph_cmd("h1", "Cheeger constant of a subgraph's subsets")
    p.add_argument("--subgraph", help="subgraph spec file, or 'whole' (default)")
    p.add_argument("--mode", choices=[m.value for m in BoundaryMode], default="effdeg")
    p.set_defaults(func=cmd_h1)

    p = graph_cmd("robin-partition", "Robin spectral minimal partition")
    partition_opts(p, spectral=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=None, help="minimize the p-norm of the eigenvalues")
    p.set_defaults(func=cmd_robin_partition)

    p = graph_cmd("dirichlet-partition", "Dirichlet spectral minimal partition")
    partition_opts(p, spectral=True)
    p.set_defaults(func=cmd_dirichlet_partition, mode="effdeg")

    p = graph_cmd("limit-study", "minimal Robin energies along an alpha grid")
    partition_opts(p, spectral=True)
    p.add_argument("--direction", choices=[d.value for d in Direction], required=True)
    p.add_argument("--grid", type=parse_grid, default=None, help="a:b:n, log-spaced (default 1e-1:1e-4:4 or 1:1e4:5)")
    p.set_defaults(func=cmd_limit_study)

    p = sub.add_parser("check", parents=[common], help="run the property suites")
    p.add_argument("--samples", type=int, default=20, help="number of sampled subgraphs")
    p.set_defaults(func=cmd_check)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    args.jobs = default_jobs() if args.jobs is None else args.jobs
    try:
        RunConfig(
            args.command,
            getattr(args, "graph", None),
            getattr(args, "k", None),
            getattr(args, "alpha", None),
            mode=BoundaryMode(getattr(args, "mode", "effdeg")),
            p=getattr(args, "p", None),
            tol=args.tol,
            seed=args.seed,
            jobs=args.jobs,
        )
        return args.func(args, out)
    except (GraphFileError, GraphError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
