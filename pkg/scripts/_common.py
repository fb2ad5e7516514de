"""Shared helpers: write results and compare them with scripts/expected/<name>.json."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
EXPECTED = HERE / "expected"


def parser(doc: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--out", default="results", help="directory for CSV/JSON output")
    p.add_argument("--update", action="store_true", help="overwrite the expected-value file")
    return p


def _close(got, want, rtol, atol) -> bool:
    if isinstance(want, str):
        return got == want
    if want is None or got is None:
        return got == want
    if isinstance(want, float) and math.isinf(want):
        return got == want
    return abs(got - want) <= atol + rtol * abs(want)


def finish(name: str, values: dict, out: str, update: bool, rtol: float, atol: float = 0.0) -> int:
    """Save values, then compare against the expected file; returns an exit status."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name}.json").write_text(json.dumps(values, indent=2) + "\n")
    path = EXPECTED / f"{name}.json"
    if update or not path.exists():
        path.write_text(json.dumps({"rtol": rtol, "atol": atol, "values": values}, indent=2) + "\n")
        print(f"{name}: wrote {path}")
        return 0
    ref = json.loads(path.read_text())
    bad = []
    for key, want in ref["values"].items():
        got = values.get(key)
        if not _close(got, want, ref["rtol"], ref["atol"]):
            bad.append(f"  {key}: got {got!r}, expected {want!r}")
    status = "OK" if not bad else "MISMATCH"
    print(f"{name}: {status} ({len(ref['values'])} values, rtol={ref['rtol']}, atol={ref['atol']})")
    for line in bad:
        print(line)
    return 0 if not bad else 1


def exit_with(code: int) -> None:
    sys.exit(code)
