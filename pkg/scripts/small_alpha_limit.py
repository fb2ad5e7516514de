"""Robin 3-partitions of the fig1 graph as alpha shrinks (about a minute)."""

import io
from pathlib import Path

from _common import exit_with, finish, parser

from qcheeger.cli import run


def main():
    args = parser(__doc__).parse_args()
    Path(args.out).mkdir(parents=True, exist_ok=True)
    csv_path = Path(args.out) / "small_alpha_limit.csv"
    code = run(["limit-study", "fig1", "--k", "3", "--direction", "zero", "--grid", "1e-1:1e-4:4", "--csv", str(csv_path)], io.StringIO())
    if code:
        exit_with(code)
    values = {}
    for line in csv_path.read_text().splitlines()[1:]:
        alpha, lam, ratio, cls, dist = line.split(",")
        values[f"ratio@{float(alpha):g}"] = float(ratio)
        values[f"distance@{float(alpha):g}"] = float(dist)
        values[f"class@{float(alpha):g}"] = cls
    exit_with(finish("small_alpha_limit", values, args.out, args.update, rtol=1e-6, atol=1e-9))


if __name__ == "__main__":
    main()
