"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 the point is not a valid state,
3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import oracles
from .config import DEFAULT_TOL, Tolerances
from .separability import (
    PARTITIONS,
    biseparable_margin,
    classify,
    ppt_margin,
    ppt_slacks,
    region_map_figure1,
    region_map_figure2,
    to_first_partition,
    triseparable_margin,
)
from .verification import SUITES, run_suite
from .werner_states import WernerPoint, validity_margin

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3

FIGURE1_COLUMNS = ("r_plus", "r_minus", "trisep", "bisep_wp", "bisep_projection")
FIGURE2_COLUMNS = ("r1", "r2", "r3", "label")
SAMPLE_COLUMNS = ("r_plus", "r_minus", "r1", "r2", "r3")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default, which we reserve
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _parse_point(text: str) -> WernerPoint:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed point {text!r}") from exc
    if len(vals) != 5:
        raise UsageError(f"--point needs 5 comma-separated numbers, got {len(vals)}")
    return WernerPoint(*vals)


def _tolerances(args) -> Tolerances:
    return DEFAULT_TOL.with_overrides(criterion=args.tol_criterion, spectral=args.tol_spectral, hull=args.tol_hull)


def classify_report(p: WernerPoint, d: int, tol: Tolerances) -> dict:
    label = classify(p, d, tol)
    slacks = {}
    for k in PARTITIONS:
        s1, s2 = ppt_slacks(to_first_partition(p.as_array(), k))
        slacks[f"{k}|rest"] = {"s1": float(s1), "s2": float(s2)}
    return {
        "point": p.to_dict(),
        "d": d,
        "category": label.category(1),
        "label": label.to_dict(),
        "ppt_slacks": slacks,
        "margins": {
            "valid": float(validity_margin(p, d)),
            "triseparable": float(triseparable_margin(p)),
            "biseparable": {f"{k}|rest": float(biseparable_margin(p, k)) for k in PARTITIONS},
            "ppt": {f"{k}|rest": float(ppt_margin(p, k)) for k in PARTITIONS},
        },
    }


def _classify_csv(report: dict) -> str:
    row = dict(report["point"])
    row["d"] = report["d"]
    row["category"] = report["category"]
    row["valid"] = report["label"]["valid"]
    row["triseparable"] = report["label"]["triseparable"]
    cols = list(row)
    for k in PARTITIONS:
        key = f"{k}|rest"
        for name, val in (
            (f"bisep{k}", report["label"]["biseparable"][key]),
            (f"ppt{k}", report["label"]["ppt"][key]),
            (f"s1_{k}", report["ppt_slacks"][key]["s1"]),
            (f"s2_{k}", report["ppt_slacks"][key]["s2"]),
        ):
            row[name] = val
            cols.append(name)
    return rows_to_csv([row], cols)


def cmd_classify(args) -> int:
    p = _parse_point(args.point)
    report = classify_report(p, args.d, _tolerances(args))
    if args.format == "csv":
        _emit(_classify_csv(report), args.out)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if report["label"]["valid"] else EXIT_INVALID


def cmd_figure1(args) -> int:
    rows = region_map_figure1(args.resolution, _tolerances(args))
    if args.format == "json":
        doc = {"kind": "figure1", "resolution": args.resolution, "columns": list(FIGURE1_COLUMNS), "rows": rows}
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows, FIGURE1_COLUMNS), args.out)
    return EXIT_OK


def cmd_figure2(args) -> int:
    rp, rm = args.rplus, args.rminus
    if min(rp, rm, 1 - rp - rm) < 0:
        raise UsageError(f"(r+, r-) = ({rp}, {rm}) is outside the triangle r+, r- >= 0, r+ + r- <= 1")
    rows = region_map_figure2(rp, rm, args.resolution, args.d, 1, _tolerances(args))
    if args.format == "json":
        doc = {
            "kind": "figure2",
            "r_plus": rp,
            "r_minus": rm,
            "d": args.d,
            "resolution": args.resolution,
            "columns": list(FIGURE2_COLUMNS),
            "rows": rows,
        }
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows, FIGURE2_COLUMNS), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.kind == "product":
        pts = oracles.sample_trisep_inner(args.n, args.d, args.seed)
    else:
        pts = oracles.sample_bisep_inner(args.n, args.d, args.seed)
    rows = [p.to_dict() for p in pts]
    if args.format == "json":
        doc = {"kind": f"sample-{args.kind}", "d": args.d, "seed": args.seed, "columns": list(SAMPLE_COLUMNS), "rows": rows}
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows, SAMPLE_COLUMNS), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.d, args.seed, args.samples, _tolerances(args))
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    if not report["passed"]:
        for suite, checks in report["suites"].items():
            for c in checks:
                if not c["passed"]:
                    print(f"FAILED [{suite}] {c['name']}: value {c['value']} vs {c['threshold']} {c['detail']}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _dimension(text: str) -> int:
    d = int(text)
    if not 2 <= d <= 6:
        raise argparse.ArgumentTypeError("d must be between 2 and 6")
    return d


def _resolution(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("resolution must be >= 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=_dimension, default=3, help="local dimension (default 3)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--tol-criterion", type=float, default=None)
    common.add_argument("--tol-spectral", type=float, default=None)
    common.add_argument("--tol-hull", type=float, default=None)

    parser = _Parser(prog="triwerner", description="Separability of U⊗U⊗U-invariant three-party states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="classify one point")
    p.add_argument("--point", required=True, help="r+,r-,r1,r2,r3")
    p.set_defaults(func=cmd_classify, default_format="json")

    p = sub.add_parser("figure1", parents=[common], help="region map over the (r+, r-) triangle")
    p.add_argument("--resolution", type=_resolution, default=31)
    p.set_defaults(func=cmd_figure1, default_format="csv")

    p = sub.add_parser("figure2", parents=[common], help="region map over the Bloch ball above (r+, r-)")
    p.add_argument("--rplus", type=float, default=0.27)
    p.add_argument("--rminus", type=float, default=0.1)
    p.add_argument("--resolution", type=_resolution, default=41)
    p.set_defaults(func=cmd_figure2, default_format="csv")

    p = sub.add_parser("sample", parents=[common], help="twirled random product or biproduct states")
    p.add_argument("--kind", choices=("product", "biproduct"), default="product")
    p.add_argument("--n", type=int, default=1000)
    p.set_defaults(func=cmd_sample, default_format="csv")

    p = sub.add_parser("verify", parents=[common], help="run self-check suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_verify, default_format="json")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"triwerner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def load_schema(name: str) -> dict:
    """JSON schema shipped for output ``name`` (classify, figure1, figure2, sample, verify)."""
    from importlib.resources import files

    return json.loads(files("triwerner").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8"))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

