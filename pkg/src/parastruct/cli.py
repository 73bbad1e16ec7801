"""Command-line interface: ``parastruct verify | evaluate | catalog``.

Exit codes: 0 all suites passed (or failed as expected), 1 an identity was
violated, 2 configuration, parse or evaluation error.
"""

from __future__ import annotations

import argparse
import sys

from .config import SUITES, catalog_names, catalog_path, load_config
from .errors import DomainError, FieldEvaluationError
from .expr import ExprError
from .quantities import QUANTITIES, evaluate_quantity, format_value
from .suites import run_suites
from .tomlsubset import TomlError

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _suite_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if names == ["all"]:
        return list(SUITES)
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown suite(s) {', '.join(bad)}; choose from {', '.join(SUITES)} or all")
    return names


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or name not in SUITES:
        raise argparse.ArgumentTypeError(f"expected SUITE=VALUE with SUITE one of {', '.join(SUITES)}")
    try:
        tol = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from None
    if not tol > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return name, tol


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _nonnegative(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parastruct", description="Verify identities of connections on a chart.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites on a configuration")
    v.add_argument("config", help="configuration file or catalog name")
    v.add_argument("--suite", type=_suite_list, default=None, help="comma-separated suites or 'all'")
    v.add_argument("--samples", type=_positive, default=None, help="random samples per suite")
    v.add_argument("--seed", type=_nonnegative, default=None, help="PRNG seed")
    v.add_argument("--format", choices=["json", "text"], default="text")
    v.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="SUITE=VAL")

    e = sub.add_parser("evaluate", help="evaluate one quantity at a point")
    e.add_argument("config", help="configuration file or catalog name")
    e.add_argument("--quantity", required=True, choices=sorted(QUANTITIES))
    e.add_argument("--point", required=True, help='comma-separated coordinates, e.g. "1.0,0.5"')
    e.add_argument("--args", nargs="*", default=[], help="field arguments: e1, e_th, dx1, dth, b1, beta1, vec[..;..], form[..;..]")

    c = sub.add_parser("catalog", help="list or show shipped fixtures")
    csub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    csub.add_parser("list", help="list fixture names")
    show = csub.add_parser("show", help="print a fixture file")
    show.add_argument("name")
    return parser


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise DomainError(f"malformed point {text!r}") from None


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    report = run_suites(cfg, args.suite, args.samples, args.seed, dict(args.tol))
    sys.stdout.write(report.dumps() if args.format == "json" else report.text())
    if report.has_error:
        for s in report.suites:
            if s.status == "error":
                print(f"parastruct: {s.message}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report.verdict == "pass" else EXIT_VIOLATION


def _cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    point = _parse_point(args.point)
    if len(point) != cfg.dim:
        raise DomainError(f"point needs {cfg.dim} coordinates, got {len(point)}")
    value = evaluate_quantity(cfg, args.quantity, point, args.args)
    print(format_value(value, cfg.chart.coords))
    return EXIT_OK


def _cmd_catalog(args) -> int:
    if args.action == "list":
        for name in catalog_names():
            cfg = load_config(name)
            print(f"{name:<22} {cfg.description}")
        return EXIT_OK
    try:
        path = catalog_path(args.name)
    except KeyError:
        print(f"parastruct: no fixture named {args.name!r}; try 'catalog list'", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(path.read_text(encoding="utf-8"))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"verify": _cmd_verify, "evaluate": _cmd_evaluate, "catalog": _cmd_catalog}[args.command]
    try:
        return handler(args)
    except TomlError as exc:
        print(f"parastruct: {exc}", file=sys.stderr)
    except (ExprError, DomainError, FieldEvaluationError) as exc:
        print(f"parastruct: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
