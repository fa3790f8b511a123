"""Command-line runner.

Exit codes: 0 all asserted checks pass, 1 some check failed, 2 bad
configuration or arguments, 3 quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, ExperimentConfig, load_config
from .quadrature import QuadratureError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_QUADRATURE = 0, 1, 2, 3


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _records(command, rows):
    return [dict(zip(ex.COLUMNS, [ex.SCHEMA_VERSION, command, r.check, r.param, _fmt(r.value),
                                  _fmt(r.expected), _fmt(r.tolerance),
                                  "info" if r.passed is None else _fmt(r.passed)]))
            for r in rows]


def render(command, rows, fmt):
    records = _records(command, rows)
    if fmt == "json":
        return json.dumps({"schema_version": ex.SCHEMA_VERSION, "command": command,
                           "rows": records}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ex.COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(records)
    return buf.getvalue()


def _write(out_dir, command, rows, fmt):
    text = render(command, rows, fmt)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{command}.{fmt}").write_text(text)
    return text


def _summarize(command, rows, stream):
    for r in rows:
        if r.passed is None:
            continue
        tag = "PASS" if r.passed else "FAIL"
        print(f"{tag} {command} {r.check} [{r.param}] value={_fmt(r.value)} expected={_fmt(r.expected)}",
              file=stream)


def _jobs(args):
    """List of (report name, experiment function, kwargs) for the chosen command."""
    if args.command == "demo":
        name = f"demo-{args.which}"
        return [(name, ex.COMMANDS[name], {})]
    if args.command == "classify":
        return [("classify", ex.run_classify, {"net": args.net, "interval": tuple(args.interval)})]
    if args.command == "valuation":
        return [("valuation", ex.run_valuation, {"net": args.net})]
    if args.command == "scale":
        name = f"scale-{args.which}"
        kw = {}
        if args.level is not None:
            kw["level"] = args.level
        if args.which == "compact-rank" and args.delta is not None:
            kw["delta"] = args.delta
        if args.samples is not None:
            kw["samples"] = args.samples
        return [(name, ex.COMMANDS[name], kw)]
    if args.command == "all":
        jobs = [(n, ex.COMMANDS[n], {}) for n in
                ("demo-schwartz", "demo-association", "demo-weak-product", "demo-hh-prime")]
        jobs += [(f"classify-{n}", ex.run_classify, {"net": n}) for n in ex.NET_NAMES]
        jobs += [(f"valuation-{n}", ex.run_valuation, {"net": n}) for n in ex.NUMBER_NETS]
        jobs += [(n, ex.COMMANDS[n], {}) for n in
                 ("scale-check-nuclear", "scale-check-product", "scale-check-derivative",
                  "scale-weak-strong", "scale-compact-rank")]
        return jobs
    raise AssertionError(args.command)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value config file")
    common.add_argument("--out", type=Path, help="directory for report files")
    common.add_argument("--format", choices=("csv", "json"), help="report format")
    common.add_argument("--seed", type=int, help="seed for randomized suites")
    common.add_argument("--mollifier", choices=("bump", "gaussian", "poly_moment"))
    common.add_argument("--q", type=int, help="moment order of the mollifier")
    common.add_argument("--quiet", action="store_true", help="do not echo the report")

    parser = argparse.ArgumentParser(prog="colombeau", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", parents=[common], help="worked examples")
    demo.add_argument("which", choices=("schwartz", "association", "weak-product", "hh-prime"))

    cls = sub.add_parser("classify", parents=[common], help="moderateness report for a named net")
    cls.add_argument("--net", default="dirac", choices=ex.NET_NAMES)
    cls.add_argument("--interval", nargs=2, type=float, default=(-1.0, 1.0), metavar=("A", "B"))

    val = sub.add_parser("valuation", parents=[common], help="sharp valuation of a named scalar net")
    val.add_argument("--net", default="eps2", choices=tuple(ex.NUMBER_NETS))

    scale = sub.add_parser("scale", parents=[common], help="Hilbert-scale checks")
    scale.add_argument("which", choices=("check-nuclear", "check-product", "check-derivative",
                                         "weak-strong", "compact-rank"))
    scale.add_argument("--level", type=int)
    scale.add_argument("--delta", type=float)
    scale.add_argument("--samples", type=int)

    sub.add_parser("all", parents=[common], help="run every check")
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = cfg.updated(format=args.format, seed=args.seed, mollifier=args.mollifier, q=args.q)
        jobs = _jobs(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    failed = False
    for name, fn, kw in jobs:
        try:
            rows = fn(cfg, **kw)
        except QuadratureError as exc:
            print(f"quadrature failure in {name}: {exc}", file=stderr)
            return EXIT_QUADRATURE
        except (ConfigError, ValueError, IndexError) as exc:
            print(f"config error in {name}: {exc}", file=stderr)
            return EXIT_CONFIG
        text = _write(args.out, name, rows, cfg.format)
        if not args.quiet:
            stdout.write(text)
        _summarize(name, rows, stderr)
        failed |= any(r.passed is False for r in rows)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
