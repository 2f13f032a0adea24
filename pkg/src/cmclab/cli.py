"""cmclab command line.

    cmclab analyze --metric schwarzschild_m1
    cmclab foliate --metric dip_metric_nonneg --grid 4000 --h 0.1 --h 0.2
    cmclab verify  --metric path/to/config.yaml --format json

Exit codes: 0 pass, 2 config error, 3 metric invalid, 4 argument out of
range, 5 suite failure.  Output files go to ``--out``, else ``$CMCLAB_OUT``,
else ``./cmclab_out``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, suite
from .config import bundled_names, resolve_metric
from .errors import CMCLabError, ConfigError, OutOfRange
from .report import dumps, profile_csv, summary_csv, summary_table

EXIT_PASS = 0
EXIT_CONFIG = 2
EXIT_METRIC = 3
EXIT_RANGE = 4
EXIT_FAIL = 5
OUT_ENV = "CMCLAB_OUT"
DEFAULT_OUT = "cmclab_out"
MIN_GRID = 100


def _levels(values):
    out = []
    for v in values or []:
        for part in str(v).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                out.append(float(part))
            except ValueError:
                raise ConfigError(f"--h expects numbers, got {part!r}") from None
    return out or None


def _grid(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be an integer, got {text!r}")
    if n < MIN_GRID:
        raise argparse.ArgumentTypeError(f"grid must be at least {MIN_GRID}, got {n}")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="cmclab", description="CMC spheres and weak CMC foliations in spherically symmetric metrics.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", required=True, help="config path, bundled name, or inline YAML")
    common.add_argument("--grid", type=_grid, default=suite.DEFAULT_GRID, help="foliation grid size (>= 100)")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table", help="stdout format")
    common.add_argument("--quiet", action="store_true", help="write files only")

    sub.add_parser("analyze", parents=[common], help="horizon, masses, H_max and stability summary")
    f = sub.add_parser("foliate", parents=[common], help="level-set function u and its plateaus")
    f.add_argument("--h", action="append", metavar="H", help="run the J_h oracle and sub-solution checks at these levels")
    v = sub.add_parser("verify", parents=[common], help="run every bound and foliation check")
    v.add_argument("--h", action="append", metavar="H", help="levels for the foliation checks (default: 20 log-spaced)")
    sub.add_parser("list", help="list bundled metric configs")
    return p


def out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {d}: {exc.strerror or exc}") from None
    if not os.access(d, os.W_OK):
        raise ConfigError(f"output directory {d} is not writable")
    return d


def _write(path: Path, text):
    path.write_text(text)
    return path


def _emit(args, text):
    if not args.quiet:
        sys.stdout.write(text)


def cmd_analyze(args, metric):
    res = suite.analyze(metric)
    values = dict(res.summary)
    for r in res.reports:
        values[f"{r.name}_passed"] = r.passed
        values[f"{r.name}_sharp"] = r.sharp
    d = out_dir(args)
    _write(d / f"{metric.name}_analyze.json", res.to_json())
    if args.format == "json":
        _emit(args, res.to_json())
    elif args.format == "csv":
        _emit(args, summary_csv(values))
    else:
        _emit(args, summary_table(f"metric {metric.name}", values))
    return res


def cmd_foliate(args, metric):
    profile, res = suite.foliate(metric, args.grid, _levels(args.h))
    d = out_dir(args)
    csv_text = profile_csv(profile)
    _write(d / f"{metric.name}_foliation.csv", csv_text)
    _write(d / f"{metric.name}_foliation.json", res.to_json())
    _emit(args, {"json": res.to_json, "csv": lambda: csv_text, "table": res.to_table}[args.format]())
    return res


def cmd_verify(args, metric):
    res = suite.verify(metric, args.grid, _levels(args.h))
    d = out_dir(args)
    _write(d / f"{metric.name}_verify.json", res.to_json())
    _emit(args, res.render(args.format))
    return res


COMMANDS = {"analyze": cmd_analyze, "foliate": cmd_foliate, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_names()))
        return EXIT_PASS
    try:
        metric = resolve_metric(args.metric)
        res = COMMANDS[args.command](args, metric)
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except CMCLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if not res.passed:
        for r in res.failures():
            print(f"FAIL {r.name}: lhs={r.lhs!r} rhs={r.rhs!r} {r.reason}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
