"""Command line front end.

Exit codes: 0 success, 1 runtime failure (including a failed check or a run
refused by ``--strict``), 2 parse or validation error.
"""

import argparse
import difflib
import json
import sys

from . import __version__
from .config import ConfigError, experiment_from_mapping, load_config
from .estimators import ESTIMATORS, GRID_PARAMS, PATHS, default_workers
from .runner import COST_LIMIT, execute
from .verify import SUITES, run_suite
from .zoo import catalog_text


class UsageError(Exception):
    pass


def _err(msg):
    print(f"boolvol: {msg}", file=sys.stderr)


def _preflight(experiments, strict):
    """Print projected costs; refuse over-budget runs under --strict."""
    over = False
    for exp in experiments:
        cost = exp.projected_events()
        print(f"[{exp.id}] projected events: {cost:.3g}", file=sys.stderr)
        if cost > COST_LIMIT:
            over = True
            _err(f"warning: experiment {exp.id} projects {cost:.3g} events (> {COST_LIMIT:.0e})")
    if over and strict:
        _err("refusing to run over-budget experiments under --strict")
        return False
    return True


def _execute_all(experiments, workers, strict):
    if not _preflight(experiments, strict):
        return 1
    status = 0
    for exp in experiments:
        try:
            meta, error = execute(exp, workers)
        except (ValueError, OSError) as exc:
            _err(f"experiment {exp.id} failed: {exc}")
            return 1
        if error is not None:
            _err(f"experiment {exp.id} stopped early ({meta['rows']} rows kept): {error}")
            status = 1
        else:
            print(f"{exp.id}: {meta['rows']} rows -> {exp.output} ({meta['wall_time_s']:.2f} s)")
    return status


def cmd_run(args):
    experiments = load_config(args.file)
    return _execute_all(experiments, args.workers, args.strict)


def _parse_grid(text):
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or name not in GRID_PARAMS:
        raise UsageError(f"--grid must look like NAME=v1,v2,... with NAME in {GRID_PARAMS}")
    parsed = []
    for tok in filter(None, (t.strip() for t in values.split(","))):
        try:
            parsed.append(int(tok) if name == "n" else float(tok))
        except ValueError:
            raise UsageError(f"bad grid value {tok!r}") from None
    return {name: parsed}


def cmd_sweep(args):
    entry = {
        "id": args.id, "chain": args.chain, "function": args.fn, "estimator": args.estimator,
        "grid": _parse_grid(args.grid), "replicas": args.replicas, "seed": args.seed,
        "output": args.out, "p": args.p, "path": args.path,
    }
    for key in ("eps", "delta", "n", "compare"):
        if getattr(args, key) is not None:
            entry[key] = getattr(args, key)
    exp = experiment_from_mapping(entry)
    return _execute_all([exp], args.workers, args.strict)


def cmd_verify(args):
    if args.suite != "all" and args.suite not in SUITES:
        hint = difflib.get_close_matches(args.suite, SUITES, n=1)
        extra = f"; did you mean {hint[0]!r}?" if hint else f"; choose from {', '.join(SUITES)} or all"
        raise UsageError(f"unknown suite {args.suite!r}{extra}")
    checks = run_suite(args.suite)
    failed = [c for c in checks if not c.passed]
    report = {
        "suite": args.suite,
        "passed": not failed,
        "total": len(checks),
        "failed": len(failed),
        "checks": [c.as_dict() for c in checks],
    }
    if args.json == "-":
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for c in checks:
            detail = ", ".join(f"{k}={_short(v)}" for k, v in c.details.items())
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.suite:<10} {c.name}  [{detail}]")
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
    return 1 if failed else 0


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def cmd_list(args):
    print(catalog_text())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="boolvol",
        description="Simulate resampling dynamics of Boolean functions and run exact checks.",
    )
    parser.add_argument("--version", action="version", version=f"boolvol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    workers_help = f"worker threads (default: $BOOLVOL_WORKERS or 1; now {default_workers()})"

    p = sub.add_parser("run", help="run every experiment in a YAML file")
    p.add_argument("file")
    p.add_argument("--workers", type=int, default=None, help=workers_help)
    p.add_argument("--strict", action="store_true", help="refuse runs projected above 1e9 events")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run a suite of exact checks")
    p.add_argument("suite", help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--json", metavar="PATH", help="also write a JSON report ('-' prints only JSON)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("list-functions", help="print the function descriptor catalog")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("sweep", help="run a single experiment given by flags")
    p.add_argument("--chain", choices=("hypercube", "circle"), default="hypercube")
    p.add_argument("--fn", required=True, help="function descriptor; $n is replaced on an n grid")
    p.add_argument("--compare", help="second descriptor (closeness only)")
    p.add_argument("--estimator", choices=ESTIMATORS, required=True)
    p.add_argument("--grid", required=True, help="NAME=v1,v2,... with NAME in n, eps, delta")
    p.add_argument("--replicas", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV path; the JSON sidecar goes next to it")
    p.add_argument("--id", default="sweep")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--path", choices=PATHS, default="auto")
    p.add_argument("--workers", type=int, default=None, help=workers_help)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
