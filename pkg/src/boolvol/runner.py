"""Execute experiments and write their CSV tables and JSON sidecars."""

import csv
import datetime as _dt
import hashlib
import io
import json
import time
from importlib import resources

from . import __version__
from ._jit import backend_name
from .estimators import SweepError, sweep

CSV_HEADER = (
    "experiment_id", "chain", "function", "n", "p", "param_name", "param_value",
    "estimate", "std_err", "replicas", "seed", "censored_fraction",
)
SCHEMA_NAME = "run_metadata.schema.json"
SCHEMA_VERSION = 1
COST_LIMIT = 1e9


def fmt_real(x):
    if x is None:
        return ""
    return format(float(x), ".17g")


def _fmt_value(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return fmt_real(v)


def csv_text(experiment_id, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        res = r.result
        w.writerow((
            experiment_id, r.chain, r.function, r.n, fmt_real(r.p), r.param_name,
            _fmt_value(r.param_value), fmt_real(res.estimate), fmt_real(res.std_err),
            res.replicas, res.seed, fmt_real(res.censored_fraction),
        ))
    return buf.getvalue()


def run_experiment(exp, workers=None):
    """Rows of one experiment; raises ``SweepError`` carrying partial rows."""
    if exp.grid_name == "n":
        family = exp.build
        grid = ("n", [int(v) for v in exp.grid])
    else:
        family = exp.build(None)
        grid = (exp.grid_name, [float(v) for v in exp.grid])
    return sweep(exp.estimator, family, grid, exp.replicas, exp.seed, p=exp.p,
                 eps=exp.eps, delta=exp.delta, workers=workers, path=exp.path)


def resolved_config(exp):
    """JSON-safe echo of the experiment after defaults were applied."""
    return {
        "id": exp.id, "chain": exp.chain, "function": exp.function, "compare": exp.compare,
        "estimator": exp.estimator, "grid": {exp.grid_name: list(exp.grid)}, "p": exp.p,
        "n": exp.n, "eps": exp.eps, "delta": exp.delta, "replicas": exp.replicas,
        "seed": exp.seed, "output": str(exp.output), "path": exp.path,
    }


def sidecar_path(csv_path):
    return csv_path.with_suffix(".json")


def write_outputs(exp, rows, started, wall, error=None):
    text = csv_text(exp.id, rows)
    exp.output.parent.mkdir(parents=True, exist_ok=True)
    with open(exp.output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "tool": "boolvol",
        "version": __version__,
        "backend": backend_name(),
        "experiment": resolved_config(exp),
        "seed": exp.seed,
        "csv": exp.output.name,
        "csv_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "rows": len(rows),
        "status": "ok" if error is None else "partial",
        "error": None if error is None else str(error),
        "started_at": started,
        "wall_time_s": wall,
    }
    with open(sidecar_path(exp.output), "w", encoding="utf-8", newline="") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def execute(exp, workers=None):
    """Run and persist one experiment; returns (metadata, error or None)."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    error = None
    try:
        rows = run_experiment(exp, workers)
    except SweepError as exc:
        rows, error = exc.rows, exc
    meta = write_outputs(exp, rows, started, time.perf_counter() - t0, error)
    return meta, error


def load_schema():
    text = resources.files("boolvol").joinpath("schemas", SCHEMA_NAME).read_text(encoding="utf-8")
    return json.loads(text)
