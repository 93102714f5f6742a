"""Monte Carlo estimators over both chains.

Replica ``r`` of a run with master seed ``s`` draws everything from the
stream ``Stream(s, r)``, so any single replica can be replayed through the
public dynamics API.  Replicas are written into per-index slots and reduced
in index order, which makes results independent of the worker count.

Three simulation paths exist:

* ``config``: full configurations of {-1, 1}^n;
* ``levels``: the level (count of +1 coordinates) only, exact in law for
  level-symmetric functions and cheap at very large n;
* ``circle``: positions on Z_n, selected automatically for circle functions.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._jit import jit
from .circle import _circle_hit, _walk
from .hypercube import DynamicsParams, _check_time, _evolve, _hit, _level_hit, _level_step, _sample_stationary
from .rng import binomial, derive_seed_int, next_below, seed_state
from .zoo import BooleanFunction, CircleFunction
from .zoo._program import evaluate_one, state_size

CHUNK = 2048
PATHS = ("auto", "levels", "config")


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    std_err: float
    replicas: int
    seed: int
    censored_fraction: float | None = None  # hitting-time runs only


def default_workers():
    raw = os.environ.get("BOOLVOL_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# -- batch kernels: fill slots r0..r1-1 ----------------------------------------


@jit
def _config_values(prog_f, prog_g, two, p, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    x = np.empty(prog_f.n, np.int8)
    sf = np.zeros(state_size(prog_f), np.int64)
    sg = np.zeros(state_size(prog_g), np.int64)
    for r in range(r0, r1):
        seed_state(state, seed, r)
        _sample_stationary(x, p, state)
        a[r] = evaluate_one(prog_f, x, sf)
        if two:
            b[r] = evaluate_one(prog_g, x, sg)


@jit
def _config_pairs(prog, p, eps, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    x = np.empty(prog.n, np.int8)
    s = np.zeros(state_size(prog), np.int64)
    for r in range(r0, r1):
        seed_state(state, seed, r)
        _sample_stationary(x, p, state)
        a[r] = evaluate_one(prog, x, s)
        _evolve(x, eps, p, state)
        b[r] = evaluate_one(prog, x, s)


@jit
def _config_hits(prog, p, cutoff, seed, r0, r1, t, c):
    state = np.zeros(1, np.uint64)
    x = np.empty(prog.n, np.int8)
    s = np.zeros(state_size(prog), np.int64)
    for r in range(r0, r1):
        seed_state(state, seed, r)
        _sample_stationary(x, p, state)
        t[r], c[r] = _hit(prog, x, s, p, cutoff, state)


@jit
def _level_values(tf, tg, two, p, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    N = tf.shape[0] - 1
    for r in range(r0, r1):
        seed_state(state, seed, r)
        level = binomial(state, N, p)
        a[r] = tf[level]
        if two:
            b[r] = tg[level]


@jit
def _level_pairs(table, p, eps, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    N = table.shape[0] - 1
    for r in range(r0, r1):
        seed_state(state, seed, r)
        level = binomial(state, N, p)
        a[r] = table[level]
        b[r] = table[_level_step(level, N, eps, p, state)]


@jit
def _level_hits(table, p, cutoff, seed, r0, r1, t, c):
    state = np.zeros(1, np.uint64)
    N = table.shape[0] - 1
    for r in range(r0, r1):
        seed_state(state, seed, r)
        level = binomial(state, N, p)
        t[r], c[r] = _level_hit(table, N, level, p, cutoff, state)


@jit
def _circle_values(tf, tg, two, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    n = tf.shape[0]
    for r in range(r0, r1):
        seed_state(state, seed, r)
        pos = next_below(state, n)
        a[r] = tf[pos]
        if two:
            b[r] = tg[pos]


@jit
def _circle_pairs(table, eps, seed, r0, r1, a, b):
    state = np.zeros(1, np.uint64)
    n = table.shape[0]
    for r in range(r0, r1):
        seed_state(state, seed, r)
        pos = next_below(state, n)
        a[r] = table[pos]
        pos, _ = _walk(pos, n, eps, state)
        b[r] = table[pos]


@jit
def _circle_hits(table, cutoff, seed, r0, r1, t, c):
    state = np.zeros(1, np.uint64)
    n = table.shape[0]
    for r in range(r0, r1):
        seed_state(state, seed, r)
        pos = next_below(state, n)
        t[r], c[r] = _circle_hit(table, pos, cutoff, state)


# -- driver ---------------------------------------------------------------------


def _check_replicas(replicas):
    if int(replicas) != replicas or replicas < 1:
        raise ValueError(f"replicas must be a positive integer, got {replicas}")
    return int(replicas)


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")
    return seed


def _run(kernel, args, replicas, outs, workers):
    """Call ``kernel(*args, r0, r1, *outs)`` over fixed chunks of replicas."""
    spans = [(r0, min(r0 + CHUNK, replicas)) for r0 in range(0, replicas, CHUNK)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(spans) == 1:
        for r0, r1 in spans:
            kernel(*args, r0, r1, *outs)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda sp: kernel(*args, sp[0], sp[1], *outs), spans))


def _is_circle(f):
    return isinstance(f, CircleFunction)


def _resolve_path(f, path):
    if path not in PATHS:
        raise ValueError(f"unknown path {path!r}; choose from {PATHS}")
    table = f.level_table()
    if path == "levels" and table is None:
        raise ValueError(f"{f!r} is not level symmetric; the level path is unavailable")
    if path == "config" or table is None:
        return "config", None
    return "levels", np.ascontiguousarray(table, np.int8)


def _check_params(f, params):
    if _is_circle(f):
        return None
    if params is None:
        params = DynamicsParams(f.n)
    if f.n != params.n:
        raise ValueError(f"function has n={f.n} but params.n={params.n}")
    return params


def _values(f, g, params, replicas, seed, workers, path):
    replicas = _check_replicas(replicas)
    seed = _check_seed(seed)
    a = np.zeros(replicas, np.int8)
    b = np.zeros(replicas, np.int8)
    two = g is not None
    useed = np.uint64(seed)
    if _is_circle(f):
        tg = g.values if two else f.values
        _run(_circle_values, (f.values, tg, two, useed), replicas, (a, b), workers)
        return a, b
    p = float(params.p)
    kind, tf = _resolve_path(f, path)
    tg = tf
    if kind == "levels" and two:
        kind, tg = _resolve_path(g, path)
    if kind == "levels":
        _run(_level_values, (tf, tg, two, p, useed), replicas, (a, b), workers)
    else:
        pg = g.program if two else f.program
        _run(_config_values, (f.program, pg, two, p, useed), replicas, (a, b), workers)
    return a, b


def _pairs(f, params, eps, replicas, seed, workers, path):
    replicas = _check_replicas(replicas)
    seed = _check_seed(seed)
    _check_time("eps", eps)
    a = np.zeros(replicas, np.int8)
    b = np.zeros(replicas, np.int8)
    useed = np.uint64(seed)
    if _is_circle(f):
        _run(_circle_pairs, (f.values, float(eps), useed), replicas, (a, b), workers)
        return a, b
    kind, table = _resolve_path(f, path)
    if kind == "levels":
        _run(_level_pairs, (table, float(params.p), float(eps), useed), replicas, (a, b), workers)
    else:
        _run(_config_pairs, (f.program, float(params.p), float(eps), useed), replicas, (a, b), workers)
    return a, b


def hitting_times(f, params, cutoff, replicas, seed, workers=None, path="auto"):
    """Per-replica (time, censored) arrays for hitting times censored at ``cutoff``."""
    params = _check_params(f, params)
    replicas = _check_replicas(replicas)
    seed = _check_seed(seed)
    _check_time("cutoff", cutoff)
    t = np.zeros(replicas, np.float64)
    c = np.zeros(replicas, np.bool_)
    useed = np.uint64(seed)
    if _is_circle(f):
        _run(_circle_hits, (f.values, float(cutoff), useed), replicas, (t, c), workers)
        return t, c
    kind, table = _resolve_path(f, path)
    if kind == "levels":
        _run(_level_hits, (table, float(params.p), float(cutoff), useed), replicas, (t, c), workers)
    else:
        _run(_config_hits, (f.program, float(params.p), float(cutoff), useed), replicas, (t, c), workers)
    return t, c


def _bernoulli(hits, seed, censored=None):
    R = hits.size
    k = int(np.count_nonzero(hits))
    phat = k / R
    return EstimateResult(phat, math.sqrt(phat * (1.0 - phat) / R), R, seed, censored)


# -- estimators -----------------------------------------------------------------


def estimate_degeneracy(f, params=None, replicas=10_000, seed=0, *, workers=None, path="auto"):
    """Sample mean of f(X_0) under the stationary law."""
    params = _check_params(f, params)
    a, _ = _values(f, None, params, replicas, seed, workers, path)
    R = a.size
    plus = int(np.count_nonzero(a > 0))
    mean = (2 * plus - R) / R
    q = plus / R
    return EstimateResult(mean, 2.0 * math.sqrt(q * (1.0 - q) / R), R, int(seed))


@dataclass(frozen=True)
class PairStatistics:
    """Covariance, instability and variance computed from one replica set.

    With the pooled mean m = (mean(a) + mean(b)) / 2 and Var = 1 - m^2,
    ``covariance.estimate == variance - 2 * instability.estimate`` holds
    identically (up to rounding) because a^2 = b^2 = 1.
    """

    covariance: EstimateResult
    instability: EstimateResult
    variance: float
    samples: tuple = field(repr=False, default=())


def pair_statistics(f, params=None, eps=0.5, replicas=10_000, seed=0, *, workers=None, path="auto", keep=False):
    params = _check_params(f, params)
    a, b = _pairs(f, params, eps, replicas, seed, workers, path)
    R = a.size
    seed = int(seed)
    af = a.astype(np.float64)
    bf = b.astype(np.float64)
    ab = af * bf
    abar = math.fsum(af) / R
    bbar = math.fsum(bf) / R
    mab = math.fsum(ab) / R
    mu = 0.5 * (abar + bbar)
    cov = mab - mu * mu
    variance = 1.0 - mu * mu
    # influence function of mean(ab) - ((mean(a) + mean(b)) / 2)^2
    psi = (ab - mab) - mu * ((af - abar) + (bf - bbar))
    se = math.sqrt(math.fsum(psi * psi) / R / R)
    disagree = (R - int(np.count_nonzero(a == b))) / R
    inst = EstimateResult(disagree, math.sqrt(disagree * (1.0 - disagree) / R), R, seed)
    samples = (a, b) if keep else ()
    return PairStatistics(EstimateResult(cov, se, R, seed), inst, variance, samples)


def estimate_covariance(f, params=None, eps=0.5, replicas=10_000, seed=0, *, workers=None, path="auto"):
    """Cov[f(X_0), f(X_eps)] under the resampling coupling (pooled-mean estimator)."""
    return pair_statistics(f, params, eps, replicas, seed, workers=workers, path=path).covariance


def estimate_instability(f, params=None, eps=0.5, replicas=10_000, seed=0, *, workers=None, path="auto"):
    """P[f(X_eps) != f(X_0)]."""
    params = _check_params(f, params)
    a, b = _pairs(f, params, eps, replicas, seed, workers, path)
    return _bernoulli(a != b, int(seed))


def estimate_volatility_tail(f, params=None, delta=1.0, replicas=10_000, seed=0, *, workers=None, path="auto"):
    """P[tau > delta] where tau is the first time f changes value."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    _, c = hitting_times(f, params, delta, replicas, seed, workers, path)
    res = _bernoulli(c, int(seed))
    return EstimateResult(res.estimate, res.std_err, res.replicas, res.seed, res.estimate)


def estimate_closeness(f, g, params=None, replicas=10_000, seed=0, *, workers=None, path="auto"):
    """P[f(X_0) != g(X_0)] from a shared stationary sample."""
    if _is_circle(f) != _is_circle(g):
        raise ValueError("cannot compare a circle function with a hypercube function")
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} != {g.n}")
    params = _check_params(f, params)
    a, b = _values(f, g, params, replicas, seed, workers, path)
    return _bernoulli(a != b, int(seed))


# circle-chain spellings of the same estimators


def estimate_circle_degeneracy(fc, replicas=10_000, seed=0, *, workers=None):
    return estimate_degeneracy(_need_circle(fc), None, replicas, seed, workers=workers)


def estimate_circle_covariance(fc, eps, replicas=10_000, seed=0, *, workers=None):
    return estimate_covariance(_need_circle(fc), None, eps, replicas, seed, workers=workers)


def estimate_circle_instability(fc, eps, replicas=10_000, seed=0, *, workers=None):
    return estimate_instability(_need_circle(fc), None, eps, replicas, seed, workers=workers)


def estimate_circle_volatility_tail(fc, delta, replicas=10_000, seed=0, *, workers=None):
    return estimate_volatility_tail(_need_circle(fc), None, delta, replicas, seed, workers=workers)


def estimate_circle_closeness(fc, gc, replicas=10_000, seed=0, *, workers=None):
    return estimate_closeness(_need_circle(fc), _need_circle(gc), None, replicas, seed, workers=workers)


def _need_circle(fc):
    if not _is_circle(fc):
        raise TypeError(f"expected a circle function, got {type(fc).__name__}")
    return fc


# -- sweeps ---------------------------------------------------------------------

ESTIMATORS = ("degeneracy", "covariance", "instability", "volatility", "closeness")
GRID_PARAMS = ("n", "eps", "delta")
_NEEDS = {"covariance": "eps", "instability": "eps", "volatility": "delta"}


@dataclass(frozen=True)
class SweepRow:
    index: int
    chain: str
    function: str
    n: int
    p: float | None
    param_name: str
    param_value: float
    result: EstimateResult


class SweepError(RuntimeError):
    """A row failed; ``rows`` holds the rows completed before it."""

    def __init__(self, rows, index, cause):
        super().__init__(f"sweep row {index} failed: {cause}")
        self.rows = rows
        self.index = index
        self.cause = cause
        self.partial = True


def row_seed(seed, index):
    return derive_seed_int(int(seed), int(index))


def _describe(f):
    try:
        return f.descriptor
    except ValueError:
        return repr(f)


def estimate(estimator, f, params=None, *, eps=None, delta=None, g=None, replicas=10_000, seed=0,
             workers=None, path="auto"):
    """Dispatch by estimator name."""
    if estimator == "degeneracy":
        return estimate_degeneracy(f, params, replicas, seed, workers=workers, path=path)
    if estimator == "covariance":
        return estimate_covariance(f, params, eps, replicas, seed, workers=workers, path=path)
    if estimator == "instability":
        return estimate_instability(f, params, eps, replicas, seed, workers=workers, path=path)
    if estimator == "volatility":
        return estimate_volatility_tail(f, params, delta, replicas, seed, workers=workers, path=path)
    if estimator == "closeness":
        if g is None:
            raise ValueError("closeness needs a second function")
        return estimate_closeness(f, g, params, replicas, seed, workers=workers, path=path)
    raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


def sweep(estimator, family, grid, replicas, seed, *, p=0.5, eps=None, delta=None, workers=None,
          path="auto"):
    """Run ``estimator`` once per grid value.

    ``grid`` is ``(name, values)`` with name in {n, eps, delta}.  ``family``
    maps n to a function (or to a pair of functions for closeness); when the
    grid is not over n it may also be a fixed function or pair.  Row i uses
    the seed ``row_seed(seed, i)``.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    name, values = grid
    if name not in GRID_PARAMS:
        raise ValueError(f"cannot sweep over {name!r}; choose from {GRID_PARAMS}")
    values = list(values)
    if not values:
        raise ValueError("empty grid")
    need = _NEEDS.get(estimator)
    if name != "n" and name != need:
        raise ValueError(f"{estimator} does not use {name}")
    if name == "n" and not callable(family):
        raise ValueError("an n grid needs a family callable n -> function")
    rows = []
    for i, v in enumerate(values):
        try:
            if name == "n":
                fam = family(int(v))
            elif isinstance(family, (tuple, BooleanFunction, CircleFunction)):
                fam = family
            else:
                fam = family(None)
            f, g = fam if isinstance(fam, tuple) else (fam, None)
            circle = _is_circle(f)
            params = None if circle else DynamicsParams(f.n, p)
            kw = {"eps": eps, "delta": delta}
            if name != "n":
                kw[name] = float(v)
            if need is not None and kw[need] is None:
                raise ValueError(f"{estimator} needs {need}")
            seed_i = row_seed(seed, i)
            res = estimate(estimator, f, params, g=g, replicas=replicas, seed=seed_i,
                           workers=workers, path=path, **kw)
            rows.append(SweepRow(i, "circle" if circle else "hypercube", _describe(f), f.n,
                                 None if circle else float(p), name, v, res))
        except Exception as exc:
            raise SweepError(rows, i, exc) from exc
    return rows
