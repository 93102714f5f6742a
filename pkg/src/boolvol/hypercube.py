"""Continuous-time resampling dynamics on {-1, 1}^n.

Each coordinate carries a rate-1 exponential clock; when it rings the
coordinate is redrawn, +1 with probability p.  Events are generated as a
single rate-n Poisson stream with a uniformly chosen coordinate, and
resamples that leave the value unchanged are dropped from outputs.

The number of +1 coordinates is itself a birth-death chain (up-rate
(N - level) p, down-rate level (1 - p)); the ``level_*`` routines use it to
simulate level-symmetric functions without storing configurations.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import jit
from .rng import as_stream, binomial, exponential, next_below, next_double
from .zoo._program import apply_flip, init_state, state_size, value


@dataclass(frozen=True)
class DynamicsParams:
    n: int
    p: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def level_scale(self):
        """sqrt(2 n p (1 - p)), the normalisation of the level process."""
        if self.p in (0.0, 1.0):
            raise ValueError("level normalisation needs 0 < p < 1")
        return math.sqrt(2.0 * self.n * self.p * (1.0 - self.p))


@dataclass(frozen=True)
class LevelState:
    N: int
    level: int

    def __post_init__(self):
        if not 0 <= self.level <= self.N:
            raise ValueError(f"level {self.level} outside [0, {self.N}]")


@dataclass(frozen=True)
class Hit:
    """Outcome of a hitting-time simulation; ``time == cutoff`` when censored."""

    time: float
    censored: bool


@dataclass(frozen=True)
class Trajectory:
    """Value-change events (time, coordinate, new value) after ``x0``."""

    x0: np.ndarray
    horizon: float
    times: np.ndarray
    coords: np.ndarray
    values: np.ndarray
    n_events: int  # all resampling events, including ones that changed nothing

    def __len__(self):
        return self.times.size

    @property
    def events(self):
        return list(zip(self.times.tolist(), self.coords.tolist(), self.values.tolist()))

    def state_at(self, t):
        x = self.x0.copy()
        m = int(np.searchsorted(self.times, t, side="right"))
        for i, v in zip(self.coords[:m], self.values[:m]):
            x[i] = v
        return x


def check_configuration(x, n=None):
    x = np.asarray(x)
    if x.ndim != 1 or (n is not None and x.size != n):
        raise ValueError(f"configuration must be a length-{n} vector")
    if not np.all((x == 1) | (x == -1)):
        raise ValueError("configuration entries must be -1 or +1")
    return x.astype(np.int8)


def _check_time(name, v):
    if not (v >= 0.0) or not math.isfinite(v):
        raise ValueError(f"{name} must be a finite nonnegative number, got {v}")


# -- kernels ------------------------------------------------------------------


@jit
def _sample_stationary(x, p, state):
    for i in range(x.shape[0]):
        x[i] = 1 if next_double(state) < p else -1


@jit
def _evolve(x, eps, p, state):
    """Resample each coordinate independently with probability 1 - exp(-eps).

    Resampled positions are found by geometric skipping, so the cost is
    proportional to the number of resampled coordinates.
    """
    n = x.shape[0]
    if eps <= 0.0:
        return
    i = -1
    while True:
        g = math.log1p(-next_double(state)) / -eps
        if i + 1 + g >= n:
            return
        i += 1 + int(g)
        x[i] = 1 if next_double(state) < p else -1


@jit
def _trajectory(x, p, horizon, state):
    n = x.shape[0]
    cap = 64
    times = np.empty(cap, np.float64)
    coords = np.empty(cap, np.int64)
    vals = np.empty(cap, np.int8)
    m = 0
    total = 0
    t = 0.0
    while True:
        t += exponential(state) / n
        if t >= horizon:
            break
        total += 1
        i = next_below(state, n)
        v = 1 if next_double(state) < p else -1
        if v != x[i]:
            x[i] = v
            if m == cap:
                cap *= 2
                t2 = np.empty(cap, np.float64)
                c2 = np.empty(cap, np.int64)
                v2 = np.empty(cap, np.int8)
                t2[:m] = times[:m]
                c2[:m] = coords[:m]
                v2[:m] = vals[:m]
                times, coords, vals = t2, c2, v2
            times[m] = t
            coords[m] = i
            vals[m] = v
            m += 1
    return times[:m].copy(), coords[:m].copy(), vals[:m].copy(), total


@jit
def _hit(prog, x, s, p, cutoff, state):
    """First time f(X_t) != f(x); x and s are modified in place."""
    init_state(prog, x, s)
    v0 = value(prog, s, x)
    n = prog.n
    t = 0.0
    while True:
        t += exponential(state) / n
        if t >= cutoff:
            return cutoff, True
        i = next_below(state, n)
        v = 1 if next_double(state) < p else -1
        if v != x[i]:
            x[i] = v
            apply_flip(prog, s, i, v)
            if value(prog, s, x) != v0:
                return t, False


@jit
def _level_step(level, N, eps, p, state):
    if eps <= 0.0:
        return level
    q = -math.expm1(-eps)
    stay = math.exp(-eps) + q * p
    return binomial(state, level, stay) + binomial(state, N - level, q * p)


@jit
def _level_hit(table, N, level, p, cutoff, state):
    v0 = table[level]
    t = 0.0
    while True:
        up = (N - level) * p
        rate = up + level * (1.0 - p)
        if rate <= 0.0:
            return cutoff, True
        t += exponential(state) / rate
        if t >= cutoff:
            return cutoff, True
        if next_double(state) * rate < up:
            level += 1
        else:
            level -= 1
        if table[level] != v0:
            return t, False


# -- public API -----------------------------------------------------------------


def sample_stationary(params, stream):
    """Draw X_0 from the product measure: each coordinate +1 with probability p."""
    st = as_stream(stream)
    x = np.empty(params.n, np.int8)
    _sample_stationary(x, float(params.p), st.state)
    return x


def evolve_pair(x0, eps, params, stream):
    """Draw X_eps given X_0 = x0."""
    _check_time("eps", eps)
    st = as_stream(stream)
    x = check_configuration(x0, params.n).copy()
    _evolve(x, float(eps), float(params.p), st.state)
    return x


def simulate_trajectory(x0, horizon, params, stream):
    """Event-driven path of the chain on [0, horizon)."""
    _check_time("horizon", horizon)
    st = as_stream(stream)
    x0 = check_configuration(x0, params.n)
    times, coords, vals, total = _trajectory(x0.copy(), float(params.p), float(horizon), st.state)
    return Trajectory(x0.copy(), float(horizon), times, coords, vals, int(total))


def hitting_time(x0, f, params, cutoff, stream):
    """First time the value of ``f`` differs from f(x0), censored at ``cutoff``.

    ``f`` is updated incrementally: only value-changing events touch it.
    """
    _check_time("cutoff", cutoff)
    if f.n != params.n:
        raise ValueError("function dimension does not match params.n")
    st = as_stream(stream)
    x = check_configuration(x0, params.n).copy()
    s = np.zeros(state_size(f.program), np.int64)
    t, cens = _hit(f.program, x, s, float(params.p), float(cutoff), st.state)
    return Hit(float(t), bool(cens))


def sample_level(params, stream):
    st = as_stream(stream)
    return LevelState(params.n, int(binomial(st.state, params.n, float(params.p))))


def level_step(state, eps, params, stream):
    """Level after time eps: Bin(level, stay) + Bin(N - level, q p)."""
    _check_time("eps", eps)
    st = as_stream(stream)
    new = _level_step(int(state.level), int(state.N), float(eps), float(params.p), st.state)
    return LevelState(state.N, int(new))


def level_hitting_time(state, f, params, cutoff, stream):
    """Hitting time for a level-symmetric ``f`` using only the level chain."""
    _check_time("cutoff", cutoff)
    table = f.level_table()
    if table is None:
        raise ValueError("level_hitting_time needs a level-symmetric function")
    st = as_stream(stream)
    t, cens = _level_hit(table, int(state.N), int(state.level), float(params.p), float(cutoff), st.state)
    return Hit(float(t), bool(cens))


def normalized_level(level, params):
    return (level - params.n * params.p) / params.level_scale


def level_trajectory(traj, params):
    """(time, (level - n p) / sqrt(2 n p (1 - p))) at t = 0 and at every event."""
    scale = params.level_scale
    level = int(np.count_nonzero(traj.x0 > 0))
    centre = params.n * params.p
    out = [(0.0, (level - centre) / scale)]
    levels = level + np.cumsum(np.where(traj.values > 0, 1, -1))
    out += [(float(t), (float(lv) - centre) / scale) for t, lv in zip(traj.times, levels)]
    return out
