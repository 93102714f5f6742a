"""Continuous-time simple random walk on Z_n with total jump rate n^2.

Jumps are +1 or -1 with probability 1/2 each (rate n^2 / 2 in each
direction), so the uniform law is stationary.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import jit
from .hypercube import Hit, _check_time
from .rng import as_stream, binomial, exponential, next_below, next_double, poisson

# beyond this many expected jumps the endpoint is drawn uniformly; the walk is
# then within total variation exp(-2 pi^2 eps) < 1e-30 of uniform
_MIX_JUMPS = 2.0**61


@dataclass(frozen=True)
class CircleState:
    n: int
    pos: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.pos < self.n:
            raise ValueError(f"position {self.pos} outside Z_{self.n}")


@jit
def _walk(pos, n, eps, state):
    """Endpoint after time eps and the number of jumps taken."""
    mu = float(n) * float(n) * eps
    if mu <= 0.0:
        return pos, 0
    if mu > _MIX_JUMPS:
        return next_below(state, n), -1
    k = poisson(state, mu)
    ups = binomial(state, k, 0.5)
    return (pos + 2 * ups - k) % n, k


@jit
def _circle_hit(table, pos, cutoff, state):
    n = table.shape[0]
    rate = float(n) * float(n)
    v0 = table[pos]
    t = 0.0
    while True:
        t += exponential(state) / rate
        if t >= cutoff:
            return cutoff, True
        if next_double(state) < 0.5:
            pos += 1
            if pos == n:
                pos = 0
        else:
            pos -= 1
            if pos < 0:
                pos = n - 1
        if table[pos] != v0:
            return t, False


def sample_uniform_circle(n, stream):
    if n < 1:
        raise ValueError("n must be positive")
    st = as_stream(stream)
    return CircleState(n, int(next_below(st.state, n)))


def walk_pair(y0, eps, stream, return_jumps=False):
    """Y_eps = y0 + (sum of K uniform +-1 steps) mod n, K ~ Poisson(n^2 eps).

    With ``return_jumps`` also returns K (-1 when the endpoint was drawn from
    the uniform law because n^2 eps exceeds 2^61).
    """
    _check_time("eps", eps)
    st = as_stream(stream)
    pos, k = _walk(int(y0.pos), int(y0.n), float(eps), st.state)
    out = CircleState(y0.n, int(pos))
    return (out, int(k)) if return_jumps else out


def expected_jumps(n, horizon):
    return float(n) ** 2 * horizon


def hitting_time_circle(y0, f, cutoff, stream):
    """First jump time at which f changes value, censored at ``cutoff``.

    Simulated jump by jump: expected cost n^2 * min(tau, cutoff).
    """
    _check_time("cutoff", cutoff)
    if f.n != y0.n:
        raise ValueError("circle function size does not match the state")
    st = as_stream(stream)
    t, cens = _circle_hit(f.values, int(y0.pos), float(cutoff), st.state)
    return Hit(float(t), bool(cens))


def wrapped_gap_probability(width, variance, terms=50):
    """P[circular distance of a N(0, variance) displacement mod 1 < width].

    The displacement of Y_delta / n from Y_0 / n is approximately normal
    with variance delta.  Used as the interval-width bound for circle
    volatility.
    """
    if width >= 0.5:
        return 1.0
    sd = math.sqrt(variance)
    total = 0.0
    for j in range(-terms, terms + 1):
        a = (j - width) / sd
        b = (j + width) / sd
        total += 0.5 * (math.erf(b / math.sqrt(2.0)) - math.erf(a / math.sqrt(2.0)))
    return min(1.0, total)


__all__ = [
    "CircleState",
    "expected_jumps",
    "hitting_time_circle",
    "sample_uniform_circle",
    "walk_pair",
    "wrapped_gap_probability",
]
