"""Exact hitting-time tails by uniformization of the full chain (n <= 12).

With uniformization rate n the chain picks a uniform coordinate and redraws
it; survival to time delta is sum_m Pois(m; n delta) * (mass of the killed
chain after m steps).  Poisson terms are summed until the remaining tail is
below 1e-13.
"""

import math
from dataclasses import dataclass

import numpy as np

from .enumerate import stationary_weights, truth_table

MAX_TAIL_N = 12
TAIL_CUTOFF = 1e-13


def poisson_weights(lam, tail=TAIL_CUTOFF):
    """Pois(m; lam) for m = 0..M with the omitted tail below ``tail``."""
    if lam == 0.0:
        return np.array([1.0])
    w = []
    m = 0
    acc = 0.0
    while True:
        wm = math.exp(-lam + m * math.log(lam) - math.lgamma(m + 1))
        w.append(wm)
        acc += wm
        if m > lam and 1.0 - acc < tail and wm < tail:
            return np.array(w)
        m += 1


def _killed_step(v, n, p, labels):
    """One uniformized step; moves between different labels are killed."""
    idx = np.arange(v.size)
    out = np.zeros_like(v)
    for i in range(n):
        partner = idx ^ (1 << i)
        w = np.where((idx >> i) & 1, 1.0 - p, p)  # probability of landing on this value
        out += w * (v + np.where(labels[partner] == labels, v[partner], 0.0))
    return out / n


@dataclass(frozen=True)
class ExactTail:
    n: int
    delta: float
    value: float


def _check_n(n):
    if n > MAX_TAIL_N:
        raise ValueError(f"exact tails limited to n <= {MAX_TAIL_N}, got {n}")


def exact_hitting_tail(f, params, delta):
    """P[tau > delta] for the first time f(X_t) != f(X_0), X_0 ~ pi_p."""
    n, p = params.n, params.p
    _check_n(n)
    if f.n != n:
        raise ValueError("dimension mismatch")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    labels = truth_table(f)
    v = stationary_weights(n, p)
    total = 0.0
    for wm in poisson_weights(n * delta):
        total += wm * v.sum()
        v = _killed_step(v, n, p, labels)
    return ExactTail(n, float(delta), min(1.0, total))


@dataclass(frozen=True)
class AndersCheck:
    n: int
    delta: float
    lhs: float  # P[tau_{1^n} <= delta]
    rhs: float  # (1 - e^-delta) / 2 * n 2^-n
    holds: bool
    occupation: float  # E int_0^delta 1{X_t = X_0} dt, by uniformization
    occupation_closed: float  # int_0^delta ((1 + e^-t)/2)^n dt, closed form

    @property
    def identity_err(self):
        return abs(self.occupation - self.occupation_closed)


def _return_occupation(n, delta):
    """E int_0^delta 1{X_t = X_0} dt at p = 1/2 via uniformization.

    int_0^delta Pois(m; n t) dt = P[Pois(n delta) >= m + 1] / n.
    """
    lam = n * delta
    w = poisson_weights(lam)
    tails = 1.0 - np.cumsum(w)
    tails = np.clip(tails, 0.0, None)
    v = np.zeros(2**n)
    v[0] = 1.0
    labels = np.zeros(2**n, np.int8)
    acc = 0.0
    for m in range(w.size):
        acc += v[0] * tails[m]
        v = _killed_step(v, n, 0.5, labels)
    # terms beyond the truncation contribute at most sum of tails < 1e-12
    return acc / n


def occupation_closed_form(n, delta):
    """int_0^delta ((1 + e^-t) / 2)^n dt via the binomial expansion."""
    terms = [delta] + [math.comb(n, j) * -math.expm1(-j * delta) / j for j in range(1, n + 1)]
    return math.fsum(terms) / 2**n


def verify_anders_bound(n, delta):
    """Check P[tau_{1^n} <= delta] >= (1 - e^-delta)/2 * n 2^-n at p = 1/2."""
    _check_n(n)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    v = np.full(2**n, 2.0**-n)
    v[0] = 0.0  # started at 1^n: hit at time 0
    labels = np.zeros(2**n, np.int8)
    survive = 0.0
    for wm in poisson_weights(n * delta):
        survive += wm * v.sum()
        v = _killed_step(v, n, 0.5, labels)
        v[0] = 0.0
    lhs = 1.0 - survive
    rhs = -math.expm1(-delta) / 2.0 * n * 2.0**-n
    return AndersCheck(
        n, float(delta), lhs, rhs, lhs >= rhs,
        _return_occupation(n, delta), occupation_closed_form(n, delta),
    )
