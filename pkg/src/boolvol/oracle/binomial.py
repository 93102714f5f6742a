"""Binomial level probabilities in log space.

Uses Loader's saddle-point decomposition (Stirling remainder plus the
deviance term ``bd0``), which keeps full relative precision far into the
tails and for n in the tens of millions.
"""

import math

import numpy as np

from .._jit import jit

_LN_2PI = math.log(2.0 * math.pi)
_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


@jit
def _stirlerr(n):
    if n <= 15.0:
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - 0.5 * _LN_2PI
    nn = n * n
    if n > 500.0:
        return (_S0 - _S1 / nn) / n
    if n > 80.0:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35.0:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


@jit
def _bd0(x, m):
    if abs(x - m) < 0.1 * (x + m):
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2.0 * x * v
        v2 = v * v
        for j in range(1, 1000):
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
        return s
    return x * math.log(x / m) + m - x


@jit
def _logpmf(x, n, p):
    q = 1.0 - p
    if p == 0.0:
        return 0.0 if x == 0 else -np.inf
    if q == 0.0:
        return 0.0 if x == n else -np.inf
    if x < 0 or x > n:
        return -np.inf
    if n == 0:
        return 0.0
    xf = float(x)
    nf = float(n)
    if x == 0:
        if p < 0.1:
            return -_bd0(nf, nf * q) - nf * p
        return nf * math.log(q)
    if x == n:
        if q < 0.1:
            return -_bd0(nf, nf * p) - nf * q
        return nf * math.log(p)
    lc = (
        _stirlerr(nf)
        - _stirlerr(xf)
        - _stirlerr(nf - xf)
        - _bd0(xf, nf * p)
        - _bd0(nf - xf, nf * q)
    )
    lf = _LN_2PI + math.log(xf) + math.log1p(-xf / nf)
    return lc - 0.5 * lf


@jit
def _logpmf_many(levels, n, p, out):
    for i in range(levels.shape[0]):
        out[i] = _logpmf(levels[i], n, p)


def binomial_logpmf(levels, n, p):
    """log P[Bin(n, p) = level] for each entry of ``levels``."""
    levels = np.atleast_1d(np.asarray(levels, dtype=np.int64))
    out = np.empty(levels.shape[0], dtype=np.float64)
    _logpmf_many(levels, int(n), float(p), out)
    return out


def binomial_pmf(levels, n, p):
    return np.exp(binomial_logpmf(levels, n, p))


def pmf_window(n, p, width=40.0):
    """Levels carrying all but a negligible (< 1e-300) part of the mass.

    Returns ``(levels, pmf)``.
    """
    n = int(n)
    sd = math.sqrt(n * p * (1.0 - p))
    lo = max(0, int(math.floor(n * p - width * sd - 10)))
    hi = min(n, int(math.ceil(n * p + width * sd + 10)))
    levels = np.arange(lo, hi + 1, dtype=np.int64)
    return levels, binomial_pmf(levels, n, p)


def binomial_level_mass(n, p, levels):
    """Exact P[Bin(n, p) in levels].

    ``levels`` is any iterable of integers in [0, n]; duplicates count once.
    """
    n = int(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    lv = np.unique(np.asarray(list(levels) if not isinstance(levels, np.ndarray) else levels, dtype=np.int64))
    if lv.size and (lv[0] < 0 or lv[-1] > n):
        raise ValueError("levels must lie in [0, n]")
    if lv.size == 0:
        return 0.0
    return math.fsum(binomial_pmf(lv, n, p))
