"""Walsh-Fourier spectra of Boolean functions (uniform measure)."""

import math
from dataclasses import dataclass

import numpy as np

from .._jit import jit
from .enumerate import all_configurations, truth_table

MAX_SPECTRUM_N = 20


@jit
def fwht(a):
    """In-place unnormalised fast Walsh-Hadamard transform."""
    h = 1
    m = a.shape[0]
    while h < m:
        for i in range(0, m, 2 * h):
            for j in range(i, i + h):
                u = a[j]
                v = a[j + h]
                a[j] = u + v
                a[j + h] = u - v
        h *= 2


def _popcounts(m):
    idx = np.arange(m, dtype=np.int64)
    c = np.zeros(m, np.int64)
    while idx.any():
        c += idx & 1
        idx >>= 1
    return c


@dataclass(frozen=True)
class Spectrum:
    """coefficients[S] for S encoded as a bitmask over coordinates 0..n-1."""

    n: int
    coefficients: np.ndarray

    def coef(self, subset):
        mask = 0
        for i in subset:
            mask |= 1 << i
        return float(self.coefficients[mask])

    def sizes(self):
        return _popcounts(self.coefficients.size)

    def weight(self):
        return math.fsum(self.coefficients**2)

    def mean(self):
        return float(self.coefficients[0])


def walsh_spectrum(f):
    """hat f(S) = 2^-n sum_x f(x) prod_{i in S} x(i)."""
    if f.n > MAX_SPECTRUM_N:
        raise ValueError(f"spectra limited to n <= {MAX_SPECTRUM_N}, got {f.n}")
    a = truth_table(f).astype(np.float64)
    fwht(a)
    return Spectrum(f.n, a / 2**f.n)


def walsh_spectrum_direct(f):
    """Same coefficients by explicit summation over the character matrix (n <= 10)."""
    if f.n > 10:
        raise ValueError("direct summation limited to n <= 10")
    xs = all_configurations(f.n).astype(np.float64)
    tt = truth_table(f).astype(np.float64)
    masks = all_configurations(f.n) < 0  # row S: coordinates in S
    chars = np.array([np.prod(xs[:, m], axis=1) for m in masks])
    return Spectrum(f.n, chars @ tt / 2**f.n)


def exact_covariance(spectrum, eps):
    """Cov[f(X_0), f(X_eps)] at p = 1/2: sum over S != {} of hat f(S)^2 e^{-eps |S|}."""
    c2 = spectrum.coefficients**2
    decay = np.exp(-eps * spectrum.sizes())
    return math.fsum((c2 * decay)[1:])
