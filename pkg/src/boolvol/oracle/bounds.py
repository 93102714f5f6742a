"""Exact checks of the level-process moment identities and the cycle/cube
comparison sandwich."""

import math
from dataclasses import dataclass

import numpy as np

from .binomial import pmf_window

# 2 (1 - Phi(2)) = erfc(sqrt 2), 1 + 4 phi(0) = 1 + 4 / sqrt(2 pi)
LOWER_CONSTANT = math.erfc(math.sqrt(2.0))
UPPER_CONSTANT = 1.0 + 4.0 / math.sqrt(2.0 * math.pi)

MAX_LIFT_DIM = 2**28


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ComparisonCheck:
    n: int  # half the cycle size
    rho: float
    lifted_prob: float
    lower: float
    upper: float
    holds: bool
    asserted: bool  # n >= n_min: the sandwich is only claimed for large n


def lifted_plus_probability(fc):
    """P[fc(level mod C) = 1] for a uniform point of {-1, 1}^(C^2)."""
    dim = fc.n * fc.n
    if dim > MAX_LIFT_DIM:
        raise ValueError(f"lifted dimension {dim} exceeds {MAX_LIFT_DIM}")
    levels, pmf = pmf_window(dim, 0.5)
    plus = fc.values[levels % fc.n] > 0
    return math.fsum(pmf[plus])


def verify_comparison_bounds(fc, n=None, n_min=64):
    """2(1-Phi(2)) rho <= P[fc(|X_0| mod 2n) = 1] <= (1 + 4 phi(0)) rho.

    ``fc`` lives on Z_{2n}; X_0 is uniform on {-1, 1}^(4 n^2).
    """
    if fc.n % 2:
        raise ValueError("comparison needs an even cycle size")
    if n is None:
        n = fc.n // 2
    if fc.n != 2 * n:
        raise ValueError(f"cycle size {fc.n} is not 2n = {2 * n}")
    rho = float(np.count_nonzero(fc.values > 0)) / fc.n
    lifted = lifted_plus_probability(fc)
    lower = LOWER_CONSTANT * rho
    upper = UPPER_CONSTANT * rho
    return ComparisonCheck(n, rho, lifted, lower, upper, lower <= lifted <= upper, n >= n_min)


def ou_exact_moments(params, level, s):
    """Exact conditional mean and variance of the normalised level after time s."""
    n, p = params.n, params.p
    scale = params.level_scale
    if not 0 <= level <= n:
        raise ValueError("level outside [0, n]")
    e = math.exp(-s)
    q = -math.expm1(-s)
    q1 = e + q * p
    q0 = q * p
    mean_level = math.fsum([level * q1, (n - level) * q0, -n * p])
    var_level = level * q1 * (1.0 - q1) + (n - level) * q0 * (1.0 - q0)
    return mean_level / scale, var_level / (scale * scale)


def ou_moment_check(params, level, s):
    """Deviation of the exact moments from z e^-s and (1 - e^-2s)/2.

    Returns ``(mean_err, var_err)`` as absolute differences.
    """
    z0 = (level - params.n * params.p) / params.level_scale
    mean, var = ou_exact_moments(params, level, s)
    return abs(mean - z0 * math.exp(-s)), abs(var - (-math.expm1(-2.0 * s)) / 2.0)
