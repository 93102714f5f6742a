import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boolvol import zoo
from boolvol.circle import (
    CircleState,
    expected_jumps,
    hitting_time_circle,
    sample_uniform_circle,
    walk_pair,
    wrapped_gap_probability,
)
from boolvol.rng import Stream

from _stats import bernoulli_within, chi2_pvalue


def test_state_validation():
    with pytest.raises(ValueError):
        CircleState(4, 4)
    with pytest.raises(ValueError):
        sample_uniform_circle(0, 0)


def test_uniform_small():
    assert all(sample_uniform_circle(1, s).pos == 0 for s in range(10))
    s = Stream(1)
    counts = np.bincount([sample_uniform_circle(4, s).pos for _ in range(100_000)], minlength=4)
    for c in counts:
        assert bernoulli_within(c / 100_000, 0.25, 100_000)


def test_uniform_large_mean():
    n = 2**20
    s = Stream(2)
    pos = np.array([sample_uniform_circle(n, s).pos for _ in range(20_000)], float)
    sd = math.sqrt((n * n - 1) / 12)
    assert abs(pos.mean() - (n - 1) / 2) <= 4 * sd / math.sqrt(pos.size)


@given(st.integers(1, 2**30), st.integers(0, 2**32))
def test_walk_zero_eps(n, seed):
    y = CircleState(n, seed % n)
    assert walk_pair(y, 0.0, seed) == y


def test_walk_rejects_negative_eps():
    with pytest.raises(ValueError):
        walk_pair(CircleState(5, 0), -1.0, 0)


def test_jump_count_mean():
    s = Stream(3)
    ks = np.array([walk_pair(CircleState(100, 0), 1.0, s, return_jumps=True)[1] for _ in range(5000)])
    assert expected_jumps(100, 1.0) == 1e4
    assert abs(ks.mean() - 1e4) <= 4 * math.sqrt(1e4 / ks.size)


def test_displacement_moments_before_wrap():
    n, eps = 10**6, 1e-6  # n^2 eps = 1e6 jumps, displacement ~1e3 << n
    s = Stream(4)
    start = n // 2
    d = np.array([walk_pair(CircleState(n, start), eps, s).pos - start for _ in range(20_000)], float)
    var = n * n * eps
    assert abs(d.mean()) <= 4 * math.sqrt(var / d.size)
    assert abs(d.var() / var - 1) <= 4 * math.sqrt(2 / d.size)
    # diffusive scaling: variance of displacement / n is eps
    assert abs((d / n).var() / eps - 1) <= 4 * math.sqrt(2 / d.size)


def _walk_law(n, start, eps):
    """Exact law on Z_n via the generator's eigen-decomposition (Fourier)."""
    j = np.arange(n)
    rate = n * n
    lam = rate * (np.cos(2 * np.pi * j / n) - 1.0)
    y = np.arange(n)
    law = np.real(np.exp(lam * eps)[None, :] * np.exp(2j * np.pi * np.outer(y - start, j) / n)).sum(axis=1) / n
    return np.clip(law, 0, None)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_semigroup_chi_square(n):
    s_, t_ = 0.01, 0.02
    s = Stream(5 + n)
    counts = np.zeros(n)
    for _ in range(60_000):
        y = walk_pair(walk_pair(CircleState(n, 1), s_, s), t_, s)
        counts[y.pos] += 1
    assert chi2_pvalue(counts, _walk_law(n, 1, s_ + t_)) > 1e-3


def test_uniform_is_stationary():
    n = 6
    s = Stream(9)
    counts = np.zeros(n)
    for _ in range(60_000):
        counts[walk_pair(sample_uniform_circle(n, s), 0.003, s).pos] += 1
    assert chi2_pvalue(counts, np.full(n, 1 / n)) > 1e-3


def test_huge_time_uses_uniform_endpoint():
    y, k = walk_pair(CircleState(2**30, 5), 1e6, 0, return_jumps=True)
    assert k == -1 and 0 <= y.pos < 2**30


def test_hitting_constant_censored():
    f = zoo.CircleFunction(np.ones(16, np.int8))
    h = hitting_time_circle(CircleState(16, 3), f, 0.5, 0)
    assert h.censored and h.time == 0.5


def test_hitting_rejects_bad_input():
    f = zoo.CircleFunction(np.ones(16, np.int8))
    with pytest.raises(ValueError):
        hitting_time_circle(CircleState(16, 3), f, -1.0, 0)
    with pytest.raises(ValueError):
        hitting_time_circle(CircleState(8, 3), f, 1.0, 0)


def test_hitting_alternating_is_first_jump():
    n, delta = 10, 0.004
    f = zoo.CircleFunction(np.where(np.arange(n) % 2 == 0, 1, -1))
    s = Stream(10)
    R = 40_000
    cens = sum(hitting_time_circle(sample_uniform_circle(n, s), f, delta, s).censored for _ in range(R))
    assert bernoulli_within(cens / R, math.exp(-n * n * delta), R)


def test_circle_volatility_below_interval_width_bound():
    fc = zoo.circle_function(4096, 3)
    delta = 0.1
    s = Stream(11)
    R = 10_000
    cens = sum(hitting_time_circle(sample_uniform_circle(fc.n, s), fc, delta, s).censored for _ in range(R))
    # staying put means the displacement at time delta is shorter than the
    # widest interval; for a normal displacement with variance delta
    width = max(float(iv.length) for iv in fc.scheme.intervals)
    bound = wrapped_gap_probability(width, delta)
    phat = cens / R
    assert phat <= bound + 4 * math.sqrt(max(phat, bound) * (1 - min(phat, bound)) / R)


def test_wrapped_gap_probability():
    assert wrapped_gap_probability(0.5, 1.0) == 1.0
    # tiny variance: no wrapping, plain two-sided normal probability
    assert wrapped_gap_probability(0.1, 0.01) == pytest.approx(math.erf(1 / math.sqrt(2)), rel=1e-12)
    # huge variance: wrapped normal is uniform, so probability = 2 * width
    assert wrapped_gap_probability(0.1, 100.0, terms=400) == pytest.approx(0.2, abs=1e-9)
