import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boolvol import rng
from boolvol.rng import Stream, as_stream, derive_seed_int, mix64_int

from _stats import chi2_pvalue


def test_streams_are_reproducible():
    a, b = Stream(42), Stream(42)
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    assert Stream(42).random() != Stream(43).random()


def test_stream_index_matches_derived_seed():
    for seed, i in [(0, 0), (7, 3), (2**64 - 1, 10**6)]:
        assert Stream(seed, i).getstate() == derive_seed_int(seed, i)


def test_seed_state_matches_python_derivation():
    state = np.zeros(1, np.uint64)
    for seed, i in [(0, 0), (123, 5), (2**63 + 11, 99)]:
        rng.seed_state(state, np.uint64(seed), i)
        assert int(state[0]) == derive_seed_int(seed, i)


def test_mix64_known_value():
    # SplitMix64 first output for seed 0 (reference value of the published generator)
    assert mix64_int(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


def test_spawn_is_deterministic_and_distinct():
    s = Stream(5)
    assert s.spawn(1).getstate() == Stream(5).spawn(1).getstate()
    assert s.spawn(1).getstate() != s.spawn(2).getstate()


def test_as_stream():
    s = Stream(3)
    assert as_stream(s) is s
    assert as_stream(3).getstate() == s.getstate()
    with pytest.raises(TypeError):
        as_stream("seed")


@given(st.integers(1, 2**40))
def test_next_below_in_range(m):
    s = Stream(m)
    for _ in range(20):
        assert 0 <= s.integers(m) < m


def test_next_below_uniform():
    s = Stream(11)
    draws = np.array([s.integers(7) for _ in range(70_000)])
    assert chi2_pvalue(np.bincount(draws, minlength=7), np.full(7, 1 / 7)) > 1e-3


def test_next_double_range_and_mean():
    s = Stream(1)
    u = np.array([s.random() for _ in range(50_000)])
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / u.size)


def _draws(fn, count, seed=0):
    s = Stream(seed)
    return np.array([fn(s.state) for _ in range(count)], dtype=float)


@pytest.mark.parametrize("n,p", [(10, 0.3), (41, 0.5), (1000, 0.02), (10**6, 0.7), (2**40, 0.5)])
def test_binomial_moments(n, p):
    x = _draws(lambda st: rng.binomial(st, n, p), 20_000)
    mean, var = n * p, n * p * (1 - p)
    assert x.min() >= 0 and x.max() <= n
    assert abs(x.mean() - mean) < 5 * math.sqrt(var / x.size)
    assert abs(x.var() / var - 1) < 5 * math.sqrt(2 / x.size)


def test_binomial_distribution_small_n():
    from scipy import stats

    n, p = 60, 0.37  # above the splitting threshold
    x = _draws(lambda st: rng.binomial(st, n, p), 40_000, seed=3).astype(int)
    assert chi2_pvalue(np.bincount(x, minlength=n + 1), stats.binom.pmf(np.arange(n + 1), n, p)) > 1e-3


def test_binomial_edge_cases():
    s = Stream(0)
    assert rng.binomial(s.state, 0, 0.5) == 0
    assert rng.binomial(s.state, 10, 0.0) == 0
    assert rng.binomial(s.state, 10, 1.0) == 10


@pytest.mark.parametrize("mu", [0.5, 7.0, 45.0, 1e4, 1e12])
def test_poisson_moments(mu):
    x = _draws(lambda st: rng.poisson(st, mu), 20_000, seed=int(mu) % 97)
    assert abs(x.mean() - mu) < 5 * math.sqrt(mu / x.size)
    assert abs(x.var() / mu - 1) < 5 * math.sqrt(2 / x.size)


def test_poisson_distribution():
    from scipy import stats

    mu = 38.0
    x = _draws(lambda st: rng.poisson(st, mu), 40_000, seed=5).astype(int)
    top = 90
    counts = np.bincount(np.minimum(x, top), minlength=top + 1)
    probs = stats.poisson.pmf(np.arange(top + 1), mu)
    probs[-1] = stats.poisson.sf(top - 1, mu)
    assert chi2_pvalue(counts, probs) > 1e-3


@pytest.mark.parametrize("shape", [1.0, 2.5, 40.0])
def test_gamma_moments(shape):
    x = _draws(lambda st: rng.gamma(st, shape), 20_000)
    assert abs(x.mean() - shape) < 5 * math.sqrt(shape / x.size)


def test_exponential_and_normal():
    e = _draws(rng.exponential, 20_000)
    z = _draws(rng.normal, 20_000, seed=9)
    assert abs(e.mean() - 1) < 5 / math.sqrt(e.size)
    assert abs(z.mean()) < 5 / math.sqrt(z.size)
    assert abs(z.var() - 1) < 5 * math.sqrt(2 / z.size)
