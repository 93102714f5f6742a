"""Counter-free SplitMix64 streams usable from both kernel backends.

A stream is a one-element ``uint64`` array holding the generator state.  It
is passed explicitly to every sampling routine, so identical seeds and
inputs give identical outputs on either backend.

Seed derivation (documented because experiment outputs depend on it)::

    mix64(z)            = SplitMix64 finaliser
    derive_seed(s, i)   = mix64((mix64(s) + (i + 1) * GAMMA) mod 2**64)

Replica ``i`` of a run with master seed ``s`` uses the stream whose initial
state is ``derive_seed(s, i)``.  Sweep rows derive their own seed the same
way from the master seed and the row index.
"""

import math

import numpy as np

from ._jit import NUMBA_ENABLED, jit

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def mix64_int(z):
    """SplitMix64 finaliser on Python ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed_int(seed, index):
    return mix64_int((mix64_int(seed) + (index + 1) * GAMMA) & MASK64)


if NUMBA_ENABLED:
    _G = np.uint64(GAMMA)
    _U1 = np.uint64(_M1)
    _U2 = np.uint64(_M2)
    _S30 = np.uint64(30)
    _S27 = np.uint64(27)
    _S31 = np.uint64(31)
    _S11 = np.uint64(11)

    @jit
    def _mix(z):
        z = (z ^ (z >> _S30)) * _U1
        z = (z ^ (z >> _S27)) * _U2
        return z ^ (z >> _S31)

    @jit
    def next_u64(state):
        z = state[0] + _G
        state[0] = z
        return _mix(z)

    @jit
    def next_double(state):
        """Uniform on [0, 1) with 53 random bits."""
        return np.float64(next_u64(state) >> _S11) * 1.1102230246251565e-16

    @jit
    def next_below(state, m):
        """Uniform integer on [0, m), exact (rejection of the biased tail)."""
        mu = np.uint64(m)
        lo = (np.uint64(0) - mu) % mu
        while True:
            z = next_u64(state)
            if z >= lo:
                return np.int64(z % mu)

    @jit
    def seed_state(state, seed, index):
        s = np.uint64(seed)
        state[0] = _mix(_mix(s) + np.uint64(index + 1) * _G)

else:

    def next_u64(state):
        z = (int(state[0]) + GAMMA) & MASK64
        state[0] = z
        return mix64_int(z)

    def next_double(state):
        """Uniform on [0, 1) with 53 random bits."""
        return (next_u64(state) >> 11) * 1.1102230246251565e-16

    def next_below(state, m):
        """Uniform integer on [0, m), exact (rejection of the biased tail)."""
        m = int(m)
        lo = (1 << 64) % m
        while True:
            z = next_u64(state)
            if z >= lo:
                return z % m

    def seed_state(state, seed, index):
        state[0] = derive_seed_int(int(seed), int(index))


@jit
def exponential(state):
    """Standard exponential variate."""
    return -math.log1p(-next_double(state))


@jit
def normal(state):
    # Box-Muller, one variate per call
    u1 = 1.0 - next_double(state)
    u2 = next_double(state)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@jit
def gamma(state, shape):
    """Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang)."""
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = 1.0 - next_double(state)
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return d * v


@jit
def beta(state, a, b):
    x = gamma(state, a)
    y = gamma(state, b)
    return x / (x + y)


@jit
def binomial(state, n, p):
    """Exact Binomial(n, p) by order-statistic splitting, then Bernoulli sums.

    The median order statistic of n uniforms is Beta(a, n + 1 - a); the
    count below p then splits into a binomial on either side of it.  Depth
    is O(log n), so n up to 2**62 is fine.
    """
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    k = 0
    while n > 40:
        a = 1 + n // 2
        b = n + 1 - a
        x = beta(state, float(a), float(b))
        if x >= p:
            n = a - 1
            p = p / x
        else:
            k += a
            n = b - 1
            p = (p - x) / (1.0 - x)
    for _ in range(n):
        if next_double(state) < p:
            k += 1
    return k


@jit
def poisson(state, mu):
    """Exact Poisson(mu) via gamma splitting for large means."""
    k = 0
    while mu > 30.0:
        m = int(mu * 0.875)
        x = gamma(state, float(m))
        if x < mu:
            k += m
            mu -= x
        else:
            return k + binomial(state, m - 1, mu / x)
    limit = math.exp(-mu)
    prod = 1.0
    while True:
        prod *= 1.0 - next_double(state)
        if prod < limit:
            return k
        k += 1


class Stream:
    """An explicit random stream.

    >>> s = Stream(7)
    >>> t = Stream(7)
    >>> s.random() == t.random()
    True
    """

    __slots__ = ("state",)

    def __init__(self, seed=0, index=0):
        self.state = np.zeros(1, dtype=np.uint64)
        self.state[0] = derive_seed_int(int(seed), int(index))

    def spawn(self, index):
        """Independent child stream keyed on the current state and ``index``."""
        child = Stream.__new__(Stream)
        child.state = np.zeros(1, dtype=np.uint64)
        child.state[0] = derive_seed_int(int(self.state[0]), int(index))
        return child

    def random(self):
        return float(next_double(self.state))

    def integers(self, m):
        return int(next_below(self.state, m))

    def getstate(self):
        return int(self.state[0])


def as_stream(stream):
    """Accept a Stream or an integer seed."""
    if isinstance(stream, Stream):
        return stream
    if isinstance(stream, (int, np.integer)):
        return Stream(int(stream))
    raise TypeError(f"expected Stream or int seed, got {type(stream).__name__}")
