"""Boolean functions on {-1, 1}^n.

Configurations are int8 arrays of +-1; batches are 2-D arrays with one
configuration per row.  Coordinates are 0-based here (the first coordinate is
index 0).
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..oracle.binomial import binomial_pmf
from . import _program as prg


class BooleanFunction:
    """Base class.  Subclasses implement ``_evaluate`` and ``_compile``."""

    n: int
    level_symmetric = False

    def __call__(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected configurations of length {self.n}, got {x.shape[-1]}")
        if x.ndim == 1:
            return int(self._evaluate(x[None, :])[0])
        return self._evaluate(x.reshape(-1, self.n)).reshape(x.shape[:-1])

    def _evaluate(self, xs):
        raise NotImplementedError

    def _compile(self):
        raise NotImplementedError

    @cached_property
    def program(self):
        return self._compile()

    def level_table(self):
        """Value on each level 0..n, or None if not level symmetric."""
        return None

    @property
    def descriptor(self):
        from .descriptors import format_function

        return format_function(self)

    def incremental_state(self, x):
        return IncrementalState(self, x)

    def __repr__(self):
        try:
            return f"<{type(self).__name__} {self.descriptor}>"
        except ValueError:
            return f"<{type(self).__name__} n={self.n}>"


class IncrementalState:
    """Tracks f(x) under single-coordinate flips without full re-evaluation.

    >>> from boolvol.zoo import majority
    >>> st = majority(3).incremental_state([-1, -1, 1])
    >>> st.value, st.flip(0)
    (-1, 1)
    """

    def __init__(self, f, x):
        self.f = f
        self.x = np.array(x, dtype=np.int8)
        self._state = np.zeros(prg.state_size(f.program), np.int64)
        prg.init_state(f.program, self.x, self._state)

    @property
    def value(self):
        return int(prg.value(self.f.program, self._state, self.x))

    def flip(self, i):
        self.x[i] = -self.x[i]
        prg.apply_flip(self.f.program, self._state, i, self.x[i])
        return self.value

    def set(self, i, v):
        if self.x[i] != v:
            return self.flip(i)
        return self.value


def _levels(xs):
    return np.count_nonzero(xs > 0, axis=1)


class LevelFunction(BooleanFunction):
    """A function of the number of +1 coordinates, given by a table."""

    level_symmetric = True

    def __init__(self, table):
        self._table = np.asarray(table, dtype=np.int8)
        self.n = self._table.size - 1

    def level_table(self):
        return self._table.copy()

    def _evaluate(self, xs):
        return self._table[_levels(xs)]

    def _compile(self):
        return prg.make_program(prg.BASE_LEVELS, self.n, table=self._table)


class Constant(LevelFunction):
    def __init__(self, n, value=1):
        if value not in (-1, 1):
            raise ValueError("constant value must be -1 or +1")
        self.value = int(value)
        super().__init__(np.full(n + 1, value, np.int8))

    def _compile(self):
        return prg.make_program(prg.BASE_CONSTANT, self.n, param=self.value)


class Dictator(BooleanFunction):
    def __init__(self, n, coord=0):
        if not 0 <= coord < n:
            raise ValueError("dictator coordinate out of range")
        self.n = n
        self.coord = coord

    def _evaluate(self, xs):
        return xs[:, self.coord].astype(np.int8)

    def _compile(self):
        return prg.make_program(prg.BASE_DICTATOR, self.n, param=self.coord)


class Parity(LevelFunction):
    def __init__(self, n):
        # product of coordinates = (-1)^(number of -1 coordinates)
        levels = np.arange(n + 1)
        super().__init__(np.where((n - levels) % 2 == 0, 1, -1))

    def _evaluate(self, xs):
        return np.prod(xs, axis=1, dtype=np.int64).astype(np.int8)

    def _compile(self):
        return prg.make_program(prg.BASE_PARITY, self.n)


class Majority(LevelFunction):
    def __init__(self, n):
        if n < 1 or n % 2 == 0:
            raise ValueError(f"majority needs odd n, got {n}")
        levels = np.arange(n + 1)
        super().__init__(np.where(2 * levels > n, 1, -1))


def constant(n, v=1):
    return Constant(n, v)


def dictator(n):
    return Dictator(n)


def parity(n):
    return Parity(n)


def majority(n):
    return Majority(n)


# -- block function -----------------------------------------------------------


@dataclass(frozen=True)
class BlockLayout:
    n: int
    lengths: tuple

    def __post_init__(self):
        if not self.lengths or self.lengths[0] != 1:
            raise ValueError("first block must have length 1")
        if any(a > b for a, b in zip(self.lengths, self.lengths[1:])):
            raise ValueError("block lengths must be nondecreasing")
        if sum(self.lengths) > self.n:
            raise ValueError("blocks do not fit in n coordinates")

    @property
    def starts(self):
        return tuple(int(s) for s in np.concatenate([[0], np.cumsum(self.lengths)[:-1]]))

    @property
    def blocks(self):
        """0-based coordinate ranges of the blocks."""
        return [range(s, s + l) for s, l in zip(self.starts, self.lengths)]


def block_multiplicity(length):
    """How many blocks of a given length the default layout uses."""
    return -(-(2**length) // (length * length))


def default_block_lengths(n):
    """Nondecreasing lengths, each value l repeated ceil(2^l / l^2) times.

    Blocks are added while the total length fits in n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    lengths = []
    total = 0
    length = 1
    while True:
        for _ in range(block_multiplicity(length)):
            if total + length > n:
                return BlockLayout(n, tuple(lengths))
            lengths.append(length)
            total += length
        length += 1


class BlockFunction(BooleanFunction):
    """Sign of the input on its last constant block."""

    def __init__(self, layout):
        self.layout = layout
        self.n = layout.n

    def _evaluate(self, xs):
        out = np.empty(xs.shape[0], np.int8)
        found = np.zeros(xs.shape[0], bool)
        for blk in reversed(self.layout.blocks):
            seg = xs[:, blk.start : blk.stop]
            const = np.all(seg == seg[:, :1], axis=1) & ~found
            out[const] = seg[const, 0]
            found |= const
        return out

    def _compile(self):
        block_of = np.full(self.n, -1, np.int64)
        for b, blk in enumerate(self.layout.blocks):
            block_of[blk.start : blk.stop] = b
        return prg.make_program(
            prg.BASE_BLOCK, self.n, block_of=block_of, block_len=np.array(self.layout.lengths)
        )


def block_function(layout):
    if isinstance(layout, int):
        layout = default_block_lengths(layout)
    return BlockFunction(layout)


# -- modifications ------------------------------------------------------------


def stripe_spacing(n, p):
    """floor((2 n p (1 - p))^(1/4)), the gap between striped levels."""
    v = 2.0 * n * p * (1.0 - p)
    a = int(math.floor(v**0.25))
    # guard against v**0.25 landing just below an exact integer
    while (a + 1) ** 4 <= v:
        a += 1
    while a > 0 and a**4 > v:
        a -= 1
    return a


class StripedModification(BooleanFunction):
    """f overwritten with alternating -1/+1 on an arithmetic progression of levels.

    The progression ``offset + i * alpha`` uses the offset with the smallest
    stationary mass (ties go to the smallest offset), so the modification
    changes f on a set of probability at most ``1 / alpha``.
    """

    def __init__(self, base, p):
        n = base.n
        if not 0.0 < p < 1.0 or n * p * (1.0 - p) < 8.0:
            raise ValueError(f"striped modification needs n p (1 - p) >= 8 (n={n}, p={p})")
        self.base = base
        self.n = n
        self.p = float(p)
        self.alpha = stripe_spacing(n, p)
        pmf = binomial_pmf(np.arange(n + 1), n, p)
        masses = [math.fsum(pmf[a :: self.alpha]) for a in range(self.alpha)]
        self.class_masses = masses
        self.offset = int(np.argmin(masses))
        self.mass = masses[self.offset]
        self.levels = np.arange(self.offset, n + 1, self.alpha)
        table = np.zeros(n + 1, np.int8)
        idx = np.arange(self.levels.size)
        table[self.levels] = np.where(idx % 2 == 1, 1, -1)
        self.stripe_table = table
        self.level_symmetric = base.level_symmetric

    def level_table(self):
        bt = self.base.level_table()
        if bt is None:
            return None
        return np.where(self.stripe_table != 0, self.stripe_table, bt).astype(np.int8)

    def _evaluate(self, xs):
        out = self.base._evaluate(xs).astype(np.int8)
        t = self.stripe_table[_levels(xs)]
        return np.where(t != 0, t, out).astype(np.int8)

    def _compile(self):
        return prg.push_table(self.base.program, self.stripe_table)


def striped_modification(f, p):
    return StripedModification(f, p)


class PinnedModification(BooleanFunction):
    """f forced to +1 whenever the first k coordinates are all -1."""

    def __init__(self, base, k):
        if not 1 <= k <= base.n:
            raise ValueError(f"pin length k must lie in [1, n={base.n}], got {k}")
        self.base = base
        self.n = base.n
        self.k = int(k)

    def _evaluate(self, xs):
        out = self.base._evaluate(xs).astype(np.int8)
        pinned = np.all(xs[:, : self.k] < 0, axis=1)
        out[pinned] = 1
        return out

    def _compile(self):
        return prg.push_pin(self.base.program, self.k)


def pinned_modification(f, k):
    return PinnedModification(f, k)


class TruthTableFunction(BooleanFunction):
    """Arbitrary function given by its value on every configuration.

    Entry ``idx`` is the value at the configuration whose coordinate i is -1
    exactly when bit i of ``idx`` is set.  Exact oracles only (n <= 20).
    """

    def __init__(self, table):
        table = np.asarray(table, dtype=np.int8)
        n = int(table.size).bit_length() - 1
        if table.ndim != 1 or table.size != 1 << n or n > 20:
            raise ValueError("truth table length must be 2^n with n <= 20")
        if not np.all(np.abs(table) == 1):
            raise ValueError("truth table entries must be +-1")
        self.n = n
        self.table = table

    def _evaluate(self, xs):
        idx = ((xs < 0).astype(np.int64) << np.arange(self.n)).sum(axis=1)
        return self.table[idx]

    def _compile(self):
        raise NotImplementedError("truth-table functions are for exact oracles only")


def random_function(n, rng):
    """Uniformly random truth table from a numpy Generator."""
    return TruthTableFunction(rng.choice(np.array([-1, 1], np.int8), size=1 << n))
