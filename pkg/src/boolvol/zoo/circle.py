"""Nested interval schemes on the unit circle and the functions built from them."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .functions import LevelFunction


@dataclass(frozen=True)
class Interval:
    id: int
    lo: Fraction
    hi: Fraction
    density: Fraction

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class IntervalScheme:
    k: int
    intervals: tuple

    def tolerance(self):
        return Fraction(1, 2 ** (self.k + 1))

    def locate(self, t):
        """Interval containing the point ``t`` of [0, 1)."""
        for iv in self.intervals:
            if iv.lo <= t < iv.hi:
                return iv
        raise ValueError(f"{t} is outside [0, 1)")


def build_interval_scheme(k):
    """Depth-k scheme: densities alternate between 2^-k and 1 - 2^-k.

    Each interval of depth k-1 is split into three children; the centred
    child has relative length 2^-k / (1 - 2^-(k-1)) and takes the opposite
    density class of its parent.  Children of interval i get ids 3i, 3i+1,
    3i+2.
    """
    if k < 1:
        raise ValueError("depth k must be >= 1")
    half = Fraction(1, 2)
    if k == 1:
        return IntervalScheme(1, (Interval(0, Fraction(0), Fraction(1), half),))
    ivs = (
        Interval(0, Fraction(0), half, Fraction(1, 4)),
        Interval(1, half, Fraction(1), Fraction(3, 4)),
    )
    for depth in range(3, k + 1):
        low = Fraction(1, 2**depth)
        frac = low / (1 - Fraction(1, 2 ** (depth - 1)))
        children = []
        for iv in ivs:
            parent_low = iv.density < half
            side_density, centre_density = (low, 1 - low) if parent_low else (1 - low, low)
            centre = frac * iv.length
            side = (iv.length - centre) / 2
            a = iv.lo + side
            b = a + centre
            children += [
                Interval(3 * iv.id, iv.lo, a, side_density),
                Interval(3 * iv.id + 1, a, b, centre_density),
                Interval(3 * iv.id + 2, b, iv.hi, side_density),
            ]
        ivs = tuple(children)
    return IntervalScheme(k, ivs)


class MembershipError(ValueError):
    def __init__(self, row):
        self.row = row
        super().__init__(
            f"interval {row['id']} fails the density band: {row['ones']}/{row['size']} "
            f"not inside ({row['lower']}, {row['upper']})"
        )


def _ceil_mul(n, q):
    return -((-n * q.numerator) // q.denominator)


def spread_marks(size, density):
    """Evenly spread +1 marks: rank r is marked iff floor((r+1) d) > floor(r d)."""
    num, den = density.numerator, density.denominator
    # exact integer arithmetic; fall back to Python ints past int64 range
    dtype = np.int64 if max((size + 1) * num, den) < 2**62 else object
    r = np.arange(size, dtype=dtype)
    return np.asarray(((r + 1) * num // den) > (r * num // den), dtype=bool)


class CircleFunction:
    """A function Z_n -> {-1, 1} given by its value table."""

    def __init__(self, values, descriptor=None):
        self.values = np.asarray(values, dtype=np.int8)
        self.n = self.values.size
        self._descriptor = descriptor

    def __call__(self, pos):
        return self.values[np.asarray(pos) % self.n]

    @property
    def descriptor(self):
        if self._descriptor is None:
            raise ValueError("ad hoc circle function has no descriptor")
        return self._descriptor

    def plus_fraction(self):
        return np.count_nonzero(self.values > 0) / self.n

    def __repr__(self):
        return f"<CircleFunction n={self.n} {self._descriptor or 'custom'}>"


class SchemeCircleFunction(CircleFunction):
    """Deterministic member of the discrete class for a depth-k scheme."""

    def __init__(self, n, k, strict=True):
        self.k = k
        self.strict = strict
        self.scheme = build_interval_scheme(k)
        values = np.full(n, -1, np.int8)
        tol = self.scheme.tolerance()
        report = []
        for iv in self.scheme.intervals:
            a = _ceil_mul(n, iv.lo)
            b = _ceil_mul(n, iv.hi)
            marks = spread_marks(b - a, iv.density)
            values[a:b] = np.where(marks, 1, -1)
            ones = int(marks.sum())
            size = b - a
            lower, upper = iv.density - tol, iv.density + tol
            ok = size > 0 and lower < Fraction(ones, size) < upper
            report.append(
                dict(id=iv.id, start=a, size=size, ones=ones, target=iv.density,
                     lower=lower, upper=upper, ok=ok)
            )
        self.membership = report
        self.is_member = all(r["ok"] for r in report)
        desc = f"circle{{n={n},k={k}}}" if strict else f"circle{{n={n},k={k},strict=0}}"
        super().__init__(values, desc)
        if strict and not self.is_member:
            raise MembershipError(next(r for r in report if not r["ok"]))


def circle_function(n, k, strict=True):
    """Circle function whose +1 density on each depth-k interval is within
    2^-(k+1) of the interval's target density.

    Position ``pos`` belongs to the interval containing ``pos / n``.  With
    ``strict`` (default) a failing interval raises ``MembershipError``; the
    per-interval report is kept on ``.membership`` either way.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return SchemeCircleFunction(n, k, strict)


class HypercubeLift(LevelFunction):
    """g(x) = fc(level(x) mod C) on {-1, 1}^(C^2), for a cycle of even size C."""

    def __init__(self, fc):
        if fc.n % 2:
            raise ValueError("lift needs an even cycle size")
        self.circle = fc
        dim = fc.n * fc.n
        super().__init__(fc.values[np.arange(dim + 1) % fc.n])

    def evaluate_level(self, level):
        """Evaluate directly from a level (or LevelState)."""
        level = getattr(level, "level", level)
        return self.circle.values[np.asarray(level) % self.circle.n]


def hypercube_lift(fc):
    return HypercubeLift(fc)
