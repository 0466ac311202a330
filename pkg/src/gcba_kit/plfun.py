"""Exact piecewise-linear functions on an interval.

Distance functions restricted to a metric-graph edge are lower envelopes
of a handful of slope ±1 lines, so everything downstream (antipode sets,
antipodal distances, level sets, margin optimization) reduces to exact
arithmetic on breakpoint tables.  No sampling happens here.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Callable, Iterable

_MERGE_EPS = 1e-13


class PL:
    """Piecewise-linear function on [0, length], stored as breakpoints.

    ``xs`` is strictly increasing with xs[0] == 0 and xs[-1] == length;
    the function is linear between consecutive breakpoints.
    """

    __slots__ = ("xs", "ys")

    def __init__(self, xs: list[float], ys: list[float]):
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need at least two breakpoints")
        self.xs = xs
        self.ys = ys

    # ---------------------------------------------------------- construction

    @classmethod
    def line(cls, length: float, y0: float, y1: float) -> "PL":
        return cls([0.0, length], [y0, y1])

    @classmethod
    def const(cls, length: float, c: float) -> "PL":
        return cls([0.0, length], [c, c])

    @classmethod
    def vee(cls, length: float, x0: float, y0: float = 0.0, slope: float = 1.0) -> "PL":
        """|x - x0| * slope + y0, with the kink kept only if interior."""
        if x0 <= 0.0:
            return cls([0.0, length], [y0 + slope * (-x0), y0 + slope * (length - x0)])
        if x0 >= length:
            return cls([0.0, length], [y0 + slope * x0, y0 + slope * (x0 - length)])
        return cls([0.0, x0, length], [y0 + slope * x0, y0, y0 + slope * (length - x0)])

    @property
    def length(self) -> float:
        return self.xs[-1]

    # ------------------------------------------------------------ evaluation

    def __call__(self, x: float) -> float:
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, x) - 1
        x0, x1 = xs[i], xs[i + 1]
        if x1 == x0:
            return ys[i]
        w = (x - x0) / (x1 - x0)
        return ys[i] * (1.0 - w) + ys[i + 1] * w

    # ------------------------------------------------------------- algebra

    def map(self, f: Callable[[float], float]) -> "PL":
        return PL(list(self.xs), [f(v) for v in self.ys])

    def __neg__(self) -> "PL":
        return self.map(lambda v: -v)

    def shift(self, c: float) -> "PL":
        return self.map(lambda v: v + c)

    def scale(self, c: float) -> "PL":
        return self.map(lambda v: v * c)

    def _merged_xs(self, other: "PL") -> list[float]:
        xs = sorted(set(self.xs) | set(other.xs))
        out = [xs[0]]
        for x in xs[1:]:
            if x - out[-1] > _MERGE_EPS:
                out.append(x)
        out[-1] = self.xs[-1]
        return out

    def __add__(self, other: "PL") -> "PL":
        xs = self._merged_xs(other)
        return PL(xs, [self(x) + other(x) for x in xs])

    def _envelope(self, other: "PL", pick) -> "PL":
        base = self._merged_xs(other)
        xs: list[float] = []
        ys: list[float] = []
        for i, x in enumerate(base):
            a, b = self(x), other(x)
            if i > 0:
                pa, pb = self(base[i - 1]), other(base[i - 1])
                d0, d1 = pa - pb, a - b
                if (d0 > _MERGE_EPS and d1 < -_MERGE_EPS) or (d0 < -_MERGE_EPS and d1 > _MERGE_EPS):
                    # sign change: insert the crossing point
                    t = d0 / (d0 - d1)
                    xc = base[i - 1] + t * (x - base[i - 1])
                    if xc - xs[-1] > _MERGE_EPS and x - xc > _MERGE_EPS:
                        xs.append(xc)
                        ys.append(pick(self(xc), other(xc)))
            xs.append(x)
            ys.append(pick(a, b))
        return PL(xs, ys)

    def minimum(self, other: "PL") -> "PL":
        return self._envelope(other, min)

    def maximum(self, other: "PL") -> "PL":
        return self._envelope(other, max)

    def clamp_max(self, c: float) -> "PL":
        return self.minimum(PL.const(self.length, c))

    # ------------------------------------------------------------ extremes

    def min(self) -> tuple[float, float]:
        """(argmin, min value); leftmost argmin."""
        i = min(range(len(self.ys)), key=lambda j: (self.ys[j], self.xs[j]))
        return self.xs[i], self.ys[i]

    def max(self) -> tuple[float, float]:
        i = min(range(len(self.ys)), key=lambda j: (-self.ys[j], self.xs[j]))
        return self.xs[i], self.ys[i]

    # ------------------------------------------------------------- solving

    def solve_eq(self, c: float, tol: float = 1e-12) -> list[float]:
        """All x with f(x) == c, flat pieces contributing their endpoints."""
        out: list[float] = []
        xs, ys = self.xs, self.ys
        for i in range(len(xs) - 1):
            y0, y1 = ys[i] - c, ys[i + 1] - c
            if abs(y0) <= tol:
                out.append(xs[i])
            if (y0 < -tol and y1 > tol) or (y0 > tol and y1 < -tol):
                t = y0 / (y0 - y1)
                out.append(xs[i] + t * (xs[i + 1] - xs[i]))
        if abs(ys[-1] - c) <= tol:
            out.append(xs[-1])
        dedup: list[float] = []
        for x in sorted(out):
            if not dedup or x - dedup[-1] > 1e-11:
                dedup.append(x)
        return dedup

    def solve_ge(self, c: float, tol: float = 0.0) -> list[tuple[float, float]]:
        """Closed intervals where f(x) >= c - tol."""
        xs, ys = self.xs, self.ys
        pts: list[float] = [xs[0]]
        for i in range(len(xs) - 1):
            y0, y1 = ys[i] - (c - tol), ys[i + 1] - (c - tol)
            if (y0 > 0 > y1) or (y0 < 0 < y1):
                t = y0 / (y0 - y1)
                pts.append(xs[i] + t * (xs[i + 1] - xs[i]))
            pts.append(xs[i + 1])
        pts = sorted(set(pts))
        intervals: list[tuple[float, float]] = []
        for a, b in zip(pts[:-1], pts[1:]):
            if self(0.5 * (a + b)) >= c - tol - 1e-12:
                if intervals and a - intervals[-1][1] <= 1e-11:
                    intervals[-1] = (intervals[-1][0], b)
                else:
                    intervals.append((a, b))
        # isolated touch points (local maxima exactly at the level)
        for x, y in zip(xs, ys):
            if abs(y - (c - tol)) <= 1e-12 and not any(a - 1e-11 <= x <= b + 1e-11 for a, b in intervals):
                intervals.append((x, x))
        intervals.sort()
        return intervals


def pl_min(fs: Iterable[PL]) -> PL:
    it = iter(fs)
    acc = next(it)
    for f in it:
        acc = acc.minimum(f)
    return acc


def pl_max(fs: Iterable[PL]) -> PL:
    it = iter(fs)
    acc = next(it)
    for f in it:
        acc = acc.maximum(f)
    return acc
