"""Finite unions of closed intervals: the canonical spectrum representation.

Spectra of the operators handled by this package are computed on bounded
energy windows and always reduce to a finite, sorted, pairwise-disjoint
union of closed intervals.  Gaps are the bounded open complements between
consecutive intervals; they are reported as closed ``Interval`` records
whose endpoints carry the open-endpoint semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

#: Default tolerance (in energy units) below which adjacent intervals are merged.
DEFAULT_MERGE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval [lo, hi] with finite endpoints, lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidInputError(f"non-finite interval endpoint: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise InvalidInputError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of pairwise-disjoint closed intervals.

    Construct through :func:`normalize`; direct construction asserts the
    normalization invariant (consecutive intervals separated by more than
    ``merge_tol``).  The empty union is allowed.
    """

    intervals: tuple[Interval, ...]
    merge_tol: float = DEFAULT_MERGE_TOL

    def __post_init__(self):
        if self.merge_tol < 0:
            raise InvalidInputError("merge_tol must be >= 0")
        for prev, cur in zip(self.intervals, self.intervals[1:]):
            if cur.lo - prev.hi <= self.merge_tol:
                raise InvalidInputError(
                    "intervals not normalized: "
                    f"[{prev.lo},{prev.hi}] and [{cur.lo},{cur.hi}] within merge_tol"
                )

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def span(self) -> Interval | None:
        """Bounding interval, or None when empty."""
        if not self.intervals:
            return None
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)

    def endpoints(self) -> list[float]:
        out = []
        for iv in self.intervals:
            out.extend((iv.lo, iv.hi))
        return out

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(iv.contains(x, tol) for iv in self.intervals)

    def translate(self, t: float) -> "IntervalUnion":
        return IntervalUnion(
            tuple(Interval(iv.lo + t, iv.hi + t) for iv in self.intervals), self.merge_tol
        )

    def scale(self, c: float) -> "IntervalUnion":
        """Image under x -> c*x (c < 0 reverses orientation)."""
        if c == 0:
            raise InvalidInputError("scale factor must be nonzero")
        scaled = [
            Interval(min(c * iv.lo, c * iv.hi), max(c * iv.lo, c * iv.hi))
            for iv in self.intervals
        ]
        return normalize(scaled, self.merge_tol)

    def clip(self, window: Interval) -> "IntervalUnion":
        """Intersection with a closed window."""
        out = []
        for iv in self.intervals:
            cut = iv.intersection(window)
            if cut is not None:
                out.append(cut)
        return IntervalUnion(tuple(out), self.merge_tol)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return normalize(list(self.intervals) + list(other.intervals), self.merge_tol)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        """Set intersection (sweep over both sorted interval lists)."""
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i].lo, b[j].lo)
            hi = min(a[i].hi, b[j].hi)
            if lo <= hi:
                out.append(Interval(lo, hi))
            if a[i].hi <= b[j].hi:
                i += 1
            else:
                j += 1
        return normalize(out, min(self.merge_tol, other.merge_tol))

    def distance_to(self, x: float) -> float:
        """Distance from the point x to the union (0 when inside)."""
        if not self.intervals:
            raise InvalidInputError("distance to empty union is undefined")
        best = math.inf
        for iv in self.intervals:
            if iv.lo <= x <= iv.hi:
                return 0.0
            best = min(best, abs(x - iv.lo), abs(x - iv.hi))
        return best


def normalize(intervals, merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion:
    """Sort intervals and merge any pair overlapping or within merge_tol.

    Accepts Interval instances or (lo, hi) pairs.  Idempotent; the result
    satisfies the IntervalUnion invariant.
    """
    if merge_tol < 0:
        raise InvalidInputError("merge_tol must be >= 0")
    items = [iv if isinstance(iv, Interval) else Interval(float(iv[0]), float(iv[1]))
             for iv in intervals]
    items.sort(key=lambda iv: (iv.lo, iv.hi))
    merged: list[Interval] = []
    for iv in items:
        if merged and iv.lo - merged[-1].hi <= merge_tol:
            if iv.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    return IntervalUnion(tuple(merged), merge_tol)


def measure(u: IntervalUnion) -> float:
    """Total length (Lebesgue measure) of the union."""
    return sum(iv.length for iv in u.intervals)


def gaps(u: IntervalUnion, window: Interval) -> list[Interval]:
    """Bounded open gaps of u, intersected with the window.

    Only the gaps between consecutive intervals of u are returned (the two
    unbounded complements are excluded).  Gap records are closed Interval
    objects standing in for the open interval (prev.hi, next.lo).  A
    zero-length window yields no gaps.
    """
    if window.length == 0.0:
        return []
    out = []
    for prev, cur in zip(u.intervals, u.intervals[1:]):
        lo, hi = max(prev.hi, window.lo), min(cur.lo, window.hi)
        if lo < hi:
            out.append(Interval(lo, hi))
    return out


def _point_distances(u: IntervalUnion, xs) -> np.ndarray:
    """Vectorized distance from each query point to the union."""
    flat = np.array(u.endpoints())
    xs = np.asarray(xs, dtype=float)
    idx = np.searchsorted(flat, xs)
    left = np.where(idx > 0, xs - flat[np.maximum(idx - 1, 0)], np.inf)
    right = np.where(idx < len(flat), flat[np.minimum(idx, len(flat) - 1)] - xs, np.inf)
    d = np.minimum(left, right)
    d[idx % 2 == 1] = 0.0          # odd insertion index: inside an interval
    return d


def _directed_hausdorff(a: IntervalUnion, b: IntervalUnion) -> float:
    # sup over x in a of dist(x, b); the distance function is piecewise linear
    # with peaks at midpoints of b's gaps, so checking a's endpoints plus the
    # peak points lying inside a is exact.
    candidates = a.endpoints()
    if len(b.intervals) > 1:
        b_arr = np.array(b.endpoints())
        mids = 0.5 * (b_arr[1:-1:2] + b_arr[2:-1:2])
        inside = _point_distances(a, mids) == 0.0
        candidates.extend(mids[inside])
    return float(np.max(_point_distances(b, np.array(candidates))))


def hausdorff_distance(a: IntervalUnion, b: IntervalUnion) -> float:
    """Two-sided Hausdorff distance between two nonempty bounded unions.

    Exact for interval unions (no discretization).  Raises on empty operands,
    which have no meaningful distance.
    """
    if a.is_empty or b.is_empty:
        raise InvalidInputError("Hausdorff distance requires nonempty operands")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def directed_hausdorff(a: IntervalUnion, b: IntervalUnion) -> float:
    """One-sided Hausdorff distance sup_{x in a} dist(x, b)."""
    if a.is_empty or b.is_empty:
        raise InvalidInputError("Hausdorff distance requires nonempty operands")
    return _directed_hausdorff(a, b)
