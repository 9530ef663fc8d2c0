"""Thinness diagnostics: box-counting dimension and Minkowski sums of spectra.

Box counts use a grid anchored at integer multiples of eps (deterministic, no
sliding offsets); the liminf in the lower box-counting dimension is
unattainable at finite scale, so estimates report both the global regression
slope over a dyadic scale ladder and the minimum two-point slope over the
finest decade as a lower-dimension proxy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, InvalidInputError
from .intervals import Interval, IntervalUnion

#: Relative tolerance (in units of eps) for snapping endpoints to cell boundaries.
BOUNDARY_SNAP = 1e-9

#: Hard cap on intermediate interval pairs in a Minkowski sum.
PAIR_CAP = 10_000_000


def box_count(u: IntervalUnion, eps: float) -> int:
    """Number of grid cells [m eps, (m+1) eps) intersecting u.

    A right endpoint landing exactly on a cell boundary does not open the next
    cell (half-open convention); degenerate single-point intervals count one
    cell.  Endpoints within BOUNDARY_SNAP * eps of a boundary are snapped to it.
    """
    if eps <= 0 or not math.isfinite(eps):
        raise InvalidInputError("eps must be positive")
    total = 0
    prev_max = None
    for iv in u.intervals:
        m_min = int(math.floor(iv.lo / eps + BOUNDARY_SNAP))
        m_max = int(math.ceil(iv.hi / eps - BOUNDARY_SNAP)) - 1
        if m_max < m_min:          # degenerate interval inside one cell
            m_max = m_min
        if prev_max is not None and m_min <= prev_max:
            m_min = prev_max + 1
        if m_max >= m_min:
            total += m_max - m_min + 1
            prev_max = m_max
    return total


@dataclass(frozen=True)
class DimensionEstimate:
    """Box-counting regression over a dyadic scale ladder."""

    scales: tuple[float, ...]        # strictly decreasing eps values
    counts: tuple[int, ...]
    slope: float                     # least-squares slope of log N vs log(1/eps)
    fit_residual: float              # rms residual of the fit (log-count units)
    window: Interval
    min_tail_slope: float            # min two-point slope over the finest decade

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.scales, self.scales[1:])):
            raise InvalidInputError("scales must be strictly decreasing")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise InternalConsistencyError("counts decreased as eps decreased")
        if not (-0.1 <= self.slope <= 1.1):
            raise InternalConsistencyError(
                f"box-dimension slope {self.slope} outside [-0.1, 1.1]")


def box_dimension(u: IntervalUnion, eps_hi: float, eps_lo: float,
                  ratio: float = 2.0) -> DimensionEstimate:
    """Box-counting dimension estimate over the ladder eps_hi, eps_hi/ratio, ...

    The ladder is dyadic by default; a different ratio (e.g. 3 for sets built
    on a triadic grid) aligns the scales with a set's own construction.  It
    runs down to eps_lo (inclusive up to roundoff) and must contain at least
    4 scales.  u must be nonempty and bounded (it always is).
    """
    if u.is_empty:
        raise InvalidInputError("cannot estimate the dimension of the empty set")
    if not (eps_hi > eps_lo > 0):
        raise InvalidInputError("need eps_hi > eps_lo > 0")
    if ratio <= 1.0:
        raise InvalidInputError("ladder ratio must exceed 1")
    scales = []
    eps = eps_hi
    while eps >= eps_lo * (1.0 - 1e-12):
        scales.append(eps)
        eps /= ratio
    if len(scales) < 4:
        raise InvalidInputError(
            f"ladder from {eps_hi} to {eps_lo} has only {len(scales)} scales; need >= 4")
    counts = [box_count(u, e) for e in scales]
    log_inv_eps = np.log(1.0 / np.array(scales))
    log_n = np.log(np.array(counts, dtype=float))
    coeffs, residuals, *_ = np.polyfit(log_inv_eps, log_n, 1, full=True)
    slope = float(coeffs[0])
    rms = float(np.sqrt(residuals[0] / len(scales))) if len(residuals) else 0.0
    eps_min = scales[-1]
    tail = [i for i, e in enumerate(scales) if e <= 10.0 * eps_min]
    two_point = [
        (log_n[j] - log_n[i]) / (log_inv_eps[j] - log_inv_eps[i])
        for i, j in zip(tail[:-1], tail[1:])
    ]
    min_tail = float(min(two_point)) if two_point else slope
    return DimensionEstimate(tuple(scales), tuple(counts), slope, rms,
                             u.span, min_tail)


def minkowski_sum(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    """Normalized set {x + y : x in a, y in b}.

    Pairwise interval sums are formed and merged; an empty operand produces an
    empty result with a warning (the sum with the empty set is empty).
    """
    if a.is_empty or b.is_empty:
        warnings.warn("Minkowski sum with an empty operand is empty", stacklevel=2)
        return IntervalUnion((), max(a.merge_tol, b.merge_tol))
    n_pairs = len(a) * len(b)
    if n_pairs > PAIR_CAP:
        raise InvalidInputError(
            f"Minkowski sum would form {n_pairs} interval pairs (cap {PAIR_CAP}); "
            "normalize or window the operands first")
    alo = np.array([iv.lo for iv in a.intervals])
    ahi = np.array([iv.hi for iv in a.intervals])
    blo = np.array([iv.lo for iv in b.intervals])
    bhi = np.array([iv.hi for iv in b.intervals])
    los = (alo[:, None] + blo[None, :]).ravel()
    his = (ahi[:, None] + bhi[None, :]).ravel()
    order = np.argsort(los, kind="stable")
    merge_tol = max(a.merge_tol, b.merge_tol)
    merged: list[list[float]] = []
    for lo, hi in zip(los[order], his[order]):
        if merged and lo - merged[-1][1] <= merge_tol:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return IntervalUnion(tuple(Interval(lo, hi) for lo, hi in merged), merge_tol)


def d_fold_sum(a: IntervalUnion, d: int) -> IntervalUnion:
    """Iterated Minkowski sum of a with itself, d terms (d = 1 is the identity)."""
    if d < 1:
        raise InvalidInputError("d must be >= 1")
    out = a
    for _ in range(d - 1):
        out = minkowski_sum(out, a)
    return out


@dataclass(frozen=True)
class SubadditivityCheck:
    """Finite-scale check of dim(d-fold sum) <= d * dim with regression slack."""

    lhs_estimate: DimensionEstimate     # dimension of the d-fold sum
    rhs_estimate: DimensionEstimate     # dimension of the summand
    rhs_bound: float                    # d * rhs slope
    slack: float                        # combined fit residuals
    satisfied: bool


def check_dim_subadditivity(a: IntervalUnion, d: int,
                            ladder: tuple[float, float],
                            ratio: float = 2.0) -> SubadditivityCheck:
    """Estimate both sides of the sum-dimension inequality on one ladder."""
    eps_hi, eps_lo = ladder
    rhs = box_dimension(a, eps_hi, eps_lo, ratio)
    lhs = box_dimension(d_fold_sum(a, d), eps_hi, eps_lo, ratio)
    slack = lhs.fit_residual + d * rhs.fit_residual
    bound = d * rhs.slope
    return SubadditivityCheck(lhs, rhs, bound, slack,
                              lhs.slope <= bound + slack)
