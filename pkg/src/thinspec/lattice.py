"""Spectra of q-periodic discrete Schrodinger operators h = -Delta + v on Z.

Sign convention: [h psi](n) = -(psi(n+1) + psi(n-1)) + v(n) psi(n).  The free
lattice spectrum is [-2, 2] (the convention only flips the potential's sign
relative to the +Delta normalization, and the free spectrum is symmetric).

Band edges are the energies where the discriminant D(E) = tr T(v_q) ... T(v_1)
meets +-2, equivalently the eigenvalues of the period-q restriction with
periodic / antiperiodic boundary conditions.  Three interchangeable pathways
are provided: symmetric eigenvalue edges (default; robust at any q and exact
at band tangencies), companion-matrix roots of the discriminant polynomial,
and grid bisection on D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    ConvergenceError,
    InternalConsistencyError,
    InvalidInputError,
    ResolutionError,
)
from .intervals import DEFAULT_MERGE_TOL, Interval, IntervalUnion, normalize
from .mat2 import Mat2

#: Largest period accepted by the coefficient recursion of discriminant_poly.
Q_MAX_POLY = 2000


@dataclass(frozen=True)
class LatticePotential:
    """One period of a q-periodic real sequence."""

    values: tuple[float, ...]
    provenance: str | None = None

    def __post_init__(self):
        if len(self.values) < 1:
            raise InvalidInputError("lattice potential needs at least one value")
        if not all(math.isfinite(v) for v in self.values):
            raise InvalidInputError("lattice potential values must be finite")

    @property
    def q(self) -> int:
        return len(self.values)

    @property
    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values)

    def shifted(self, c: float) -> "LatticePotential":
        return LatticePotential(tuple(v + c for v in self.values), self.provenance)

    def negated(self) -> "LatticePotential":
        return LatticePotential(tuple(-v for v in self.values), self.provenance)

    def rotated(self, shift: int = 1) -> "LatticePotential":
        """Cyclic rotation of the period window."""
        s = shift % self.q
        return LatticePotential(self.values[s:] + self.values[:s], self.provenance)


def transfer(v_n: float, energy: float) -> Mat2:
    """One-site transfer matrix [[v_n - E, -1], [1, 0]] with det = 1.

    Propagates (psi(n+1), psi(n)) = T (psi(n), psi(n-1)) for the difference
    equation -(psi(n+1) + psi(n-1)) + v(n) psi(n) = E psi(n).
    """
    if not (math.isfinite(v_n) and math.isfinite(energy)):
        raise InvalidInputError("transfer matrix arguments must be finite")
    return Mat2(v_n - energy, -1.0, 1.0, 0.0)


def _discriminant_values(values, E: np.ndarray) -> np.ndarray:
    """Trace of the transfer product over one period, vectorized over E."""
    m11 = np.ones_like(E)
    m12 = np.zeros_like(E)
    m21 = np.zeros_like(E)
    m22 = np.zeros_like(E)
    first = True
    for v in values:
        a = v - E
        if first:
            m11, m12, m21, m22 = a, -np.ones_like(E), np.ones_like(E), np.zeros_like(E)
            first = False
            continue
        n11 = a * m11 - m21
        n12 = a * m12 - m22
        m21, m22 = m11, m12
        m11, m12 = n11, n12
    return m11 + m22


def discrete_discriminant(v: LatticePotential, energy: float) -> float:
    """D(E) = tr[T(v_q, E) ... T(v_1, E)]."""
    return float(_discriminant_values(v.values, np.array([float(energy)]))[0])


@dataclass(frozen=True)
class DiscriminantPoly:
    """Degree-q discriminant as a polynomial in E (coeffs low-to-high)."""

    coeffs: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def eval(self, energy) -> np.ndarray:
        return P.polyval(np.asarray(energy, dtype=float), np.asarray(self.coeffs))


def discriminant_poly(v: LatticePotential, q_max: int = Q_MAX_POLY) -> DiscriminantPoly:
    """Exact coefficient recursion for the discriminant polynomial.

    The transfer product is accumulated with polynomial entries; the leading
    coefficient is (-1)^q exactly (only multiplications by -1 touch the top
    degree).  Evaluation is cross-checked against the direct transfer product
    on a few energies before returning.
    """
    q = v.q
    if q > q_max:
        raise InvalidInputError(f"period {q} exceeds q_max={q_max}")
    # entries of the running product as coefficient arrays
    m11, m12 = np.array([1.0]), np.array([0.0])
    m21, m22 = np.array([0.0]), np.array([1.0])
    with np.errstate(invalid="ignore", over="ignore"):   # overflow is reported below
        for vn in v.values:
            a = np.array([vn, -1.0])          # (v_n - E)
            n11 = P.polysub(P.polymul(a, m11), m21)
            n12 = P.polysub(P.polymul(a, m12), m22)
            m21, m22 = m11, m12
            m11, m12 = n11, n12
        coeffs = P.polyadd(m11, m22)
    coeffs = np.concatenate([coeffs, np.zeros(q + 1 - len(coeffs))])
    if not np.all(np.isfinite(coeffs)):
        raise ConvergenceError(
            "discriminant coefficients overflowed float range; "
            "use the evaluation-only pathway (discrete_discriminant / grid bisection)")
    lead = coeffs[-1]
    if lead != (-1.0) ** q:
        raise InternalConsistencyError(
            f"leading coefficient {lead} != (-1)^{q}")
    poly = DiscriminantPoly(tuple(float(c) for c in coeffs))
    # probe inside |E| <= 1 so evaluation roundoff stays below the tolerance
    probe = np.linspace(-1.0, 1.0, 5)
    direct = _discriminant_values(v.values, probe)
    tol = 1e-8 * (1.0 + v.sup_norm) ** q
    if np.max(np.abs(poly.eval(probe) - direct)) > tol:
        raise InternalConsistencyError(
            "discriminant polynomial disagrees with the transfer product")
    return poly


@dataclass(frozen=True)
class BandOptions:
    """Options for discrete band assembly."""

    method: str = "eig"          # "eig" | "poly" | "grid"
    edge_tol: float = 1e-9
    tangency_tol: float = 1e-7
    gap_floor: float = 1e-12     # smallest trusted excursion of |D|-2 (grid method)
    merge_tol: float = DEFAULT_MERGE_TOL
    grid_points_per_band: int = 8
    check_monotone: bool = True


@dataclass(frozen=True)
class DiscreteBandStructure:
    bands: IntervalUnion
    edges: tuple[float, ...]          # 2q sorted band-edge energies (with multiplicity)
    tangency_energies: tuple[float, ...]
    band_count: int


def _floquet_matrix(values, antiperiodic: bool) -> np.ndarray:
    q = len(values)
    H = np.diag(np.asarray(values, dtype=float))
    s = 1.0 if antiperiodic else -1.0
    for i in range(q - 1):
        H[i, i + 1] -= 1.0
        H[i + 1, i] -= 1.0
    H[0, q - 1] += s
    H[q - 1, 0] += s
    return H


def _edges_eig(v: LatticePotential) -> np.ndarray:
    ev_per = np.linalg.eigvalsh(_floquet_matrix(v.values, antiperiodic=False))
    ev_anti = np.linalg.eigvalsh(_floquet_matrix(v.values, antiperiodic=True))
    return np.sort(np.concatenate([ev_per, ev_anti]))


def _edges_poly(v: LatticePotential, opts: BandOptions) -> np.ndarray:
    poly = discriminant_poly(v)
    scale = 2.0 + v.sup_norm
    roots = []
    for level in (2.0, -2.0):
        c = np.array(poly.coeffs)
        c[0] -= level
        r = np.roots(c[::-1])
        if np.max(np.abs(r.imag)) > 1e-6 * scale:
            raise InternalConsistencyError(
                f"discriminant roots left the real axis (max imag "
                f"{np.max(np.abs(r.imag)):.3e}); the theory requires real roots")
        roots.append(r.real)
    edges = np.sort(np.concatenate(roots))
    if len(edges) != 2 * v.q:
        raise InternalConsistencyError(
            f"expected {2 * v.q} band edges, found {len(edges)}")
    return edges


def _edges_grid(v: LatticePotential, opts: BandOptions) -> np.ndarray:
    from .floquet import _bisect_level, _refine_extrema   # shared refinement kernels

    q = v.q
    pad = 1e-3 * (1.0 + v.sup_norm)
    lo = -2.0 - v.sup_norm - pad
    hi = 2.0 + v.sup_norm + pad
    n = max(64, opts.grid_points_per_band * q) + 1
    grid = np.linspace(lo, hi, n)
    evalD = lambda E: _discriminant_values(v.values, np.asarray(E, dtype=float))
    dvals = evalD(grid)
    diffs = np.diff(dvals)
    flips = np.nonzero(np.sign(diffs[:-1]) * np.sign(diffs[1:]) < 0)[0] + 1
    if len(flips) > 0:
        maximize = dvals[flips] >= dvals[flips - 1]
        crit_e, crit_d = _refine_extrema(evalD, grid[flips - 1], grid[flips + 1],
                                         maximize, opts.edge_tol)
    else:
        crit_e = np.array([])
        crit_d = np.array([])
    bp_e = np.concatenate([[grid[0]], crit_e, [grid[-1]]])
    bp_d = np.concatenate([[dvals[0]], crit_d, [dvals[-1]]])
    order = np.argsort(bp_e)
    bp_e, bp_d = bp_e[order], bp_d[order]
    roots = []
    for level in (2.0, -2.0):
        f = bp_d - level
        outside = np.maximum(level * f[:-1], level * f[1:]) / abs(level)
        mask = (f[:-1] * f[1:] < 0.0) & (outside > opts.gap_floor)
        if np.any(mask):
            r = _bisect_level(evalD, bp_e[:-1][mask], bp_e[1:][mask],
                              np.sign(f[:-1][mask]), level, opts.edge_tol)
            roots.extend(float(x) for x in r)
    # critical points touching a level below the trusted excursion are double
    # edges (closed-gap tangencies); genuinely crossed levels were bisected above
    for e, d in zip(crit_e, crit_d):
        if -opts.tangency_tol <= abs(d) - 2.0 <= opts.gap_floor:
            roots.extend([float(e), float(e)])
    edges = np.sort(np.array(roots))
    if len(edges) != 2 * q:
        raise ResolutionError(
            f"grid scan found {len(edges)} band edges, expected {2 * q}; "
            "increase grid_points_per_band")
    return edges


def discrete_band_structure(v: LatticePotential,
                            opts: BandOptions | None = None) -> DiscreteBandStructure:
    """Band edges, tangency flags, and the assembled band union."""
    opts = opts or BandOptions()
    if opts.method == "eig":
        edges = _edges_eig(v)
    elif opts.method == "poly":
        edges = _edges_poly(v, opts)
    elif opts.method == "grid":
        edges = _edges_grid(v, opts)
    else:
        raise InvalidInputError(f"unknown band method {opts.method!r}")
    pairs = [(float(edges[2 * i]), float(edges[2 * i + 1])) for i in range(v.q)]
    tangencies = tuple(
        0.5 * (b + a2) for (_, b), (a2, _) in zip(pairs[:-1], pairs[1:])
        if a2 - b <= opts.tangency_tol)
    bands = normalize([Interval(a, b) for a, b in pairs], opts.merge_tol)
    if opts.check_monotone:
        _check_band_monotonicity(v, pairs, opts)
    return DiscreteBandStructure(bands, tuple(float(e) for e in edges),
                                 tangencies, len(bands))


def _check_band_monotonicity(v, pairs, opts):
    # D runs monotonically from one level to the other across each band;
    # verify with a divided difference at the band midpoint.
    mids = np.array([0.5 * (a + b) for a, b in pairs])
    widths = np.array([b - a for a, b in pairs])
    ok = widths > 16.0 * opts.edge_tol
    if not np.any(ok):
        return
    delta = np.maximum(1e-7, 1e-3 * widths[ok])
    d_hi = _discriminant_values(v.values, mids[ok] + delta)
    d_lo = _discriminant_values(v.values, mids[ok] - delta)
    d_a = _discriminant_values(v.values, np.array([a for (a, b), k in
                                                   zip(pairs, ok) if k]))
    d_b = _discriminant_values(v.values, np.array([b for (a, b), k in
                                                   zip(pairs, ok) if k]))
    slope = d_hi - d_lo
    expected = d_b - d_a
    bad = (slope * expected <= 0) & (np.abs(expected) > 1.0)
    if np.any(bad):
        raise InternalConsistencyError(
            "discriminant is not monotone across a band; edge pairing is wrong")


def discrete_bands(v: LatticePotential, opts: BandOptions | None = None) -> IntervalUnion:
    """Spectrum of the q-periodic lattice operator as a union of <= q bands."""
    return discrete_band_structure(v, opts).bands
