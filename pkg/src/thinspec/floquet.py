"""Band structure of 1D periodic continuum operators -u'' + V u = E u.

The monodromy matrix over one period is transported either exactly (for
piecewise-constant potentials, as a product of closed-form cell propagators)
or by a fourth-order Magnus integrator whose single steps are traceless-
exponential and therefore preserve det = 1 to roundoff.  The spectrum is the
set where the discriminant D(E) = tr(monodromy) satisfies |D| <= 2; band
edges are located by bisection on D -+ 2 over monotone pieces separated by
refined critical points of D.

A gap narrower than the discriminant's noise floor is indistinguishable from
a touching point of |D| = 2; such locations are reported as possibly-closed
tangency flags rather than decided either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InvalidInputError, ResolutionError, InternalConsistencyError
from .intervals import DEFAULT_MERGE_TOL, Interval, IntervalUnion, normalize
from .mat2 import DET_TOL, Mat2

#: Branch switch for the constant-cell propagator: |E - v| below this uses the
#: series limit of the trigonometric/hyperbolic formulas.
TAU_SWITCH = 1e-8

_GAUSS_C1 = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_C2 = 0.5 + math.sqrt(3.0) / 6.0
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# potential representation

@dataclass(frozen=True)
class PeriodicPotential:
    """Period-L potential in one of three representations.

    kind = "cells":   piecewise constant, cells = ((length, value), ...) tiling [0, L)
    kind = "cosine":  V(x) = sum_k coeffs[k] * cos(2 pi k x / L)
    kind = "sampler": arbitrary callable x -> V(x) (must accept numpy arrays)

    sup_norm_bound is an upper estimate of ||V||_inf used to bound the
    spectrum from below.
    """

    kind: str
    period: float
    sup_norm_bound: float
    cells: tuple[tuple[float, float], ...] | None = None
    coeffs: tuple[float, ...] | None = None
    sampler: object | None = None

    def __post_init__(self):
        if self.period <= 0 or not math.isfinite(self.period):
            raise InvalidInputError("period must be positive and finite")
        if self.sup_norm_bound < 0 or not math.isfinite(self.sup_norm_bound):
            raise InvalidInputError("sup_norm_bound must be finite and >= 0")
        if self.kind == "cells":
            if not self.cells:
                raise InvalidInputError("cells representation requires at least one cell")
            total = 0.0
            for length, value in self.cells:
                if length < 0 or not math.isfinite(length) or not math.isfinite(value):
                    raise InvalidInputError(f"bad cell ({length}, {value})")
                total += length
            if abs(total - self.period) > 1e-12 * self.period:
                raise InvalidInputError(
                    f"cell lengths sum to {total}, expected period {self.period}"
                )
        elif self.kind == "cosine":
            if self.coeffs is None or not all(math.isfinite(c) for c in self.coeffs):
                raise InvalidInputError("cosine representation requires finite coeffs")
        elif self.kind == "sampler":
            if not callable(self.sampler):
                raise InvalidInputError("sampler representation requires a callable")
        else:
            raise InvalidInputError(f"unknown potential kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_cells(cells, period: float | None = None) -> "PeriodicPotential":
        cells = tuple((float(l), float(v)) for l, v in cells)
        if period is None:
            period = sum(l for l, _ in cells)
        bound = max((abs(v) for _, v in cells), default=0.0)
        return PeriodicPotential("cells", float(period), bound, cells=cells)

    @staticmethod
    def from_cosine(coeffs, period: float = 1.0,
                    sup_norm_bound: float | None = None) -> "PeriodicPotential":
        coeffs = tuple(float(c) for c in coeffs)
        if sup_norm_bound is None:
            sup_norm_bound = sum(abs(c) for c in coeffs)
        return PeriodicPotential("cosine", float(period), float(sup_norm_bound), coeffs=coeffs)

    @staticmethod
    def from_callable(f, period: float, sup_norm_bound: float) -> "PeriodicPotential":
        return PeriodicPotential("sampler", float(period), float(sup_norm_bound), sampler=f)

    @staticmethod
    def constant(value: float, period: float = 1.0) -> "PeriodicPotential":
        return PeriodicPotential.from_cells([(period, value)], period)

    # -- evaluation ---------------------------------------------------------

    def eval(self, x):
        """Evaluate V at x (scalar or array), using periodicity."""
        x = np.asarray(x, dtype=float)
        xm = np.mod(x, self.period)
        if self.kind == "cells":
            bounds = np.cumsum([l for l, _ in self.cells])
            values = np.array([v for _, v in self.cells])
            idx = np.minimum(np.searchsorted(bounds, xm, side="right"), len(values) - 1)
            return values[idx]
        if self.kind == "cosine":
            out = np.zeros_like(xm)
            for k, c in enumerate(self.coeffs):
                if c != 0.0 or k == 0:
                    out = out + c * np.cos(2.0 * np.pi * k * xm / self.period)
            return out
        try:
            return np.asarray(self.sampler(xm), dtype=float)
        except (TypeError, ValueError):
            return np.array([float(self.sampler(float(t))) for t in np.atleast_1d(xm)])

    def shifted(self, c: float) -> "PeriodicPotential":
        """The potential V + c."""
        if self.kind == "cells":
            return PeriodicPotential(
                "cells", self.period, self.sup_norm_bound + abs(c),
                cells=tuple((l, v + c) for l, v in self.cells))
        if self.kind == "cosine":
            coeffs = list(self.coeffs) if self.coeffs else [0.0]
            coeffs[0] += c
            return PeriodicPotential(
                "cosine", self.period, self.sup_norm_bound + abs(c), coeffs=tuple(coeffs))
        f = self.sampler
        return PeriodicPotential(
            "sampler", self.period, self.sup_norm_bound + abs(c),
            sampler=lambda x, _f=f, _c=c: np.asarray(_f(x)) + _c)


@dataclass(frozen=True)
class MonodromyResult:
    """Monodromy matrix of -u'' + Vu = Eu over one period, and its trace."""

    energy: float
    phi: Mat2
    discriminant: float
    det_defect: float


@dataclass(frozen=True)
class OdeOptions:
    """Step control for the Magnus transport of the 2x2 system."""

    tol: float = 1e-10          # target accuracy of the discriminant
    initial_steps: int = 64
    max_steps: int = 1 << 21


@dataclass(frozen=True)
class ScanOptions:
    """Tolerances and grid control for band scans."""

    edge_tol: float = 1e-9       # bisection tolerance for band edges (energy units)
    tangency_tol: float = 1e-7   # ||D|-2| below this at a critical point -> flagged
    gap_floor: float = 1e-12     # smallest trusted excursion of |D|-2 into a gap
    merge_tol: float = DEFAULT_MERGE_TOL
    grid_factor: int = 4         # grid points per free-band spacing in sqrt(E)
    max_grid_refinements: int = 4
    # what to do when the critical-point census keeps changing under grid
    # refinement (spectra with structure below the finest grid): "raise" a
    # ResolutionError, or "accept" the finest scan flagged as unresolved
    on_unresolved: str = "raise"
    ode: OdeOptions = field(default_factory=OdeOptions)


@dataclass(frozen=True)
class Tangency:
    """Critical point of D whose value comes within tangency_tol of |D| = 2.

    resolved_open is True when the excursion beyond |D| = 2 exceeded the
    solver's noise floor and the adjacent gap was resolved as open anyway.
    """

    energy: float
    defect: float              # |D(E*)| - 2  (negative: inside the band)
    resolved_open: bool


@dataclass(frozen=True)
class BandStructure:
    """Result of a band scan over a window."""

    bands: IntervalUnion                 # set {|D| <= 2}, clipped to the window
    window: Interval
    split_bands: tuple[Interval, ...]    # bands additionally split at closed tangencies
    tangencies: tuple[Tangency, ...]
    edges: tuple[tuple[float, float], ...]   # (energy, level) crossings of D = +-2
    grid_size: int
    ode_steps: int
    resolved: bool = True    # False: features below the finest grid remained


# ---------------------------------------------------------------------------
# constant-cell propagator

def _cosh_sinh(z):
    """(cosh(sqrt(z)), sinh(sqrt(z))/sqrt(z)) continued through z <= 0.

    For z < 0 these are cos(sqrt(-z)) and sin(sqrt(-z))/sqrt(-z); both are
    entire functions of z, evaluated by series near z = 0.
    """
    z = np.asarray(z, dtype=float)
    c = np.empty_like(z)
    s = np.empty_like(z)
    small = np.abs(z) <= 1e-12
    pos = ~small & (z > 0)
    neg = ~small & (z < 0)
    rp = np.sqrt(z[pos])
    rn = np.sqrt(-z[neg])
    c[pos] = np.cosh(rp)
    c[neg] = np.cos(rn)
    s[pos] = np.sinh(rp) / rp
    s[neg] = np.sin(rn) / rn
    zs = z[small]
    c[small] = 1.0 + zs / 2.0 + zs * zs / 24.0
    s[small] = 1.0 + zs / 6.0 + zs * zs / 120.0
    return c, s


def propagator_constant(v: float, length: float, energy: float) -> Mat2:
    """Exact propagator of -u'' + v u = E u over a cell of constant v.

    Acts on the state (u', u).  det = 1 identically.
    """
    if length < 0 or not math.isfinite(length):
        raise InvalidInputError("cell length must be >= 0")
    if length == 0.0:
        return Mat2(1.0, 0.0, 0.0, 1.0)
    tau = energy - v
    if tau > TAU_SWITCH:
        k = math.sqrt(tau)
        return Mat2(math.cos(k * length), -k * math.sin(k * length),
                    math.sin(k * length) / k, math.cos(k * length))
    if tau < -TAU_SWITCH:
        kap = math.sqrt(-tau)
        return Mat2(math.cosh(kap * length), kap * math.sinh(kap * length),
                    math.sinh(kap * length) / kap, math.cosh(kap * length))
    # degenerate branch: series in z = -tau * length^2, converges instantly here
    z = -tau * length * length
    c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0))
    s = length * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0)))
    return Mat2(c, -tau * s, s, c)


def _cells_monodromy_arrays(V: PeriodicPotential, E: np.ndarray):
    """Vectorized-in-E monodromy for a piecewise-constant potential."""
    m11 = np.ones_like(E)
    m12 = np.zeros_like(E)
    m21 = np.zeros_like(E)
    m22 = np.ones_like(E)
    for length, value in V.cells:
        if length == 0.0:
            continue
        tau = E - value
        c, s0 = _cosh_sinh(-tau * length * length)
        s = length * s0
        p11, p12, p21, p22 = c, -tau * s, s, c
        n11 = p11 * m11 + p12 * m21
        n12 = p11 * m12 + p12 * m22
        n21 = p21 * m11 + p22 * m21
        n22 = p21 * m12 + p22 * m22
        m11, m12, m21, m22 = n11, n12, n21, n22
    return m11, m12, m21, m22


def _tree_product(e11, e12, e21, e22):
    """Ordered product P_{n-1} ... P_1 P_0 of 2x2 matrices, pairwise-reduced.

    Entry arrays have shape (n_steps, n_energies); pairing adjacent factors
    keeps the reduction depth logarithmic so numpy dispatch overhead stays
    negligible for large step counts.
    """
    while e11.shape[0] > 1:
        m = e11.shape[0]
        even = (m // 2) * 2
        a11, a12 = e11[1:even:2], e12[1:even:2]   # later step: left factor
        a21, a22 = e21[1:even:2], e22[1:even:2]
        b11, b12 = e11[0:even:2], e12[0:even:2]
        b21, b22 = e21[0:even:2], e22[0:even:2]
        n11 = a11 * b11 + a12 * b21
        n12 = a11 * b12 + a12 * b22
        n21 = a21 * b11 + a22 * b21
        n22 = a21 * b12 + a22 * b22
        if m % 2:
            n11 = np.concatenate([n11, e11[-1:]])
            n12 = np.concatenate([n12, e12[-1:]])
            n21 = np.concatenate([n21, e21[-1:]])
            n22 = np.concatenate([n22, e22[-1:]])
        e11, e12, e21, e22 = n11, n12, n21, n22
    return e11[0], e12[0], e21[0], e22[0]


#: Cap on n_steps * n_energies entries materialized at once by the Magnus
#: kernel; sized so the working set stays cache-resident.
_CHUNK_BUDGET = 131_072


def _magnus_monodromy_arrays(V: PeriodicPotential, E: np.ndarray, n_steps: int):
    """Fourth-order Magnus transport, vectorized over an energy array.

    Each step exponentiates a traceless matrix, so det = 1 holds to roundoff
    for any step count; n_steps only controls the accuracy of the entries.
    """
    E = np.asarray(E, dtype=float)
    h = V.period / n_steps
    x0 = np.arange(n_steps) * h
    v1 = np.asarray(V.eval(x0 + _GAUSS_C1 * h), dtype=float)[:, None]
    v2 = np.asarray(V.eval(x0 + _GAUSS_C2 * h), dtype=float)[:, None]
    sq3h2 = math.sqrt(3.0) * h * h / 12.0
    chunk = max(1, _CHUNK_BUDGET // n_steps)
    outs = []
    for start in range(0, len(E), chunk):
        Ec = E[start:start + chunk][None, :]
        g1 = v1 - Ec
        g2 = v2 - Ec
        gbar = 0.5 * (g1 + g2)
        d = sq3h2 * (g2 - g1)
        mu2 = d * d + (h * h) * gbar
        c, s = _cosh_sinh(mu2)
        outs.append(_tree_product(c + s * d, s * h * gbar, s * h, c - s * d))
    m11 = np.concatenate([o[0] for o in outs])
    m12 = np.concatenate([o[1] for o in outs])
    m21 = np.concatenate([o[2] for o in outs])
    m22 = np.concatenate([o[3] for o in outs])
    return m11, m12, m21, m22


class _DiscriminantEvaluator:
    """Evaluates D(E) on energy arrays, calibrating the Magnus step count once.

    For piecewise-constant potentials the evaluation is the exact cell-propagator
    product and no calibration is needed.
    """

    def __init__(self, V: PeriodicPotential, ode: OdeOptions, probe: np.ndarray):
        self.V = V
        self.ode = ode
        self.n_steps = 0
        if V.kind != "cells":
            probe = np.asarray(probe, dtype=float)
            n = max(ode.initial_steps,
                    1 << int(math.ceil(math.log2(max(2.0, 2.0 * V.period * math.sqrt(
                        max(1.0, float(np.max(probe)) + V.sup_norm_bound + 1.0)))))))
            d_prev = self._trace(probe, n)
            while True:
                d_next = self._trace(probe, 2 * n)
                err = float(np.max(np.abs(d_next - d_prev)))
                if err <= ode.tol:
                    # fourth order: the step-doubling defect bounds the error
                    # of the coarser count, so n itself meets the tolerance
                    break
                if 4 * n > ode.max_steps:
                    raise ConvergenceError(
                        f"Magnus step doubling did not reach tol={ode.tol} "
                        f"(achieved {err} at {2 * n} steps)",
                        achieved=err, target=ode.tol)
                n *= 2
                d_prev = d_next
            self.n_steps = n

    def _trace(self, E, n_steps):
        m11, _, _, m22 = _magnus_monodromy_arrays(self.V, E, n_steps)
        return m11 + m22

    def __call__(self, E) -> np.ndarray:
        E = np.asarray(E, dtype=float)
        if self.V.kind == "cells":
            m11, _, _, m22 = _cells_monodromy_arrays(self.V, E)
        else:
            m11, _, _, m22 = _magnus_monodromy_arrays(self.V, E, self.n_steps)
        return m11 + m22


def monodromy(V: PeriodicPotential, energy: float,
              ode_opts: OdeOptions | None = None) -> MonodromyResult:
    """Monodromy matrix and discriminant at a single energy.

    Columns of the matrix are the derivative/value data of the two solutions
    with (u', u)(0) = (1, 0) and (0, 1); the matrix maps (u', u)(0) to
    (u', u)(L).
    """
    if not math.isfinite(energy):
        raise InvalidInputError("energy must be finite")
    ode = ode_opts or OdeOptions()
    E = np.array([float(energy)])
    if V.kind == "cells":
        m = _cells_monodromy_arrays(V, E)
    else:
        n = max(ode.initial_steps,
                1 << int(math.ceil(math.log2(max(2.0, 2.0 * V.period * math.sqrt(
                    max(1.0, abs(energy) + V.sup_norm_bound + 1.0)))))))
        m = _magnus_monodromy_arrays(V, E, n)
        while True:
            m2 = _magnus_monodromy_arrays(V, E, 2 * n)
            err = max(float(np.abs(a - b)[0]) for a, b in zip(m, m2))
            m = m2
            if err <= ode.tol:
                break
            n *= 2
            if 2 * n > ode.max_steps:
                raise ConvergenceError(
                    f"monodromy integration did not reach tol={ode.tol}",
                    achieved=err, target=ode.tol)
    phi = Mat2(float(m[0][0]), float(m[1][0]), float(m[2][0]), float(m[3][0]))
    det = phi.a11 * phi.a22 - phi.a12 * phi.a21
    defect = abs(det - 1.0)
    # the defect contract is relative to the entry scale: far below the
    # spectrum the entries grow like cosh and the det cancellation inflates
    # roundoff by their square, with no loss of trace accuracy
    scale = max(1.0, max(abs(phi.a11), abs(phi.a12), abs(phi.a21), abs(phi.a22)) ** 2)
    if defect > DET_TOL * scale:
        raise ConvergenceError(
            f"monodromy det defect {defect:.3e} exceeds {DET_TOL} x scale {scale:.1e}",
            achieved=defect, target=DET_TOL * scale)
    return MonodromyResult(float(energy), phi, phi.a11 + phi.a22, defect)


# ---------------------------------------------------------------------------
# band scan

def _refine_extrema(evalD, lo, hi, maximize, tol):
    """Vectorized golden-section refinement of critical points of D."""
    lo = lo.copy()
    hi = hi.copy()
    n = len(lo)
    sign = np.where(maximize, 1.0, -1.0)
    while np.max(hi - lo) > tol:
        c = hi - _INVPHI * (hi - lo)
        d = lo + _INVPHI * (hi - lo)
        f = evalD(np.concatenate([c, d]))
        fc = sign * f[:n]
        fd = sign * f[n:]
        take_lo = fc >= fd         # extremum in [lo, d]
        hi = np.where(take_lo, d, hi)
        lo = np.where(take_lo, lo, c)
    x = 0.5 * (lo + hi)
    return x, evalD(x)


def _bisect_level(evalD, lo, hi, flo_sign, level, tol):
    """Vectorized bisection for D(E) = level on brackets with a sign change."""
    lo = lo.copy()
    hi = hi.copy()
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = evalD(mid) - level
        same = np.sign(fm) == flo_sign
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


#: Relative noise floor of the discriminant evaluation; differences below
#: this (times the local magnitude) do not count as critical-point evidence.
_D_NOISE_REL = 4e-13


def _scan_once(evalD, e_lo, e_hi, e_anchor, ds):
    s_lo = math.sqrt(e_lo - e_anchor)
    s_hi = math.sqrt(e_hi - e_anchor)
    n = max(16, int(math.ceil((s_hi - s_lo) / ds)) + 1)
    s = np.linspace(s_lo, s_hi, n)
    grid = e_anchor + s * s
    dvals = evalD(grid)
    diffs = np.diff(dvals)
    sign_flip = np.sign(diffs[:-1]) * np.sign(diffs[1:]) < 0
    # ignore flips produced by roundoff plateaus of huge |D| between bands
    mag = np.abs(dvals)
    local = np.maximum(np.maximum(mag[:-2], mag[1:-1]), np.maximum(mag[2:], 1.0))
    significant = (np.minimum(np.abs(diffs[:-1]), np.abs(diffs[1:]))
                   > _D_NOISE_REL * local)
    idx = np.nonzero(sign_flip & significant)[0] + 1
    return grid, dvals, idx


def band_structure(V: PeriodicPotential, window: Interval,
                   opts: ScanOptions | None = None) -> BandStructure:
    """Scan the discriminant over a window and assemble the band set.

    Returns the band union together with edge crossings and tangency flags.
    The scan grid is uniform in sqrt(E) so free-case band edges stay equally
    spaced; it is doubled until the critical-point census stabilizes, after
    which every edge is refined by bisection to edge_tol.
    """
    opts = opts or ScanOptions()
    sup = V.sup_norm_bound
    if window.hi <= -sup:
        raise InvalidInputError(
            f"window ends at {window.hi} but the spectrum lies in [{-sup}, inf)")
    pad = 1e-3 * (1.0 + sup)
    e_lo = max(window.lo, -sup - pad)
    e_hi = window.hi
    if e_lo >= e_hi:
        return BandStructure(IntervalUnion((), opts.merge_tol), window, (), (), (), 0, 0)
    e_anchor = min(e_lo, -sup) - 1.0

    evalD = _DiscriminantEvaluator(V, opts.ode, np.array([e_lo, 0.5 * (e_lo + e_hi), e_hi]))

    ds = (math.pi / V.period) / opts.grid_factor
    resolved = True
    grid, dvals, ext_idx = _scan_once(evalD, e_lo, e_hi, e_anchor, ds)
    for _ in range(opts.max_grid_refinements):
        grid2, dvals2, ext_idx2 = _scan_once(evalD, e_lo, e_hi, e_anchor, ds / 2.0)
        if len(ext_idx2) == len(ext_idx):
            grid, dvals, ext_idx = grid2, dvals2, ext_idx2
            break
        grid, dvals, ext_idx, ds = grid2, dvals2, ext_idx2, ds / 2.0
    else:
        if opts.on_unresolved != "accept":
            raise ResolutionError(
                "critical-point census kept changing under grid refinement; "
                "rerun with a larger grid_factor or max_grid_refinements, or "
                "set on_unresolved='accept' for a resolution-qualified scan")
        resolved = False

    # refine the critical points of D
    tangencies: list[Tangency] = []
    if len(ext_idx) > 0:
        lo_b = grid[ext_idx - 1]
        hi_b = grid[ext_idx + 1]
        maximize = dvals[ext_idx] >= dvals[ext_idx - 1]
        crit_e, crit_d = _refine_extrema(evalD, lo_b, hi_b, maximize, opts.edge_tol)
    else:
        crit_e = np.array([])
        crit_d = np.array([])

    # monotone pieces between consecutive breakpoints
    bp_e = np.concatenate([[grid[0]], crit_e, [grid[-1]]])
    bp_d = np.concatenate([[dvals[0]], crit_d, [dvals[-1]]])
    order = np.argsort(bp_e)
    bp_e, bp_d = bp_e[order], bp_d[order]

    crossings: list[tuple[float, float]] = []
    for level in (2.0, -2.0):
        f = bp_d - level
        # require a sign change whose outside excursion beyond the level
        # exceeds the noise floor, else the piece is treated as tangent
        outside = np.maximum(level * f[:-1], level * f[1:]) / abs(level)
        mask = (f[:-1] * f[1:] < 0.0) & (outside > opts.gap_floor)
        if np.any(mask):
            lo_b = bp_e[:-1][mask]
            hi_b = bp_e[1:][mask]
            flo_sign = np.sign(f[:-1][mask])
            roots = _bisect_level(evalD, lo_b, hi_b, flo_sign, level, opts.edge_tol)
            crossings.extend((float(r), level) for r in roots)
    crossings.sort()

    # classify the segments between crossings by |D| at the midpoint
    pts = [e_lo] + [c[0] for c in crossings] + [e_hi]
    segs = []
    mids = np.array([0.5 * (a + b) for a, b in zip(pts[:-1], pts[1:])])
    if len(mids) > 0:
        dm = np.abs(evalD(mids))
        for (a, b), v in zip(zip(pts[:-1], pts[1:]), dm):
            if v <= 2.0 and b > a:
                segs.append(Interval(a, b))
    bands = normalize(segs, opts.merge_tol).clip(window)

    # tangency flags at critical points approaching |D| = 2
    for e_star, d_star in zip(crit_e, crit_d):
        defect = abs(d_star) - 2.0
        if abs(defect) < opts.tangency_tol:
            tangencies.append(Tangency(float(e_star), float(defect),
                                       resolved_open=defect > opts.gap_floor))
    tangencies.sort(key=lambda t: t.energy)

    # split bands at closed (unresolved) tangency points for per-band reporting
    split: list[Interval] = []
    for band in bands:
        cuts = [t.energy for t in tangencies
                if not t.resolved_open and band.lo < t.energy < band.hi]
        edges_k = [band.lo] + cuts + [band.hi]
        split.extend(Interval(a, b) for a, b in zip(edges_k[:-1], edges_k[1:]))

    return BandStructure(bands, window, tuple(split), tuple(tangencies),
                         tuple(crossings), len(grid), evalD.n_steps, resolved)


def compute_bands(V: PeriodicPotential, window: Interval,
                  opts: ScanOptions | None = None) -> IntervalUnion:
    """Band set {E in window : |D(E)| <= 2} as an IntervalUnion."""
    return band_structure(V, window, opts).bands


# ---------------------------------------------------------------------------
# per-band reporting

@dataclass(frozen=True)
class BandGapRow:
    k: int
    band: Interval
    band_len: float
    gap_len: float           # length of the gap following band k (0 at a tangency)
    band_deficit: float      # pi^2 (2k-1) / L^2 - |B_k|


@dataclass(frozen=True)
class BandGapReport:
    rows: tuple[BandGapRow, ...]
    partial: bool            # True when fewer than k_max bands fit the scan window
    tangency_count: int


#: Additive numerical slack for the perturbation bounds checked by band_gap_report.
DEFICIT_SLACK = 1e-4


def band_gap_report(V: PeriodicPotential, k_max: int,
                    opts: ScanOptions | None = None,
                    window: Interval | None = None) -> BandGapReport:
    """Per-band statistics for the first k_max bands.

    Bands are counted in the Floquet sense: a flagged closed tangency splits
    the touching bands (the free potential has bands [(k-1)^2, k^2] pi^2 / L^2
    touching at every k^2 pi^2 / L^2).  Checks the perturbation bounds
    |deficit| <= 2 ||V||_inf and |G_k| <= 2 ||V||_inf on every reported row.
    """
    if k_max < 1:
        raise InvalidInputError("k_max must be >= 1")
    opts = opts or ScanOptions()
    L = V.period
    if window is None:
        hi = ((k_max + 1) * math.pi / L) ** 2 + 2.0 * V.sup_norm_bound + 1.0
        window = Interval(-V.sup_norm_bound - 1.0, hi)
    bs = band_structure(V, window, opts)
    blist = bs.split_bands
    partial = len(blist) < k_max + 1
    rows = []
    n_rows = min(k_max, len(blist))
    for k in range(1, n_rows + 1):
        band = blist[k - 1]
        gap = blist[k].lo - band.hi if k < len(blist) else 0.0
        free_len = math.pi ** 2 * (2 * k - 1) / (L * L)
        deficit = free_len - band.length
        rows.append(BandGapRow(k, band, band.length, gap, deficit))
    if not partial:
        bound = 2.0 * V.sup_norm_bound + DEFICIT_SLACK
        for row in rows:
            if abs(row.band_deficit) > bound or row.gap_len > bound:
                raise InternalConsistencyError(
                    f"band {row.k} violates the perturbation bound: "
                    f"deficit {row.band_deficit}, gap {row.gap_len}, bound {bound}")
    return BandGapReport(tuple(rows), partial, len(bs.tangencies))
