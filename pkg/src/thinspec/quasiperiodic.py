"""Quasiperiodic lattice models and their periodic-approximant pipelines.

Covers the almost-Mathieu potential v(n) = 2 lambda cos(2 pi (n alpha + omega)),
the Fibonacci potential v(n) = lambda chi_[1-alpha,1)(n alpha + omega mod 1)
with alpha the inverse golden mean, and the continuum Fibonacci operator built
by substituting two profiles along the Fibonacci word.  Rational frequencies
p/q are handled by the periodic solvers; at a rational approximant the
spectrum depends on the phase, so the canonical object here is the normalized
union over a uniform phase grid (a fixed-phase mode is also exposed).

Everything in this module is deterministic; there is no randomness anywhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, InternalConsistencyError, InvalidInputError
from .floquet import PeriodicPotential, ScanOptions, band_structure
from .fractal import d_fold_sum
from .intervals import (
    DEFAULT_MERGE_TOL,
    Interval,
    IntervalUnion,
    gaps,
    hausdorff_distance,
    measure,
    normalize,
)
from .lattice import BandOptions, LatticePotential, discrete_bands

#: Inverse golden mean (sqrt(5) - 1) / 2, the Fibonacci frequency.
GOLDEN_MEAN_INV = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AMOParams:
    """Almost-Mathieu coupling, frequency, phase."""

    lam: float
    alpha: float = GOLDEN_MEAN_INV
    omega: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.lam, self.alpha, self.omega)):
            raise InvalidInputError("AMO parameters must be finite")
        if not (0.0 < self.alpha < 1.0):
            raise InvalidInputError("alpha must lie in (0, 1)")
        if not (0.0 <= self.omega < 1.0):
            raise InvalidInputError("omega must lie in [0, 1)")


@dataclass(frozen=True)
class FibonacciParams:
    """Discrete Fibonacci Hamiltonian coupling and phase (alpha is fixed)."""

    lam: float
    omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise InvalidInputError("Fibonacci coupling must be finite and >= 0")
        if not (0.0 <= self.omega < 1.0):
            raise InvalidInputError("omega must lie in [0, 1)")

    @property
    def alpha(self) -> float:
        return GOLDEN_MEAN_INV


@dataclass(frozen=True)
class ContinuumFibonacciParams:
    """Coupling, phase, and the two unit-cell profiles of the continuum model.

    f0 and f1 are piecewise-constant profiles given as ((length, value), ...)
    tiling [0, 1); the level-k potential substitutes lambda * f_letter along
    the Fibonacci word.
    """

    lam: float
    omega: float = 0.0
    f0: tuple[tuple[float, float], ...] = ((1.0, 0.0),)
    f1: tuple[tuple[float, float], ...] = ((1.0, 1.0),)

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise InvalidInputError("coupling must be finite")
        for name, cells in (("f0", self.f0), ("f1", self.f1)):
            total = 0.0
            for length, value in cells:
                if length < 0 or not math.isfinite(length) or not math.isfinite(value):
                    raise InvalidInputError(f"bad cell in {name}")
                total += length
            if abs(total - 1.0) > 1e-12:
                raise InvalidInputError(f"{name} cells must tile [0, 1); total {total}")
        if self.f0 == self.f1:
            raise InvalidInputError("f0 and f1 must differ")


@dataclass(frozen=True)
class PhaseOptions:
    """Phase handling for rational-frequency spectra.

    mode "union" (default): the exact union over all phases, computed from the
    verified sinusoidal phase structure of the discriminant (see
    exact_phase_union); falls back to "grid" if the structure check fails.
    mode "grid": literal union over the grid omega_j = j/(M q) with doubling
    until the Hausdorff distance between successive unions drops below
    phase_tol.  mode "fixed": single spectrum at the generator's own phase.
    """

    samples_per_site: int = 16      # M: the grid is omega_j = j / (M q)
    phase_tol: float = 1e-3         # Hausdorff convergence target under doubling
    max_doublings: int = 6
    mode: str = "union"


@dataclass(frozen=True)
class ApproximantReport:
    """One periodic approximant: rational frequency, spectrum, diagnostics."""

    level: int
    rational: Fraction
    spectrum: IntervalUnion
    measure: float
    band_count: int
    phase_samples: int


# ---------------------------------------------------------------------------
# continued fractions

def _float_cf_terms(alpha: float, limit: int = 64, term_tol: float = 1e-12):
    terms = []
    x = alpha
    for _ in range(limit):
        if x < term_tol:
            break
        inv = 1.0 / x
        a = int(math.floor(inv + term_tol))
        terms.append(a)
        x = inv - a
    return terms


def convergents(alpha, n: int) -> list[Fraction]:
    """First n continued-fraction convergents p/q of alpha in (0, 1).

    alpha may be a float or an explicit sequence of partial quotients
    [a1, a2, ...] meaning alpha = 1/(a1 + 1/(a2 + ...)).  Convergents are
    returned in lowest terms with q >= 2 (the trivial q = 1 approximant is
    skipped); every returned p/q satisfies |alpha - p/q| < 1/q^2.  Asking for
    more convergents than a terminating expansion provides raises.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if isinstance(alpha, (int, float)):
        a = float(alpha)
        if not (0.0 < a < 1.0):
            raise InvalidInputError("alpha must lie in (0, 1)")
        terms = _float_cf_terms(a)
        alpha_value = a
    else:
        terms = [int(t) for t in alpha]
        if any(t < 1 for t in terms):
            raise InvalidInputError("partial quotients must be >= 1")
        alpha_value = None
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    out: list[Fraction] = []
    for a_k in terms:
        p_cur, p_prev = a_k * p_cur + p_prev, p_cur
        q_cur, q_prev = a_k * q_cur + q_prev, q_cur
        if q_cur >= 2:
            out.append(Fraction(p_cur, q_cur))
            if len(out) == n:
                break
    if len(out) < n:
        raise InvalidInputError(
            f"continued-fraction expansion provides only {len(out)} convergents "
            f"with q >= 2, {n} requested")
    if alpha_value is not None:
        for frac in out:
            if abs(alpha_value - float(frac)) >= 1.0 / frac.denominator ** 2:
                raise InternalConsistencyError(
                    f"convergent {frac} violates |alpha - p/q| < 1/q^2")
    return out


# ---------------------------------------------------------------------------
# generators

def amo_sequence(pq, params: AMOParams) -> LatticePotential:
    """One period of v(n) = 2 lambda cos(2 pi (n p/q + omega)), n = 1..q."""
    frac = pq if isinstance(pq, Fraction) else Fraction(*pq)
    p, q = frac.numerator, frac.denominator
    if q < 1:
        raise InvalidInputError("q must be >= 1")
    ns = np.arange(1, q + 1)
    angles = ((ns * p) % q) / q + params.omega
    values = 2.0 * params.lam * np.cos(2.0 * np.pi * angles)
    return LatticePotential(tuple(float(x) for x in values),
                            provenance=f"amo(lam={params.lam},p/q={p}/{q},omega={params.omega})")


def _amo_phase_grid_values(p: int, q: int, lam: float, m_grid: int) -> np.ndarray:
    """Potentials on the phase grid omega_j = j/(M q), reduced to j < M.

    The spectra are invariant under omega -> omega + 1/q (an exact cyclic
    relabeling of the period window), so the M q grid points fall into M
    classes; the angle arithmetic is done on integers mod M q, which makes the
    class representatives exactly equal as float sequences.  Rows are j = 0..M-1.
    """
    ns = np.arange(1, q + 1)
    js = np.arange(m_grid)
    r = (ns[None, :] * (p * m_grid) + js[:, None]) % (m_grid * q)
    return 2.0 * lam * np.cos(2.0 * np.pi * r / (m_grid * q))


def fib_number(k: int) -> int:
    """F_k with F_1 = F_2 = 1."""
    if k < 1:
        raise InvalidInputError("Fibonacci index must be >= 1")
    a, b = 1, 1
    for _ in range(k - 2):
        a, b = b, a + b
    return b if k >= 2 else a


def _sampled_word(k: int, omega: float = 0.0) -> str:
    n = np.arange(1, fib_number(k) + 1)
    frac = np.mod(n * GOLDEN_MEAN_INV + omega, 1.0)
    return "".join("1" if f >= 1.0 - GOLDEN_MEAN_INV else "0" for f in frac)


def fibonacci_word(k: int) -> str:
    """Fibonacci 0-1 word of length F_k (F_1 = F_2 = 1).

    Built by iterating the substitution 1 -> 10, 0 -> 1 from the level-2 word
    "1", and cross-checked letter-for-letter against the circle-map sampling
    chi_[1-alpha,1)(n alpha mod 1), n = 1..F_k.  Any disagreement between the
    two constructions is a bug and raises.
    """
    if k < 1:
        raise InvalidInputError("level must be >= 1")
    if k == 1:
        word = "1"
    else:
        word = "1"
        for _ in range(k - 2):
            word = "".join("10" if ch == "1" else "1" for ch in word)
    sampled = _sampled_word(k)
    if word != sampled:
        raise InternalConsistencyError(
            f"substitution word and sampled word disagree at level {k}")
    return word


def fibonacci_lattice(params: FibonacciParams, k: int) -> LatticePotential:
    """Level-k periodic approximant of the Fibonacci potential (period F_k)."""
    if params.omega == 0.0:
        word = fibonacci_word(k)
    else:
        word = _sampled_word(k, params.omega)
    values = tuple(params.lam if ch == "1" else 0.0 for ch in word)
    return LatticePotential(values, provenance=f"fibonacci(lam={params.lam},k={k})")


# ---------------------------------------------------------------------------
# exact phase union via the sinusoidal discriminant structure

def _amo_values_at(p: int, q: int, lam: float, omega: float) -> tuple[float, ...]:
    ns = np.arange(1, q + 1)
    angles = ((ns * p) % q) / q + omega
    return tuple(float(x) for x in 2.0 * lam * np.cos(2.0 * np.pi * angles))


def _chambers_fit(p: int, q: int, lam: float):
    """Verify D(E, omega) = A(E) + R cos(2 pi q omega - phi) and locate extrema.

    Samples the discriminant on 8 phases (a full period of the q-fold angle)
    across a grid of energies and checks that nothing beyond the single
    harmonic survives above the roundoff floor of the transfer product.  The
    extremal phases are read off at the energies where the harmonic amplitude
    R stands clear of that floor; when it nowhere does, the phase sweep is
    below roundoff and the extremal phases are immaterial (any phase yields
    the union within noise).  Returns (omega_max, omega_min, R) or None when
    the single-harmonic model genuinely fails.
    """
    from .lattice import _discriminant_values

    grids = _amo_phase_grid_values(p, q, lam, 8)      # rows: omega_j = j/(8q)
    box = 2.0 + 2.0 * abs(lam)
    probes = np.linspace(-box + 0.05, box - 0.05, 33)
    thetas = 2.0 * np.pi * np.arange(8) / 8.0
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    d_mat = np.stack([_discriminant_values(tuple(row), probes) for row in grids])
    if not np.all(np.isfinite(d_mat)):
        return None
    a = d_mat.mean(axis=0)
    bc = cos_t @ d_mat / 4.0
    bs = sin_t @ d_mat / 4.0
    r = np.hypot(bc, bs)
    model = a[None, :] + bc[None, :] * cos_t[:, None] + bs[None, :] * sin_t[:, None]
    resid = np.max(np.abs(d_mat - model), axis=0)
    scale = np.abs(a) + r + 4.0
    if np.any(resid > 1e-8 * scale):
        return None
    reliable = r > 1e-6 * scale
    if not np.any(reliable):
        # sweep below roundoff everywhere: the union is phase-insensitive
        return 0.0, 0.5 / q, 0.0
    phis = np.arctan2(bs[reliable], bc[reliable])
    w = (phis / (2.0 * np.pi * q)) % (1.0 / q)
    spread = np.abs(w - w[np.argmax(r[reliable])])
    spread = np.minimum(spread, 1.0 / q - spread)
    if np.max(spread) > 1e-3 / q:
        return None
    rr = r[reliable]
    if np.max(rr) - np.min(rr) > 1e-6 * np.max(rr):
        return None
    omega_max = float(w[np.argmax(rr)])
    omega_min = (omega_max + 0.5 / q) % (1.0 / q)
    return omega_max, omega_min, float(np.max(rr))


def _alternating_set(roots: np.ndarray, start_inside: bool, box: Interval,
                     merge_tol: float) -> IntervalUnion:
    """Set built by alternating membership across sorted simple roots."""
    pieces = []
    cur = box.lo
    inside = start_inside
    for r in roots:
        e = min(max(float(r), box.lo), box.hi)
        if inside and e > cur:
            pieces.append(Interval(cur, e))
        inside = not inside
        cur = e
    if inside and box.hi > cur:
        pieces.append(Interval(cur, box.hi))
    return normalize(pieces, merge_tol)


def exact_phase_union(p: int, q: int, lam: float,
                      merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion | None:
    """Union over ALL phases of the p/q almost-Mathieu approximant spectra.

    The discriminant of the q-periodic approximant depends on the phase only
    through a single harmonic, D(E, omega) = A(E) + R cos(2 pi q omega - phi)
    (verified numerically at runtime; returns None if the check fails).  The
    energy E then belongs to the spectrum for SOME phase iff
    A(E) in [-2 - R, 2 + R], a condition whose boundary is attained at the two
    extremal phases: it is equivalent to D(., omega_min) <= 2 together with
    D(., omega_max) >= -2, i.e. an intersection of two eigenvalue-bounded
    sets (periodic eigenvalues at omega_min, antiperiodic at omega_max).
    """
    from .lattice import _floquet_matrix

    fit = _chambers_fit(p, q, lam)
    if fit is None:
        return None
    omega_max, omega_min, _ = fit
    v_min = _amo_values_at(p, q, lam, omega_min)
    v_max = _amo_values_at(p, q, lam, omega_max)
    ev_per = np.sort(np.linalg.eigvalsh(_floquet_matrix(v_min, antiperiodic=False)))
    ev_anti = np.sort(np.linalg.eigvalsh(_floquet_matrix(v_max, antiperiodic=True)))
    box = Interval(-2.0 - 2.0 * abs(lam) - 1.0, 2.0 + 2.0 * abs(lam) + 1.0)
    upper_ok = _alternating_set(ev_per, False, box, merge_tol)   # {D_min <= 2}
    lower_ok = _alternating_set(ev_anti, True, box, merge_tol)   # {D_max >= -2}
    return upper_ok.intersect(lower_ok)


# ---------------------------------------------------------------------------
# approximant pipelines

def _phase_union(p: int, q: int, lam: float, m_grid: int,
                 band_opts: BandOptions, merge_tol: float) -> IntervalUnion:
    grids = _amo_phase_grid_values(p, q, lam, m_grid)
    pieces: list[Interval] = []
    for row in grids:
        bands = discrete_bands(LatticePotential(tuple(float(x) for x in row)), band_opts)
        pieces.extend(bands.intervals)
    return normalize(pieces, merge_tol)


def _converged_phase_union(p: int, q: int, lam: float, opts: PhaseOptions,
                           band_opts: BandOptions, merge_tol: float):
    m = opts.samples_per_site
    dist = math.inf
    u_prev = _phase_union(p, q, lam, m, band_opts, merge_tol)
    for _ in range(opts.max_doublings):
        m *= 2
        u_next = _phase_union(p, q, lam, m, band_opts, merge_tol)
        dist = hausdorff_distance(u_prev, u_next) if u_prev and u_next else 0.0
        if dist < opts.phase_tol:
            return u_next, m * q, dist
        u_prev = u_next
    raise ConvergenceError(
        f"phase union did not converge at p/q={p}/{q} "
        f"(last Hausdorff distance {dist:.3e} >= {opts.phase_tol})",
        achieved=dist, target=opts.phase_tol)


def _union_spectrum(p: int, q: int, lam: float, opts: PhaseOptions,
                    band_opts: BandOptions, merge_tol: float):
    """Phase-union spectrum at p/q, per the requested mode.

    Returns (spectrum, phase_samples); phase_samples is 2 for the exact union
    (the two extremal phases carry its boundary) and the final grid size for
    the grid mode.
    """
    if opts.mode == "union":
        u = exact_phase_union(p, q, lam, merge_tol)
        if u is not None:
            return u, 2
        warnings.warn(
            f"sinusoidal phase structure check failed at p/q={p}/{q}; "
            "falling back to the grid phase union", stacklevel=2)
    return _converged_phase_union(p, q, lam, opts, band_opts, merge_tol)[:2]


def approximant_spectra(generator, levels, phase_opts: PhaseOptions | None = None,
                        band_opts: BandOptions | None = None,
                        pmap=map) -> list[ApproximantReport]:
    """Periodic-approximant spectra for an AMO or Fibonacci generator.

    generator: AMOParams (frequency approximated by its continued-fraction
    convergents; the spectrum of each approximant is the phase-grid union, or
    the fixed-phase spectrum when phase_opts.mode == "fixed") or
    FibonacciParams (level-k word approximants, no phase union).

    levels: an int (first n convergents / levels 3..n+2) or an explicit list
    of levels.  pmap may be an order-preserving parallel map.
    """
    phase_opts = phase_opts or PhaseOptions()
    band_opts = band_opts or BandOptions()
    merge_tol = band_opts.merge_tol

    if isinstance(generator, AMOParams):
        if isinstance(levels, int):
            convs = convergents(generator.alpha, levels)
            idx = list(range(1, levels + 1))
        else:
            idx = list(levels)
            convs_all = convergents(generator.alpha, max(idx))
            convs = [convs_all[i - 1] for i in idx]

        def run_amo(item):
            level, frac = item
            p, q = frac.numerator, frac.denominator
            if phase_opts.mode == "fixed":
                spec = discrete_bands(amo_sequence(frac, generator), band_opts)
                samples = 1
            else:
                spec, samples = _union_spectrum(
                    p, q, generator.lam, phase_opts, band_opts, merge_tol)
            return ApproximantReport(level, frac, spec, measure(spec),
                                     len(spec), samples)

        return list(pmap(run_amo, list(zip(idx, convs))))

    if isinstance(generator, FibonacciParams):
        ks = list(range(3, levels + 3)) if isinstance(levels, int) else list(levels)

        def run_fib(k):
            q = fib_number(k)
            frac = Fraction(fib_number(k - 1), q) if k >= 2 else Fraction(1, 1)
            spec = discrete_bands(fibonacci_lattice(generator, k), band_opts)
            return ApproximantReport(k, frac, spec, measure(spec), len(spec), 1)

        return list(pmap(run_fib, ks))

    raise InvalidInputError(f"unsupported generator {type(generator).__name__}")


@dataclass(frozen=True)
class ButterflyRow:
    p: int
    q: int
    spectrum: IntervalUnion


def butterfly(lam: float, q_max: int, phase_opts: PhaseOptions | None = None,
              band_opts: BandOptions | None = None, pmap=map) -> list[ButterflyRow]:
    """Phase-union spectra for every reduced p/q in [0, 1] with q <= q_max.

    Rows are sorted by p/q; the computation of each row is independent, so
    pmap may run them concurrently without changing the output.
    """
    if q_max < 2:
        raise InvalidInputError("q_max must be >= 2")
    phase_opts = phase_opts or PhaseOptions()
    band_opts = band_opts or BandOptions()
    fracs = sorted({Fraction(p, q)
                    for q in range(1, q_max + 1) for p in range(0, q + 1)})

    def run(frac):
        spec, _ = _union_spectrum(frac.numerator, frac.denominator, lam,
                                  phase_opts, band_opts, band_opts.merge_tol)
        return ButterflyRow(frac.numerator, frac.denominator, spec)

    return list(pmap(run, fracs))


# ---------------------------------------------------------------------------
# continuum Fibonacci

def continuum_fibonacci_potential(params: ContinuumFibonacciParams,
                                  k: int) -> PeriodicPotential:
    """Piecewise-constant period-F_k potential following the Fibonacci word.

    Each unit cell carries lambda * f_letter; feeds the continuum band solver.
    """
    if params.omega == 0.0:
        word = fibonacci_word(k)
    else:
        word = _sampled_word(k, params.omega)
    cells: list[tuple[float, float]] = []
    for ch in word:
        profile = params.f1 if ch == "1" else params.f0
        cells.extend((length, params.lam * value) for length, value in profile)
    return PeriodicPotential.from_cells(cells, period=float(len(word)))


@dataclass(frozen=True)
class HalflineProbe:
    """d-fold Minkowski sum of an approximant spectrum over a window."""

    covered: IntervalUnion
    first_uncovered_gap_above: float | None   # top of the highest gap, None if gap-free
    inconclusive: bool         # window too small for an exact sum on it
    fully_resolved: bool = True    # 1D scan had no features below its finest grid


def halfline_probe(params: ContinuumFibonacciParams, d: int, k: int,
                   window: Interval, scan_opts: ScanOptions | None = None) -> HalflineProbe:
    """Probe whether the d-fold spectrum sum covers a half-line in the window.

    Computes the level-k 1D bands on the window, forms their d-fold Minkowski
    sum clipped back to the window, and reports the upper endpoint of the
    highest remaining gap (coverage is gap-free above it).  The sum computed
    from windowed 1D data is exact below window.hi whenever the 1D spectrum
    starts at a nonnegative energy; otherwise the result is flagged
    inconclusive above the exactness bound.
    """
    if d < 2:
        raise InvalidInputError("d must be >= 2")
    if scan_opts is None:
        # the probe is resolution-qualified by design: strongly coupled
        # approximants have minibands below any finite grid
        scan_opts = ScanOptions(on_unresolved="accept")
    bs = band_structure(continuum_fibonacci_potential(params, k), window, scan_opts)
    bands_1d = bs.bands
    if bands_1d.is_empty:
        return HalflineProbe(bands_1d, None, True, bs.resolved)
    total = d_fold_sum(bands_1d, d).clip(window)
    gap_list = gaps(total, window)
    top = max((g.hi for g in gap_list), default=None)
    bottom = bands_1d.intervals[0].lo
    exact_below = window.hi + (d - 1) * min(bottom, 0.0)
    inconclusive = exact_below < window.hi and (top is None or top > exact_below)
    return HalflineProbe(total, top, inconclusive, bs.resolved)
