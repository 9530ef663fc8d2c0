"""Built-in acceptance suite: quantitative checks the toolkit must satisfy.

Each criterion is a pure function returning (passed, detail); `run_acceptance`
times them and collects results, and both the `verify` CLI command and the
pytest suite drive the same functions.  Tolerances can be overridden (fault
injection lowers confidence bars deliberately, e.g. to demonstrate that a
corrupted edge tolerance breaks the band-edge checks).

The independent reference used for continuum band edges is a truncated
Fourier eigenproblem (periodic and antiperiodic sectors of the quadratic
form), built here and nowhere else, so it shares no code with the production
monodromy pathway.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .capacity import capacity_discrete_spectrum, capacity_numeric
from .floquet import (
    OdeOptions,
    PeriodicPotential,
    ScanOptions,
    band_gap_report,
    band_structure,
    compute_bands,
    _DiscriminantEvaluator,
)
from .fractal import box_dimension, check_dim_subadditivity, d_fold_sum
from .intervals import Interval, IntervalUnion, directed_hausdorff, gaps, measure, normalize
from .lattice import BandOptions, LatticePotential, discrete_bands
from .quasiperiodic import (
    AMOParams,
    ContinuumFibonacciParams,
    FibonacciParams,
    approximant_spectra,
    fibonacci_lattice,
    halfline_probe,
)

#: Wall-clock budgets (seconds) that are part of the criteria.
_BUDGETS = {
    "A1": 1.0, "A2": 1.0, "A3": 30.0, "A4": 60.0, "A5": 1.0,
    "A6": 600.0, "A7": 600.0, "A8": 300.0, "A9": 300.0, "A10": 60.0,
    "A11": 300.0, "A12": 300.0, "A13": 600.0,
}


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    passed: bool
    detail: str
    runtime: float


def _scan_opts(tol: dict) -> ScanOptions:
    return ScanOptions(edge_tol=tol["edge"], tangency_tol=tol["tangency"],
                       merge_tol=tol["merge"])


def _free_potential() -> PeriodicPotential:
    return PeriodicPotential.from_callable(lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                                           1.0, 0.0)


def _cos_potential() -> PeriodicPotential:
    return PeriodicPotential.from_cosine([0.0, 1.0])


# ---------------------------------------------------------------------------
# independent continuum band-edge reference (Fourier eigenproblem)

def _hill_oracle_edges(coeffs, n_bands: int, n_basis: int = 48) -> np.ndarray:
    """First 2*n_bands band edges of -u'' + sum_j coeffs[j] cos(2 pi j x) u.

    Periodic sector on exponentials exp(2 pi i n x), antiperiodic on
    exp(i pi (2n+1) x); both give real symmetric matrices since the potential
    is even.  Edges are the sorted union of the two lowest eigenvalue sets.
    """
    ns = np.arange(-n_basis, n_basis + 1)
    out = []
    for freqs in ((2.0 * np.pi * ns), (np.pi * (2 * ns + 1))):
        H = np.diag(freqs ** 2)
        for j, cj in enumerate(coeffs):
            if j == 0 or cj == 0.0:
                continue
            off = np.abs(ns[:, None] - ns[None, :]) == j
            H = H + 0.5 * cj * off
        if coeffs and coeffs[0]:
            H = H + coeffs[0] * np.eye(len(ns))
        out.append(np.linalg.eigvalsh(H)[: 2 * n_bands])
    return np.sort(np.concatenate(out))[: 2 * n_bands]


def _cantor_approximant(level: int, merge_tol: float = 1e-9) -> IntervalUnion:
    ivs = [(0.0, 1.0)]
    for _ in range(level):
        ivs = [piece for a, b in ivs
               for piece in ((a, a + (b - a) / 3.0), (b - (b - a) / 3.0, b))]
    return normalize(ivs, merge_tol)


# ---------------------------------------------------------------------------
# criteria

def criterion_a1(tol: dict):
    """Free continuum spectrum: single band, no gaps, edge at zero."""
    opts = _scan_opts(tol)
    free = _free_potential()
    bands = compute_bands(free, Interval(0.0, 100.0), opts)
    ok_shape = (len(bands) == 1 and bands.intervals[0].lo == 0.0
                and bands.intervals[0].hi == 100.0)
    ok_gaps = not gaps(bands, Interval(0.0, 100.0))
    edge_scan = compute_bands(free, Interval(-5.0, 100.0), opts)
    a1 = edge_scan.intervals[0].lo if edge_scan else math.inf
    ok_edge = abs(a1) <= 1e-6
    passed = ok_shape and ok_gaps and ok_edge
    return passed, f"bands={[(iv.lo, iv.hi) for iv in bands]}, lowest edge {a1:.2e}"


def criterion_a2(tol: dict):
    """Free discriminant identity on a 10^4-point grid."""
    es = np.linspace(0.0, 100.0, 10_000)
    ev = _DiscriminantEvaluator(_free_potential(), OdeOptions(), es[[0, -1]])
    err = float(np.max(np.abs(ev(es) - 2.0 * np.cos(np.sqrt(es)))))
    return err <= 1e-8, f"sup|D - 2cos(sqrt E)| = {err:.2e}"


def criterion_a3(tol: dict):
    """First five gaps of the cosine potential open beyond 1e-4, edges vs oracle.

    The gap-width requirement is checked on the independent eigenvalue
    reference so the outcome reflects the operator, not scan resolution.
    """
    oracle = _hill_oracle_edges([0.0, 1.0], 7)
    oracle_gaps = [oracle[2 * k] - oracle[2 * k - 1] for k in range(1, 6)]
    ok_widths = all(g > 1e-4 for g in oracle_gaps)
    bs = band_structure(_cos_potential(), Interval(-1.0, 290.0), _scan_opts(tol))
    solver_edges = [e for band in bs.split_bands for e in (band.lo, band.hi)]
    # the first 11 edges run through the lower edge of band 6, covering both
    # sides of the first five gaps; the window clips band 6's upper edge
    n_cmp = min(len(solver_edges), 11)
    errs = np.abs(np.array(solver_edges[:n_cmp]) - oracle[:n_cmp])
    edge_err = float(np.max(errs)) if n_cmp else math.inf
    ok_edges = n_cmp == 11 and edge_err <= 1e-6
    # diagnosis: edges found as |D| = 2 crossings hit the tolerance; edges at
    # flagged tangencies are located only to the flatness-noise limit
    crossing_es = np.array([e for e, _ in bs.edges]) if bs.edges else np.array([0.0])
    from_crossing = np.array([
        bool(np.min(np.abs(crossing_es - e)) < 1e-8) for e in solver_edges[:n_cmp]])
    err_cross = float(np.max(errs[from_crossing])) if np.any(from_crossing) else 0.0
    err_tang = float(np.max(errs[~from_crossing])) if not np.all(from_crossing) else 0.0
    n_wide = sum(1 for g in oracle_gaps if g > 1e-4)
    detail = (f"{n_wide}/5 oracle gaps exceed 1e-4 ({['%.1e' % g for g in oracle_gaps]}); "
              f"edge error {err_cross:.1e} at crossings, {err_tang:.1e} at tangency splits")
    return ok_widths and ok_edges, detail


def criterion_a4(tol: dict):
    """Perturbation bounds: band deficits and gap lengths at most 2||V||."""
    rep = band_gap_report(_cos_potential(), 20, _scan_opts(tol))
    if rep.partial or len(rep.rows) < 20:
        return False, f"only {len(rep.rows)} bands resolved"
    worst_deficit = max(abs(r.band_deficit) for r in rep.rows)
    worst_gap = max(r.gap_len for r in rep.rows)
    ok = worst_deficit <= 2.0 and worst_gap <= 2.0
    return ok, f"max |deficit| {worst_deficit:.4f}, max gap {worst_gap:.4f} (bound 2)"


def criterion_a5(tol: dict):
    """Free lattice band and shift covariance."""
    opts = BandOptions(edge_tol=tol["edge"], tangency_tol=tol["tangency"],
                       merge_tol=tol["merge"])
    free = discrete_bands(LatticePotential((0.0,)), opts)
    err0 = max(abs(free.intervals[0].lo + 2.0), abs(free.intervals[0].hi - 2.0))
    rng = np.random.default_rng(2024)
    worst = 0.0
    for c in rng.uniform(-5.0, 5.0, 100):
        b = discrete_bands(LatticePotential((float(c),)), opts)
        worst = max(worst, abs(b.intervals[0].lo - (c - 2.0)),
                    abs(b.intervals[0].hi - (c + 2.0)))
    ok = err0 <= 1e-10 and worst <= 1e-10
    return ok, f"free-band edge error {err0:.2e}, shift covariance error {worst:.2e}"


def _amo_measures(lam: float, levels, tol: dict):
    reports = approximant_spectra(AMOParams(lam=lam), levels,
                                  band_opts=BandOptions(merge_tol=tol["merge"]))
    return [(r.rational.denominator, r.measure) for r in reports]


def criterion_a6(tol: dict):
    """Coupling law for the almost-Mathieu measure at golden approximants."""
    rows = _amo_measures(0.5, [7, 8, 9], tol)          # q = 34, 55, 89
    errs_05 = [abs(m - 2.0) for _, m in rows]
    # the approach is monotone up to eigenvalue roundoff in the near-exact regime
    ok_05 = all(e <= 0.15 for e in errs_05) and all(
        b <= a + 1e-8 for a, b in zip(errs_05, errs_05[1:]))
    rows2 = _amo_measures(2.0, [7, 8, 9], tol)
    errs_2 = [abs(m - 4.0) for _, m in rows2]
    ok_2 = all(e <= 0.2 for e in errs_2)
    detail = (f"lam=0.5 |m-2|: {['%.1e' % e for e in errs_05]}; "
              f"lam=2 |m-4|: {['%.1e' % e for e in errs_2]}")
    return ok_05 and ok_2, detail


def criterion_a7(tol: dict):
    """Critical-coupling thinning trend of the almost-Mathieu measures."""
    rows = _amo_measures(1.0, [5, 6, 7, 8, 9], tol)    # q = 13 ... 89
    ms = [m for _, m in rows]
    ok = all(a > b for a, b in zip(ms, ms[1:])) and ms[-1] <= 0.5
    return ok, f"measures {['%.4f' % m for m in ms]}"


def criterion_a8(tol: dict):
    """Fibonacci zero-measure trend and approximant near-nesting."""
    reports = approximant_spectra(FibonacciParams(lam=4.0), list(range(5, 13)),
                                  band_opts=BandOptions(merge_tol=tol["merge"]))
    ms = [r.measure for r in reports]
    ok_trend = all(a > b - 1e-9 for a, b in zip(ms, ms[1:])) and ms[-1] < 0.5 * ms[0]
    worst_nest = 0.0
    for i in range(2, len(reports)):
        cover = reports[i - 1].spectrum.union(reports[i - 2].spectrum)
        worst_nest = max(worst_nest, directed_hausdorff(reports[i].spectrum, cover))
    ok_nest = worst_nest <= 1e-6
    return ok_trend and ok_nest, (
        f"measures {ms[0]:.4f}->{ms[-1]:.4f}, nesting defect {worst_nest:.2e}")


def criterion_a9(tol: dict):
    """Box-dimension estimates decrease with coupling for Fibonacci spectra."""
    opts = BandOptions(merge_tol=tol["merge"])
    weak = approximant_spectra(FibonacciParams(lam=0.5), [10], band_opts=opts)[0].spectrum
    strong = approximant_spectra(FibonacciParams(lam=8.0), [10], band_opts=opts)[0].spectrum
    d_weak = box_dimension(weak, 2.0 ** -2, 2.0 ** -12)
    d_strong = box_dimension(strong, 2.0 ** -2, 2.0 ** -12)
    sep = d_weak.slope - d_strong.slope
    return sep >= 0.1, (
        f"slope(lam=0.5) {d_weak.slope:.3f} - slope(lam=8) {d_strong.slope:.3f} = {sep:.3f}")


def criterion_a10(tol: dict):
    """Ternary-Cantor dimension and the sum-dimension inequality."""
    c10 = _cantor_approximant(10, tol["merge"])
    est = box_dimension(c10, 3.0 ** -2, 3.0 ** -9, ratio=3.0)
    target = math.log(2.0) / math.log(3.0)
    ok_dim = abs(est.slope - target) <= 0.05
    chk = check_dim_subadditivity(c10, 2, (3.0 ** -2, 3.0 ** -8), ratio=3.0)
    ok_sub = chk.satisfied
    rng = np.random.default_rng(77)
    failures = 0
    for _ in range(20):
        n = int(rng.integers(2, 65))
        los = np.sort(rng.uniform(0.0, 10.0, n))
        lens = rng.uniform(1e-4, 0.3, n)
        u = normalize([(lo, lo + ln) for lo, ln in zip(los, lens)], tol["merge"])
        if not check_dim_subadditivity(u, 2, (0.5, 0.5 / 2 ** 8)).satisfied:
            failures += 1
    ok_rand = failures == 0
    return ok_dim and ok_sub and ok_rand, (
        f"slope {est.slope:.4f} (target {target:.4f}), "
        f"subadditivity failures {failures}/20")


def criterion_a11(tol: dict):
    """Separable two-fold sums fill their gaps while 1D spectra keep them."""
    opts = _scan_opts(tol)
    window = Interval(0.0, 400.0)
    bands_1d = compute_bands(_cos_potential(), window, opts)
    total = d_fold_sum(bands_1d, 2).clip(window)
    sum_gaps = gaps(total, window)
    e0 = max((g.hi for g in sum_gaps), default=0.0)
    ok_sum = e0 < 200.0
    oracle = _hill_oracle_edges([0.0, 1.0], 7)
    oracle_gaps = [oracle[2 * k] - oracle[2 * k - 1] for k in range(1, 6)]
    ok_1d = all(g > 1e-11 for g in oracle_gaps)
    probe = halfline_probe(ContinuumFibonacciParams(lam=1.0), 2, 8, Interval(0.0, 200.0))
    top = probe.first_uncovered_gap_above
    ok_probe = (top is None or top < 200.0) and not probe.inconclusive
    return ok_sum and ok_1d and ok_probe, (
        f"sum gap-free above {e0:.2f}; five 1D gaps down to "
        f"{min(oracle_gaps):.1e}; probe E0 = {top}")


def criterion_a12(tol: dict):
    """Capacity: closed forms, the lattice lower bound, thin-but-nonpolar."""
    cap_full = capacity_numeric(normalize([(-2.0, 2.0)], tol["merge"]), 400).capacity
    cap_unit = capacity_numeric(normalize([(0.0, 1.0)], tol["merge"]), 400).capacity
    ok_closed = abs(cap_full - 1.0) <= 1e-3 and abs(cap_unit - 0.25) <= 5e-4
    rng = np.random.default_rng(5150)
    worst = 1.0
    ok_exact = True
    for _ in range(20):
        q = int(rng.integers(1, 9))
        v = LatticePotential(tuple(rng.uniform(-3.0, 3.0, q)))
        res = capacity_discrete_spectrum(v, band_opts=BandOptions(merge_tol=tol["merge"]))
        ok_exact &= res.exact == 1.0
        worst = min(worst, res.numeric.capacity)
    ok_bound = worst >= 1.0 - 5e-3
    fib = fibonacci_lattice(FibonacciParams(lam=4.0), 10)
    res_fib = capacity_discrete_spectrum(fib, band_opts=BandOptions(merge_tol=tol["merge"]))
    m_fib = measure(res_fib.spectrum)
    ok_fib = m_fib < 1.0 and res_fib.numeric.capacity >= 0.99
    return ok_closed and ok_exact and ok_bound and ok_fib, (
        f"cap[-2,2] {cap_full:.5f}, cap[0,1] {cap_unit:.5f}, lattice min {worst:.4f}, "
        f"fib measure {m_fib:.4f} cap {res_fib.numeric.capacity:.4f}")


def criterion_a13(tol: dict):
    """Byte-identical command outputs across thread budgets."""
    import tempfile
    from pathlib import Path

    from . import cli

    jobs = [
        (["bands", "--window", "0,60",
          "--potential", "kind=cosine", "--potential", "coeffs=0,1"], "bands"),
        (["discrete-bands", "--potential", "kind=amo", "--potential", "lambda=1.0",
          "--potential", "p=1", "--potential", "q=5"], "discrete-bands"),
        (["butterfly", "--set", "lambda=1.0", "--set", "q_max=8"], "butterfly"),
        (["approximants", "--set", "generator=fibonacci", "--set", "lambda=4.0",
          "--set", "levels=5:8"], "approximants"),
        (["boxdim", "--set", "eps_hi=0.25", "--set", "eps_lo=0.001"], "boxdim"),
        (["capacity", "--set", "n_nodes=200"], "capacity"),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        spec_csv = tmp / "seed.csv"
        from . import dataio
        dataio.write_intervals_csv(_cantor_approximant(6, tol["merge"]), spec_csv)
        for args, name in jobs:
            if name in ("boxdim", "capacity"):
                args = args + ["--set", f"input={spec_csv}"]
            outs = []
            for threads in (1, 4):
                out_dir = tmp / f"{name}-t{threads}"
                code = cli.main(args + ["--threads", str(threads),
                                        "--out-dir", str(out_dir)])
                if code != 0:
                    return False, f"{name} exited {code} at threads={threads}"
                outs.append({p.name: p.read_bytes()
                             for p in sorted(out_dir.iterdir())})
            if outs[0] != outs[1]:
                return False, f"{name} outputs differ across thread budgets"
    return True, f"{len(jobs)} commands byte-identical at threads 1 and 4"


_CRITERIA = [
    ("A1", criterion_a1), ("A2", criterion_a2), ("A3", criterion_a3),
    ("A4", criterion_a4), ("A5", criterion_a5), ("A6", criterion_a6),
    ("A7", criterion_a7), ("A8", criterion_a8), ("A9", criterion_a9),
    ("A10", criterion_a10), ("A11", criterion_a11), ("A12", criterion_a12),
    ("A13", criterion_a13),
]

DEFAULT_TOLERANCES = {"merge": 1e-9, "edge": 1e-9, "tangency": 1e-7, "phase": 1e-3}


def run_acceptance(tolerances: dict | None = None, threads: int = 1,
                   only=None) -> list[CriterionResult]:
    """Run all (or selected) acceptance criteria; never raises."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    results = []
    for name, fn in _CRITERIA:
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn(tol)
        except Exception as exc:            # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        if passed and elapsed > _BUDGETS[name]:
            passed = False
            detail += f" (exceeded {_BUDGETS[name]:.0f}s budget)"
        results.append(CriterionResult(name, passed, detail, elapsed))
    return results
