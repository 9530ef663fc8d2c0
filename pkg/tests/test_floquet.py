import math

import numpy as np
import pytest

from thinspec.errors import ConvergenceError, InvalidInputError, ResolutionError
from thinspec.floquet import (
    OdeOptions,
    PeriodicPotential,
    ScanOptions,
    band_gap_report,
    band_structure,
    compute_bands,
    monodromy,
    propagator_constant,
    _DiscriminantEvaluator,
)
from thinspec.intervals import Interval, hausdorff_distance
from thinspec.mat2 import mat2_det


def free_potential():
    return PeriodicPotential.from_callable(
        lambda x: np.zeros_like(np.asarray(x, dtype=float)), 1.0, 0.0)


def cos_potential():
    return PeriodicPotential.from_cosine([0.0, 1.0])


class TestPropagatorConstant:
    def test_free_at_pi_squared(self):
        m = propagator_constant(0.0, 1.0, math.pi ** 2)
        assert m.a11 == pytest.approx(-1.0, abs=1e-12)
        assert m.a22 == pytest.approx(-1.0, abs=1e-12)
        assert abs(m.a12) < 1e-12 and abs(m.a21) < 1e-12

    def test_zero_length_is_identity(self):
        m = propagator_constant(3.7, 0.0, -2.0)
        assert (m.a11, m.a12, m.a21, m.a22) == (1.0, 0.0, 0.0, 1.0)

    def test_degenerate_branch(self):
        m = propagator_constant(0.0, 1.0, 0.0)
        assert (m.a11, m.a12, m.a21, m.a22) == (1.0, 0.0, 1.0, 1.0)

    def test_det_one(self, rng):
        # relative to the entry scale: the hyperbolic branch cancels cosh^2
        for _ in range(50):
            v, ell, e = rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-10, 30)
            m = propagator_constant(v, ell, e)
            scale = max(1.0, max(abs(m.a11), abs(m.a12), abs(m.a21), abs(m.a22)) ** 2)
            assert mat2_det(m) == pytest.approx(1.0, abs=1e-13 * scale)

    def test_series_matches_closed_form_at_switch(self):
        # inside the series branch the closed-form trig/hyp evaluation is
        # still accurate; the two must agree at the same tau
        for tau in (1e-9, -1e-9, 9.9e-9, -9.9e-9):
            m = propagator_constant(0.0, 1.0, tau)
            k = math.sqrt(abs(tau))
            if tau > 0:
                want = (math.cos(k), -k * math.sin(k), math.sin(k) / k, math.cos(k))
            else:
                want = (math.cosh(k), k * math.sinh(k), math.sinh(k) / k, math.cosh(k))
            got = (m.a11, m.a12, m.a21, m.a22)
            for g, w in zip(got, want):
                assert g == pytest.approx(w, abs=1e-14)

    def test_negative_length_rejected(self):
        with pytest.raises(InvalidInputError):
            propagator_constant(0.0, -1.0, 0.0)


class TestMonodromy:
    def test_free_discriminant(self):
        r = monodromy(free_potential(), 4.0)
        assert r.discriminant == pytest.approx(2.0 * math.cos(2.0), abs=1e-12)
        assert r.det_defect <= 1e-9

    def test_constant_shift(self):
        pot = PeriodicPotential.constant(3.0)
        for e in (5.0, 12.0, 40.0):
            r = monodromy(pot, e)
            assert r.discriminant == pytest.approx(
                2.0 * math.cos(math.sqrt(e - 3.0)), abs=1e-12)

    def test_below_spectrum_hyperbolic(self):
        r = monodromy(free_potential(), -1.0)
        assert r.discriminant == pytest.approx(2.0 * math.cosh(1.0), abs=1e-10)

    def test_piecewise_det_roundoff(self, rng):
        cells = [(0.3, 1.0), (0.25, -2.0), (0.45, 0.5)]
        pot = PeriodicPotential.from_cells(cells)
        for e in rng.uniform(-3, 60, 20):
            assert monodromy(pot, float(e)).det_defect <= 1e-13

    def test_free_identity_supremum(self):
        es = np.linspace(0.0, 100.0, 2000)
        ev = _DiscriminantEvaluator(free_potential(), OdeOptions(), es[[0, -1]])
        err = np.max(np.abs(ev(es) - 2.0 * np.cos(np.sqrt(es))))
        assert err <= 1e-8

    def test_rough_sampler_convergence_error(self):
        rough = PeriodicPotential.from_callable(
            lambda x: np.where(np.mod(np.asarray(x), 1.0) < 0.37, 5.0, -1.0), 1.0, 5.0)
        with pytest.raises(ConvergenceError) as err:
            monodromy(rough, 10.0, OdeOptions(tol=1e-14, max_steps=256))
        assert err.value.achieved is not None


class TestComputeBands:
    def test_free_window(self):
        bands = compute_bands(free_potential(), Interval(0.0, 100.0))
        assert [(iv.lo, iv.hi) for iv in bands] == [(0.0, 100.0)]

    def test_free_edge_detection(self):
        bands = compute_bands(free_potential(), Interval(-5.0, 100.0))
        assert abs(bands.intervals[0].lo) <= 1e-6

    def test_cosine_first_gaps_open(self):
        bs = band_structure(cos_potential(), Interval(-1.0, 50.0))
        edges = [e for iv in bs.bands for e in (iv.lo, iv.hi)]
        # gap 1 ~ (9.3665, 10.3664), gap 2 ~ (39.4763, 39.4890)
        assert edges[1] == pytest.approx(9.366458, abs=1e-4)
        assert edges[2] == pytest.approx(10.366418, abs=1e-4)
        assert edges[3] == pytest.approx(39.476307, abs=1e-4)
        assert edges[4] == pytest.approx(39.488968, abs=1e-4)

    def test_window_below_spectrum_bound_rejected(self):
        with pytest.raises(InvalidInputError):
            compute_bands(PeriodicPotential.constant(5.0), Interval(-10.0, -6.0))

    def test_empty_when_window_under_everything(self):
        # window hi above -sup_norm (precondition holds) but below the spectrum
        bands = compute_bands(PeriodicPotential.constant(2.0), Interval(-1.9, -0.5))
        assert bands.is_empty

    def test_shift_covariance(self):
        base = compute_bands(cos_potential(), Interval(-1.0, 60.0))
        shifted_pot = PeriodicPotential.from_cosine([0.7, 1.0])
        shifted = compute_bands(shifted_pot, Interval(-0.3, 60.7))
        moved = base.translate(0.7)
        assert hausdorff_distance(shifted, moved) <= 1e-6

    def test_tangency_flags_free_vs_cosine(self):
        bs_free = band_structure(free_potential(), Interval(0.0, 100.0))
        flagged = [t.energy for t in bs_free.tangencies if not t.resolved_open]
        assert len(flagged) == 3
        for k, e in enumerate(flagged, start=1):
            assert e == pytest.approx((k * math.pi) ** 2, abs=1e-4)
        bs_cos = band_structure(cos_potential(), Interval(-1.0, 50.0))
        # the first two (wide) gaps are genuine crossings, never tangency-flagged
        for t in bs_cos.tangencies:
            assert not (9.0 < t.energy < 11.0 or 39.0 < t.energy < 39.6)

    def test_wronskian_along_scan(self, rng):
        pot = cos_potential()
        for e in rng.uniform(-1, 80, 10):
            assert monodromy(pot, float(e)).det_defect <= 1e-9

    def test_band_interiors_satisfy_criterion(self, rng):
        bs = band_structure(cos_potential(), Interval(-1.0, 60.0))
        ev = _DiscriminantEvaluator(cos_potential(), OdeOptions(),
                                    np.array([0.0, 60.0]))
        for iv in bs.bands:
            xs = rng.uniform(iv.lo, iv.hi, 20)
            assert np.max(np.abs(ev(xs))) <= 2.0 + 1e-6

    def test_unresolved_accept_flag(self):
        # strongly coupled piecewise potential with minibands below any grid
        cells = []
        for ch in "10110101":
            cells.append((1.0, 50.0 if ch == "1" else 0.0))
        pot = PeriodicPotential.from_cells(cells)
        opts = ScanOptions(max_grid_refinements=0, on_unresolved="accept",
                           grid_factor=2)
        bs = band_structure(pot, Interval(0.0, 60.0), opts)
        assert isinstance(bs.resolved, bool)
        with pytest.raises(ResolutionError):
            band_structure(pot, Interval(0.0, 60.0),
                           ScanOptions(max_grid_refinements=0, grid_factor=2))


class TestBandGapReport:
    def test_free_bands(self):
        rep = band_gap_report(free_potential(), 3)
        row = rep.rows[2]
        assert row.band_len == pytest.approx(5.0 * math.pi ** 2, abs=1e-4)
        assert abs(row.band_deficit) <= 1e-4
        assert all(r.gap_len <= 1e-6 for r in rep.rows)

    def test_constant_shift_trivial(self):
        rep = band_gap_report(PeriodicPotential.constant(2.5), 3)
        assert all(abs(r.band_deficit) <= 1e-4 for r in rep.rows)
        assert all(r.gap_len <= 1e-6 for r in rep.rows)

    def test_cosine_bounds_k20(self):
        rep = band_gap_report(cos_potential(), 20)
        assert not rep.partial
        assert len(rep.rows) == 20
        for row in rep.rows:
            assert abs(row.band_deficit) <= 2.0
            assert row.gap_len <= 2.0

    def test_partial_flag(self):
        rep = band_gap_report(cos_potential(), 10, window=Interval(-1.0, 50.0))
        assert rep.partial
        assert len(rep.rows) < 10

    def test_band_count_grows_with_window(self):
        counts = [len(band_structure(cos_potential(), Interval(-1.0, hi)).split_bands)
                  for hi in (50.0, 150.0, 300.0)]
        assert counts[0] < counts[1] < counts[2]


class TestPerturbationBounds:
    def test_smooth_potentials_respect_gap_deficit_bounds(self):
        # band_gap_report itself raises if a bound fails; run several potentials
        for coeffs in ([0.0, 1.0], [0.0, 0.5, 0.3], [0.2, 0.0, 0.8]):
            pot = PeriodicPotential.from_cosine(coeffs)
            rep = band_gap_report(pot, 8)
            bound = 2.0 * pot.sup_norm_bound + 1e-4
            assert all(abs(r.band_deficit) <= bound for r in rep.rows)
            assert all(r.gap_len <= bound for r in rep.rows)


class TestTwoCellClosedForm:
    def test_monodromy_matches_square_well_dispersion(self):
        # barrier (width b, height v0) then well (width a, zero): the trace has
        # the classical closed form
        #   E < v0: 2[cos(ka)cosh(qb) + (q^2-k^2)/(2kq) sin(ka)sinh(qb)]
        #   E > v0: 2[cos(ka)cos(pb) - (p^2+k^2)/(2kp) sin(ka)sin(pb)]
        # with k = sqrt(E), q = sqrt(v0-E), p = sqrt(E-v0)
        a, b, v0 = 0.6, 0.4, 12.0
        pot = PeriodicPotential.from_cells([(b, v0), (a, 0.0)], a + b)
        for e in (1.0, 5.0, 11.0, 13.0, 30.0, 77.7):
            k = math.sqrt(e)
            if e < v0:
                q = math.sqrt(v0 - e)
                want = 2.0 * (math.cos(k * a) * math.cosh(q * b)
                              + (q * q - k * k) / (2 * k * q)
                              * math.sin(k * a) * math.sinh(q * b))
            else:
                p = math.sqrt(e - v0)
                want = 2.0 * (math.cos(k * a) * math.cos(p * b)
                              - (p * p + k * k) / (2 * k * p)
                              * math.sin(k * a) * math.sin(p * b))
            got = monodromy(pot, e).discriminant
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
