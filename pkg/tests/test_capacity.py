import numpy as np
import pytest

from util_sets import random_union
from thinspec.capacity import (
    capacity_discrete_spectrum,
    capacity_interval,
    capacity_numeric,
)
from thinspec.errors import InvalidInputError
from thinspec.intervals import measure, normalize
from thinspec.lattice import LatticePotential
from thinspec.quasiperiodic import FibonacciParams, fibonacci_lattice


class TestCapacityInterval:
    def test_closed_forms(self):
        assert capacity_interval(-2.0, 2.0) == 1.0
        assert capacity_interval(0.0, 1.0) == 0.25
        assert capacity_interval(3.0, 3.0) == 0.0

    def test_reversed_rejected(self):
        with pytest.raises(InvalidInputError):
            capacity_interval(1.0, 0.0)


class TestCapacityNumeric:
    def test_reference_intervals(self):
        full = capacity_numeric(normalize([(-2.0, 2.0)]), 400)
        assert full.capacity == pytest.approx(1.0, abs=1e-3)
        unit = capacity_numeric(normalize([(0.0, 1.0)]), 400)
        assert unit.capacity == pytest.approx(0.25, abs=5e-4)

    def test_weights_are_a_probability(self):
        solve = capacity_numeric(normalize([(-1.0, 1.0)]), 200)
        w = np.array(solve.weights)
        assert w.min() >= -1e-12
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert solve.residual <= 1e-10

    def test_symmetric_two_interval_set(self):
        u = normalize([(-2.0, -0.5), (0.5, 2.0)])
        coarse = capacity_numeric(u, 400)
        fine = capacity_numeric(u, 800)
        assert 0.375 < coarse.capacity < 1.0
        assert abs(fine.capacity - coarse.capacity) < 1e-3

    def test_scaling_law(self):
        u = normalize([(-1.0, 0.2), (0.8, 1.5)])
        base = capacity_numeric(u, 300).capacity
        for c in (0.5, 2.0, -1.0):
            scaled = capacity_numeric(u.scale(c), 300).capacity
            assert scaled == pytest.approx(abs(c) * base, rel=2e-3)

    def test_translation_invariance(self):
        u = normalize([(0.0, 1.0), (2.0, 2.7)])
        base = capacity_numeric(u, 300).capacity
        moved = capacity_numeric(u.translate(17.5), 300).capacity
        assert moved == pytest.approx(base, abs=1e-3)

    def test_monotonicity(self, rng):
        for _ in range(5):
            u = random_union(rng, n_max=4)
            bigger = u.union(random_union(rng, n_max=3))
            assert capacity_numeric(u, 250).capacity <= \
                capacity_numeric(bigger, 250).capacity + 1e-3

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            capacity_numeric(normalize([]), 100)
        with pytest.raises(InvalidInputError):
            capacity_numeric(normalize([(1.0, 1.0)]), 100)
        with pytest.raises(InvalidInputError):
            capacity_numeric(normalize([(0.0, 1.0)]), 4)


class TestDiscreteSpectrumCapacity:
    def test_free_lattice(self):
        res = capacity_discrete_spectrum(LatticePotential((0.0,)))
        assert res.exact == 1.0
        assert res.lead_defect <= 1e-12
        assert res.numeric.capacity == pytest.approx(
            capacity_interval(-2.0, 2.0), abs=1e-3)

    def test_two_site(self):
        res = capacity_discrete_spectrum(LatticePotential((0.0, 3.0)))
        assert res.exact == 1.0
        assert res.numeric.capacity == pytest.approx(1.0, abs=5e-3)

    def test_random_q4(self, rng):
        v = LatticePotential(tuple(rng.uniform(-1.0, 1.0, 4)))
        res = capacity_discrete_spectrum(v)
        assert res.exact == 1.0
        assert res.numeric.capacity == pytest.approx(1.0, abs=5e-3)

    def test_thin_but_nonpolar(self):
        v = fibonacci_lattice(FibonacciParams(lam=4.0), 8)
        res = capacity_discrete_spectrum(v)
        assert measure(res.spectrum) < 0.2
        assert res.numeric.capacity >= 1.0 - 1e-2
