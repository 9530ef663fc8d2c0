"""Shared set constructions for the test suite."""

import numpy as np

from thinspec.intervals import IntervalUnion, normalize


def cantor_approximant(level: int, merge_tol: float = 1e-9) -> IntervalUnion:
    """Level-n middle-thirds construction on [0, 1]."""
    ivs = [(0.0, 1.0)]
    for _ in range(level):
        ivs = [piece for a, b in ivs
               for piece in ((a, a + (b - a) / 3.0), (b - (b - a) / 3.0, b))]
    return normalize(ivs, merge_tol)


def random_union(rng: np.random.Generator, n_max: int = 12,
                 span: float = 10.0) -> IntervalUnion:
    n = int(rng.integers(1, n_max + 1))
    los = np.sort(rng.uniform(0.0, span, n))
    lens = rng.uniform(0.01, 0.8, n)
    return normalize([(lo, lo + ln) for lo, ln in zip(los, lens)], 1e-9)
