"""Real 2x2 matrices for monodromy and transfer products."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError

#: Determinant defect tolerance for matrices produced as propagators.
DET_TOL = 1e-9


@dataclass(frozen=True)
class Mat2:
    """Row-major real 2x2 matrix [[a11, a12], [a21, a22]]."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for v in (self.a11, self.a12, self.a21, self.a22):
            if not math.isfinite(v):
                raise InvalidInputError("non-finite matrix entry")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat2_mul(self, other)


IDENTITY = Mat2(1.0, 0.0, 0.0, 1.0)


def mat2_mul(a: Mat2, b: Mat2) -> Mat2:
    return Mat2(
        a.a11 * b.a11 + a.a12 * b.a21,
        a.a11 * b.a12 + a.a12 * b.a22,
        a.a21 * b.a11 + a.a22 * b.a21,
        a.a21 * b.a12 + a.a22 * b.a22,
    )


def mat2_det(a: Mat2) -> float:
    return a.a11 * a.a22 - a.a12 * a.a21


def mat2_trace(a: Mat2) -> float:
    return a.a11 + a.a22
