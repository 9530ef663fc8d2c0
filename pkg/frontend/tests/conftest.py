import pytest

from util_csv import (
    write_approximants_csv,
    write_bands_csv,
    write_butterfly_csv,
    write_discriminant_csv,
)


@pytest.fixture
def butterfly_csv(tmp_path):
    path = tmp_path / "butterfly.csv"
    write_butterfly_csv(path, [
        (0, 1, 0, -2.0, 2.0),
        (1, 2, 0, -2.828, -0.01),
        (1, 2, 1, 0.01, 2.828),
        (1, 1, 0, -2.0, 2.0),
    ])
    return path


@pytest.fixture
def bands_csv(tmp_path):
    path = tmp_path / "bands.csv"
    write_bands_csv(path, [
        (1, 0.0, 9.37, 1.0),
        (2, 10.37, 39.48, 0.013),
        (3, 39.49, 88.83, 0.0),
    ])
    return path


@pytest.fixture
def discriminant_csv(tmp_path):
    import math
    path = tmp_path / "discriminant.csv"
    rows = [(e, 2.0 * math.cos(math.sqrt(e))) for e in
            [0.01 * k for k in range(1, 5000, 7)]]
    write_discriminant_csv(path, rows)
    return path


@pytest.fixture
def approximants_csv(tmp_path):
    path = tmp_path / "approximants.csv"
    write_approximants_csv(path, [
        (5, 3, 5, 0.574, 5),
        (6, 5, 8, 0.341, 8),
        (7, 8, 13, 0.186, 13),
    ])
    return path
