"""Acceptance: render the q <= 30 unit-coupling butterfly dataset.

The dataset is produced by the solver CLI (the package boundary is the CSV);
the band rows must be symmetric under E -> -E, the figure must render with
exit 0, and a corrupted header must be rejected with a nonzero exit.
"""

import shutil
import subprocess
from collections import defaultdict

import pytest

from thinspec_plots import butterfly as butterfly_mod
from thinspec_plots.schema import read_butterfly

pytestmark = pytest.mark.skipif(shutil.which("thinspec") is None,
                                reason="solver CLI not installed")


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("butterfly-q30")
    subprocess.run(["thinspec", "butterfly", "--set", "lambda=1.0",
                    "--set", "q_max=30", "--out-dir", str(out)],
                   check=True, timeout=560)
    return out / "butterfly.csv"


def test_rows_symmetric_under_energy_negation(dataset):
    bands = read_butterfly(dataset)
    by_freq = defaultdict(list)
    for b in bands:
        by_freq[b.frequency].append((b.lo, b.hi))
    assert len(by_freq) == 279          # reduced fractions in [0, 1] with q <= 30
    for freq, ivs in by_freq.items():
        mirrored = sorted((-hi, -lo) for lo, hi in ivs)
        direct = sorted(ivs)
        assert len(mirrored) == len(direct)
        for (alo, ahi), (blo, bhi) in zip(direct, mirrored):
            assert abs(alo - blo) <= 1e-8 and abs(ahi - bhi) <= 1e-8, freq


def test_figure_renders_exit_zero(dataset, tmp_path):
    out = tmp_path / "butterfly.png"
    assert butterfly_mod.main([str(dataset), "--out", str(out)]) == 0
    assert out.stat().st_size > 5000


def test_corrupted_header_rejected(dataset, tmp_path):
    corrupted = tmp_path / "corrupted.csv"
    corrupted.write_text(dataset.read_text().replace("kind=butterfly", "kind=mystery"))
    code = butterfly_mod.main([str(corrupted), "--out", str(tmp_path / "x.png")])
    assert code != 0
