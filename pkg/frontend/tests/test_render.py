import hashlib

from thinspec_plots import bands as bands_mod
from thinspec_plots import butterfly as butterfly_mod
from thinspec_plots import trend as trend_mod


def test_butterfly_renders(butterfly_csv, tmp_path):
    out = tmp_path / "fig.png"
    code = butterfly_mod.main([str(butterfly_csv), "--out", str(out)])
    assert code == 0
    assert out.stat().st_size > 1000


def test_bands_renders_with_overlay(bands_csv, discriminant_csv, tmp_path):
    out = tmp_path / "bands.png"
    code = bands_mod.main([str(bands_csv), "--discriminant", str(discriminant_csv),
                           "--out", str(out), "--window", "0,50"])
    assert code == 0
    assert out.stat().st_size > 1000


def test_trend_renders(approximants_csv, tmp_path):
    out = tmp_path / "trend.png"
    code = trend_mod.main([str(approximants_csv), "--out", str(out), "--log-y"])
    assert code == 0
    assert out.stat().st_size > 1000


def test_corrupted_header_nonzero_exit(butterfly_csv, tmp_path, capsys):
    text = butterfly_csv.read_text().replace("thinspec-csv/1", "thinspec-csv/9")
    bad = tmp_path / "corrupt.csv"
    bad.write_text(text)
    code = butterfly_mod.main([str(bad), "--out", str(tmp_path / "x.png")])
    assert code != 0
    assert "major" in capsys.readouterr().err


def test_rendering_never_modifies_inputs(butterfly_csv, tmp_path):
    before = butterfly_csv.read_bytes()
    butterfly_mod.main([str(butterfly_csv), "--out", str(tmp_path / "a.png")])
    assert butterfly_csv.read_bytes() == before


def test_rerun_overwrites_idempotently(butterfly_csv, tmp_path):
    out = tmp_path / "same.png"
    assert butterfly_mod.main([str(butterfly_csv), "--out", str(out)]) == 0
    first = hashlib.sha256(out.read_bytes()).hexdigest()
    assert butterfly_mod.main([str(butterfly_csv), "--out", str(out)]) == 0
    assert hashlib.sha256(out.read_bytes()).hexdigest() == first
