import json
import math

import pytest

from util_sets import cantor_approximant, random_union
from thinspec import cli, dataio
from thinspec.errors import SchemaError
from thinspec.intervals import normalize
from thinspec.runconfig import RunConfig


class TestSerialization:
    def test_csv_roundtrip_bit_exact(self, rng, tmp_path):
        for _ in range(10):
            u = random_union(rng)
            path = tmp_path / "u.csv"
            dataio.write_intervals_csv(u, path)
            back = dataio.read_intervals_csv(path)
            assert back.intervals == u.intervals

    def test_json_roundtrip_bit_exact(self, rng):
        u = random_union(rng)
        back = dataio.intervals_from_json(dataio.intervals_to_json(u))
        assert back.intervals == u.intervals

    def test_seventeen_digits_roundtrip(self, rng):
        for x in rng.uniform(-1e6, 1e6, 200):
            assert float(dataio.fmt(float(x))) == float(x)

    def test_rejects_unknown_major(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# thinspec-csv/9 kind=intervals\nlo,hi\n0,1\n")
        with pytest.raises(SchemaError, match="major"):
            dataio.read_intervals_csv(path)

    def test_rejects_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("lo,hi\n0,1\n")
        with pytest.raises(SchemaError):
            dataio.read_intervals_csv(path)

    def test_rejects_wrong_kind(self, tmp_path):
        path = tmp_path / "bands.csv"
        dataio.write_bands_csv(normalize([(0, 1)]).intervals, path)
        with pytest.raises(SchemaError, match="kind"):
            dataio.read_intervals_csv(path)

    def test_spectrum_reader_accepts_both(self, tmp_path):
        u = normalize([(0, 1), (2, 3)])
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        dataio.write_intervals_csv(u, p1)
        dataio.write_bands_csv(u.intervals, p2)
        assert dataio.read_spectrum_csv(p1).intervals == u.intervals
        assert dataio.read_spectrum_csv(p2).intervals == u.intervals

    def test_butterfly_roundtrip(self, tmp_path):
        from thinspec.quasiperiodic import butterfly
        rows = butterfly(1.0, 4)
        path = tmp_path / "bf.csv"
        dataio.write_butterfly_csv(rows, path)
        back = dataio.read_butterfly_csv(path)
        assert len(back) == len(rows)
        for (frac, spec), row in zip(back, rows):
            assert (frac.numerator, frac.denominator) == (row.p, row.q)
            assert spec.intervals == row.spectrum.intervals


class TestRunConfig:
    def test_round_trip_lossless(self):
        cfg = RunConfig(command="bands",
                        potential={"kind": "cosine", "coeffs": "0,1", "period": "1.0"},
                        window=(-1.5, 60.25),
                        tolerances={"merge": 1e-9, "edge": 1e-10,
                                    "tangency": 1e-7, "phase": 2e-3},
                        out_dir="results", threads=4,
                        params={"summary_k": "3"})
        back = RunConfig.from_text(cfg.to_text())
        assert back == cfg

    def test_empty_config_rejected(self):
        from thinspec.errors import InvalidInputError
        with pytest.raises(InvalidInputError):
            RunConfig.from_text("")

    def test_flag_overrides(self):
        cfg = RunConfig(command="bands", tolerances={"merge": 1e-9, "edge": 1e-9,
                                                     "tangency": 1e-7, "phase": 1e-3})
        over = cfg.override(tolerances={"edge": 1e-6}, threads=8)
        assert over.tolerances["edge"] == 1e-6
        assert over.tolerances["merge"] == 1e-9
        assert over.threads == 8


class TestCommands:
    def test_bands_command(self, tmp_path):
        code = cli.main(["bands", "--window", "0,60", "--out-dir", str(tmp_path),
                         "--potential", "kind=cosine", "--potential", "coeffs=0,1"])
        assert code == 0
        bands = dataio.read_bands_csv(tmp_path / "bands.csv")
        assert bands.intervals[0].hi == pytest.approx(9.366458, abs=1e-4)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["band_count"] >= 3
        assert len(summary["first_k_gaps"]) >= 3
        assert (tmp_path / "discriminant.csv").exists()
        assert (tmp_path / "gaps.csv").exists()

    def test_free_bands_single_row(self, tmp_path):
        code = cli.main(["bands", "--window", "0,100", "--out-dir", str(tmp_path),
                         "--potential", "kind=constant", "--potential", "value=0"])
        assert code == 0
        text = (tmp_path / "bands.csv").read_text().splitlines()
        gap_rows = (tmp_path / "gaps.csv").read_text().splitlines()
        assert len(gap_rows) == 2          # schema line + header, no gaps
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["first_k_gaps"] == pytest.approx([0.0] * len(summary["first_k_gaps"]), abs=1e-6)

    def test_discrete_bands_free_row(self, tmp_path):
        code = cli.main(["discrete-bands", "--out-dir", str(tmp_path),
                         "--potential", "kind=values", "--potential", "values=0"])
        assert code == 0
        rows = (tmp_path / "bands.csv").read_text().splitlines()
        assert rows[2].startswith("1,-2,2,")

    def test_sum_command_matches_library(self, tmp_path):
        # summing two saved band CSVs equals the library output byte-for-byte
        from thinspec.fractal import minkowski_sum
        a = normalize([(0.0, 1.0), (3.0, 4.5)])
        b = normalize([(0.5, 0.75)])
        dataio.write_bands_csv(a.intervals, tmp_path / "a.csv")
        dataio.write_bands_csv(b.intervals, tmp_path / "b.csv")
        code = cli.main(["sum", "--out-dir", str(tmp_path),
                         "--set", f"inputs={tmp_path / 'a.csv'},{tmp_path / 'b.csv'}"])
        assert code == 0
        expected = tmp_path / "expected.csv"
        dataio.write_intervals_csv(minkowski_sum(a, b), expected)
        assert (tmp_path / "sum.csv").read_bytes() == expected.read_bytes()

    def test_boxdim_command_on_cantor(self, tmp_path):
        dataio.write_intervals_csv(cantor_approximant(10), tmp_path / "c.csv")
        code = cli.main(["boxdim", "--out-dir", str(tmp_path),
                         "--set", f"input={tmp_path / 'c.csv'}",
                         "--set", f"eps_hi={3.0 ** -2}",
                         "--set", f"eps_lo={3.0 ** -9}", "--set", "ratio=3"])
        assert code == 0
        summary = json.loads((tmp_path / "boxdim_summary.json").read_text())
        assert summary["slope"] == pytest.approx(math.log(2) / math.log(3), abs=0.05)

    def test_capacity_command_reference(self, tmp_path):
        dataio.write_intervals_csv(normalize([(-2.0, 2.0)]), tmp_path / "s.csv")
        code = cli.main(["capacity", "--out-dir", str(tmp_path),
                         "--set", f"input={tmp_path / 's.csv'}"])
        assert code == 0
        report = json.loads((tmp_path / "capacity.json").read_text())
        assert report["capacity"] == pytest.approx(1.0, abs=1e-3)
        assert report["exact_pathway"] is False

    def test_capacity_lattice_exact_pathway(self, tmp_path):
        code = cli.main(["capacity", "--out-dir", str(tmp_path),
                         "--potential", "kind=values", "--potential", "values=0,3"])
        assert code == 0
        report = json.loads((tmp_path / "capacity.json").read_text())
        assert report["capacity"] == 1.0
        assert report["exact_pathway"] is True

    def test_approximants_command(self, tmp_path):
        code = cli.main(["approximants", "--out-dir", str(tmp_path),
                         "--set", "generator=fibonacci", "--set", "lambda=4.0",
                         "--set", "levels=5:7"])
        assert code == 0
        lines = (tmp_path / "approximants.csv").read_text().splitlines()
        assert lines[1] == "level,p,q,measure,band_count"
        assert len(lines) == 5
        assert (tmp_path / "spectrum_level5.csv").exists()

    def test_butterfly_command_and_resume(self, tmp_path):
        args = ["butterfly", "--out-dir", str(tmp_path),
                "--set", "lambda=1.0", "--set", "q_max=5"]
        assert cli.main(args) == 0
        first = (tmp_path / "butterfly.csv").read_bytes()
        assert cli.main(args) == 0              # idempotent rerun
        assert (tmp_path / "butterfly.csv").read_bytes() == first
        rows = dataio.read_butterfly_csv(tmp_path / "butterfly.csv")
        assert rows[0][0] == 0 and rows[-1][0] == 1


class TestExitCodes:
    def test_usage_error_unknown_command(self, capsys):
        assert cli.main(["frobnicate"]) == 64
        err = capsys.readouterr().err
        assert json.loads(err)["code"] == 64

    def test_usage_error_empty_config(self, tmp_path, capsys):
        cfg = tmp_path / "empty.ini"
        cfg.write_text("")
        assert cli.main(["bands", "--config", str(cfg)]) == 64

    def test_usage_error_missing_window(self, tmp_path):
        assert cli.main(["bands", "--out-dir", str(tmp_path),
                         "--potential", "kind=constant"]) == 64

    def test_schema_error_is_usage(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("not a schema\n")
        assert cli.main(["boxdim", "--out-dir", str(tmp_path),
                         "--set", f"input={bad}"]) == 64

    def test_numeric_error_exit_two(self, tmp_path, capsys):
        # grid-mode phase union cannot converge at supercritical coupling
        code = cli.main(["butterfly", "--out-dir", str(tmp_path),
                         "--set", "lambda=2.0", "--set", "q_max=13",
                         "--set", "phase_mode=grid", "--tol.phase", "1e-9"])
        assert code == 2
        payload = json.loads(capsys.readouterr().err)
        assert payload["code"] == 2
        assert "context" in payload

    def test_partial_manifest_left_behind(self, tmp_path):
        cli.main(["butterfly", "--out-dir", str(tmp_path),
                  "--set", "lambda=2.0", "--set", "q_max=13",
                  "--set", "phase_mode=grid", "--tol.phase", "1e-9"])
        assert (tmp_path / "butterfly.manifest.json").exists()
        assert (tmp_path / "butterfly.partial.csv").exists()

    def test_resume_from_partial(self, tmp_path):
        # a failed grid-mode run leaves a partial; rerunning in the default
        # (exact-union) mode reuses the completed rows and finishes the dataset
        cli.main(["butterfly", "--out-dir", str(tmp_path),
                  "--set", "lambda=2.0", "--set", "q_max=13",
                  "--set", "phase_mode=grid", "--tol.phase", "1e-9"])
        partial_rows = len(dataio.read_butterfly_csv(tmp_path / "butterfly.partial.csv"))
        assert partial_rows >= 1
        code = cli.main(["butterfly", "--out-dir", str(tmp_path),
                         "--set", "lambda=2.0", "--set", "q_max=13"])
        assert code == 0
        assert not (tmp_path / "butterfly.partial.csv").exists()
        rows = dataio.read_butterfly_csv(tmp_path / "butterfly.csv")
        assert len(rows) == 59          # Farey-sequence size at q_max = 13
