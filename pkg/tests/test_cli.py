import json
import os

import numpy as np
import pytest

from multiperiod import InvalidInputError
from multiperiod.cli import main, read_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestReadCsv:
    def test_plain_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1\n2\n3\n")
        series = read_csv(str(path))
        np.testing.assert_array_equal(series.values, [1.0, 2.0, 3.0])

    def test_named_column_skips_header(self, tmp_path):
        path = tmp_path / "named.csv"
        path.write_text("value\n1\n2\n")
        series = read_csv(str(path), "value")
        np.testing.assert_array_equal(series.values, [1.0, 2.0])

    def test_header_autodetected_for_index_column(self, tmp_path):
        path = tmp_path / "auto.csv"
        path.write_text("reading,other\n1,9\n2,9\n")
        series = read_csv(str(path), 0)
        np.testing.assert_array_equal(series.values, [1.0, 2.0])

    def test_second_column_by_index(self, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("1,10\n2,20\n")
        series = read_csv(str(path), 1)
        np.testing.assert_array_equal(series.values, [10.0, 20.0])

    def test_bad_cell_reports_row_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1\n2\nabc\n4\n")
        with pytest.raises(InvalidInputError, match="row 3"):
            read_csv(str(path))

    def test_rejects_nan_cells(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("1\nnan\n3\n")
        with pytest.raises(InvalidInputError, match="row 2"):
            read_csv(str(path))

    def test_missing_column_name(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(InvalidInputError, match="no column named"):
            read_csv(str(path), "c")


class TestSynthCommand:
    def test_writes_csv_and_truth(self, tmp_path, capsys):
        out = tmp_path / "series.csv"
        code, _, err = run_cli(
            capsys, "synth", "--periods", "20,50,100", "--length", "1000",
            "--seed", "7", "--output", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "value"
        assert len(lines) == 1001
        truth = json.loads(err.strip().splitlines()[-1])
        assert truth["periods"] == [20, 50, 100]

    def test_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["synth", "--periods", "20", "--length", "200", "--seed", "3"]
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        capsys.readouterr()
        assert a.read_text() == b.read_text()

    def test_invalid_spec_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "synth", "--periods", "20", "--length", "10")
        assert code == 1
        assert "error" in err


@pytest.fixture(scope="module")
def three_period_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "three.csv"
    assert main(["synth", "--periods", "20,50,100", "--length", "1000",
                 "--seed", "0", "--output", str(path)]) == 0
    return path


class TestDetectCommand:
    def test_detects_three_periods(self, three_period_csv, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, _, _ = run_cli(
            capsys, "detect", "--input", str(three_period_csv),
            "--column", "value", "--output", str(out),
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert {"periods", "levels_examined", "degenerate", "config"} <= report.keys()
        lengths = sorted(p["length"] for p in report["periods"])
        assert len(lengths) == 3
        for got, want in zip(lengths, (20.0, 50.0, 100.0)):
            assert abs(got - want) <= 0.02 * want
        record = report["periods"][0]
        assert {"length", "level", "p_value", "variance_share", "acf_median_distance"} <= record.keys()

    def test_constant_series_degenerate(self, tmp_path, capsys):
        path = tmp_path / "const.csv"
        path.write_text("\n".join(["5.0"] * 100) + "\n")
        code, out, _ = run_cli(capsys, "detect", "--input", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["degenerate"] is True
        assert report["periods"] == []

    def test_missing_file_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "detect", "--input", "/nonexistent/x.csv")
        assert code == 1
        assert err.strip()

    def test_usage_error_exits_1(self, capsys):
        code, _, _ = run_cli(capsys, "detect")  # missing --input
        assert code == 1

    def test_internal_error_exits_2(self, three_period_csv, capsys, monkeypatch):
        import multiperiod.cli as cli_module

        def boom(*args, **kwargs):
            raise RuntimeError("induced failure")

        monkeypatch.setattr(cli_module, "robust_period", boom)
        code, _, err = run_cli(capsys, "detect", "--input", str(three_period_csv))
        assert code == 2
        assert "internal error" in err

    def test_dump_diagnostics(self, three_period_csv, tmp_path, capsys):
        diag = tmp_path / "diag"
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            capsys, "detect", "--input", str(three_period_csv),
            "--output", str(out), "--dump-diagnostics", str(diag),
        )
        assert code == 0
        files = sorted(os.listdir(diag))
        assert files, "expected per-level diagnostic CSVs"
        header = (diag / files[0]).read_text().splitlines()[0]
        assert header == "index,power,robust,acf,acf_peak"

    def test_no_robust_flag(self, three_period_csv, capsys):
        code, out, _ = run_cli(
            capsys, "detect", "--input", str(three_period_csv), "--no-robust",
        )
        assert code == 0
        report = json.loads(out)
        assert report["config"]["robust_mode"] is False
        assert len(report["periods"]) == 3

    def test_config_defaults_echoed(self, three_period_csv, capsys):
        code, out, _ = run_cli(capsys, "detect", "--input", str(three_period_csv))
        assert code == 0
        config = json.loads(out)["config"]
        assert config["preprocess"]["hp_lambda"] == 1e6
        assert config["preprocess"]["clip_c"] == 3.0
        assert config["wavelet_order"] == 4
        assert config["admm"]["zeta"] == 1.0
        assert config["admm"]["rho"] == 1.0
        assert config["admm"]["eps_abs"] == 1e-4
        assert config["admm"]["eps_rel"] == 1e-4
        assert config["admm"]["max_iter"] == 50
        assert config["fisher_alpha"] == 1e-10
        assert config["acf_height"] == 0.5
        assert config["share_threshold"] == 0.05


class TestBenchCommand:
    def test_named_scenario_smoke(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        code, _, _ = run_cli(
            capsys, "bench", "--scenario", "mild", "--runs", "2",
            "--tolerance", "0.02", "--output", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert {"scenario", "runs", "tolerance", "precision", "recall", "f1",
                "mean_seconds_per_series"} <= payload.keys()
        assert payload["runs"] == 2

    def test_unknown_scenario_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "bench", "--scenario", "nope", "--runs", "1")
        assert code == 1
        assert "unknown scenario" in err
