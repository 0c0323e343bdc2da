"""Command-line contract: reproducible tables, config round trip, exits."""

import json
import math

import pytest

from scottlab.cli import (
    CONFIG_PREFIX,
    RunConfig,
    UsageError,
    config_from_args,
    main,
    read_config,
)


def run_to_file(argv, path):
    status = main(argv + ["--out", str(path)])
    return status, path.read_bytes()


class TestHydrogen:
    def test_prints_exact_sum(self, capsys):
        assert main(["hydrogen", "--z", "1", "--h", "0.1"]) == 0
        out = capsys.readouterr().out
        assert "-70" in out
        assert out.startswith(CONFIG_PREFIX)

    def test_value_survives_text_round_trip(self, tmp_path):
        status, data = run_to_file(
            ["hydrogen", "--z", "1", "--h", "0.1"], tmp_path / "hy.csv"
        )
        assert status == 0
        last = data.decode().rstrip("\n").splitlines()[-1]
        z, h, total = last.split(",")
        assert float(total) == -70.0
        assert float(z) == 1.0 and float(h) == 0.1

    def test_expansion_metadata_uses_exact_fractions(self, tmp_path):
        path = tmp_path / "hy.csv"
        status, _ = run_to_file(
            ["hydrogen", "--z", "1", "--h", "0.1", "--k", "5"], path
        )
        assert status == 0
        sidecar = json.loads((tmp_path / "hy.csv.meta.json").read_text())
        exp = sidecar["meta"]["expansion"]
        assert exp["remainder"] == "5/6"
        assert exp["sum"] == "-70"
        assert exp["h"] == "1/10"


class TestWeyl:
    def test_reference_value_full_precision(self, tmp_path):
        path = tmp_path / "weyl.csv"
        status, data = run_to_file(
            ["weyl", "--n", "3", "--potential", "coulomb", "--z", "1",
             "--shift", "1", "--h", "1"],
            path,
        )
        assert status == 0
        value = float(data.decode().rstrip("\n").splitlines()[-1].split(",")[-1])
        assert value == pytest.approx(-1.0 / 12.0, abs=1e-6)
        # 17 significant digits wrote the double exactly
        assert format(value, ".17g") in data.decode()

    def test_divergent_integral_is_a_solver_failure(self, tmp_path, capsys):
        # 1D Coulomb: |V_-|^(3/2) is not integrable at the origin
        status = main(
            ["weyl", "--n", "1", "--potential", "coulomb", "--shift", "1",
             "--out", str(tmp_path / "x.csv")]
        )
        assert status == 1
        assert "failed" in capsys.readouterr().err


class TestDeterminism:
    def test_csv_identical_across_three_runs(self, tmp_path):
        path = tmp_path / "out.csv"
        argv = ["weyl", "--n", "3", "--potential", "coulomb", "--z", "2",
                "--shift", "1", "--h", "0.5"]
        blobs = {run_to_file(argv, path)[1] for _ in range(3)}
        assert len(blobs) == 1

    def test_line_endings_are_bare_lf(self, tmp_path):
        _, data = run_to_file(
            ["hydrogen", "--z", "1", "--h", "0.1"], tmp_path / "o.csv"
        )
        assert b"\r" not in data
        assert data.endswith(b"\n")


class TestConfigRoundTrip:
    def test_header_line_parses_back(self):
        cfg = RunConfig(
            command="hydrogen",
            parameters={"z": 1.0, "h": 0.1, "strict": False},
            output_path="table.csv",
            format="csv",
        )
        again = RunConfig.from_header_line(cfg.to_header_line())
        assert again == cfg

    def test_written_file_reproduces_config(self, tmp_path):
        path = tmp_path / "w.csv"
        argv = ["weyl", "--n", "1", "--potential", "well", "--h", "0.5",
                "--out", str(path)]
        assert main(argv) == 0
        cfg = read_config(str(path))
        assert cfg.command == "weyl"
        assert cfg.parameters["potential"] == "well"
        # replaying the recovered argv parses to the identical config
        assert config_from_args(cfg.to_argv()) == cfg

    def test_json_document_round_trips(self, tmp_path):
        path = tmp_path / "w.json"
        argv = ["weyl", "--h", "1", "--format", "json", "--out", str(path)]
        assert main(argv) == 0
        doc = json.loads(path.read_text())
        assert set(doc) == {"config_header", "columns", "rows", "meta", "warnings"}
        assert doc["columns"] == ["n", "z", "shift", "h", "weyl"]
        assert doc["rows"][0][-1] == pytest.approx(-1.0 / 12.0, abs=1e-6)
        cfg = read_config(str(path))
        assert cfg.format == "json"

    def test_rejects_foreign_header(self):
        with pytest.raises(UsageError, match="config header"):
            RunConfig.from_header_line("# something else")


class TestValidation:
    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_increasing_h_sequence_exits_two(self, capsys):
        assert main(["scott", "--z", "1", "--h", "0.05,0.12"]) == 2
        assert "usage error" in capsys.readouterr().err

    def test_nonnumeric_h_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["scott", "--z", "1", "--h", "abc"])
        assert exc.value.code == 2

    def test_bad_a_rule_exits_two(self, capsys):
        status = main(["coherent-check", "--h", "0.4", "--a-rule", "bogus^2"])
        assert status == 2
        assert "a-rule" in capsys.readouterr().err

    def test_config_class_rejects_bad_fields(self):
        with pytest.raises(UsageError, match="unknown command"):
            RunConfig(command="nope", parameters={})
        with pytest.raises(UsageError, match="unknown format"):
            RunConfig(command="hydrogen", parameters={}, format="xml")
        with pytest.raises(UsageError, match="strictly decreasing"):
            RunConfig(
                command="scott",
                parameters={"h_values": (0.05, 0.12)},
            )


class TestStrictMode:
    def test_narrow_fit_range_warns_and_strict_fails(self, tmp_path, capsys):
        # h spanning less than a factor 2 leaves the power fit
        # ill-conditioned; the pipeline records the warning
        argv = ["local-trace", "--n", "1", "--potential", "well",
                "--h", "0.4,0.3", "--bump-radius", "2.5"]
        path = tmp_path / "lt.csv"
        assert main(argv + ["--out", str(path)]) == 0
        assert "factor 2" in capsys.readouterr().err
        sidecar = json.loads((tmp_path / "lt.csv.meta.json").read_text())
        assert any("factor 2" in w for w in sidecar["warnings"])

        strict_path = tmp_path / "lt2.csv"
        assert main(argv + ["--strict", "--out", str(strict_path)]) == 1
        # the table is still written for inspection
        assert strict_path.exists()

    def test_clean_run_passes_strict(self, tmp_path):
        argv = ["hydrogen", "--z", "1", "--h", "0.1", "--strict"]
        assert main(argv + ["--out", str(tmp_path / "h.csv")]) == 0


class TestTfAtomCommand:
    def test_tables_and_metadata(self, tmp_path):
        path = tmp_path / "tf.csv"
        status, data = run_to_file(["tf-atom", "--z", "1"], path)
        assert status == 0
        text = data.decode()
        header = [l for l in text.splitlines() if not l.startswith("#")][0]
        assert header == "r,v_tf,rho_tf"
        sidecar = json.loads((tmp_path / "tf.csv.meta.json").read_text())
        meta = sidecar["meta"]
        assert meta["initial_slope"] == pytest.approx(-1.588071, abs=1e-4)
        assert meta["E_TF"] == pytest.approx(-0.7687, rel=1e-3)


class TestCoherentCheckCommand:
    def test_single_h_row(self, tmp_path):
        path = tmp_path / "cc.csv"
        status, data = run_to_file(["coherent-check", "--h", "0.4"], path)
        assert status == 0
        lines = [l for l in data.decode().splitlines() if not l.startswith("#")]
        assert lines[0] == (
            "h,a,b,weight_dev,resolution_dev,cancellation,"
            "representation_err,err_over_h2b"
        )
        row = dict(zip(lines[0].split(","), map(float, lines[1].split(","))))
        assert row["h"] == 0.4
        assert row["a"] == pytest.approx(0.4**-0.8)
        assert row["weight_dev"] < 1e-8
        assert row["resolution_dev"] < 1e-6
        assert abs(row["cancellation"]) < 1e-8
        assert row["err_over_h2b"] == pytest.approx(
            1.0 + (row["h"] * row["a"]) ** 2, rel=0.05
        )
