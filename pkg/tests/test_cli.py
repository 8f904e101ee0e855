"""End-to-end CLI tests (in-process calls to main())."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from qkmeans.cli import _builtin_config_text, main, read_score_table
from qkmeans.errors import DataError
from qkmeans.iqdata import (
    coupling_to_dict,
    crosstalk_demo_model,
    default_coupling_map,
    default_readout_model,
    load_table,
    model_to_dict,
)

FIXTURE = Path(__file__).parent / "data" / "reference_named_coefficients.csv"


def manifest_without_timestamp(path: Path) -> dict:
    payload = json.loads(path.read_text())
    payload.pop("timestamp")
    return payload


class TestSynth:
    def test_writes_table_and_manifest(self, tmp_path):
        code = main(["synth", "--shots", "8", "--seed", "3", "--out", str(tmp_path)])
        assert code == 0
        table = load_table(tmp_path / "iq_shots.csv")
        assert len(table) == 4 * 2 * 4 * 8  # edges x qubits x schedules x shots
        manifest = json.loads((tmp_path / "synth_manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["seed"] == 3
        assert manifest["config_paths"]["model"] == "builtin:default_model.json"
        assert manifest["outputs"] == ["iq_shots.csv"]

    def test_byte_identical_across_runs(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            assert main(["synth", "--shots", "16", "--seed", "1", "--out", str(out)]) == 0
        assert (a / "iq_shots.csv").read_bytes() == (b / "iq_shots.csv").read_bytes()
        assert manifest_without_timestamp(
            a / "synth_manifest.json"
        ) == manifest_without_timestamp(b / "synth_manifest.json")

    def test_crosstalk_preset(self, tmp_path):
        code = main([
            "synth", "--preset", "crosstalk", "--shots", "8", "--out", str(tmp_path)
        ])
        assert code == 0
        manifest = json.loads((tmp_path / "synth_manifest.json").read_text())
        assert manifest["config_paths"]["model"] == "builtin:crosstalk_model.json"

    def test_explicit_config_files(self, tmp_path):
        model_path = tmp_path / "model.json"
        coupling_path = tmp_path / "coupling.json"
        model_path.write_text(json.dumps(model_to_dict(default_readout_model())))
        coupling_path.write_text(json.dumps(coupling_to_dict(default_coupling_map())))
        out = tmp_path / "out"
        code = main([
            "synth", "--model", str(model_path), "--coupling", str(coupling_path),
            "--shots", "4", "--out", str(out),
        ])
        assert code == 0
        manifest = json.loads((out / "synth_manifest.json").read_text())
        assert manifest["config_paths"]["model"] == str(model_path)

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        target = tmp_path / "from-env"
        monkeypatch.setenv("QKMEANS_OUTPUT_DIR", str(target))
        assert main(["synth", "--shots", "4"]) == 0
        assert (target / "iq_shots.csv").exists()

    def test_bad_shots_is_config_error(self, tmp_path):
        assert main(["synth", "--shots", "0", "--out", str(tmp_path)]) == 1

    def test_missing_model_file(self, tmp_path):
        code = main([
            "synth", "--model", str(tmp_path / "absent.json"), "--out", str(tmp_path)
        ])
        assert code == 1

    def test_invalid_model_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["synth", "--model", str(bad), "--out", str(tmp_path)]) == 1


@pytest.fixture(scope="module")
def shot_table_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("shots")
    assert main(["synth", "--shots", "64", "--seed", "2", "--out", str(path)]) == 0
    return path


class TestBenchmark:
    def test_classical_scores(self, shot_table_dir, tmp_path):
        code = main([
            "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--algo", "kmeans", "--splits", "2", "--seed", "4",
            "--out", str(tmp_path),
        ])
        assert code == 0
        scores = read_score_table(tmp_path / "scores.csv")
        pairs = {key[0] for key in scores}
        assert pairs == {(0, 1), (1, 2), (2, 3), (3, 4)}
        kinds = {key[2] for key in scores}
        assert kinds == {"single", "both"}
        assert all(0.0 <= v <= 1.0 for v in scores.values())
        txt = (tmp_path / "scores.txt").read_text()
        assert "# pair 0-1" in txt
        assert "q0, single, " in txt

    def test_quantum_exact_scores(self, shot_table_dir, tmp_path):
        code = main([
            "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--algo", "qkmeans", "--mode", "exact", "--splits", "2",
            "--out", str(tmp_path),
        ])
        assert code == 0
        scores = read_score_table(tmp_path / "scores.csv")
        assert len(scores) == 16  # 4 pairs x 2 qubits x 2 kinds

    def test_fm_metric_rows_are_skipped_by_score_reader(
        self, shot_table_dir, tmp_path
    ):
        code = main([
            "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--algo", "kmeans", "--metric", "fm", "--splits", "2",
            "--out", str(tmp_path),
        ])
        assert code == 0
        # reader keys off AssignmentFidelity rows only
        assert read_score_table(tmp_path / "scores.csv") == {}
        body = (tmp_path / "scores.csv").read_text()
        assert "FowlkesMallows" in body

    def test_deterministic(self, shot_table_dir, tmp_path):
        outs = []
        for name in ("x", "y"):
            out = tmp_path / name
            assert main([
                "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
                "--algo", "kmeans", "--splits", "3", "--seed", "0",
                "--out", str(out),
            ]) == 0
            outs.append(out)
        assert (outs[0] / "scores.csv").read_bytes() == (outs[1] / "scores.csv").read_bytes()
        assert (outs[0] / "scores.txt").read_bytes() == (outs[1] / "scores.txt").read_bytes()

    def test_missing_data_file(self, tmp_path):
        code = main([
            "benchmark", "--data", str(tmp_path / "absent.csv"), "--out", str(tmp_path)
        ])
        assert code == 1

    def test_malformed_data_file(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("pair,qubit,schedule,shot,i,q\n0-1,0,77,0,1.0,2.0\n")
        code = main(["benchmark", "--data", str(bad), "--out", str(tmp_path)])
        assert code == 2

    def test_bad_splits(self, shot_table_dir, tmp_path):
        code = main([
            "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--splits", "1", "--out", str(tmp_path),
        ])
        assert code == 1

    def test_score_reader_rejects_foreign_files(self, tmp_path):
        other = tmp_path / "other.csv"
        other.write_text("a,b\n1,2\n")
        with pytest.raises(DataError):
            read_score_table(other)


class TestCrosstalkCommand:
    def test_quiet_on_uncoupled_model(self, shot_table_dir, tmp_path):
        code = main([
            "crosstalk", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--out", str(tmp_path),
        ])
        assert code == 0
        assert (tmp_path / "flags.txt").read_text() == "no pairs flagged\n"
        for pair in ("0-1", "1-2", "2-3", "3-4"):
            assert (tmp_path / f"heatmap_{pair}.csv").exists()
        named = (tmp_path / "named_coefficients.csv").read_text().splitlines()
        assert named[0] == "form,0-1,1-2,2-3,3-4"
        assert len(named) == 9

    def test_flags_coupled_pairs(self, tmp_path):
        data_dir = tmp_path / "data"
        assert main([
            "synth", "--preset", "crosstalk", "--shots", "64", "--seed", "2",
            "--out", str(data_dir),
        ]) == 0
        out = tmp_path / "analysis"
        assert main([
            "crosstalk", "--data", str(data_dir / "iq_shots.csv"), "--out", str(out)
        ]) == 0
        flags = (out / "flags.txt").read_text()
        assert "pair 1-2" in flags
        assert "pair 2-3" in flags
        assert "pair 0-1" not in flags

    def test_named_values_input(self, tmp_path):
        code = main([
            "crosstalk", "--named-values", str(FIXTURE), "--out", str(tmp_path)
        ])
        assert code == 0
        flags = (tmp_path / "flags.txt").read_text().splitlines()
        assert [line.split(":")[0] for line in flags] == ["pair 1-2", "pair 2-3"]
        # no matrices available from a named block, so no heatmap files
        assert not list(tmp_path.glob("heatmap_*.csv"))

    def test_scores_feed_gap_rule(self, shot_table_dir, tmp_path):
        bench = tmp_path / "bench"
        assert main([
            "benchmark", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--algo", "kmeans", "--splits", "2", "--out", str(bench),
        ]) == 0
        out = tmp_path / "analysis"
        code = main([
            "crosstalk", "--data", str(shot_table_dir / "iq_shots.csv"),
            "--scores", str(bench / "scores.csv"), "--out", str(out),
        ])
        assert code == 0
        assert (out / "flags.txt").exists()

    def test_requires_exactly_one_input(self, tmp_path):
        assert main(["crosstalk", "--out", str(tmp_path)]) == 1
        assert main([
            "crosstalk", "--data", "x.csv", "--named-values", "y.csv",
            "--out", str(tmp_path),
        ]) == 1

    def test_malformed_named_values(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("form,0-1\n\"not a form\",0.1\n")
        assert main([
            "crosstalk", "--named-values", str(bad), "--out", str(tmp_path)
        ]) == 2


class TestComplexityCommand:
    EXPECTED_FILES = (
        "classical_vs_samples.csv", "quantum_vs_samples.csv", "both_vs_samples.csv",
        "classical_vs_features.csv", "quantum_vs_features.csv", "both_vs_features.csv",
    )

    def test_writes_six_curve_files(self, tmp_path):
        assert main(["complexity", "--out", str(tmp_path)]) == 0
        for name in self.EXPECTED_FILES:
            assert (tmp_path / name).exists(), name
        manifest = json.loads((tmp_path / "complexity_manifest.json").read_text())
        assert manifest["outputs"] == sorted(self.EXPECTED_FILES)

    def test_quantum_beats_classical_on_default_sweep(self, tmp_path):
        assert main(["complexity", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "both_vs_samples.csv").read_text().splitlines()
        assert lines[0] == "n,classical_cost,quantum_cost"
        for line in lines[1:]:
            _, classical, quantum = line.split(",")
            assert float(quantum) < float(classical)

    def test_single_point_ranges(self, tmp_path):
        code = main([
            "complexity", "--n-range", "50:50:1", "--f-range", "4:4:1",
            "--out", str(tmp_path),
        ])
        assert code == 0
        lines = (tmp_path / "both_vs_samples.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("50,")

    def test_bad_range_is_config_error(self, tmp_path):
        assert main(["complexity", "--n-range", "abc", "--out", str(tmp_path)]) == 1
        assert main(["complexity", "--n-range", "9:3:5", "--out", str(tmp_path)]) == 1
        assert main(["complexity", "--n-range", "1:2", "--out", str(tmp_path)]) == 1


class TestEntryPoint:
    def test_version_exits_zero(self, capsys):
        assert main(["--version"]) == 0
        assert "qkmeans" in capsys.readouterr().out

    def test_unknown_command_exits_one(self, capsys):
        assert main(["transmogrify"]) == 1

    def test_missing_subcommand_exits_one(self, capsys):
        assert main([]) == 1

    def test_unknown_flag_exits_one(self, capsys):
        assert main(["synth", "--bogus"]) == 1


class TestPackagedConfigs:
    def test_default_model_matches_library(self):
        payload = json.loads(_builtin_config_text("default_model.json"))
        assert payload == model_to_dict(default_readout_model())

    def test_crosstalk_model_matches_library(self):
        payload = json.loads(_builtin_config_text("crosstalk_model.json"))
        assert payload == model_to_dict(crosstalk_demo_model())

    def test_coupling_matches_library(self):
        payload = json.loads(_builtin_config_text("coupling_map.json"))
        assert payload == coupling_to_dict(default_coupling_map())
