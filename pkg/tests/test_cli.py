"""CLI behavior: exit codes, output files, determinism, thin-shell parity."""

import json

import pytest

from rgsim.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    chain_config_from,
    load_config,
    main,
    parse_branching,
)
from rgsim.netsim import ChainConfig, run_batch


def write_config(tmp_path, **overrides):
    obj = {
        "hops": 0,
        "arms": 2,
        "branching": [2],
        "p_survive": 0.95,
        "trials": 12,
        "seed": 9,
        "workers": 1,
    }
    obj.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(obj))
    return path


class TestTopology:
    def test_long_haul_scale_values(self, capsys):
        assert main(["topology", "-m", "15", "-b", "2,3", "-r", "10"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "prior_art_reserve_memories=150" in out
        assert "proposed_total=13" in out
        assert "emitter_line_length=4" in out
        assert "photons_per_arm=9" in out

    def test_minimal_layout(self, capsys):
        assert main(["topology", "-m", "1", "-b", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "photons_per_arm=2" in out
        assert "proposed_reserve_memories=0" in out

    def test_zero_branching_entry_rejected(self, capsys):
        assert main(["topology", "-m", "1", "-b", "2,0"]) == EXIT_CONFIG
        assert "branching" in capsys.readouterr().err

    def test_schedule_listing(self, capsys):
        assert main(["topology", "-m", "1", "-b", "1", "--schedule"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "emit" in out and "meas" in out


class TestRun:
    def test_run_writes_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out_dir = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out_dir)]) == EXIT_OK
        assert (out_dir / "records.jsonl").exists()
        assert (out_dir / "summary.json").exists()
        assert (out_dir / "reports.csv").exists()
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["trials"] == 12
        assert summary["oracle_pass_rate"] in (None, 1.0)

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(cfg), "--out", str(a)]) == EXIT_OK
        assert main(["run", "--config", str(cfg), "--out", str(b)]) == EXIT_OK
        for name in ("records.jsonl", "summary.json", "reports.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_malformed_config_no_outputs(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        out_dir = tmp_path / "nope"
        assert main(["run", "--config", str(path), "--out", str(out_dir)]) == EXIT_CONFIG
        assert not out_dir.exists()

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, bogus=1)
        assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG
        assert "unknown config keys" in capsys.readouterr().err

    def test_missing_file_is_io_error(self, capsys):
        assert main(["run", "--config", "/does/not/exist.json"]) == 3

    def test_table_format(self, tmp_path, capsys):
        cfg = write_config(tmp_path, format="table")
        out_dir = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out_dir)]) == EXIT_OK
        table = (out_dir / "records.txt").read_text()
        assert "trial" in table and "chosen_arms" in table

    def test_cli_matches_library(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path)
        out_dir = tmp_path / "out"
        assert main(["run", "--config", str(cfg_path), "--out", str(out_dir)]) == EXIT_OK
        batch = run_batch(
            ChainConfig(hops=0, arms=2, branching=(2,), p_survive=0.95),
            12,
            seed=9,
        )
        assert (out_dir / "records.jsonl").read_text() == batch.records_jsonl()
        assert (out_dir / "summary.json").read_text() == batch.summary_json() + "\n"

    def test_flag_overrides_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["run", "--config", str(cfg), "--trials", "3"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["trials"] == 3


class TestConfigHelpers:
    def test_parse_branching(self):
        assert parse_branching("2,3") == (2, 3)
        with pytest.raises(ValueError):
            parse_branching("2,zero")

    def test_length_to_survival(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"length_km": 50, "loss_db_per_km": 0.2}))
        cfg = chain_config_from(load_config(str(path)))
        assert cfg.p_survive == pytest.approx(0.1)

    def test_survival_and_length_conflict(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"p_survive": 0.9, "length_km": 10}))
        with pytest.raises(ValueError):
            chain_config_from(load_config(str(path)))


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "backend-equivalence" in out
    assert "frame-grid" in out
    assert "all 10 suites passed" in out
