import json
from importlib import resources
from pathlib import Path

import pytest

from gasnetsim.cli import main
from gasnetsim.config import (build_network, config_sha, load_config,
                              parse_config, save_config)
from gasnetsim.errors import ConfigError
from gasnetsim.output import CSV_HEADER, read_series, write_series


def bundled_config_path():
    return resources.files("gasnetsim.configs") / "five_node.json"


@pytest.fixture
def five_node_path(tmp_path):
    path = tmp_path / "five_node.json"
    path.write_text(bundled_config_path().read_text())
    return path


def minimal_doc():
    return {
        "version": "v1",
        "eos": {"kind": "cnga"},
        "nodes": [
            {"id": "a", "kind": "slack",
             "pressure": {"type": "constant", "value": 6.5e6}},
            {"id": "b", "kind": "demand",
             "withdrawal": {"type": "constant", "value": 100.0}},
        ],
        "pipes": [{"id": "p", "from": "a", "to": "b", "length": 10000.0,
                   "diameter": 0.9144, "friction": 0.01}],
        "compressors": [],
        "simulation": {"dt": 1.0, "t_end": 120.0, "dx_target": 1000.0,
                       "cfl_safety": 0.9, "output_cadence": 60.0,
                       "output_path": "out"},
    }


class TestConfig:
    def test_bundled_config_round_trips(self, five_node_path, tmp_path):
        cfg = load_config(five_node_path, strict=True)
        out = tmp_path / "copy.json"
        save_config(cfg, out)
        cfg2 = load_config(out, strict=True)
        assert cfg == cfg2
        assert cfg.to_dict() == cfg2.to_dict()
        assert config_sha(cfg) == config_sha(cfg2)

    def test_missing_slack_names_rule(self):
        doc = minimal_doc()
        doc["nodes"][0]["kind"] = "demand"
        doc["nodes"][0]["withdrawal"] = doc["nodes"][0].pop("pressure")
        with pytest.raises(ConfigError, match="slack"):
            parse_config(doc)

    def test_negative_length_rejected(self):
        doc = minimal_doc()
        doc["pipes"][0]["length"] = -5.0
        with pytest.raises(ConfigError, match="length"):
            parse_config(doc)

    def test_all_violations_reported(self):
        doc = minimal_doc()
        doc["pipes"][0]["length"] = -5.0
        doc["pipes"][0]["to"] = "nowhere"
        doc["nodes"][1]["kind"] = "sink"
        with pytest.raises(ConfigError) as err:
            parse_config(doc)
        assert len(err.value.violations) >= 3

    def test_unknown_keys_only_rejected_in_strict(self):
        doc = minimal_doc()
        doc["pipes"][0]["colour"] = "red"
        parse_config(doc)
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(doc, strict=True)

    def test_parse_error_reports_location(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\n  broken\n}")
        with pytest.raises(ConfigError, match="line"):
            load_config(bad)

    def test_wrong_version_rejected(self):
        doc = minimal_doc()
        doc["version"] = "v2"
        with pytest.raises(ConfigError, match="version"):
            parse_config(doc)

    def test_build_network(self):
        cfg = parse_config(minimal_doc())
        net = build_network(cfg)
        assert len(net.nodes) == 2 and len(net.edges) == 1
        assert net.edges[0].grid.dx == pytest.approx(1000.0)


class TestOutput:
    def test_csv_header_is_stable(self, tmp_path):
        path = tmp_path / "series.csv"
        write_series([(0.0, "node", "1", "pressure", 1.5)], path)
        first = path.read_text().splitlines()[0]
        assert first == ",".join(CSV_HEADER) == "t,entity,id,field,value"

    def test_series_round_trip(self, tmp_path):
        rows = [(0.0, "node", "1", "pressure", 3447378.645),
                (60.0, "pipe", "2", "mass", 1.25e6)]
        path = tmp_path / "series.csv"
        write_series(rows, path)
        assert read_series(path) == rows


class TestCli:
    def test_validate_bundled_config(self, five_node_path, capsys):
        assert main(["validate", str(five_node_path)]) == 0
        assert "valid" in capsys.readouterr().out

    def test_validate_failure_exit_code(self, tmp_path, capsys):
        doc = minimal_doc()
        doc["pipes"][0]["length"] = -1.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", str(path)]) == 1
        assert "error: validation" in capsys.readouterr().err

    def test_run_rejects_unstable_step(self, five_node_path, tmp_path,
                                       capsys):
        code = main(["run", str(five_node_path), "--dx", "2000",
                     "--dt", "30", "--t-end", "60",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "cfl_violation" in capsys.readouterr().err

    def test_run_writes_series_and_summary(self, tmp_path, capsys):
        doc = minimal_doc()
        path = tmp_path / "net.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "results"
        assert main(["run", str(path), "--out", str(out)]) == 0
        rows = read_series(out / "run.csv")
        assert rows, "run.csv should contain samples"
        summary = json.loads((out / "run_summary.json").read_text())
        for key in ("config_sha", "steps", "max_ledger_discrepancy_kg",
                    "wall_seconds"):
            assert key in summary

    def test_identical_runs_write_identical_csv(self, tmp_path):
        doc = minimal_doc()
        path = tmp_path / "net.json"
        path.write_text(json.dumps(doc))
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert main(["run", str(path), "--out", str(out)]) == 0
            outs.append((out / "run.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_bundled_config_runs_at_reduced_resolution(self, five_node_path,
                                                       tmp_path):
        out = tmp_path / "five"
        assert main(["run", str(five_node_path), "--dx", "4000",
                     "--t-end", "120", "--cadence", "60",
                     "--out", str(out)]) == 0
        rows = read_series(out / "run.csv")
        times = [r[0] for r in rows]
        assert times == sorted(times), "CSV t column must be non-decreasing"
        assert any(r[1] == "network" and r[3] == "discrepancy" for r in rows)

    def test_steady_subcommand(self, five_node_path, capsys):
        assert main(["steady", str(five_node_path), "--dx", "2000"]) == 0
        out = capsys.readouterr().out
        assert "node 1" in out and "pipe 5" in out

    def test_convergence_subcommand(self, tmp_path, capsys):
        out = tmp_path / "conv"
        assert main(["convergence", "--out", str(out)]) == 0
        doc = json.loads((out / "convergence.json").read_text())
        assert set(doc["rates"]) == {"rho", "p", "phi"}

    def test_fast_transient_subcommand(self, tmp_path):
        out = tmp_path / "fast"
        assert main(["fast-transient", "--eos", "ideal", "--dx", "1000",
                     "--t-end", "300", "--cadence", "60",
                     "--out", str(out)]) == 0
        assert (out / "fast_transient_ideal.csv").exists()
        summary = json.loads(
            (out / "fast_transient_ideal_summary.json").read_text())
        assert summary["eos"] == "ideal"
