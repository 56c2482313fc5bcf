"""End-to-end CLI behavior: allocate, bench, verify, gen."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from fairshare import load_graph
from fairshare.cli import main

from conftest import LINE_EDGES


@pytest.fixture
def line_instance_file(tmp_path):
    (tmp_path / "edges.csv").write_text(LINE_EDGES)
    path = tmp_path / "ride.json"
    path.write_text(json.dumps({"graph": "edges.csv", "depot": 0, "destinations": [1, 2]}))
    return path


def test_allocate_table_output(line_instance_file, capsys):
    assert main(["allocate", "--instance", str(line_instance_file), "--rule", "exact"]) == 0
    out = capsys.readouterr().out
    assert "rule        exact" in out
    assert "0.50" in out and "1.50" in out
    assert "total" in out and "2.00" in out


def test_allocate_json_output(line_instance_file, capsys):
    assert main(["allocate", "--instance", str(line_instance_file), "--rule", "shapo", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rule"] == "shapo"
    assert payload["payments"] == [0.5, 1.5]


def test_allocate_inline_delta(tmp_path, capsys):
    path = tmp_path / "ride.json"
    path.write_text(json.dumps({
        "delta": [[0, 3, 1], [3, 0, 4], [1, 4, 0]],
        "price_per_km": 1000.0,
    }))
    assert main(["allocate", "--instance", str(path), "--rule", "exact", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["payments"] == [4.5, 2.5]


def test_allocate_routing_rule_switches_mode(line_instance_file, capsys):
    assert main(["allocate", "--instance", str(line_instance_file), "--rule", "shapo-routing", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cost_model"] == "routing-game-prioritized"
    assert payload["payments"] == pytest.approx([1.0, 3.0])


def test_allocate_routing_flag_applies_to_exact(line_instance_file, capsys):
    assert main([
        "allocate", "--instance", str(line_instance_file),
        "--rule", "exact", "--routing-game", "--json",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cost_model"] == "routing-game-prioritized"
    assert sum(payload["payments"]) == pytest.approx(4.0)


def test_allocate_unknown_rule_exits_1(line_instance_file, capsys):
    assert main(["allocate", "--instance", str(line_instance_file), "--rule", "banzhaf"]) == 1
    assert "error:" in capsys.readouterr().err


def test_allocate_missing_instance_exits_1(capsys, monkeypatch):
    monkeypatch.delenv("FAIRSHARE_INSTANCE", raising=False)
    assert main(["allocate", "--rule", "exact"]) == 1
    assert "FAIRSHARE_INSTANCE" in capsys.readouterr().err


def test_allocate_env_var_and_flag_precedence(line_instance_file, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FAIRSHARE_INSTANCE", str(line_instance_file))
    assert main(["allocate", "--rule", "exact"]) == 0
    capsys.readouterr()

    # the flag wins over a bogus environment value
    monkeypatch.setenv("FAIRSHARE_INSTANCE", str(tmp_path / "missing.json"))
    assert main(["allocate", "--instance", str(line_instance_file), "--rule", "exact"]) == 0
    capsys.readouterr()
    assert main(["allocate", "--rule", "exact"]) == 1


def test_allocate_rejects_ambiguous_instance_file(tmp_path, capsys):
    path = tmp_path / "ride.json"
    path.write_text(json.dumps({
        "graph": "edges.csv", "depot": 0, "destinations": [1],
        "delta": [[0.0, 1.0], [1.0, 0.0]],
    }))
    assert main(["allocate", "--instance", str(path), "--rule", "exact"]) == 1
    assert "exactly one" in capsys.readouterr().err


def test_allocate_capacity_exit_code(tmp_path, capsys):
    core = np.zeros((26, 26))  # 25 passengers, beyond the exact-rule cap
    path = tmp_path / "big.json"
    path.write_text(json.dumps({"delta": core.tolist()}))
    assert main(["allocate", "--instance", str(path), "--rule", "exact"]) == 2
    assert "error:" in capsys.readouterr().err


def test_allocate_flags_go_to_stderr(tmp_path, capsys):
    path = tmp_path / "ride.json"
    path.write_text(json.dumps({"delta": [[0, 5, 5], [5, 0, 0], [5, 0, 0]]}))
    assert main(["allocate", "--instance", str(path), "--rule", "shortcut", "--json"]) == 0
    captured = capsys.readouterr()
    assert "warning: equal-split-fallback" in captured.err
    assert json.loads(captured.out)["flags"] == ["equal-split-fallback"]


BENCH_CONFIG = {
    "passenger_counts": [2, 3],
    "iterations": 2,
    "seed": 5,
    "graph_source": "euclidean:30:1",
    "rules": ["exact", "shapo", "depot"],
}


def _write_config(tmp_path):
    path = tmp_path / "bench.json"
    path.write_text(json.dumps(BENCH_CONFIG))
    return path


def _read_rows(csv_path):
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bench_writes_reports_and_figures(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["bench", "--config", str(cfg), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "wrote" in printed and "rule" in printed

    rows = _read_rows(out / "report.csv")
    assert [(r["rule"], r["n"]) for r in rows] == [
        ("exact", "2"), ("shapo", "2"), ("depot", "2"),
        ("exact", "3"), ("shapo", "3"), ("depot", "3"),
    ]
    payload = json.loads((out / "report.json").read_text())
    assert payload["config"]["seed"] == 5
    assert len(payload["rows"]) == 6
    for name in ("percent_error.png", "runtime.png"):
        assert (out / name).stat().st_size > 1000


def test_bench_no_figures(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["bench", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
    capsys.readouterr()
    assert (out / "report.csv").exists()
    assert not (out / "percent_error.png").exists()


def test_bench_metrics_reproducible_across_runs(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["bench", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
        capsys.readouterr()
        outs.append(_read_rows(out / "report.csv"))

    def mask_timing(rows):
        return [{k: v for k, v in row.items() if k != "mean_seconds"} for row in rows]

    assert mask_timing(outs[0]) == mask_timing(outs[1])


def test_bench_env_vars(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FAIRSHARE_BENCH_CONFIG", str(_write_config(tmp_path)))
    monkeypatch.setenv("FAIRSHARE_BENCH_OUT", str(tmp_path / "env_out"))
    assert main(["bench", "--no-figures"]) == 0
    capsys.readouterr()
    assert (tmp_path / "env_out" / "report.json").exists()


def test_bench_missing_config_exits_1(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("FAIRSHARE_BENCH_CONFIG", raising=False)
    monkeypatch.delenv("FAIRSHARE_BENCH_OUT", raising=False)
    assert main(["bench", "--out", str(tmp_path)]) == 1
    assert "FAIRSHARE_BENCH_CONFIG" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["verify", "--n-max", "4", "--trials", "6", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("pass") >= 4
    assert "overall max deviation" in out


def test_verify_zero_trials_is_vacuous(capsys):
    assert main(["verify", "--n-max", "3", "--trials", "0"]) == 0
    captured = capsys.readouterr()
    assert "vacuous" in captured.err


def test_verify_rejects_bad_arguments(capsys):
    assert main(["verify", "--n-max", "0"]) == 1
    capsys.readouterr()
    assert main(["verify", "--trials", "-1"]) == 1
    capsys.readouterr()


def test_gen_line(tmp_path, capsys):
    out = tmp_path / "line.csv"
    assert main(["gen", "--family", "line", "--size", "4", "--out", str(out)]) == 0
    g = load_graph(out.read_text())
    assert g.vertex_count == 4 and g.edge_count == 3
    assert "wrote" in capsys.readouterr().out


def test_gen_grid(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    assert main(["gen", "--family", "grid", "--size", "3", "--out", str(out)]) == 0
    g = load_graph(out.read_text())
    assert g.vertex_count == 9 and g.edge_count == 12


def test_gen_euclidean_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["gen", "--family", "euclidean", "--size", "12", "--seed", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_bad_family(tmp_path, capsys):
    assert main(["gen", "--family", "torus", "--size", "3", "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["gen", "--family", "line", "--size", "0", "--out", str(tmp_path / "x.csv")]) == 1
    capsys.readouterr()


def test_allocate_exact_and_shapo_agree_end_to_end(line_instance_file, tmp_path, capsys):
    # same instance, both rules, straight through the CLI
    payloads = {}
    for rule in ("exact", "shapo"):
        assert main(["allocate", "--instance", str(line_instance_file), "--rule", rule, "--json"]) == 0
        payloads[rule] = json.loads(capsys.readouterr().out)
    assert payloads["exact"]["payments"] == pytest.approx(payloads["shapo"]["payments"], rel=1e-9)


def test_bundled_default_config_shape():
    from dataclasses import replace
    from pathlib import Path

    from fairshare import ExperimentConfig, run_experiment

    root = Path(__file__).resolve().parent.parent / "configs"
    cfg = ExperimentConfig.from_json_file(root / "bench_default.json")
    assert cfg.passenger_counts == (3, 4, 5, 6, 7, 8, 9)
    assert len(cfg.rules) == 5
    # trim the iteration count so the shape check stays quick
    fast = replace(cfg, iterations=1, graph_source=str(root / cfg.graph_source))
    report = run_experiment(fast)
    assert len(report.rows) == 7 * 5


def test_bench_resolves_graph_path_against_config_dir(tmp_path, monkeypatch, capsys):
    (tmp_path / "nested").mkdir()
    graph = tmp_path / "nested" / "g.csv"
    assert main(["gen", "--family", "line", "--size", "6", "--out", str(graph)]) == 0
    cfg = tmp_path / "nested" / "bench.json"
    cfg.write_text(json.dumps({
        "passenger_counts": [2], "iterations": 1,
        "graph_source": "g.csv", "rules": ["exact", "shapo"],
    }))
    monkeypatch.chdir(tmp_path)  # not the config dir, so cwd-relative would miss
    out = tmp_path / "out"
    assert main(["bench", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
    capsys.readouterr()
    assert (out / "report.csv").exists()


def test_generated_graph_feeds_bench(tmp_path, capsys):
    graph_path = tmp_path / "city.csv"
    assert main(["gen", "--family", "euclidean", "--size", "25", "--seed", "4", "--out", str(graph_path)]) == 0
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({
        "passenger_counts": [2], "iterations": 1,
        "graph_source": str(graph_path), "rules": ["exact", "shapo"],
    }))
    out = tmp_path / "out"
    assert main(["bench", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
    capsys.readouterr()
    assert len(_read_rows(out / "report.csv")) == 2
