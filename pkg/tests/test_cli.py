import json
import os

import pytest

from app.cli.commands import create_cli_application, run
from app.modules import reports


def _json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


@pytest.mark.parametrize(
    "graph, text, flags, expected",
    [
        ("loop1", "v:1,w:1", ["--sharp"], 0),
        ("loop1", "v:1,w:1", [], 1),
        ("loop1", "v:2", [], 1),
        ("loop1", "v:2", ["--sharp"], 1),
        ("theta", "", [], 0),
        ("k4", "0:3", ["--naive"], 1),
        ("k4", "0:2,3:-1", [], -1),
    ],
)
def test_rank_command(capsys, graph_path, graph, text, flags, expected):
    assert run(["--json", "rank", graph_path(graph), text, *flags]) == 0
    payload = _json(capsys)
    assert payload["success"]
    assert payload["rank"] == expected
    assert {"certificate", "reduced", "degree_exhausted"} <= set(payload)


def test_rank_command_prints_summary_before_json(capsys, graph_path):
    assert run(["rank", graph_path("theta"), "u:1,v:1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("📈 **Rank:** 1")
    assert json.loads(out[out.index("{"):])["rank"] == 1


def test_rank_command_with_base_label(capsys, graph_path):
    assert run(["--json", "rank", graph_path("loop1"), "v:2", "--base", "w"]) == 0
    payload = _json(capsys)
    assert payload["base"] == 1
    assert payload["rank"] == 1


def test_reduce_command(capsys, graph_path):
    assert run(["--json", "reduce", graph_path("theta"), "0:-3,1:3"]) == 0
    payload = _json(capsys)
    assert payload["reduced"] == ""
    assert payload["effective_class"]


@pytest.mark.parametrize(
    "graph, group, order",
    [("theta", "Z/3", "3"), ("k4", "Z/4 × Z/4", "16"), ("c5", "Z/5", "5"), ("dumbbell", "0", "1")],
)
def test_jacobian_command(capsys, graph_path, graph, group, order):
    assert run(["--json", "jacobian", graph_path(graph)]) == 0
    payload = _json(capsys)
    assert payload["group"] == group
    assert payload["order"] == order


def test_wrd_command(capsys, graph_path):
    assert run(["--json", "wrd", graph_path("k4"), "--degree", "2", "--rank", "1"]) == 0
    payload = _json(capsys)
    assert payload["count"] == 0
    assert payload["exhausted"]
    assert payload["rho"] == -1


def test_gonality_command(capsys, graph_path):
    assert run(["--json", "gonality", graph_path("k4")]) == 0
    payload = _json(capsys)
    assert payload["gonality_sharp"] == payload["gonality"] == 3
    assert not payload["hyperelliptic_sharp"]


def test_parse_errors_exit_2(capsys, tmp_path, graph_path):
    bad = tmp_path / "bad.graph"
    bad.write_text("vertices two\n", encoding="utf-8")
    assert run(["rank", str(bad), ""]) == 2
    assert "line 1" in capsys.readouterr().err
    assert run(["rank", graph_path("theta"), "0:1,x"]) == 2
    assert "column 5" in capsys.readouterr().err
    assert run(["jacobian", str(tmp_path / "missing.graph")]) == 2


def test_disconnected_graph_exits_3(capsys, tmp_path):
    split = tmp_path / "split.graph"
    split.write_text("vertices 3\n0 1\n", encoding="utf-8")
    assert run(["jacobian", str(split)]) == 3
    assert capsys.readouterr().err.startswith("❌")


@pytest.mark.parametrize(
    "argv",
    [
        ["gonality", "c3"],
        ["wrd", "theta", "-d", "2", "-r", "-1"],
        ["families", "--family", "cubic"],
        ["families", "--family", "cycle"],
        ["scan", "--mode", "cdpr", "--gmin", "3", "--gmax", "2", "--quiet"],
    ],
)
def test_rejected_requests_exit_3(capsys, graph_path, argv):
    argv = [graph_path(arg) if arg in ("c3", "theta") else arg for arg in argv]
    assert run(argv) == 3
    assert capsys.readouterr().err.startswith("❌ Invalid input")


def test_scan_writes_report_atomically(capsys, tmp_path):
    out = tmp_path / "cdpr.json"
    csv_path = tmp_path / "cdpr.csv"
    code = run(["scan", "--mode", "cdpr", "--gmin", "2", "--gmax", "2", "--jobs", "1",
                "--out", str(out), "--csv", str(csv_path), "--quiet"])
    assert code == 0
    report = reports.load_report(str(out))
    assert report.complete
    assert report.violations == []
    assert report.run["jobs"] == 1
    assert csv_path.read_text(encoding="utf-8").startswith("graph,genus")
    assert sorted(os.listdir(tmp_path)) == ["cdpr.csv", "cdpr.json"]


def test_scan_existence_on_single_graph_file(capsys, tmp_path, graph_path):
    out = tmp_path / "theta.json"
    assert run(["scan", graph_path("theta"), "--jobs", "1", "--out", str(out), "--quiet"]) == 0
    report = reports.load_report(str(out))
    assert [summary["name"] for summary in report.graphs] == ["theta"]
    assert report.violations == []


def test_scan_over_cap_is_partial_and_exits_4(capsys, tmp_path):
    out = tmp_path / "cubic.json"
    code = run(["scan", "--mode", "cubic", "--gmin", "2", "--gmax", "3", "--cap", "2",
                "--jobs", "1", "--out", str(out), "--quiet"])
    assert code == 4
    report = reports.load_report(str(out))
    assert not report.complete
    assert report.skipped[0]["g"] == 3


def test_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("BNGRAPH_CAP", "2")
    assert run(["families", "--family", "cubic", "--size", "3"]) == 4


def test_families_to_stdout_and_directory(capsys, tmp_path):
    assert run(["families", "--family", "cubic", "--size", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("vertices 2") == 2
    assert run(["families", "--family", "chain", "--size", "3", "--out-dir", str(tmp_path)]) == 0
    assert os.listdir(tmp_path) == ["chain-g3.graph"]


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        create_cli_application().parse_args([])
