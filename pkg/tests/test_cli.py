import json
import subprocess
import sys

import pytest

from conftest import K3, K4, write_edges
from nesclust.cli import main


@pytest.fixture
def k3file(tmp_path):
    return write_edges(tmp_path / "k3.txt", K3)


def test_exact_k3(k3file, capsys):
    assert main(["exact", str(k3file)]) == 0
    out = json.loads(capsys.readouterr().out)
    s = out["stats"]
    assert (s["Delta"], s["Lambda"], s["C"]) == (3, 3, 1.0)
    assert out["ingest"]["M"] == 3


def test_exact_csv_to_file(tmp_path, k3file):
    dest = tmp_path / "out" / "k3.csv"
    assert main(["exact", str(k3file), "--format", "csv", "--out", str(dest)]) == 0
    assert dest.read_text().splitlines()[0] == "N,M,C,Delta,Lambda,Phi,Psi,OmegaPrime"


def test_exact_empty_file(tmp_path, capsys):
    f = tmp_path / "empty.txt"
    f.write_text("# nothing\n")
    assert main(["exact", str(f)]) == 2
    assert "empty" in capsys.readouterr().err


def test_exact_malformed_names_line(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("0 1\n1 two\n")
    assert main(["exact", str(f)]) == 2
    assert "bad.txt:2:" in capsys.readouterr().err


def test_stream_k3(k3file, capsys):
    assert main(["stream", str(k3file), "--p", "1", "--seed", "7"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["estimate"]["c_hat"] == 1.0
    assert out["meta"]["seed"] == 7


def test_stream_is_deterministic(tmp_path, capsys):
    f = write_edges(tmp_path / "k4.txt", K4)
    main(["stream", str(f), "--p", "0.8", "--seed", "3"])
    a = capsys.readouterr().out
    main(["stream", str(f), "--p", "0.8", "--seed", "3"])
    assert capsys.readouterr().out == a


@pytest.mark.parametrize("flags", [["--p", "1.5"], ["--p", "0"], ["--p", "x"],
                                   ["--p", "0.5", "--seed", "-1"]])
def test_stream_flag_validation(k3file, flags):
    with pytest.raises(SystemExit) as exc:
        main(["stream", str(k3file), *flags])
    assert exc.value.code == 2


def test_stream_sample_too_small(tmp_path, capsys):
    f = write_edges(tmp_path / "edge.txt", [(0, 1), (2, 3)])
    assert main(["stream", str(f), "--p", "0.5"]) == 3
    assert "sample too small" in capsys.readouterr().err


def test_stream_csv_no_aux(k3file, capsys):
    assert main(["stream", str(k3file), "--p", "1", "--no-aux", "--file-order",
                 "--format", "csv"]) == 0
    header, row = capsys.readouterr().out.strip().split("\n")
    fields = dict(zip(header.split(","), row.split(",")))
    assert fields["c_hat"] == "1.0" and fields["rb_hat"] == ""


def test_experiment_rejects_tiny_k(tmp_path, k3file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": str(k3file), "p_grid": [0.5], "runs": 1}))
    assert main(["experiment", str(cfg), "--out", str(tmp_path / "r")]) == 2
    with pytest.raises(SystemExit):
        main(["experiment", str(cfg), "--runs", "1", "--out", str(tmp_path / "r")])


def test_experiment_and_report(tmp_path, capsys):
    write_edges(tmp_path / "k4.txt", K4)
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('graph = "k4.txt"\np_grid = [0.9]\nruns = 40\nbase_seed = 2\n')
    prefix = tmp_path / "res" / "k4"
    assert main(["experiment", str(cfg), "--out", str(prefix)]) == 0
    assert "k4" in capsys.readouterr().out
    rep = json.loads((tmp_path / "res" / "k4.json").read_text())
    assert rep["runs"] == 40 and rep["points"][0]["p"] == 0.9
    for fig in ("fig2", "fig3", "fig4"):
        assert (tmp_path / "res" / f"k4.{fig}.csv").exists()
    assert main(["report", str(tmp_path / "res" / "k4.json"), "--fig", "fig3"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "graph,p,series,metric,value" and len(lines) == 3
    assert (tmp_path / "res" / "k4.fig3.csv").read_text().strip().split("\n") == lines


def test_experiment_target_override(tmp_path, capsys):
    write_edges(tmp_path / "k4.txt", K4)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": "k4.txt", "p_grid": [0.5], "runs": 30}))
    assert main(["experiment", str(cfg), "--target-rse", "0.9", "--runs", "35",
                 "--out", str(tmp_path / "r")]) == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["runs"] == 35 and [pt["target_rse"] for pt in rep["points"]] == [0.9]


def test_experiment_unreachable_target(tmp_path, k3file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": str(k3file), "target_rse": [0.01], "runs": 30}))
    assert main(["experiment", str(cfg), "--out", str(tmp_path / "r")]) == 2


def test_module_entry_point(k3file):
    res = subprocess.run([sys.executable, "-m", "nesclust", "exact", str(k3file),
                          "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("N,M,C")


def test_experiment_failed_grid_point(tmp_path, k3file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": str(k3file), "p_grid": [1e-9, 1.0], "runs": 30}))
    assert main(["experiment", str(cfg), "--out", str(tmp_path / "r")]) == 4
    assert "grid points failed" in capsys.readouterr().err
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["points"][1]["observed_rse"] == 0.0
