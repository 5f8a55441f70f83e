from __future__ import annotations

import json

import pytest

from qwalknet.cli import EXIT_IO, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from qwalknet.graph import load_graph


def _body(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


@pytest.fixture
def er10_file(tmp_path):
    assert main(["generate", "--model", "er", "--n", "10", "--p", "0.3", "--seed", "42",
                 "--name", "er10", "--out", str(tmp_path / "g"), "--no-timestamp"]) == EXIT_OK
    return tmp_path / "g" / "er10.json"


def test_generate_ws(tmp_path, capsys):
    out = tmp_path / "g"
    assert main(["generate", "--model", "ws", "--n", "8", "--k", "2", "--beta", "0.2", "--seed", "1",
                 "--out", str(out), "--no-timestamp"]) == EXIT_OK
    g = load_graph(out / "ws8_s1.txt")
    assert g.n_nodes == 8 and g.n_edges == 8
    assert "|E|=8" in capsys.readouterr().out


def test_generate_er_pinned(er10_file):
    assert load_graph(er10_file).digest() == "572c805a583636fc"


@pytest.mark.parametrize(
    "argv",
    [["generate", "--model", "er", "--n", "10"], ["generate", "--n", "10"], ["compile"],
     ["frobnicate"], ["run", "--model", "ba", "--n", "8", "--m", "2", "--shots", "0"]],
)
def test_usage_errors(tmp_path, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv + ["--out", str(tmp_path)])
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_missing_file(tmp_path):
    assert main(["compare", "--graph", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_IO


def test_runtime_error(tmp_path):
    code = main(["compare", "--model", "ws", "--n", "20", "--k", "2", "--beta", "0.1", "--out", str(tmp_path)])
    assert code == EXIT_RUNTIME


def test_qubit_cap_env(tmp_path, er10_file, monkeypatch):
    monkeypatch.setenv("QWALKNET_QUBIT_CAP", "6")
    assert main(["run", "--graph", str(er10_file), "--out", str(tmp_path)]) == EXIT_RUNTIME


def test_compile_report(tmp_path, er10_file):
    out = tmp_path / "c"
    assert main(["compile", "--graph", str(er10_file), "--t", "1", "--qasm", "--out", str(out),
                 "--no-timestamp"]) == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["width"] == 8
    assert (out / "circuit.qasm").read_text().splitlines()[1] == "OPENQASM 3.0;"


def test_compile_t0_prep_only(tmp_path, er10_file):
    out = tmp_path / "c"
    assert main(["compile", "--graph", str(er10_file), "--t", "0", "--no-decompose", "--out", str(out)]) == EXIT_OK
    kinds = {g["kind"] for g in json.loads((out / "circuit.json").read_text())["gates"]}
    assert kinds == {"RY"}


def test_run_shot_conservation(tmp_path):
    out = tmp_path / "r"
    assert main(["run", "--model", "ws", "--n", "8", "--k", "2", "--beta", "0.2", "--seed", "1", "--t", "1", "--shots", "10000", "--epsilon", "0.001",
                 "--out", str(out)]) == EXIT_OK
    rows = _body(out / "counts.csv")[1:]
    assert sum(int(r.split(",")[1]) for r in rows) == 10000


def test_compare_l1(tmp_path, er10_file, capsys):
    out = tmp_path / "cmp"
    assert main(["compare", "--graph", str(er10_file), "--t-max", "4", "--out", str(out)]) == EXIT_OK
    l1 = [float(r.split(",")[1]) for r in _body(out / "l1.csv")[1:]]
    assert len(l1) == 4 and max(l1) < 1e-9
    assert len(list(out.glob("compare_t*.svg"))) == 4


def test_scaling_ba(tmp_path):
    out = tmp_path / "s"
    assert main(["scaling", "--model", "ba", "--m", "4", "--t", "1", "--out", str(out), "--jobs", "2"]) == EXIT_OK
    row = _body(out / "fit.csv")[1].split(",")
    assert row[0] == "BA" and 1.6 <= float(row[3]) <= 2.4


@pytest.mark.parametrize(
    "argv",
    [["compare", "--model", "ws", "--n", "8", "--k", "2", "--beta", "0.2", "--seed", "1", "--shots", "500"],
     ["run", "--model", "er", "--n", "8", "--p", "0.5", "--shots", "300", "--epsilon", "0.002"]],
)
def test_byte_identical(tmp_path, argv):
    outputs = []
    for _ in range(2):
        out = tmp_path / "o"
        assert main(argv + ["--out", str(out), "--no-timestamp"]) == EXIT_OK
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]


def test_flags_echoed(tmp_path, er10_file):
    out = tmp_path / "r"
    main(["run", "--graph", str(er10_file), "--shots", "50", "--sample-seed", "9", "--out", str(out)])
    header = (out / "counts.csv").read_text().splitlines()
    assert "--sample-seed=9" in header[0] and "--shots=50" in header[0]
    assert header[1].startswith("# generated ")
