from __future__ import annotations

import json
import subprocess
import sys

import pytest

from lsnlab.cli import EXIT_CONFIG, EXIT_GUARD, EXIT_OK, main
from lsnlab.codes import five_qubit_code
from lsnlab.harness import worst_case_to_json
from lsnlab.pauli import PauliOperator
from lsnlab.reductions import WorstCaseInstance


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_sample_then_decode(tmp_path):
    inst = tmp_path / "inst.json"
    assert main(["sample-instance", "--n", "5", "--k", "1", "--p", "0", "--seed", "3", "--out", str(inst)]) == EXIT_OK
    out = tmp_path / "dec.json"
    assert main(["decode", str(inst), "--out", str(out)]) == EXIT_OK
    res = json.loads(out.read_text())
    assert res["outcome"] == "decoded" and res["correct"] is True


def test_sample_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["sample-instance", "--type", "mslsn", "--m", "2", "--n", "4", "--seed", "9", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_lpn_types(tmp_path, capsys):
    assert main(["sample-instance", "--type", "lpn", "--n", "6", "--k", "2", "--p", "0.1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)
    code = main(["sample-instance", "--type", "lpn-lsn", "--n", "8", "--k", "2", "--p", "0.0", "--seed", "1"])
    assert code in (EXIT_OK, EXIT_CONFIG)


def test_sweep_writes_csv(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {"n": [4, 6], "k": 1, "noise": {"kind": "depolarizing", "p": 0.05}, "trials": 50})
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", cfg, "--seed", "5", "--out", str(out)]) == EXIT_OK
    first = out.read_bytes()
    assert main(["sweep", "--config", cfg, "--seed", "5", "--out", str(out), "--threads", "2"]) == EXIT_OK
    assert out.read_bytes() == first
    assert len(first.decode().splitlines()) == 4


def test_gv_check_and_commit_demo(capsys):
    assert main(["gv-check", "--n", "6", "--k", "1", "--d", "2", "--codes", "20", "--p", "0.05"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert 0.0 <= rep["fraction"] <= 1.0
    assert main(["commit-demo", "--n", "3", "--k", "1", "--p", "0.0"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["random"]["trace_distance"] == pytest.approx(0.0, abs=1e-12)


def test_reduce_and_lpn_bridge(tmp_path, capsys):
    inst = WorstCaseInstance(five_qubit_code(), PauliOperator.from_string("IZIII"), 0, 1)
    path = tmp_path / "wc.json"
    path.write_bytes(worst_case_to_json(inst))
    assert main(["reduce", str(path), "--trials", "50", "--params", '{"w_max": 1}']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["rate"] == 1.0
    assert main(["lpn-bridge", "--n", "6", "--k", "2", "--trials", "50"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--config", "/nonexistent/cfg.json"],
        ["decode", "/nonexistent/inst.json"],
        ["reduce", "/nonexistent/wc.json"],
    ],
)
def test_missing_files_exit_2(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "lsnlab:" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    cfg = _write(tmp_path / "bad.json", {"decoder": "nope"})
    assert main(["sweep", "--config", cfg]) == EXIT_CONFIG
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["sweep", "--config", str(broken)]) == EXIT_CONFIG
    inst = tmp_path / "inst.json"
    inst.write_text('{"type": "lsn"}')
    assert main(["decode", str(inst)]) == EXIT_CONFIG


def test_guard_exit_3(tmp_path, capsys):
    assert main(["commit-demo", "--n", "12", "--k", "1"]) == EXIT_GUARD
    assert "guard" in capsys.readouterr().err
    inst = tmp_path / "big.json"
    main(["sample-instance", "--n", "14", "--k", "1", "--out", str(inst)])
    assert main(["decode", str(inst), "--decoder", "pgm"]) == EXIT_GUARD


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "lsnlab.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sweep" in proc.stdout
