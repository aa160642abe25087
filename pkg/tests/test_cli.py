import json
import subprocess
import sys

import pytest

from hetsec.harness.cli import build_parser, main


def test_parser_subcommands():
    p = build_parser()
    a = p.parse_args(["sweep-power", "--trials", "3", "--set", "sca.q=5", "--scheme", "zf"])
    assert a.trials == 3 and a.set == ["sca.q=5"] and a.scheme == "zf"
    with pytest.raises(SystemExit):
        p.parse_args(["nope"])


def test_run_and_audit(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--seed", "5", "--out", str(out), "--scheme", "proposed"]) == 0
    assert "rate" in capsys.readouterr().out
    assert (out / "layout.txt").read_text().startswith("# SCA subproblem layout")
    assert (out / "trace_5.json").exists()
    assert main(["audit", "--seed", "5", str(out / "trace_5.json")]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["feasible"] and rep["secrecy_rate"] > 0


def test_audit_flags_violation(tmp_path, capsys):
    out = tmp_path / "o"
    main(["run", "--seed", "5", "--out", str(out), "--scheme", "proposed"])
    capsys.readouterr()
    # the same beams exceed a 30 dBm budget
    assert main(["audit", "--seed", "5", "--p-th-dbm", "30", str(out / "trace_5.json")]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert not rep["feasible"] and rep["power_slack"] < 0


def test_bad_override_exits_nonzero(tmp_path, capsys):
    assert main(["run", "--out", str(tmp_path), "--set", "nope.key=1"]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_sweep_power_small(tmp_path, capsys):
    code = main(["sweep-power", "--seed", "5", "--trials", "1", "--out", str(tmp_path),
                 "--set", "experiment.p_th_dbm_list=35,40", "--scheme", "proposed,zf"])
    assert code == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 2
    assert "p_th_dbm=40" in capsys.readouterr().out


def test_console_script_module():
    r = subprocess.run([sys.executable, "-m", "hetsec.harness.cli", "--help"], capture_output=True,
                       text=True, timeout=60)
    assert r.returncode == 0 and "runtime-vs-k" in r.stdout
