import csv
import io
import json
import subprocess
import sys

import pytest

from thincubic.averages import AverageReport
from thincubic.cli import main
from thincubic.latticecount import CountBreakdown
from thincubic.local import LocalDensityReport
from thincubic.orbits import DeltaDistResult


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def envelope(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    env = json.loads(out)
    assert set(env) == {"command", "version", "seed", "params", "payload", "warnings"}
    return env


def test_avg_cell(capsys):
    env = envelope(capsys, "avg", "--a", "1", "--d", "1", "--sign", "-")
    assert env["payload"]["bound"] == "45/14" and env["payload"]["rendered"] == "3.214"
    rep = AverageReport.from_json(env["payload"])
    assert str(rep.bound) == "45/14"


def test_avg_table2_json_and_csv(capsys):
    env = envelope(capsys, "avg", "table2", "--json")
    assert len(env["payload"]) == 25
    code, out, _ = run(capsys, "avg", "table2", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 25 and rows[0]["complex"] == "45/14"


def test_avg_sel2(capsys):
    env = envelope(capsys, "avg", "sel2", "--d", "17", "--sign", "+")
    assert env["payload"]["bound"] == "15510/4897" and env["seed"] is None
    env = envelope(capsys, "avg", "sel2", "--d", "-7", "--sign", "+", "--samples", "20000",
                   "--seed", "5")
    assert env["seed"] == 5 and isinstance(env["payload"]["bound"], float)


def test_densities_oracle(capsys):
    env = envelope(capsys, "densities", "--p", "3", "--a", "1", "--d", "1", "--oracle")
    p = env["payload"]
    assert all(p["agree"].values())
    assert p["closed_form"]["maximal_density"] == p["oracle"]["maximal_density"] == "25/27"
    assert LocalDensityReport.from_json(p["oracle"]).maximal_count == 75
    assert env["warnings"] == []


def test_densities_reports_disagreement(capsys):
    env = envelope(capsys, "densities", "--p", "7", "--a", "1", "--d", "1", "--oracle")
    assert not env["payload"]["agree"]["maximal_density"]
    assert env["warnings"]


def test_delta_dist(capsys):
    env = envelope(capsys, "delta-dist", "--form", "1,1,-1,1", "--space", "W", "--search")
    p = env["payload"]
    assert p["criterion"]["exists"] is False and p["search"]["exists"] is False
    env = envelope(capsys, "delta-dist", "--form", "1,1,2,1", "--search")
    res = DeltaDistResult.from_json(env["payload"]["criterion"])
    assert res.exists and res.witness.resolvent.coeffs == (1, 1, 2, 1)


def test_maximality_and_splitting(capsys):
    env = envelope(capsys, "maximality", "--form", "1,0,0,8")
    assert env["payload"]["maximal"] is False
    env = envelope(capsys, "splitting", "--form", "1,1,0,1", "--p", "2")
    assert env["payload"]["type"] == "(3)"
    env = envelope(capsys, "splitting", "--form", "1,-4,1,6", "--real")
    assert env["payload"]["real_orbits"] == ["(1111)", "(22-)", "(22+)", "(22#)"]


def test_count_detk(capsys):
    env = envelope(capsys, "count-detk", "--k", "4", "--Y", "1", "--oracle")
    assert env["payload"]["agree"]
    assert CountBreakdown.from_json(env["payload"]["counts"]).N == env["payload"]["counts"]["N"]
    env = envelope(capsys, "count-detk", "fit", "--k", "4", "--ys", "4,8,16")
    assert 2.0 < env["payload"]["slope"] < 4.0


def test_pi_echoes_seed(capsys):
    env = envelope(capsys, "pi", "--d", "-1", "--samples", "10000", "--seed", "9",
                   "--ladder", "100")
    assert env["seed"] == 9 and 0 <= env["payload"]["value"] <= 1


def test_sample_jsonl(capsys):
    code, out, _ = run(capsys, "sample", "--a", "1", "--d", "1", "--X", "5", "--height", "bal",
                       "--sign", "+")
    lines = [json.loads(t) for t in out.splitlines()]
    trailer = lines[-1]
    assert trailer["command"] == "sample"
    assert len(lines) - 1 == trailer["payload"]["stats"]["maximal"]
    code, out, _ = run(capsys, "sample", "--a", "1", "--d", "1", "--X", "5", "--stats-only")
    assert len(out.splitlines()) == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["avg"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["delta-dist", "--form", "1,2,3"])
    assert e.value.code == 2


def test_computation_error(capsys):
    code, out, err = run(capsys, "delta-dist", "--form", "1,0,0,8")
    assert code == 1 and "NotMaximal" in err and out == ""


def test_out_file(capsys, tmp_path):
    target = tmp_path / "o.json"
    code, out, _ = run(capsys, "--out", str(target), "avg", "table1")
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["payload"][5]["bound"] == "45/14"


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    env = json.loads(out)
    assert code == 0 and env["payload"]["passed"]
    assert env["payload"]["n_known"] == env["payload"]["n_failed"] > 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "thincubic", "avg", "--a", "2", "--d", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["payload"]["bound"] == "17/12"
