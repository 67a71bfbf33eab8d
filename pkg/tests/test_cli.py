import json

import pytest

from doobsim.cli import main


def _csv(tmp_path, text, name="p.csv"):
    f = tmp_path / name
    f.write_text(text)
    return str(f)


def test_list_suites(capsys):
    assert main(["list-suites"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == sorted(names) and "doob-survival" in names and len(names) == 16


def test_decompose_writes_csv_and_summary(tmp_path, capsys):
    src = _csv(tmp_path, "t,value\n0,1\n1,2\n2,1\n")
    out = str(tmp_path / "d.csv")
    assert main(["decompose", src, "--out", out]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "t,N,S,Z,M,A"
    assert [float(v) for v in lines[3].split(",")][:5] == [2.0, 1.0, 2.0, 0.5, 1.5]
    summary = json.loads(open(str(tmp_path / "d.json")).read())
    assert summary["g_index"] == 1 and summary["M_end"] == 1.5


def test_decompose_constant_path(tmp_path):
    src = _csv(tmp_path, "t,value\n0,1\n1,1\n2,1\n")
    assert main(["decompose", src]) == 0
    summary = json.loads(open(str(tmp_path / "p.decomposed.json")).read())
    assert summary["g_index"] == 2 and summary["A_end"] == 0.0


@pytest.mark.parametrize("text", ["0,1\n1,2\n", "t,value\n0,1\n1,0\n", "t,value\n0,1\n1,-1\n"])
def test_decompose_rejects_bad_input(tmp_path, text, capsys):
    assert main(["decompose", _csv(tmp_path, text)]) == 2
    assert "error" in capsys.readouterr().err


def test_decompose_missing_file(tmp_path):
    assert main(["decompose", str(tmp_path / "nope.csv")]) == 2


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nonsense"],
    ["verify", "--suite", "uniform-ratio", "--n-paths", "10"],
    ["verify", "--generator", "gbm", "--suite", "doob-survival"],
    ["verify", "--step", "-1"],
    ["verify", "--generator", "heston"],
    ["verify", "--bogus"],
    [],
])
def test_verify_usage_errors(argv):
    assert main(argv) == 2


def test_config_file_and_unknown_keys(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_paths": 10, "colour": "red"}))
    assert main(["verify", "--config", str(bad)]) == 2
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"n_paths": 2000, "suite": "doob-survival", "seed": 3}))
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(good), "--out", str(out)]) in (0, 1)
    rep = json.loads(out.read_text())
    assert rep["n"] == 2000 and rep["seed"] == 3 and rep["identity_name"] == "doob-survival"


def test_verify_dumps(tmp_path, capsys):
    out = tmp_path / "r.json"
    samples = tmp_path / "s.csv"
    times = tmp_path / "t.csv"
    rc = main(["verify", "--suite", "uniform-ratio", "--n-paths", "2000", "--out", str(out),
               "--dump-samples", str(samples), "--dump-times", str(times)])
    assert rc in (0, 1)
    line = capsys.readouterr().out.strip()
    assert line.split()[0] in ("PASS", "FAIL") and "uniform-ratio" in line
    assert samples.read_text().splitlines()[0].startswith("path_id,")
    assert times.read_text().splitlines()[0] == "path_id,g,rho,t0,s_end,r_rho"
    rep = json.loads(out.read_text())
    assert set(["pass", "statistic", "threshold", "n", "seed"]) <= set(rep)
