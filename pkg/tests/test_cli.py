import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from dimsob import __version__
from dimsob.cli import fmt, load_schema, main, make_envelope, parse_range, stability_hash


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def envelope(capsys, *argv, expect=0):
    code, out, err = run(capsys, *argv)
    assert code == expect, err
    env = json.loads(out)
    jsonschema.validate(env, load_schema())
    return env


def test_fmt():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(float("inf")) == "inf" and fmt(float("-inf")) == "-inf" and fmt(float("nan")) == "nan"


def test_parse_range():
    assert list(parse_range("2..4")) == [2, 3, 4]
    assert list(parse_range("7")) == [7]


def test_constants_csv(capsys):
    code, out, _ = run(capsys, "constants", "--kind", "rn", "--n-range", "1..4", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["kind", "n", "value"]
    assert [r["value"] for r in rows] == ["0.886226925453", "0.707106781187", "0.634821225625", "0.594603557501"]


def test_constants_json(capsys):
    env = envelope(capsys, "constants", "--kind", "ball", "--n-range", "2..3", "--format", "json")
    assert [r["n"] for r in env["rows"]] == [2, 3]
    assert env["summary"] == {"passed": 0, "total": 0, "all_passed": True}
    assert env["tool_version"] == __version__


def test_norm(capsys, tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("breakpoint,value\n0.25,2\n1.0,1\n")
    env = envelope(capsys, "norm", "--space", "lp:2", "--profile", str(path))
    assert env["rows"][0]["value"] == pytest.approx((0.25 * 4 + 0.75) ** 0.5, rel=1e-11)
    code, out, _ = run(capsys, "norm", "--space", "lp:1", "--profile", str(path), "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "space,value"


def test_norm_bad_profile(capsys, tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("0.5,1\n0.4,2\n")
    code, _, err = run(capsys, "norm", "--space", "lp:2", "--profile", str(path))
    assert code == 2 and "bad profile" in err
    assert run(capsys, "norm", "--space", "lp:2", "--profile", str(tmp_path / "missing.csv"))[0] == 2


def test_verify_example(capsys):
    env = envelope(capsys, "verify", "--theorem", "teo01", "--space", "lp:2", "--geometry", "ball",
                   "--n", "3", "--family", "radial:linear", "--seed", "42")
    rep = env["reports"][0]
    assert rep["passed"] and rep["name"] == "teo01" and env["seed"] == 42
    assert env["summary"]["all_passed"]


def test_verify_vacuous_inf_spelled_out(capsys):
    env = envelope(capsys, "verify", "--theorem", "main2", "--space", "lp:1", "--geometry", "rn", "--n", "3")
    assert env["reports"][0]["rhs"] == "inf"
    assert env["reports"][0]["metadata"]["vacuous"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--theorem", "nope", "--space", "lp:2", "--geometry", "rn", "--n", "3"),
        ("verify", "--theorem", "main1", "--space", "lq:2", "--geometry", "rn", "--n", "3"),
        ("verify", "--theorem", "main1", "--space", "lp:2", "--geometry", "torus", "--n", "3"),
        ("verify", "--theorem", "ordenk", "--space", "lp:2", "--geometry", "rn", "--n", "5",
         "--family", "radial:square", "--k", "3"),
        ("sweep", "--theorem", "main1", "--space", "lp:2", "--geometry", "rn", "--n-range", "5..2"),
        ("sweep", "--theorem", "main1", "--space", "lp:2", "--geometry", "rn", "--n-range", "2..3",
         "--family", "radial:nope"),
        ("sweep", "--theorem", "main1", "--space", "lp:2", "--geometry", "rn", "--n-range", "2..3", "--jobs", "0"),
        ("constants", "--kind", "rn", "--n-range", "a..b"),
        ("constants", "--kind", "sphere", "--n-range", "1..3"),
        ("oracle", "--suite", "3d"),
        ("frobnicate",),
    ],
)
def test_exit_code_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "no" / "such" / "dir.json"
    code, _, err = run(capsys, "constants", "--kind", "rn", "--n-range", "1..2", "-o", str(target))
    assert code == 2 and "cannot write" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "c.csv"
    code, out, _ = run(capsys, "constants", "--kind", "rn", "--n-range", "1..2", "--format", "csv", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("kind,n,value\n")


def test_sweep_csv_and_json(capsys):
    argv = ["sweep", "--theorem", "main1", "--space", "lp:2", "--geometry", "rn", "--n-range", "2..4"]
    code, out, _ = run(capsys, *argv, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,ratio,constant,max_so_far" and len(lines) == 4
    env = envelope(capsys, *argv, "--format", "json")
    assert env["summary"] == {"passed": 3, "total": 3, "all_passed": True}


def test_sweep_cube_deterministic(capsys):
    argv = ["sweep", "--theorem", "main2", "--space", "lp:2", "--geometry", "cube", "--n-range", "2..3",
            "--family", "tensor:identity", "--samples", "20000", "--seed", "3", "--format", "json"]
    a = envelope(capsys, *argv)
    b = envelope(capsys, *argv)
    assert a["stability_hash"] == b["stability_hash"]
    a.pop("wall_clock"), b.pop("wall_clock")
    assert a == b


def test_byte_stable_modulo_clock(capsys):
    argv = ("oracle", "--suite", "norms", "--trials", "3", "--seed", "5")
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        outs.append("\n".join(line for line in out.splitlines() if '"wall_clock"' not in line))
    assert outs[0] == outs[1]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("DIMSOB_SEED", "17")
    env = envelope(capsys, "oracle", "--suite", "1d", "--trials", "2")
    assert env["seed"] == 17
    explicit = envelope(capsys, "oracle", "--suite", "1d", "--trials", "2", "--seed", "17")
    assert explicit["stability_hash"] != env["stability_hash"]  # the command line differs
    assert explicit["reports"] == env["reports"]
    monkeypatch.setenv("DIMSOB_SEED", "x")
    assert run(capsys, "oracle", "--suite", "1d", "--trials", "2")[0] == 2


@pytest.mark.parametrize("suite", ["1d", "2d", "norms"])
def test_oracle_suites(capsys, suite):
    code, out, err = run(capsys, "oracle", "--suite", suite, "--trials", "5", "--seed", "1")
    assert code == 0 and "5/5" in err
    jsonschema.validate(json.loads(out), load_schema())


def test_empty_run_envelope(capsys):
    env = envelope(capsys, "oracle", "--suite", "1d", "--trials", "0", "--seed", "1")
    assert env["reports"] == [] and env["summary"] == {"passed": 0, "total": 0, "all_passed": True}


def test_stability_hash_ignores_clock():
    a = make_envelope(["x"], 1, [{"v": 1.0}], [], None)
    b = dict(a, wall_clock=123.0)
    assert stability_hash(a) == stability_hash(b) == a["stability_hash"]
    assert make_envelope(["y"], 1, [{"v": 1.0}], [], None)["stability_hash"] != a["stability_hash"]


def test_schema_rejects_extra_keys():
    env = make_envelope(["x"], None)
    jsonschema.validate(env, load_schema())
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(dict(env, extra=1), load_schema())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dimsob", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
    res = subprocess.run([sys.executable, "-m", "dimsob", "constants", "--kind", "rn", "--n-range", "1",
                          "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[1] == "rn,1,0.886226925453"
