import json
import os
import subprocess
import sys

import jsonschema
import pytest

from boolvol.cli import main
from boolvol.config import ConfigError, experiment_from_mapping, parse_config
from boolvol.runner import CSV_HEADER, load_schema

GOOD = """\
defaults:
  replicas: 3000
  seed: 7
experiments:
  - id: block-tail
    function: block{n=$n}
    estimator: volatility
    delta: 1
    grid: {n: [16, 64]}
  - id: dictator-cov
    function: dictator{n=8}
    estimator: covariance
    grid: {eps: [0.1, 0.5]}
  - id: pin-close
    function: block{n=32}
    compare: pinned{base=block{n=32},k=3}
    estimator: closeness
    grid: {n: [32]}
"""


def _write(tmp_path, text, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_good(tmp_path):
    exps = parse_config(GOOD, tmp_path)
    assert [e.id for e in exps] == ["block-tail", "dictator-cov", "pin-close"]
    assert exps[0].replicas == 3000 and exps[0].seed == 7 and exps[0].delta == 1.0
    assert exps[1].grid_name == "eps" and exps[1].output == tmp_path / "dictator-cov.csv"


@pytest.mark.parametrize("text,line,needle", [
    ("experiments:\n  - id: a\n    function: dictator{n=4}\n    estimator: degeneracy\n    grid: {n: []}\n", 5, "nonempty"),
    ("experiments:\n  - id: a\n    function: foo{}\n    estimator: degeneracy\n    grid: {n: [4]}\n", 3, "descriptor"),
    ("experiments:\n  - id: a\n    function: dictator{n=4}\n    estimator: vol\n    grid: {n: [4]}\n", 4, "estimator"),
    ("experiments:\n  - id: a\n    function: dictator{n=4}\n    estimator: degeneracy\n    bogus: 1\n    grid: {n: [4]}\n", 5, "unknown key"),
    ("experiments:\n  - id: a\n    id: b\n", 3, "duplicate"),
    ("experiments:\n  - id: a\n    function: [unclosed\n", 4, "syntax"),
    ("experiments:\n  - id: a\n    function: dictator{n=4}\n    estimator: volatility\n    grid: {n: [4]}\n", 2, "needs delta"),
    ("experiments:\n  - id: a\n    function: dictator{n=4}\n    estimator: degeneracy\n    replicas: 0\n    grid: {n: [4]}\n", 5, "replicas"),
])
def test_parse_errors_carry_position(text, line, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text, source="x.yaml")
    assert info.value.line == line, str(info.value)
    assert needle in str(info.value)
    assert str(info.value).startswith(f"x.yaml:{line}:")


def test_parse_top_level_errors():
    for text in ("", "- 1", "experiments: []", "experiments: [1]", "foo: 1\nexperiments: []"):
        with pytest.raises(ConfigError):
            parse_config(text)


def test_chain_mismatch_rejected():
    with pytest.raises(ConfigError):
        experiment_from_mapping({"id": "a", "function": "dictator{n=4}", "estimator": "degeneracy",
                                 "grid": {"n": [4]}, "chain": "circle"})


def test_run_csv_and_sidecar(tmp_path):
    cfg = _write(tmp_path, GOOD)
    assert main(["run", str(cfg)]) == 0
    text = (tmp_path / "block-tail.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 3
    assert lines[1].startswith("block-tail,hypercube,block{n=16")
    meta = json.loads((tmp_path / "block-tail.json").read_text())
    jsonschema.validate(meta, load_schema())
    assert meta["status"] == "ok" and meta["rows"] == 2
    cov = (tmp_path / "dictator-cov.csv").read_text().splitlines()
    assert cov[1].split(",")[-1] == ""  # no censoring column outside tail runs


def test_csv_byte_identical_across_runs_and_workers(tmp_path):
    blobs = []
    for i, workers in enumerate((1, 1, 4, 16)):
        out = tmp_path / str(i)
        out.mkdir()
        cfg = _write(out, GOOD.replace("replicas: 3000", "replicas: 5000"))
        assert main(["run", str(cfg), "--workers", str(workers)]) == 0
        blobs.append(b"".join((out / f"{e}.csv").read_bytes() for e in ("block-tail", "dictator-cov", "pin-close")))
    assert len(set(blobs)) == 1


def test_run_bad_config_exits_2(tmp_path, capsys):
    cfg = _write(tmp_path, "experiments:\n  - id: a\n    function: foo{}\n    estimator: degeneracy\n    grid: {n: [4]}\n")
    assert main(["run", str(cfg)]) == 2
    assert ":3:" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2


def test_partial_run_keeps_rows(tmp_path):
    text = ("experiments:\n  - id: maj\n    function: majority{n=$n}\n    estimator: degeneracy\n"
            "    replicas: 100\n    grid: {n: [5, 7]}\n")
    cfg = _write(tmp_path, text)
    assert main(["run", str(cfg)]) == 0
    # an even n only fails when the row is built, after validation of earlier rows
    from boolvol.runner import execute
    exp = parse_config(text, tmp_path)[0]
    object.__setattr__(exp, "grid", (5, 6, 7))
    meta, err = execute(exp)
    assert err is not None and meta["status"] == "partial" and meta["rows"] == 1
    jsonschema.validate(meta, load_schema())
    assert len((tmp_path / "maj.csv").read_text().splitlines()) == 2


def test_sweep_command(tmp_path, capsys):
    out = tmp_path / "s.csv"
    rc = main(["sweep", "--fn", "dictator{n=4}", "--estimator", "volatility", "--grid", "delta=0.5,1",
               "--replicas", "2000", "--out", str(out)])
    assert rc == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 3 and rows[1].split(",")[5:7] == ["delta", "0.5"]
    assert "projected events" in capsys.readouterr().err
    assert main(["sweep", "--fn", "dictator{n=4}", "--estimator", "volatility", "--grid", "x=1",
                 "--out", str(out)]) == 2


def test_strict_refuses_large_runs(tmp_path, capsys):
    out = tmp_path / "big.csv"
    args = ["sweep", "--fn", "block{n=$n}", "--estimator", "volatility", "--delta", "10",
            "--grid", "n=100000", "--replicas", "2000000", "--out", str(out), "--strict"]
    assert main(args) == 1
    err = capsys.readouterr().err
    assert "warning" in err and "refusing" in err and not out.exists()


def test_verify_suites(capsys, tmp_path):
    assert main(["verify", "anders"]) == 0
    assert "48/48 checks passed" in capsys.readouterr().out
    assert main(["verify", "fourier", "--json", "-"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["total"] == report["checks"].__len__() > 0
    assert main(["verify", "membership", "--json", str(tmp_path / "m.json")]) == 0
    assert json.loads((tmp_path / "m.json").read_text())["failed"] == 0
    assert main(["verify", "ander"]) == 2
    assert "did you mean 'anders'" in capsys.readouterr().err


def test_list_functions(capsys):
    assert main(["list-functions"]) == 0
    text = capsys.readouterr().out
    for name in ("dictator", "parity", "majority", "block", "striped", "pinned", "circle", "lift"):
        assert name in text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "boolvol", "--version"], capture_output=True, text=True,
                         env={**os.environ})
    assert res.returncode == 0 and res.stdout.startswith("boolvol ")
