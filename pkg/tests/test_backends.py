"""The numba kernels and the plain-Python fallback must agree bit for bit."""

import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

SNIPPET = """
import hashlib, json
from boolvol import estimators as est, zoo
from boolvol._jit import backend_name
from boolvol.hypercube import DynamicsParams
out = {"backend": backend_name()}
f = zoo.striped_modification(zoo.majority(1001), 0.5)
out["stripe"] = est.estimate_closeness(zoo.majority(1001), f, replicas=3000, seed=4).estimate
t, c = est.hitting_times(zoo.parity(12), DynamicsParams(12, 0.3), 0.4, 500, 9)
out["hits"] = hashlib.sha256(t.tobytes() + c.tobytes()).hexdigest()
out["cov"] = est.estimate_covariance(zoo.block_function(40), eps=0.2, replicas=500, seed=1).estimate
fc = zoo.circle_function(128, 2, strict=False)
out["circle"] = est.estimate_circle_volatility_tail(fc, 0.02, replicas=200, seed=2).estimate
print(json.dumps(out))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("BOOLVOL_DISABLE_NUMBA", None)
    if disable:
        env["BOOLVOL_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def test_estimators_identical_across_backends():
    fast, slow = _run(False), _run(True)
    assert fast.pop("backend") == "numba" and slow.pop("backend") == "python"
    assert fast == slow


def test_benchmark_reports_agreement(tmp_path):
    report = tmp_path / "bench.json"
    res = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"), "--scale", "0.02",
                          "--json", str(report)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    data = json.loads(report.read_text())
    assert data["mismatches"] == []
    assert data["numba"]["backend"] == "numba" and data["python"]["backend"] == "python"
