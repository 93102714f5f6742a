"""Time the simulation kernels under numba and under the plain-Python fallback.

Each backend runs in its own interpreter (the backend is fixed at import
time by BOOLVOL_DISABLE_NUMBA).  Besides timings, every workload reports a
hash of its per-replica output; the two backends must agree bit for bit.

    python benchmarks/bench_kernels.py [--scale 1.0] [--json out.json]
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

WORKLOADS = {
    # name: replicas
    "pairs/config block n=256": 400,
    "pairs/levels majority n=10001": 2000,
    "hits/config block n=256 delta=1": 200,
    "hits/levels majority n=1001 delta=1": 200,
    "hits/circle n=256 delta=0.05": 100,
    "values/config pinned block n=512": 1000,
}


def _workload(name, replicas):
    from boolvol import estimators as est
    from boolvol import zoo
    from boolvol.hypercube import DynamicsParams

    if name.startswith("pairs/config"):
        f = zoo.block_function(256)
        a, b = est._pairs(f, DynamicsParams(256), 0.3, replicas, 1, 1, "config")
        return a.tobytes() + b.tobytes()
    if name.startswith("pairs/levels"):
        f = zoo.majority(10001)
        a, b = est._pairs(f, DynamicsParams(10001), 0.3, replicas, 1, 1, "levels")
        return a.tobytes() + b.tobytes()
    if name.startswith("hits/config"):
        f = zoo.block_function(256)
        t, c = est.hitting_times(f, DynamicsParams(256), 1.0, replicas, 2, 1, "config")
        return t.tobytes() + c.tobytes()
    if name.startswith("hits/levels"):
        f = zoo.majority(1001)
        t, c = est.hitting_times(f, DynamicsParams(1001), 1.0, replicas, 3, 1, "levels")
        return t.tobytes() + c.tobytes()
    if name.startswith("hits/circle"):
        fc = zoo.circle_function(256, 2, strict=False)
        t, c = est.hitting_times(fc, None, 0.05, replicas, 4, 1)
        return t.tobytes() + c.tobytes()
    if name.startswith("values/config"):
        f = zoo.block_function(512)
        g = zoo.pinned_modification(f, 3)
        a, b = est._values(f, g, DynamicsParams(512), replicas, 5, 1, "config")
        return a.tobytes() + b.tobytes()
    raise KeyError(name)


def child(scale):
    from boolvol._jit import backend_name

    out = {"backend": backend_name(), "results": {}}
    for name, reps in WORKLOADS.items():
        reps = max(1, int(reps * scale))
        _workload(name, 1)  # compile / warm up
        t0 = time.perf_counter()
        blob = _workload(name, reps)
        dt = time.perf_counter() - t0
        out["results"][name] = {
            "replicas": reps,
            "seconds": dt,
            "per_replica_us": dt / reps * 1e6,
            "sha256": hashlib.sha256(blob).hexdigest(),
        }
    return out


def run_backend(disable, scale):
    env = dict(os.environ)
    if disable:
        env["BOOLVOL_DISABLE_NUMBA"] = "1"
    else:
        env.pop("BOOLVOL_DISABLE_NUMBA", None)
    cmd = [sys.executable, os.path.abspath(__file__), "--child", "--scale", str(scale)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="multiply replica counts")
    ap.add_argument("--json", help="write the combined report here")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.child:
        json.dump(child(args.scale), sys.stdout)
        return 0

    fast = run_backend(False, args.scale)
    slow = run_backend(True, args.scale)
    mismatches = []
    print(f"{'workload':<40} {'numba us':>12} {'python us':>12} {'speedup':>9}  match")
    for name in WORKLOADS:
        a, b = fast["results"][name], slow["results"][name]
        same = a["sha256"] == b["sha256"]
        if not same:
            mismatches.append(name)
        speed = b["per_replica_us"] / a["per_replica_us"] if a["per_replica_us"] > 0 else float("inf")
        print(f"{name:<40} {a['per_replica_us']:>12.1f} {b['per_replica_us']:>12.1f} {speed:>8.1f}x  {same}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"numba": fast, "python": slow, "mismatches": mismatches}, fh, indent=2)
    if mismatches:
        print(f"backends disagree on: {', '.join(mismatches)}", file=sys.stderr)
        return 1
    print("backends agree bit for bit on every workload")
    return 0


if __name__ == "__main__":
    sys.exit(main())
