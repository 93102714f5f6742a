"""Named suites of exact checks, driven by ``boolvol verify``."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle, zoo
from .hypercube import DynamicsParams

SUITES = ("anders", "ou", "comparison", "striped", "pinned", "membership", "fourier")

ANDERS_N = tuple(range(1, 13))
ANDERS_DELTAS = (0.1, 0.5, 1.0, 4.0)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {"suite": self.suite, "name": self.name, "passed": bool(self.passed),
                "details": {k: _plain(v) for k, v in self.details.items()}}


def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (str, bool, type(None))):
        return v
    return str(v)  # fractions and anything else exact


def anders():
    out = []
    for n in ANDERS_N:
        for d in ANDERS_DELTAS:
            c = oracle.verify_anders_bound(n, d)
            ok = c.holds and c.identity_err < 1e-10
            out.append(Check("anders", f"n={n} delta={d}", ok, {
                "lhs": c.lhs, "rhs": c.rhs, "identity_err": c.identity_err}))
    return out


def ou(seed=20240501):
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 10**6 + 1))
        p = float(rng.uniform(0.05, 0.95))
        level = int(rng.integers(0, n + 1))
        s = float(rng.uniform(0.0, 5.0))
        mean_err, _ = oracle.ou_moment_check(DynamicsParams(n, p), level, s)
        worst = max(worst, mean_err)
    out.append(Check("ou", "mean identity, 50 random triples", worst <= 1e-12, {"max_mean_err": worst}))
    params = DynamicsParams(10**6, 0.5)
    for s in (0.5, 1.0, 2.0):
        _, var_err = oracle.ou_moment_check(params, 5 * 10**5, s)
        out.append(Check("ou", f"variance n=1e6 s={s}", var_err <= 1e-3, {"var_err": var_err}))
    _, v0 = oracle.ou_moment_check(params, 5 * 10**5, 0.0)
    out.append(Check("ou", "variance s=0", v0 == 0.0, {"var_err": v0}))
    return out


def comparison():
    out = []
    const = zoo.CircleFunction(np.ones(128, np.int8))
    c = oracle.verify_comparison_bounds(const)
    out.append(Check("comparison", "constant +1", c.holds and c.lifted_prob == 1.0, {"lifted_prob": c.lifted_prob}))
    for n in (512, 1024, 2048):
        fc = zoo.circle_function(2 * n, 3)
        c = oracle.verify_comparison_bounds(fc, n)
        out.append(Check("comparison", f"circle(2n,3) n={n}", c.holds, {
            "rho": c.rho, "lifted_prob": c.lifted_prob, "lower": c.lower, "upper": c.upper,
            "member": fc.is_member}))
    return out


def striped():
    out = []
    for n in (10**3, 10**4, 10**5):
        for base in (zoo.parity(n), zoo.majority(n + 1)):
            f = zoo.striped_modification(base, 0.5)
            alpha = f.alpha
            bound = 1.0 / alpha
            total = math.fsum(f.class_masses)
            exact = oracle.exact_level_disagreement(base, f, 0.5)
            ok = (f.mass <= bound and abs(total - 1.0) <= 1e-12 and min(f.class_masses) <= bound
                  and exact <= f.mass + 1e-15)
            out.append(Check("striped", f.descriptor, ok, {
                "alpha": alpha, "mass": f.mass, "bound": bound, "disagreement": exact,
                "class_sum_err": abs(total - 1.0)}))
    return out


def _pinned_bases(n):
    return (zoo.dictator(n), zoo.block_function(n), zoo.parity(n))


def pinned(n=10, ks=(1, 2, 3), deltas=(0.5, 1.0)):
    out = []
    params = DynamicsParams(n)
    for base in _pinned_bases(n):
        for k in ks:
            g = zoo.pinned_modification(base, k)
            dis = oracle.exact_disagreement(base, g, 0.5)
            out.append(Check("pinned", f"{base.descriptor} k={k} closeness", dis <= 2.0**-k,
                             {"disagreement": dis, "bound": 2.0**-k}))
            for d in deltas:
                tail = oracle.exact_hitting_tail(g, params, d).value
                low = 2.0**-k * math.exp(-d * k)
                out.append(Check("pinned", f"{base.descriptor} k={k} delta={d} tail", tail >= low,
                                 {"tail": tail, "bound": low}))
    return out


def membership():
    out = []
    for n, k in ((4096, 3), (2**20, 4)):
        fc = zoo.circle_function(n, k, strict=False)
        for row in fc.membership:
            out.append(Check("membership", f"n={n} k={k} interval {row['id']}", row["ok"], dict(row)))
    return out


def fourier(seed=7, count=20):
    out = []
    rng = np.random.default_rng(seed)
    fs = [zoo.dictator(6), zoo.parity(8), zoo.majority(7), zoo.block_function(8)]
    fs += [zoo.random_function(int(rng.integers(1, 9)), rng) for _ in range(count)]
    for i, f in enumerate(fs):
        name = f.descriptor if not isinstance(f, zoo.TruthTableFunction) else f"random#{i - 3} n={f.n}"
        s = oracle.walsh_spectrum(f)
        parseval = abs(s.weight() - 1.0)
        direct = float(np.max(np.abs(s.coefficients - oracle.walsh_spectrum_direct(f).coefficients)))
        cov_err = max(abs(oracle.exact_covariance(s, e) - oracle.brute_force_covariance(f, 0.5, e))
                      for e in (0.1, 0.5, 2.0))
        ok = parseval <= 1e-12 and direct <= 1e-12 and cov_err <= 1e-10
        out.append(Check("fourier", name, ok, {
            "parseval_err": parseval, "direct_err": direct, "covariance_err": cov_err}))
    return out


_RUNNERS = {
    "anders": anders, "ou": ou, "comparison": comparison, "striped": striped,
    "pinned": pinned, "membership": membership, "fourier": fourier,
}


def run_suite(name):
    if name == "all":
        return [c for s in SUITES for c in _RUNNERS[s]()]
    if name not in _RUNNERS:
        raise KeyError(name)
    return _RUNNERS[name]()
