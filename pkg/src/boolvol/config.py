"""Experiment files.

An experiment file is YAML with an ``experiments`` list and an optional
``defaults`` mapping merged into every entry::

    defaults:
      replicas: 20000
      seed: 7
    experiments:
      - id: dictator-tail
        function: dictator{n=8}
        estimator: volatility
        grid: {delta: [0.25, 1, 4]}
      - id: block-volatility
        function: block{n=$n}
        estimator: volatility
        delta: 1
        grid: {n: [64, 256, 1024]}

Exactly one grid key (``n``, ``eps`` or ``delta``) is allowed.  With an
``n`` grid, ``$n`` in the descriptors is replaced by each grid value.
Output paths are relative to the experiment file.
"""

import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .estimators import ESTIMATORS, GRID_PARAMS, PATHS
from .zoo import CircleFunction, DescriptorError, build_function

CHAINS = ("hypercube", "circle")
KEYS = {
    "id", "chain", "function", "compare", "estimator", "grid", "p", "n", "eps", "delta",
    "replicas", "seed", "output", "path",
}
_ID = re.compile(r"[A-Za-z0-9_.-]+\Z")


class ConfigError(ValueError):
    def __init__(self, message, line=None, column=None, source=None):
        where = ""
        if line is not None:
            where = f"{source or '<config>'}:{line}:{column}: "
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column


class _Map(dict):
    """Mapping that remembers where each key sits in the source."""

    mark = None
    marks = None


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    loader.flatten_mapping(node)
    out = _Map()
    out.mark = node.start_mark
    out.marks = {}
    for knode, vnode in node.value:
        key = loader.construct_object(knode, deep=True)
        if key in out:
            m = knode.start_mark
            raise ConfigError(f"duplicate key {key!r}", m.line + 1, m.column + 1)
        out[key] = loader.construct_object(vnode, deep=True)
        out.marks[key] = vnode.start_mark
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)


@dataclass(frozen=True)
class Experiment:
    id: str
    chain: str
    function: str
    estimator: str
    grid_name: str
    grid: tuple
    replicas: int
    seed: int
    output: Path
    p: float = 0.5
    n: int | None = None
    eps: float | None = None
    delta: float | None = None
    compare: str | None = None
    path: str = "auto"
    echo: dict = field(default_factory=dict, compare=False)

    def descriptor_for(self, text, n):
        return text.replace("$n", str(n)) if n is not None else text

    def build(self, value):
        """(f, g) for one grid value."""
        n = int(value) if self.grid_name == "n" else self.n
        f = build_function(self.descriptor_for(self.function, n))
        g = build_function(self.descriptor_for(self.compare, n)) if self.compare else None
        return f, g

    def projected_events(self):
        """Rough event count: n delta R (cube) or n^2 delta R (cycle) for tails."""
        total = 0.0
        for v in self.grid:
            f, _ = self.build(v)
            dim = float(f.n)
            horizon = float(v) if self.grid_name == "delta" else (self.delta or 0.0)
            if self.estimator == "volatility":
                rate = dim * dim if isinstance(f, CircleFunction) else dim
                total += rate * horizon * self.replicas
            elif isinstance(f, CircleFunction) or f.level_table() is not None:
                total += self.replicas
            else:
                total += dim * self.replicas
        return total


def _mark(obj, key):
    marks = getattr(obj, "marks", None)
    return marks.get(key) if marks else None


def _fail(msg, mark, source):
    if mark is None:
        raise ConfigError(msg, source=source)
    raise ConfigError(msg, mark.line + 1, mark.column + 1, source)


def _real(entry, key, source, positive=False):
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{key} must be a number, got {v!r}", entry.marks[key], source)
    v = float(v)
    if v != v or v < 0 or (positive and v == 0):
        _fail(f"{key} must be {'positive' if positive else 'nonnegative'}", entry.marks[key], source)
    return v


def _int(entry, key, source, lo, hi=None):
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < lo or (hi is not None and v > hi):
        rng = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
        _fail(f"{key} must be an integer {rng}, got {v!r}", entry.marks[key], source)
    return v


def _experiment(entry, base_dir, source):
    if not isinstance(entry, _Map):
        raise ConfigError("each experiment must be a mapping", source=source)
    for key in entry:
        if key not in KEYS:
            _fail(f"unknown key {key!r}; allowed: {', '.join(sorted(KEYS))}", entry.marks[key], source)
    for key in ("id", "function", "estimator", "grid"):
        if key not in entry:
            _fail(f"missing required key {key!r}", entry.mark, source)
    eid = entry["id"]
    if not isinstance(eid, str) or not _ID.match(eid):
        _fail(f"id must match [A-Za-z0-9_.-]+, got {eid!r}", entry.marks["id"], source)
    chain = entry.get("chain", "hypercube")
    if chain not in CHAINS:
        _fail(f"chain must be one of {CHAINS}, got {chain!r}", entry.marks["chain"], source)
    est = entry["estimator"]
    if est not in ESTIMATORS:
        _fail(f"estimator must be one of {ESTIMATORS}, got {est!r}", entry.marks["estimator"], source)
    path = entry.get("path", "auto")
    if path not in PATHS:
        _fail(f"path must be one of {PATHS}, got {path!r}", entry.marks["path"], source)

    grid = entry["grid"]
    gmark = entry.marks["grid"]
    if not isinstance(grid, dict) or len(grid) != 1:
        _fail("grid must be a mapping with exactly one of n, eps, delta", gmark, source)
    (gname, gvals), = grid.items()
    if gname not in GRID_PARAMS:
        _fail(f"grid key must be one of {GRID_PARAMS}, got {gname!r}", gmark, source)
    if not isinstance(gvals, list) or not gvals:
        _fail("grid values must be a nonempty list", _mark(grid, gname), source)
    for v in gvals:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != v or v < 0:
            _fail(f"bad grid value {v!r}", _mark(grid, gname), source)
        if gname == "n" and (not isinstance(v, int) or v < 1):
            _fail(f"n grid values must be positive integers, got {v!r}", _mark(grid, gname), source)
        if gname == "delta" and v == 0:
            _fail("delta must be positive", _mark(grid, gname), source)

    kw = {}
    for key in ("eps", "delta"):
        if key in entry:
            kw[key] = _real(entry, key, source, positive=key == "delta")
    need = {"covariance": "eps", "instability": "eps", "volatility": "delta"}.get(est)
    if gname not in ("n", need):
        _fail(f"estimator {est} cannot sweep over {gname}", gmark, source)
    if need and gname != need and need not in kw:
        _fail(f"estimator {est} needs {need}", entry.mark, source)
    if "n" in entry:
        kw["n"] = _int(entry, "n", source, 1)
    if gname != "n" and "$n" in entry["function"] and "n" not in kw:
        _fail("descriptor uses $n but there is no n grid or n value", entry.marks["function"], source)
    p = _real(entry, "p", source) if "p" in entry else 0.5
    if not 0.0 <= p <= 1.0:
        _fail("p must lie in [0, 1]", entry.marks["p"], source)
    replicas = _int(entry, "replicas", source, 1) if "replicas" in entry else 10_000
    seed = _int(entry, "seed", source, 0, 2**64 - 1) if "seed" in entry else 0
    compare = entry.get("compare")
    if (est == "closeness") != (compare is not None):
        mark = entry.marks.get("compare", entry.mark)
        _fail("closeness needs 'compare' (and only closeness uses it)", mark, source)
    out = Path(entry.get("output", f"{eid}.csv"))
    if not out.is_absolute():
        out = base_dir / out

    exp = Experiment(
        id=eid, chain=chain, function=entry["function"], estimator=est, grid_name=gname,
        grid=tuple(gvals), replicas=replicas, seed=seed, output=out, p=p, compare=compare,
        path=path, echo=dict(entry), **kw,
    )
    # every descriptor must build and live on the declared chain
    for v in exp.grid if gname == "n" else exp.grid[:1]:
        try:
            f, g = exp.build(v)
        except DescriptorError as exc:
            m = entry.marks["function"]
            _fail(f"bad descriptor: {exc}", m, source)
        except ValueError as exc:
            _fail(f"cannot build function: {exc}", entry.marks["function"], source)
        is_circle = isinstance(f, CircleFunction)
        if is_circle != (chain == "circle"):
            _fail(f"function {f!r} does not live on the {chain} chain", entry.marks["function"], source)
        if g is not None and (isinstance(g, CircleFunction) != is_circle or g.n != f.n):
            _fail("compare function has a different chain or dimension", entry.marks["compare"], source)
    return exp


def experiment_from_mapping(mapping, base_dir="."):
    """Validate a plain mapping (no source positions) as one experiment."""
    entry = _Map(mapping)
    entry.marks = defaultdict(lambda: None)
    return _experiment(entry, Path(base_dir), None)


def parse_config(text, base_dir=".", source=None):
    """Parse experiment-file text into a list of ``Experiment``."""
    try:
        data = yaml.load(text, Loader=_Loader)
    except ConfigError as exc:
        raise ConfigError(exc.message, exc.line, exc.column, source) from None
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise ConfigError(f"syntax error: {exc.problem}", m.line + 1, m.column + 1, source) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"syntax error: {exc}", source=source) from None
    if not isinstance(data, _Map) or "experiments" not in data:
        raise ConfigError("top level must be a mapping with an 'experiments' list", source=source)
    for key in data:
        if key not in ("experiments", "defaults"):
            _fail(f"unknown top-level key {key!r}", data.marks[key], source)
    defaults = data.get("defaults") or _Map()
    if not isinstance(defaults, _Map):
        _fail("defaults must be a mapping", data.marks["defaults"], source)
    items = data["experiments"]
    if not isinstance(items, list) or not items:
        _fail("experiments must be a nonempty list", data.marks["experiments"], source)
    out = []
    seen = set()
    for item in items:
        if not isinstance(item, _Map):
            _fail("each experiment must be a mapping", data.marks["experiments"], source)
        merged = _Map({**defaults, **item})
        merged.mark = item.mark
        merged.marks = {**(defaults.marks or {}), **item.marks}
        exp = _experiment(merged, Path(base_dir), source)
        if exp.id in seen:
            _fail(f"duplicate experiment id {exp.id!r}", item.marks["id"], source)
        seen.add(exp.id)
        out.append(exp)
    return out


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent, str(path))
