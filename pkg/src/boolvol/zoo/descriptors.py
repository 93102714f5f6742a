"""Text descriptors for zoo functions.

Grammar::

    descriptor := NAME "{" [param ("," param)*] "}"
    param      := KEY "=" value
    value      := NUMBER | NAME | descriptor

A bare ``NAME`` as the ``base`` of ``striped``/``pinned`` means that family
built with the outer ``n``.  Examples::

    dictator{n=16}
    block{n=1000}
    striped{base=majority,n=10001,p=0.5}
    pinned{base=block{n=10},n=10,k=3}
    circle{n=4096,k=3}
    lift{n=64,k=3}          # cycle size 64, hypercube dimension 64^2
"""

import difflib
import re

from .circle import CircleFunction, HypercubeLift, SchemeCircleFunction, circle_function
from .functions import (
    BlockFunction,
    Constant,
    Dictator,
    Majority,
    Parity,
    PinnedModification,
    StripedModification,
    block_function,
    constant,
    default_block_lengths,
    dictator,
    majority,
    parity,
    pinned_modification,
    striped_modification,
)


class DescriptorError(ValueError):
    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if text is not None and pos is not None:
            message = f"{message} at column {pos + 1}: {text!r}"
        super().__init__(message)


# name -> (required params, optional params, chain, one-line summary, example)
CATALOG = {
    "constant": (("n",), ("v",), "hypercube", "constant +1 (or v)", "constant{n=8,v=1}"),
    "dictator": (("n",), (), "hypercube", "first coordinate", "dictator{n=16}"),
    "parity": (("n",), (), "hypercube", "product of all coordinates", "parity{n=10}"),
    "majority": (("n",), (), "hypercube", "majority vote, n odd", "majority{n=11}"),
    "block": (("n",), (), "hypercube", "sign on the last constant block", "block{n=1000}"),
    "striped": (("base", "p"), ("n",), "hypercube", "alternating +-1 on sparse levels",
                "striped{base=majority,n=10001,p=0.5}"),
    "pinned": (("base", "k"), ("n",), "hypercube", "+1 when the first k coordinates are -1",
               "pinned{base=block,n=10,k=3}"),
    "circle": (("n", "k"), ("strict",), "circle", "depth-k interval function on Z_n",
               "circle{n=4096,k=3}"),
    "lift": (("n", "k"), ("strict",), "hypercube",
             "circle function of cycle size n lifted to dimension n^2", "lift{n=64,k=3}"),
}

RANGES = {
    "n": "positive integer (odd for majority, even for lift)",
    "v": "-1 or 1",
    "p": "0 < p < 1 with n p (1 - p) >= 8",
    "k": "pinned: 1 <= k <= n; circle/lift: k >= 1",
    "strict": "0/1 or false/true (circle default 1, lift default 0)",
    "base": "family name or nested descriptor",
}

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<sym>[{}=,]))")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.toks = []
        i = 0
        while i < len(text):
            if text[i:].strip() == "":
                break
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise DescriptorError("unexpected character", text, i)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            i = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise DescriptorError(f"expected {want!r}", self.text, tok[2])
        self.i += 1
        return tok

    def descriptor(self):
        _, name, pos = self.take("name")
        if self.peek()[1] != "{":
            return name  # bare family name
        self.take("sym", "{")
        params = {}
        while self.peek()[1] != "}":
            if params:
                self.take("sym", ",")
            _, key, kpos = self.take("name")
            if key in params:
                raise DescriptorError(f"duplicate parameter {key!r}", self.text, kpos)
            self.take("sym", "=")
            kind, val, vpos = self.peek()
            if kind == "num":
                self.i += 1
                params[key] = float(val) if any(c in val for c in ".eE") else int(val)
            elif kind == "name":
                params[key] = self.descriptor()
            else:
                raise DescriptorError("expected a value", self.text, vpos)
        self.take("sym", "}")
        return (name, params, pos)


def parse_descriptor(text):
    """Parse into a nested ``(name, params)`` tree without building anything."""
    p = _Parser(text)
    tree = p.descriptor()
    if p.peek()[0] is not None:
        raise DescriptorError("trailing input", text, p.peek()[2])
    if isinstance(tree, str):
        tree = (tree, {}, 0)
    return tree


def _check(name, params, text, pos, inherited=()):
    if name not in CATALOG:
        close = difflib.get_close_matches(name, CATALOG, n=1)
        hint = f"; did you mean {close[0]!r}?" if close else f"; known: {', '.join(CATALOG)}"
        raise DescriptorError(f"unknown function {name!r}{hint}", text, pos)
    required, optional, *_ = CATALOG[name]
    for key in params:
        if key not in required + optional + ("n",):
            raise DescriptorError(f"{name} has no parameter {key!r}", text, pos)
    for key in required:
        if key not in params and key not in inherited:
            raise DescriptorError(f"{name} needs parameter {key!r}", text, pos)


def _int(params, key, text, pos):
    v = params[key]
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if not isinstance(v, int):
        raise DescriptorError(f"parameter {key!r} must be an integer", text, pos)
    return v


def _flag(params, key, default, text, pos):
    v = params.get(key, default)
    if isinstance(v, str):
        v = {"true": 1, "false": 0}.get(v.lower(), v)
    if v not in (0, 1) or isinstance(v, float):
        raise DescriptorError(f"parameter {key!r} must be 0 or 1", text, pos)
    return bool(v)


def _build(tree, text, n=None):
    if isinstance(tree, str):
        tree = (tree, {}, 0)
    name, params, pos = tree
    _check(name, params, text, pos, inherited=("n",) if n is not None else ())
    if "n" in params:
        n_here = _int(params, "n", text, pos)
        if n is not None and n_here != n:
            raise DescriptorError(f"nested n={n_here} does not match outer n={n}", text, pos)
        n = n_here
    if n is None and name in ("striped", "pinned") and isinstance(params.get("base"), tuple):
        # a fully specified nested base fixes the dimension
        base_params = params["base"][1]
        if "n" in base_params:
            n = _int(base_params, "n", text, params["base"][2])
    if n is None:
        raise DescriptorError(f"{name} needs parameter 'n'", text, pos)
    try:
        if name == "constant":
            return constant(n, _int(params, "v", text, pos) if "v" in params else 1)
        if name == "dictator":
            return dictator(n)
        if name == "parity":
            return parity(n)
        if name == "majority":
            return majority(n)
        if name == "block":
            return block_function(default_block_lengths(n))
        if name == "striped":
            return striped_modification(_build(params["base"], text, n), float(params["p"]))
        if name == "pinned":
            return pinned_modification(_build(params["base"], text, n), _int(params, "k", text, pos))
        k = _int(params, "k", text, pos)
        if name == "circle":
            return circle_function(n, k, strict=_flag(params, "strict", 1, text, pos))
        if name == "lift":
            from .circle import hypercube_lift

            return hypercube_lift(circle_function(n, k, strict=_flag(params, "strict", 0, text, pos)))
    except DescriptorError:
        raise
    except ValueError as exc:
        raise DescriptorError(f"invalid {name}: {exc}", text, pos) from exc
    raise AssertionError(name)


def build_function(text):
    """Build a zoo function (hypercube or circle) from its descriptor."""
    return _build(parse_descriptor(text), text)


def _num(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def _inner(f):
    """Descriptor of a base; bare family name when it only carries n."""
    if isinstance(f, (Dictator, Parity, Majority, BlockFunction)) or (
        isinstance(f, Constant) and f.value == 1
    ):
        return type(f).__name__.lower().replace("blockfunction", "block")
    return format_function(f)


def format_function(f):
    if isinstance(f, StripedModification):
        return f"striped{{base={_inner(f.base)},n={f.n},p={_num(f.p)}}}"
    if isinstance(f, PinnedModification):
        return f"pinned{{base={_inner(f.base)},n={f.n},k={f.k}}}"
    if isinstance(f, HypercubeLift):
        c = f.circle
        if not isinstance(c, SchemeCircleFunction):
            raise ValueError("lift of an ad hoc circle function has no descriptor")
        extra = ",strict=1" if c.strict else ""
        return f"lift{{n={c.n},k={c.k}{extra}}}"
    if isinstance(f, CircleFunction):
        return f.descriptor
    if isinstance(f, Constant):
        return f"constant{{n={f.n},v={f.value}}}" if f.value != 1 else f"constant{{n={f.n}}}"
    if isinstance(f, BlockFunction):
        if f.layout != default_block_lengths(f.n):
            raise ValueError("custom block layouts have no descriptor")
        return f"block{{n={f.n}}}"
    for cls, name in ((Dictator, "dictator"), (Parity, "parity"), (Majority, "majority")):
        if isinstance(f, cls):
            return f"{name}{{n={f.n}}}"
    raise ValueError(f"{type(f).__name__} has no descriptor")


def catalog_text():
    lines = ["Function descriptors: name{key=value,...}", ""]
    for name, (req, opt, chain, summary, example) in CATALOG.items():
        params = ", ".join(list(req) + [f"[{o}]" for o in opt])
        lines.append(f"  {name:<9} ({chain})  {summary}")
        lines.append(f"            params: {params}")
        lines.append(f"            example: {example}")
    lines.append("")
    lines.append("Parameter ranges:")
    for key, rng in RANGES.items():
        lines.append(f"  {key:<7} {rng}")
    return "\n".join(lines)
