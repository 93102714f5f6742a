"""Flat array encoding of zoo functions for the simulation kernels.

Every zoo function compiles to a ``Program``: a base function plus an ordered
stack of override layers (outermost first).  A layer either pins the value to
+1 when the first ``k`` coordinates are all -1, or overrides the value on a
set of levels via a table (0 in the table means "defer to the next layer").

Incremental state (int64 array) layout::

    s[0]            level (number of +1 coordinates)
    s[1]            parity (product of all coordinates)
    s[2]            index of the last constant block (block base only)
    s[3 : 3+L]      number of -1 among the first k coordinates, per pin layer
    s[3+L : 3+L+B]  number of +1 coordinates inside each block
"""

from typing import NamedTuple

import numpy as np

from .._jit import jit

BASE_CONSTANT = 0
BASE_DICTATOR = 1
BASE_PARITY = 2
BASE_LEVELS = 3
BASE_BLOCK = 4


class Program(NamedTuple):
    base: int
    n: int
    param: int
    table: np.ndarray  # int8, base level table
    block_of: np.ndarray  # int64, block index per coordinate or -1
    block_len: np.ndarray  # int64
    layer_pin: np.ndarray  # int64, pin length or 0 for a table layer
    layer_table: np.ndarray  # int8 (L, n + 1)


def make_program(base, n, param=0, table=None, block_of=None, block_len=None):
    return Program(
        int(base),
        int(n),
        int(param),
        np.zeros(1, np.int8) if table is None else np.ascontiguousarray(table, np.int8),
        np.zeros(1, np.int64) if block_of is None else np.ascontiguousarray(block_of, np.int64),
        np.zeros(0, np.int64) if block_len is None else np.ascontiguousarray(block_len, np.int64),
        np.zeros(0, np.int64),
        np.zeros((0, n + 1), np.int8),
    )


def push_pin(prog, k):
    return prog._replace(
        layer_pin=np.concatenate([np.array([k], np.int64), prog.layer_pin]),
        layer_table=np.concatenate([np.zeros((1, prog.n + 1), np.int8), prog.layer_table]),
    )


def push_table(prog, table):
    table = np.asarray(table, np.int8).reshape(1, prog.n + 1)
    return prog._replace(
        layer_pin=np.concatenate([np.zeros(1, np.int64), prog.layer_pin]),
        layer_table=np.concatenate([table, prog.layer_table]),
    )


@jit
def state_size(prog):
    return 3 + prog.layer_pin.shape[0] + prog.block_len.shape[0]


@jit
def init_state(prog, x, s):
    n = prog.n
    level = 0
    par = 1
    for i in range(n):
        if x[i] > 0:
            level += 1
        else:
            par = -par
    s[0] = level
    s[1] = par
    s[2] = 0
    nl = prog.layer_pin.shape[0]
    for j in range(nl):
        c = 0
        for i in range(prog.layer_pin[j]):
            if x[i] < 0:
                c += 1
        s[3 + j] = c
    nb = prog.block_len.shape[0]
    off = 3 + nl
    if nb > 0:
        for b in range(nb):
            s[off + b] = 0
        for i in range(n):
            b = prog.block_of[i]
            if b >= 0 and x[i] > 0:
                s[off + b] += 1
        top = 0
        for b in range(nb):
            c = s[off + b]
            if c == 0 or c == prog.block_len[b]:
                top = b
        s[2] = top


@jit
def apply_flip(prog, s, i, new):
    """Update state after coordinate ``i`` changed to ``new`` (O(1) amortised)."""
    if new > 0:
        s[0] += 1
    else:
        s[0] -= 1
    s[1] = -s[1]
    nl = prog.layer_pin.shape[0]
    for j in range(nl):
        if i < prog.layer_pin[j]:
            if new > 0:
                s[3 + j] -= 1
            else:
                s[3 + j] += 1
    if prog.block_len.shape[0] > 0:
        b = prog.block_of[i]
        if b >= 0:
            off = 3 + nl
            if new > 0:
                s[off + b] += 1
            else:
                s[off + b] -= 1
            c = s[off + b]
            const = c == 0 or c == prog.block_len[b]
            if const:
                if b > s[2]:
                    s[2] = b
            elif b == s[2]:
                # block 0 is a singleton, so the scan always terminates
                t = b - 1
                while t > 0:
                    ct = s[off + t]
                    if ct == 0 or ct == prog.block_len[t]:
                        break
                    t -= 1
                s[2] = t


@jit
def value(prog, s, x):
    nl = prog.layer_pin.shape[0]
    for j in range(nl):
        k = prog.layer_pin[j]
        if k > 0:
            if s[3 + j] == k:
                return 1
        else:
            t = prog.layer_table[j, s[0]]
            if t != 0:
                return int(t)
    base = prog.base
    if base == BASE_CONSTANT:
        return prog.param
    if base == BASE_DICTATOR:
        return int(x[prog.param])
    if base == BASE_PARITY:
        return s[1]
    if base == BASE_LEVELS:
        return int(prog.table[s[0]])
    b = s[2]
    if s[3 + nl + b] == prog.block_len[b]:
        return 1
    return -1


@jit
def evaluate_one(prog, x, s):
    init_state(prog, x, s)
    return value(prog, s, x)


@jit
def evaluate_rows(prog, xs, out):
    s = np.zeros(state_size(prog), np.int64)
    for r in range(xs.shape[0]):
        out[r] = evaluate_one(prog, xs[r], s)


@jit
def incremental_rows(prog, xs, coords, out):
    """For each row: init state, flip ``coords[r]``, store the updated value."""
    s = np.zeros(state_size(prog), np.int64)
    x = np.empty(prog.n, np.int8)
    for r in range(xs.shape[0]):
        for i in range(prog.n):
            x[i] = xs[r, i]
        init_state(prog, x, s)
        i = coords[r]
        x[i] = -x[i]
        apply_flip(prog, s, i, x[i])
        out[r] = value(prog, s, x)
