"""Exhaustive enumeration of {-1, 1}^n for small n.

State index convention: bit i of the index is 0 when x(i) = +1 and 1 when
x(i) = -1, so index 0 is the all-(+1) configuration.
"""

import numpy as np

MAX_ENUM_N = 20


def all_configurations(n):
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUM_N}, got {n}")
    idx = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def truth_table(f):
    return np.asarray(f(all_configurations(f.n)), dtype=np.int8)


def stationary_weights(n, p):
    """pi_p over all 2^n indices."""
    plus = np.count_nonzero(all_configurations(n) > 0, axis=1)
    return p**plus * (1.0 - p) ** (n - plus)


def coordinate_kernel(eps, p):
    """2x2 transition matrix of one coordinate over time eps, order (+1, -1)."""
    stay = np.exp(-eps)
    q = -np.expm1(-eps)
    return np.array(
        [[stay + q * p, q * (1.0 - p)],
         [q * p, stay + q * (1.0 - p)]]
    )


def apply_product_kernel(v, n, kernel):
    """(K^{(x)n} v) for a vector indexed by configurations, in O(n 2^n)."""
    t = np.asarray(v, dtype=np.float64).reshape((2,) * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(kernel, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def exact_disagreement(f, g, p):
    """P[f(X_0) != g(X_0)] under pi_p, by enumeration."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    w = stationary_weights(f.n, p)
    return float(np.sum(w[truth_table(f) != truth_table(g)]))


def exact_mean(f, p):
    return float(np.dot(stationary_weights(f.n, p), truth_table(f)))


def exact_instability(f, params, eps):
    """P[f(X_eps) != f(X_0)] exactly, any p, n <= 20."""
    n, p = params.n, params.p
    if f.n != n:
        raise ValueError("dimension mismatch")
    tt = truth_table(f).astype(np.float64)
    w = stationary_weights(n, p)
    cross = float(np.dot(w * tt, apply_product_kernel(tt, n, coordinate_kernel(eps, p))))
    return 0.5 * (1.0 - cross)


def brute_force_covariance(f, p, eps):
    """Cov[f(X_0), f(X_eps)] from the explicit 2^n x 2^n transition matrix.

    Double enumeration over (x, y) pairs; meant for n <= 8.
    """
    n = f.n
    if n > 10:
        raise ValueError("brute force covariance limited to n <= 10")
    k1 = coordinate_kernel(eps, p)
    T = np.ones((1, 1))
    for _ in range(n):
        T = np.kron(k1, T)
    tt = truth_table(f).astype(np.float64)
    w = stationary_weights(n, p)
    mean = float(np.dot(w, tt))
    return float(np.einsum("x,xy,x,y->", w, T, tt, tt)) - mean * mean
