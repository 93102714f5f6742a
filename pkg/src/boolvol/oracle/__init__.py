"""Exact small-instance computations used as ground truth."""

from .binomial import binomial_level_mass, binomial_logpmf, binomial_pmf, pmf_window
from .bounds import (
    LOWER_CONSTANT,
    UPPER_CONSTANT,
    ComparisonCheck,
    lifted_plus_probability,
    normal_cdf,
    normal_pdf,
    ou_exact_moments,
    ou_moment_check,
    verify_comparison_bounds,
)
from .enumerate import (
    all_configurations,
    brute_force_covariance,
    exact_disagreement,
    exact_instability,
    exact_mean,
    stationary_weights,
    truth_table,
)
from .fourier import Spectrum, exact_covariance, walsh_spectrum, walsh_spectrum_direct
from .uniformization import (
    AndersCheck,
    ExactTail,
    exact_hitting_tail,
    occupation_closed_form,
    verify_anders_bound,
)


def exact_level_disagreement(f, g, p):
    """P[f != g] under pi_p for two level-symmetric functions (any n)."""
    import math

    import numpy as np

    tf, tg = f.level_table(), g.level_table()
    if tf is None or tg is None:
        raise ValueError("both functions must be level symmetric")
    if tf.size != tg.size:
        raise ValueError("dimension mismatch")
    levels = np.nonzero(tf != tg)[0]
    return math.fsum(binomial_pmf(levels, tf.size - 1, p)) if levels.size else 0.0
