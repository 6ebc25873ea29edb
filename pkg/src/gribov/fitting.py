"""Power-law fits and tail completions shared by the deficiency and inverse modules."""
from __future__ import annotations

import numpy as np
from scipy.special import zeta


def upper_half(n, values):
    """Restrict ``(n, values)`` to the upper half of the index range."""
    n = np.asarray(n, dtype=float)
    values = np.asarray(values)
    keep = n >= 0.5 * (n.min() + n.max())
    return n[keep], values[keep]


def decay_exponent(n, values, full_range: bool = False) -> float:
    """Least-squares slope of ``log|values|`` against ``log n``.

    By default only the upper half of the index range enters the fit, which
    keeps the small-``n`` transient out of the estimate.
    """
    n = np.asarray(n, dtype=float)
    values = np.abs(np.asarray(values))
    if not full_range:
        n, values = upper_half(n, values)
    keep = values > 0
    slope, _ = np.polyfit(np.log(n[keep]), np.log(values[keep]), 1)
    return float(slope)


def power_law(n, values):
    """Fit ``values ~ C n**s`` on the upper half; returns ``(C, s)``."""
    n, values = upper_half(n, values)
    s, logc = np.polyfit(np.log(n), np.log(np.abs(values)), 1)
    return float(np.exp(logc)), float(s)


def power_tail(n, values, last: int) -> float:
    """Estimate ``sum_{k > last} C k**s`` from a fitted power law.

    Returns ``inf`` when the fitted exponent does not give a summable tail;
    exponents within ``1e-6`` of ``-1`` count as fit noise around the pole.
    """
    c, s = power_law(n, values)
    if s >= -1.0 - 1e-6:
        return float("inf")
    return float(c * zeta(-s, last + 1))
