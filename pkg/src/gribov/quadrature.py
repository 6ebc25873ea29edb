"""Composite Gauss-Legendre rules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=64)
def _reference_rule(order: int):
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(edges, order: int = 20):
    """Nodes and weights of an ``order``-point rule on each panel ``[edges[i], edges[i+1]]``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _reference_rule(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (half * x + 0.5 * (a + b)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def uniform_rule(a: float, b: float, node_count: int, order: int = 20):
    """Split ``[a, b]`` into equal panels carrying ``node_count`` nodes in total.

    ``node_count`` is rounded down to a multiple of the panel order; when it is
    smaller than ``order`` a single panel with ``node_count`` nodes is used.
    """
    if node_count <= order:
        return composite_rule([a, b], node_count)
    panels = node_count // order
    return composite_rule(np.linspace(a, b, panels + 1), order)


def graded_edges(scale: float, end: float, ratio: float = 2.0):
    """Panel edges ``0, scale, ratio*scale, ratio**2*scale, ...`` capped at ``end``.

    Geometric grading resolves integrands with a near-singularity at 0.
    """
    edges = [0.0]
    h = min(scale, end)
    while h < end:
        edges.append(h)
        h *= ratio
    edges.append(end)
    return np.array(edges)
