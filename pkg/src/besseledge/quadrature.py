"""Composite Gauss-Legendre grids over unions of adjacent intervals."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss


@functools.lru_cache(maxsize=64)
def gauss_legendre(order):
    """Nodes and weights on [-1, 1]; cached because grids are rebuilt often."""
    if order < 1:
        raise ValueError("order must be positive")
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature nodes in the kernel's own variable.

    ``interval_of[i]`` gives the interval that node ``i`` belongs to and
    ``multipliers[k]`` the constant attached to interval ``k`` (the
    ``s_k - 1`` of an exponential moment, or ``-1`` for a gap).
    """

    intervals: tuple
    nodes: np.ndarray
    weights: np.ndarray
    interval_of: np.ndarray
    multipliers: np.ndarray
    order: int

    @property
    def size(self):
        return len(self.nodes)

    def node_multipliers(self):
        return self.multipliers[self.interval_of]

    def mask(self, k):
        return self.interval_of == k


def _panels(lo, hi, width):
    count = max(1, math.ceil((hi - lo) / width - 1e-12))
    return np.linspace(lo, hi, count + 1)


def composite_grid(breaks, order, panel_width, sqrt_map=False, multipliers=None):
    """Build a grid on the intervals ``[breaks[k], breaks[k+1]]``.

    Every interval is split into equal panels no wider than ``panel_width``,
    and each panel carries ``order`` Gauss-Legendre nodes, so the per-panel
    order is the same everywhere. With ``sqrt_map`` the panels are laid out
    in ``v = sqrt(t)`` and mapped back, with weights ``2 v dv``; the weights
    of each interval still sum to its length in ``t``.
    """
    breaks = [float(b) for b in breaks]
    if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    gx, gw = gauss_legendre(order)
    nodes, weights, owner = [], [], []
    for k, (lo, hi) in enumerate(zip(breaks, breaks[1:])):
        a, b = (math.sqrt(lo), math.sqrt(hi)) if sqrt_map else (lo, hi)
        edges = _panels(a, b, panel_width)
        for p0, p1 in zip(edges, edges[1:]):
            half = 0.5 * (p1 - p0)
            v = p0 + half * (gx + 1.0)
            w = half * gw
            if sqrt_map:
                nodes.append(v * v)
                weights.append(2.0 * v * w)
            else:
                nodes.append(v)
                weights.append(w)
            owner.append(np.full(order, k))
    n_int = len(breaks) - 1
    mult = np.zeros(n_int) if multipliers is None else np.asarray(multipliers, dtype=float)
    if mult.shape != (n_int,):
        raise ValueError("one multiplier per interval is required")
    return QuadratureGrid(
        intervals=tuple(zip(breaks, breaks[1:])),
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        interval_of=np.concatenate(owner),
        multipliers=mult,
        order=order,
    )
