"""Composite Gauss-Legendre panels, with oscillation-aware panel sizing."""

import math
from functools import lru_cache

import numpy as np

from .config import DEFAULT_QUAD


@lru_cache(maxsize=64)
def gauss_rule(q):
    x, w = np.polynomial.legendre.leggauss(q)
    return x, w


def panel_nodes(breaks, q=None):
    """Nodes and weights of a q-point rule on every interval in breaks."""
    q = q or DEFAULT_QUAD.gauss_points
    x, w = gauss_rule(q)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def split_interval(lo, hi, max_width, min_panels=1):
    """Evenly subdivide [lo, hi] into panels no wider than max_width."""
    n = max(min_panels, int(math.ceil((hi - lo) / max_width)))
    return list(np.linspace(lo, hi, n + 1))


def oscillatory_breaks(lo, hi, kmax, mandatory=(), q=None, points_per_period=None,
                       smooth_panel=None):
    """Panel break points resolving e^{i k x} up to |k| = kmax.

    Guarantees at least points_per_period quadrature nodes per period
    2*pi/kmax while also keeping panels below the smooth-structure width.
    """
    q = q or DEFAULT_QUAD.gauss_points
    ppp = points_per_period or DEFAULT_QUAD.points_per_period
    smooth = smooth_panel or DEFAULT_QUAD.smooth_panel
    max_w = smooth
    if kmax > 0:
        max_w = min(max_w, q * 2.0 * math.pi / (ppp * kmax))
    pts = sorted({float(lo), float(hi), *(float(b) for b in mandatory
                                          if lo < b < hi)})
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        seg = split_interval(a, b, max_w)
        out.extend(seg[:-1])
    out.append(pts[-1])
    return out


def oscillatory_mesh(lo, hi, kmax, mandatory=(), q=None, **kw):
    breaks = oscillatory_breaks(lo, hi, kmax, mandatory=mandatory, q=q, **kw)
    return panel_nodes(breaks, q=q)


def geometric_breaks(radius, inner=1.0, ratio=2.0, cap=None):
    """Symmetric breakpoints that refine toward the origin: 0, ±inner, ±2·inner, ...

    Used for algebraically decaying integrands where the structure scale
    grows with |x|; cap bounds the widest panel.
    """
    pos = [0.0]
    step = inner
    x = 0.0
    while x < radius:
        nxt = min(radius, x + step)
        if cap is not None and nxt - x > cap:
            pos.extend(split_interval(x, nxt, cap)[1:])
        else:
            pos.append(nxt)
        x = nxt
        step *= ratio
    neg = [-p for p in reversed(pos[1:])]
    return neg + pos


def integrate_1d(fn, breaks, q=None):
    nodes, weights = panel_nodes(breaks, q=q)
    return float(np.dot(weights, fn(nodes)))
