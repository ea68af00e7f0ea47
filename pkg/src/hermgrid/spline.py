"""Piecewise (spline) evaluation: small sliding windows of a large grid.

Instead of one global interpolant of enormous degree, pick per query
point a window of w_i nodes along each axis, build the local interpolant
of the window sub-grid, and evaluate that.  Locals are cached by window
corner, so a sweep over many queries builds each local polynomial once.

Window selection per axis:

* uniform axes: with q the fractional grid position of x, an odd window
  centers on the nearest node (ties round away from zero), start =
  round(q) - (w-1)/2; an even window takes the containing cell plus
  equal numbers of nodes outward, start = floor(q) - w/2 + 1.
* general axes: the w nodes nearest to x, resolved greedily outward from
  the containing cell, distance ties preferring the lower node.
* the chosen range is shifted (never shrunk) back inside the axis when
  it overhangs an end; queries outside the hull get the edge window.

Adjacent windows along an axis switch at seam abscissas midway between
the nodes entering/leaving the window.  For even w on a uniform axis the
seam lies exactly on a node shared by both windows, which forces
agreement of all derivative orders prescribed at that node; continuity
beyond that is not guaranteed, and `continuity_report` measures both.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import floor

import numpy as np

from .interpolant import interpolate
from .polyring import is_exact


def _round_half_away(q):
    if q >= 0:
        return floor(q + Fraction(1, 2)) if is_exact(q) else floor(q + 0.5)
    return -_round_half_away(-q)


def window_start(axis, w, x):
    """Index of the first node of the selected window on one axis."""
    n = axis.npoints
    if w > n:
        raise ValueError(f"window {w} exceeds axis size {n}")
    if axis.is_uniform() and n > 1:
        a0, h = axis.coords[0], axis.coords[1] - axis.coords[0]
        exact = is_exact(x) and is_exact(a0) and is_exact(h)
        q = Fraction(x - a0, h) if exact else (float(x) - float(a0)) / float(h)
        if w % 2:
            start = _round_half_away(q) - (w - 1) // 2
        else:
            start = floor(q) - w // 2 + 1
    else:
        xf = float(x)
        coords = [float(c) for c in axis.coords]
        # grow the nearest-node run outward from the containing cell
        hi = 0
        while hi < n and coords[hi] < xf:
            hi += 1
        lo = hi - 1
        for _ in range(w):
            if lo < 0:
                hi += 1
            elif hi >= n:
                lo -= 1
            elif xf - coords[lo] <= coords[hi] - xf:
                lo -= 1
            else:
                hi += 1
        start = lo + 1
    return min(max(start, 0), n - w)


def axis_seams(axis, w):
    """Abscissas where the window corner changes: midpoints of the node
    leaving and the node entering.  Even w on a uniform axis puts these
    exactly on interior nodes."""
    n = axis.npoints
    if w >= n:
        return []
    c = axis.coords
    return [(c[s] + c[s + w]) / (Fraction(2) if is_exact(c[s]) else 2.0)
            for s in range(n - w)]


class SplineInterpolant:
    """Window-local Hermite interpolation over a full grid of data."""

    def __init__(self, data, window):
        grid = data.grid
        if isinstance(window, int):
            window = (window,) * grid.n
        self.window = tuple(window)
        if len(self.window) != grid.n:
            raise ValueError("one window size per axis required")
        for w, ax in zip(self.window, grid.axes):
            if w < 1 or w > ax.npoints:
                raise ValueError(f"window {w} invalid for axis of {ax.npoints}")
        self.data = data
        self.grid = grid
        self._cache = {}

    def select_window(self, x):
        return tuple(
            window_start(ax, w, v)
            for ax, w, v in zip(self.grid.axes, self.window, x)
        )

    def local(self, corner):
        out = self._cache.get(corner)
        if out is None:
            out = interpolate(self.data.sub_data(corner, self.window),
                              validate=False)
            self._cache[corner] = out
        return out

    def __call__(self, x):
        return self.local(self.select_window(x))(x)

    def derivative(self, x, k):
        return self.local(self.select_window(x)).derivative(x, k)

    def eval_many(self, pts):
        """Binary64 evaluation at an (npoints, n) array, grouped by
        window so each local is contracted against its whole batch."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        groups = {}
        for row, x in enumerate(pts):
            groups.setdefault(self.select_window(tuple(x)), []).append(row)
        out = np.empty(len(pts))
        for corner, rows in groups.items():
            out[rows] = self.local(corner).eval_many(pts[rows])
        return out


def eval_spline(data, window, pts):
    return SplineInterpolant(data, window).eval_many(pts)


def abutting_windows(spline, ax_i, node_idx):
    """Window starts of the patches meeting just below/just above a
    node's hyperplane.  Raises when selection does not switch there."""
    axis = spline.grid.axes[ax_i]
    a = axis.coords[node_idx]
    if node_idx == 0 or node_idx == axis.npoints - 1:
        raise ValueError("node not shared by two patches")
    lo_gap = a - axis.coords[node_idx - 1]
    hi_gap = axis.coords[node_idx + 1] - a
    w = spline.window[ax_i]
    below = window_start(axis, w, float(a) - float(lo_gap) / 2)
    above = window_start(axis, w, float(a) + float(hi_gap) / 2)
    if below == above:
        raise ValueError("node not shared by two patches")
    return below, above


def continuity_report(spline, ax_i, node_idx, probes=8, seed=0,
                      max_order=None, points=None):
    """Largest derivative mismatch between the two patches abutting at
    the hyperplane x_i = a, per derivative order across axis i.

    Probe points lie on the hyperplane (random inside the hull, or pass
    `points` explicitly, e.g. rationals for an exact check).  At each
    probe, mismatches are taken over cross orders 0..max_order along
    axis i (default: the node's multiplicity - 1) combined with orders
    0..min mult - 1 along every other axis.  Returns a list indexed by
    the cross order.
    """
    import itertools

    grid = spline.grid
    axis = grid.axes[ax_i]
    a = axis.coords[node_idx]
    below, above = abutting_windows(spline, ax_i, node_idx)
    if max_order is None:
        max_order = axis.mult[node_idx] - 1
    if points is None:
        rng = random.Random(seed)
        hull = grid.hull()
        points = []
        for _ in range(probes):
            x = [rng.uniform(float(lo), float(hi)) for lo, hi in hull]
            x[ax_i] = float(a)
            points.append(tuple(x))
    side_orders = [
        range(1) if i == ax_i else range(min(grid.axes[i].mult))
        for i in range(grid.n)
    ]
    gaps = [0 * abs(a)] * (max_order + 1)
    for x in points:
        x = tuple(a if i == ax_i else v for i, v in enumerate(x))
        corner = list(spline.select_window(x))
        left, right = list(corner), list(corner)
        left[ax_i], right[ax_i] = below, above
        pl, pr = spline.local(tuple(left)), spline.local(tuple(right))
        for side in itertools.product(*side_orders):
            for t in range(max_order + 1):
                k = tuple(t if i == ax_i else side[i] for i in range(grid.n))
                gap = abs(pl.derivative(x, k) - pr.derivative(x, k))
                if gap > gaps[t]:
                    gaps[t] = gap
    return gaps
