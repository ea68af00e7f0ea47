"""Hermite coordinate interpolation on rectilinear grids.

Given values and mixed partial derivatives t_a^k prescribed at the points
of a grid (orders k_i = 0 .. nu_i(a_i)-1 per axis), there is exactly one
polynomial with per-axis degree below the axis condition count matching
all of them.  This module builds it three independent ways:

* `interpolate`: the production route.  Per grid point the interaction
  between slot functions is captured by a unit lower triangular matrix
  Lambda that factors into a Kronecker product of per-axis blocks, so the
  full coefficient tensor Xi is obtained by n sweeps of block forward
  substitution over the condition tensor, one axis at a time.  Cost is
  linear in the data per sweep; no global linear system is ever formed.
* `spitzbart_interpolate`: closed-form univariate cardinal polynomials
  via truncated power-series inversion of the nodal polynomial, tensored
  across axes.  Slow but independent of the Lambda machinery.
* `vandermonde_interpolate`: dense exact solve against the monomial
  basis.  Brute force, capped at 512 conditions.

All three agree exactly in rational arithmetic; tests rely on that.

Evaluation keeps the factored form: the interpolant is a contraction of
Xi with per-axis slot function values, which is numerically benign even
at degree 29 where the expanded monomial form is unusable.  Expansion to
a plain polynomial is available (and lazy) for low degrees and for the
division algorithms.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from .grid import GridSpec, HermiteData, nodal_basis
from .multiindex import enumerate_box
from .polyring import (
    MultiPoly,
    UniPoly,
    is_exact,
    jet_derivatives,
    jet_mul,
    series_inverse_at,
)

EXPAND_DEGREE_LIMIT = 15

_VANDERMONDE_CAP = 512


def _axis_exact(axis):
    return all(is_exact(c) for c in axis.coords)


def axis_lambda(axis, j):
    """Lower triangular interaction block for node j of one axis.

    Entry (r, c) is C(r,c) * H^{(r-c)}(a) where H is the nodal polynomial
    of node j and a its coordinate: the r-th derivative at a of the slot
    function (x-a)^c H(x) / c!.  Unit diagonal since H(a) = 1.
    """
    m = axis.mult[j]
    a = axis.coords[j]
    exact = _axis_exact(axis)
    one = Fraction(1) if exact else 1.0
    jet = [one] + [0 * one] * (m - 1)
    for i, c in enumerate(axis.coords):
        if i == j:
            continue
        # ((x-c)/(a-c))^mult expanded at a: (1 + (x-a)/(a-c))^mult
        inv = Fraction(1, 1) / (a - c) if exact else 1.0 / (a - c)
        fac = [one]
        for _ in range(axis.mult[i]):
            fac = jet_mul(fac, [one, inv], m)
        jet = jet_mul(jet, fac, m)
    dv = jet_derivatives(jet)
    return [
        [comb(r, c) * dv[r - c] if r >= c else 0 * one for c in range(m)]
        for r in range(m)
    ]


def build_lambda(grid, idx):
    """Full interaction matrix at grid point idx: Kronecker product of the
    per-axis blocks, rows and columns in graded-order enumeration of the
    point's derivative box."""
    lams = [axis_lambda(ax, i) for ax, i in zip(grid.axes, idx)]
    box = enumerate_box(grid.order_box(idx))
    out = []
    for r in box:
        row = []
        for c in box:
            v = 1
            for lam, ri, ci in zip(lams, r, c):
                if ri < ci:
                    v = 0
                    break
                v = v * lam[ri][ci]
            row.append(v)
        out.append(row)
    return out


def lambda_inverse(grid, idx):
    """Inverse of the interaction matrix, by forward substitution on each
    unit column.  Unit lower triangular again."""
    lam = build_lambda(grid, idx)
    size = len(lam)
    cols = []
    for e in range(size):
        x = []
        for r in range(size):
            acc = 1 if r == e else 0
            for c in range(r):
                acc = acc - lam[r][c] * x[c]
            x.append(acc)
        cols.append(x)
    return [[cols[c][r] for c in range(size)] for r in range(size)]


def solve_coefficients(lam, t, method="forward"):
    """xi with Lambda xi = t, for one grid point's interaction matrix.

    t is ordered like the matrix rows (graded box enumeration).
    method="forward" is substitution; "neumann" sums (I - Lambda)^i t,
    which terminates because I - Lambda is nilpotent.  Both must agree
    exactly.
    """
    size = len(t)
    if method == "forward":
        xi = []
        for r in range(size):
            acc = t[r]
            for c in range(r):
                acc = acc - lam[r][c] * xi[c]
            xi.append(acc)
    elif method == "neumann":
        xi = list(t)
        term = list(t)
        for _ in range(1, size):
            # term <- (I - Lambda) term
            term = [
                term[r] - sum(lam[r][c] * term[c] for c in range(r + 1))
                for r in range(size)
            ]
            xi = [a + b for a, b in zip(xi, term)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return xi


def build_basis(grid, idx, k):
    """Basis polynomial for condition (point idx, order k) in factored
    form: product over axes of (x_i - a_i)^{k_i} H_{a_i}(x_i) / k_i!."""
    from .polyring import FactoredTerm
    from math import factorial

    exact = all(_axis_exact(ax) for ax in grid.axes)
    one = Fraction(1) if exact else 1.0
    factors = {}
    scalar = one
    for i, (ax, j) in enumerate(zip(grid.axes, idx)):
        h = nodal_basis(ax, j, one)
        h.axis = i
        a = ax.coords[j]
        shift = UniPoly(i, [-a * one, one])
        for _ in range(k[i]):
            h = h * shift
        scalar = scalar / factorial(k[i])
        factors[i] = h
    return FactoredTerm(grid.n, scalar, factors)


# -- tensor route -----------------------------------------------------


def condition_tensor(data):
    """Prescribed data arranged as one tensor, per-axis slot layout
    (node-major, order-minor).  Every cell is exactly one condition."""
    grid = data.grid
    shape = tuple(ax.condition_count for ax in grid.axes)
    offs = [ax.slot_offsets() for ax in grid.axes]
    if data.dense:
        T = np.zeros(shape)
        for k, arr in data.tensors.items():
            src, dst = [], []
            for i, ax in enumerate(grid.axes):
                nodes = [j for j, m in enumerate(ax.mult) if k[i] < m]
                src.append(nodes)
                dst.append([offs[i][j] + k[i] for j in nodes])
            T[np.ix_(*dst)] = np.asarray(arr, dtype=float)[np.ix_(*src)]
        return T
    exact = data.is_exact()
    T = np.empty(shape, dtype=object) if exact else np.zeros(shape)
    for idx, entries in data.points.items():
        for k, v in entries.items():
            slot = tuple(offs[i][idx[i]] + k[i] for i in range(grid.n))
            T[slot] = Fraction(v) if exact else float(v)
    return T


def _solve_along_axis(T, axis_obj, lams, ax_i):
    m = T.shape[ax_i]
    moved = np.moveaxis(T, ax_i, 0)
    shp = moved.shape
    work = moved.reshape(m, -1).copy()
    offs = axis_obj.slot_offsets()
    for j, mj in enumerate(axis_obj.mult):
        off = offs[j]
        lam = lams[j]
        for r in range(1, mj):
            row = work[off + r]
            for c in range(r):
                row = row - lam[r][c] * work[off + c]
            work[off + r] = row
    return np.moveaxis(work.reshape(shp), 0, ax_i)


def _slot_polys(axis, one=1):
    """Expanded slot polynomials of one axis, slot order."""
    from math import factorial

    out = []
    for j, a in enumerate(axis.coords):
        h = nodal_basis(axis, j, one)
        p = UniPoly(axis=0, coeffs=[one])
        shift = UniPoly(0, [-a * one, one])
        for t in range(axis.mult[j]):
            out.append((h * p).scale(
                Fraction(1, factorial(t)) if is_exact(one) else 1.0 / factorial(t)))
            p = p * shift
    return out


def _slot_values_scalar(axis, x, exact):
    vals = []
    for j, a in enumerate(axis.coords):
        h = Fraction(1) if exact else 1.0
        for i, c in enumerate(axis.coords):
            if i == j:
                continue
            r = Fraction(x - c, a - c) if exact else (x - c) / (a - c)
            for _ in range(axis.mult[i]):
                h = h * r
        p = Fraction(1) if exact else 1.0
        for t in range(axis.mult[j]):
            vals.append(h * p)
            p = p * (x - a) / (t + 1)
    return vals


def _slot_values_batch(axis, xs):
    """Slot function values at a float vector of abscissas: (len(xs), m)."""
    xs = np.asarray(xs, dtype=float)
    cols = []
    for j, a in enumerate(axis.coords):
        a = float(a)
        h = np.ones_like(xs)
        for i, c in enumerate(axis.coords):
            if i == j:
                continue
            h = h * ((xs - float(c)) / (a - float(c))) ** axis.mult[i]
        p = np.ones_like(xs)
        for t in range(axis.mult[j]):
            cols.append(h * p)
            p = p * (xs - a) / (t + 1)
    return np.stack(cols, axis=-1)


def _slot_jets(axis, x, order, exact):
    """Taylor coefficients (not derivatives) of every slot function at x,
    truncated after `order`; list over slots of length order+1 lists."""
    one = Fraction(1) if exact else 1.0
    jets = []
    for j, a in enumerate(axis.coords):
        hj = [one] + [0 * one] * order
        for i, c in enumerate(axis.coords):
            if i == j:
                continue
            den = a - c
            base = [
                Fraction(x - c, den) if exact else (x - c) / den,
                Fraction(1, 1) / den if exact else 1.0 / den,
            ]
            for _ in range(axis.mult[i]):
                hj = jet_mul(hj, base, order + 1)
        pj = [one]
        fact = 1
        for t in range(axis.mult[j]):
            # int/int would drop to float on the padded zeros
            inv_fact = Fraction(1, fact) if exact else 1.0 / fact
            jets.append(jet_mul(hj, [c * inv_fact for c in pj], order + 1))
            # pj <- pj * (x - a + (x' - x)) as a jet in (x' - x)
            pj = jet_mul(pj, [x - a if not exact else Fraction(x - a), one],
                         order + 1)
            fact *= t + 1
    return jets


def _contract(xi, vecs):
    out = xi
    for v in vecs:
        out = np.tensordot(out, np.asarray(v, dtype=xi.dtype), axes=([0], [0]))
    return out[()]


class HermiteInterpolant:
    """The unique matching polynomial, held in factored form.

    `xi` is the coefficient tensor over per-axis slots; evaluation
    contracts it with slot function values.  `expanded()` converts to a
    plain polynomial (cached); automatic only below the degree limit.

    The reference constructions return the same object backed by an
    already-expanded polynomial instead of a slot tensor (xi is None
    then); evaluation falls through to the polynomial.
    """

    def __init__(self, grid, xi, exact, expanded=None):
        self.grid = grid
        self.xi = xi
        self.exact = exact
        self._expanded = expanded
        self._xi_float = None

    @classmethod
    def from_polynomial(cls, grid, poly, exact=None):
        if exact is None:
            exact = all(is_exact(c) for c in poly.terms.values())
        return cls(grid, None, exact, expanded=poly)

    @property
    def max_degree(self):
        return max(ax.condition_count - 1 for ax in self.grid.axes)

    def _float_xi(self):
        if self.xi.dtype != object:
            return self.xi
        if self._xi_float is None:
            self._xi_float = self.xi.astype(float)
        return self._xi_float

    def __call__(self, x):
        if len(x) != self.grid.n:
            raise ValueError("point dimension mismatch")
        ex = self.exact and all(is_exact(v) for v in x)
        if self.xi is None:
            p = self._expanded
            return p(tuple(x)) if ex else float(p(tuple(float(v) for v in x)))
        vecs = [
            _slot_values_scalar(ax, v if ex else float(v), ex)
            for ax, v in zip(self.grid.axes, x)
        ]
        if ex:
            return _contract(self.xi, vecs)
        return float(_contract(self._float_xi(), vecs))

    def eval_many(self, pts):
        """Binary64 evaluation at an (npoints, n) array."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if self.xi is None:
            p = self._expanded
            return np.array([float(p(tuple(row))) for row in pts])
        xi = self._float_xi()
        n = self.grid.n
        ops = [xi, list(range(n))]
        for i, ax in enumerate(self.grid.axes):
            ops += [_slot_values_batch(ax, pts[:, i]), [n, i]]
        ops.append([n])
        return np.einsum(*ops, optimize=True)

    def eval_lattice(self, axes_vals):
        """Binary64 evaluation on a product lattice; returns the full
        value array, shape = lattice shape."""
        if self.xi is None:
            mesh = np.meshgrid(*axes_vals, indexing="ij")
            flat = np.stack([m.ravel() for m in mesh], axis=-1)
            return self.eval_many(flat).reshape(mesh[0].shape)
        out = self._float_xi()
        for ax, xs in zip(self.grid.axes, axes_vals):
            out = np.tensordot(out, _slot_values_batch(ax, xs), axes=([0], [1]))
        return out

    def derivative(self, x, k):
        """Mixed partial of order k at point x.

        Low degree goes through the expanded polynomial; high degree
        differentiates the factored form via truncated jets, which never
        leaves the well-scaled slot representation.
        """
        if all(e == 0 for e in k):
            return self(x)
        if self.xi is None or self.max_degree <= EXPAND_DEGREE_LIMIT:
            p = self.expanded().differentiate(k)
            ex = self.exact and all(is_exact(v) for v in x)
            return p(tuple(x)) if ex else float(p(tuple(float(v) for v in x)))
        ex = self.exact and all(is_exact(v) for v in x)
        scale = 1
        vecs = []
        for i, (ax, v) in enumerate(zip(self.grid.axes, x)):
            jets = _slot_jets(ax, v if ex else float(v), k[i], ex)
            vecs.append([j[k[i]] for j in jets])
            for t in range(1, k[i] + 1):
                scale *= t
        if ex:
            return _contract(self.xi, vecs) * scale
        return float(_contract(self._float_xi(), vecs)) * scale

    def expanded(self, force=False):
        if self._expanded is not None:
            return self._expanded
        if self.max_degree > EXPAND_DEGREE_LIMIT and not force:
            raise ValueError(
                f"degree {self.max_degree} interpolant: expansion must be forced")
        one = Fraction(1) if self.exact else 1.0
        out = self.xi
        for ax in self.grid.axes:
            polys = _slot_polys(ax, one)
            width = max(p.degree for p in polys) + 1
            if self.exact:
                M = np.empty((len(polys), width), dtype=object)
                M[:] = Fraction(0)
            else:
                M = np.zeros((len(polys), width))
            for r, p in enumerate(polys):
                for d, c in enumerate(p.coeffs):
                    M[r, d] = c
            out = np.tensordot(out, M.astype(out.dtype) if not self.exact else M,
                               axes=([0], [0]))
        terms = {}
        zero = Fraction(0) if self.exact else 0.0
        for e in np.ndindex(out.shape):
            c = out[e]
            if c != zero:
                terms[tuple(int(v) for v in e)] = c
        self._expanded = MultiPoly(self.grid.n, terms)
        return self._expanded

    def point_xi(self, idx):
        """Closed-form coefficients of one grid point: the slice of the
        slot tensor belonging to its derivative box, graded order."""
        if self.xi is None:
            raise ValueError("polynomial-backed interpolant has no slot tensor")
        offs = [ax.slot_offsets() for ax in self.grid.axes]
        box = enumerate_box(self.grid.order_box(idx))
        return [
            self.xi[tuple(offs[i][idx[i]] + k[i] for i in range(self.grid.n))]
            for k in box
        ]

    def to_json_dict(self, form="factored"):
        """Serialize: "expanded" emits the plain polynomial record,
        "factored" the per-point coefficients with their basis orders."""
        if form == "expanded":
            return self.expanded().to_json_dict()
        if form != "factored":
            raise ValueError(f"unknown form {form!r}")
        def enc(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return float(v)
        pts = []
        for idx in self.grid.point_indices():
            box = enumerate_box(self.grid.order_box(idx))
            pts.append({
                "index": list(idx),
                "basis": [list(k) for k in box],
                "xi": [enc(v) for v in self.point_xi(idx)],
            })
        return {
            "form": "factored",
            "dims": self.grid.n,
            "axes": [[enc(c) for c in ax.coords] for ax in self.grid.axes],
            "mult": [list(ax.mult) for ax in self.grid.axes],
            "points": pts,
        }


def interpolate(data, validate=True):
    """Build the interpolant for prescribed Hermite data.

    Exact point data yields an exact (rational) interpolant; dense or
    float data yields a Binary64 one.
    """
    if validate:
        bad = data.validate()
        if bad:
            raise ValueError("invalid data: " + "; ".join(bad[:5]))
    grid = data.grid
    T = condition_tensor(data)
    for i, ax in enumerate(grid.axes):
        lams = [axis_lambda(ax, j) for j in range(ax.npoints)]
        T = _solve_along_axis(T, ax, lams, i)
    return HermiteInterpolant(grid, T, exact=T.dtype == object)


# -- independent reference routes --------------------------------------


def _cardinal_poly(axis, j, k, var):
    """Univariate cardinal polynomial taking derivative order k at node j
    to 1 and all other prescribed orders on the axis to 0.  Closed form:
    (x-a)^k / k! * H(x) * [truncated power series of 1/H at a]."""
    from math import factorial

    a = axis.coords[j]
    exact = _axis_exact(axis)
    one = Fraction(1) if exact else 1.0
    h = nodal_basis(axis, j, one)
    inv = series_inverse_at(h, a, axis.mult[j] - 1 - k)
    trunc = UniPoly(0, [0 * one])
    shift = UniPoly(0, [-a * one, one])
    pw = UniPoly(0, [one])
    for c in inv:
        trunc = trunc + pw.scale(c)
        pw = pw * shift
    p = h * trunc
    for _ in range(k):
        p = p * shift
    p = p.scale(Fraction(1, factorial(k)) if exact else 1.0 / factorial(k))
    p.axis = var
    return p


def spitzbart_interpolate(data):
    """Tensor product of univariate closed-form cardinal polynomials
    (the classical generalized-Hermite formula).  Independent reference
    route; cost grows fast, meant for small grids."""
    if data.dense:
        raise ValueError("closed-form route needs point-layout data")
    grid = data.grid
    cache = {}
    out = MultiPoly(grid.n, {})
    for idx, entries in data.points.items():
        for k, v in entries.items():
            if v == 0:
                continue
            term = MultiPoly.constant(grid.n, v)
            for i in range(grid.n):
                key = (i, idx[i], k[i])
                if key not in cache:
                    cache[key] = MultiPoly.from_uni(
                        _cardinal_poly(grid.axes[i], idx[i], k[i], i), grid.n)
                term = term * cache[key]
            out = out + term
    return HermiteInterpolant.from_polynomial(grid, out)


def vandermonde_interpolate(data):
    """Exact dense solve against monomials.  Quadratic storage, cubic
    time; refuses more than 512 conditions."""
    if data.dense:
        raise ValueError("vandermonde route needs point-layout data")
    grid = data.grid
    n = grid.n
    if grid.condition_count() > _VANDERMONDE_CAP:
        raise ValueError("too many conditions for the dense route")
    monos = list(np.ndindex(*[ax.condition_count for ax in grid.axes]))
    monos = [tuple(int(v) for v in e) for e in monos]
    rows = []
    rhs = []
    for idx, entries in data.points.items():
        a = grid.coords(idx)
        for k, v in entries.items():
            row = []
            for e in monos:
                c = Fraction(1)
                for i in range(n):
                    if e[i] < k[i]:
                        c = Fraction(0)
                        break
                    f = Fraction(1)
                    for s in range(k[i]):
                        f *= e[i] - s
                    c *= f * Fraction(a[i]) ** (e[i] - k[i])
                row.append(c)
            rows.append(row)
            rhs.append(Fraction(v))
    size = len(rows)
    if size != len(monos):
        raise ValueError("condition count does not match basis size")
    # exact gaussian elimination with row pivoting
    for col in range(size):
        piv = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = Fraction(1) / rows[col][col]
        rows[col] = [c * inv for c in rows[col]]
        rhs[col] = rhs[col] * inv
        for r in range(size):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [cr - f * cc for cr, cc in zip(rows[r], rows[col])]
                rhs[r] = rhs[r] - f * rhs[col]
    terms = {e: v for e, v in zip(monos, rhs) if v != 0}
    return HermiteInterpolant.from_polynomial(grid, MultiPoly(n, terms))
