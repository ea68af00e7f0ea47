"""Division form of grid interpolation and ideal membership.

The conditions of a grid A with multiplicities nu cut out the ideal
generated by the per-axis annihilators H_i(x_i) = prod (x_i - a)^{nu_i(a)}.
Dividing any polynomial g by H_1, ..., H_n in sequence (each division is
univariate in its own variable, with polynomial coefficients in the
others) leaves a remainder r_n that

* has per-axis degree below deg H_i, hence lies in the interpolation
  space,
* matches every prescribed derivative of g on the grid, i.e. is exactly
  the grid interpolant of g, and
* does not depend on the division order, because the H_i involve
  disjoint variables (their leading terms are coprime, which also makes
  {H_1, ..., H_n} a reduced Groebner basis of the ideal for any
  monomial order).

So g is in the ideal iff r_n = 0.  In Binary64 the zero test becomes a
relative threshold on the surviving coefficients and the verdict carries
the residual.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import axis_annihilator
from .polyring import MultiPoly, divide_by_axis, is_exact

MEMBERSHIP_RTOL = 1e-10


def annihilators(grid):
    """The univariate generators H_i, one per axis, as polynomials in n
    variables."""
    return [
        MultiPoly.from_uni(axis_annihilator(ax, var=i), grid.n)
        for i, ax in enumerate(grid.axes)
    ]


@dataclass
class DivisionResult:
    """Outcome of dividing g by the axis annihilators in a given order.

    quotients[i] belongs to H_i (axis numbering, not division order);
    remainders holds the intermediate remainder after each division
    step, so remainders[-1] is the final one.
    """

    dividend: MultiPoly
    order: tuple
    quotients: list
    remainders: list

    @property
    def remainder(self):
        return self.remainders[-1]

    def reconstruct(self, grid):
        """Sum H_i q_i + r; equals the dividend exactly (exact mode) or
        up to roundoff."""
        out = self.remainder
        for h, q in zip(annihilators(grid), self.quotients):
            out = out + h * q
        return out

    def identity_residual(self, grid):
        diff = self.reconstruct(grid) - self.dividend
        return max((abs(c) for c in diff.terms.values()), default=0)


def cascaded_divide(g, grid, order=None):
    """Divide g by H_1, ..., H_n one axis at a time.

    order permutes the division sequence; the final remainder comes out
    the same for every order, the quotients generally do not.
    """
    n = grid.n
    if g.n != n:
        raise ValueError("dividend dimension does not match grid")
    if order is None:
        order = tuple(range(n))
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the axes")
    hs = [axis_annihilator(ax, var=i) for i, ax in enumerate(grid.axes)]
    quotients = [MultiPoly(n, {}) for _ in range(n)]
    remainders = []
    r = g
    for i in order:
        q, r = divide_by_axis(r, hs[i])
        quotients[i] = q
        remainders.append(r)
    return DivisionResult(g, tuple(order), quotients, remainders)


def interpolate_polynomial(g, grid, order=None):
    """Grid interpolant of a polynomial: the cascaded-division remainder,
    wrapped as an interpolant object.

    Matches every prescribed derivative of g at every grid point while
    keeping per-axis degrees inside the interpolation space; must agree
    coefficient-for-coefficient with interpolating data sampled from g.
    """
    from .interpolant import HermiteInterpolant

    r = cascaded_divide(g, grid, order).remainder
    return HermiteInterpolant.from_polynomial(grid, r)


@dataclass
class MembershipVerdict:
    member: bool
    residual: object
    remainder: MultiPoly
    exact: bool

    def __bool__(self):
        return self.member


def ideal_member(g, grid, rtol=MEMBERSHIP_RTOL):
    """Is g in the ideal of the grid conditions?

    Exact coefficients give an exact verdict (remainder identically
    zero).  Binary64 coefficients are judged against rtol times the
    largest dividend coefficient; the verdict reports the residual
    either way.
    """
    res = cascaded_divide(g, grid)
    r = res.remainder
    exact = all(is_exact(c) for c in g.terms.values()) and all(
        is_exact(c) for ax in grid.axes for c in ax.coords)
    if exact:
        residual = max((abs(c) for c in r.terms.values()), default=0)
        return MembershipVerdict(not r.terms, residual, r, True)
    gmax = max((abs(float(c)) for c in g.terms.values()), default=0.0)
    residual = max((abs(float(c)) for c in r.terms.values()), default=0.0)
    return MembershipVerdict(residual <= rtol * max(gmax, 1.0), residual, r,
                             False)


def groebner_basis(grid):
    """Reduced Groebner basis of the condition ideal: the univariate
    annihilators themselves, in axis order.  Holds for any monomial
    order since each generator is monic univariate in its own variable
    with pure-power leading term."""
    return [axis_annihilator(ax, var=i) for i, ax in enumerate(grid.axes)]
