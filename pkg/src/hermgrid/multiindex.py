"""Multi-indices, the componentwise partial order, and grevlex enumeration.

A multi-index is a plain tuple of non-negative ints, one entry per axis.
Boxes [lo, hi] are enumerated in degree reverse lexicographic (grevlex)
order: ascending total degree, ties broken so that the index with the
larger entry at the last differing position ranks earlier.  Grevlex is a
linear extension of the partial order, which is what makes the coupling
matrices of the interpolant lower triangular.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

MultiIndex = tuple

LESS, EQUAL, GREATER = -1, 0, 1


def leq_partial(k, l):
    """True iff k_i <= l_i componentwise."""
    if len(k) != len(l):
        raise ValueError(f"dimension mismatch: {len(k)} vs {len(l)}")
    return all(ki <= li for ki, li in zip(k, l))


def grevlex_key(k):
    """Sort key realizing the grevlex order: total degree, then the
    reversed entries negated (larger last-differing entry ranks earlier)."""
    return (sum(k),) + tuple(-e for e in reversed(k))


def compare_grevlex(k, l):
    """Return LESS (-1), EQUAL (0) or GREATER (1) under grevlex."""
    if len(k) != len(l):
        raise ValueError(f"dimension mismatch: {len(k)} vs {len(l)}")
    a, b = grevlex_key(k), grevlex_key(l)
    return LESS if a < b else GREATER if a > b else EQUAL


@dataclass(frozen=True)
class IndexBox:
    """The box [lo, hi] = {k : lo <= k <= hi componentwise}."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi dimension mismatch")
        if not leq_partial(self.lo, self.hi):
            raise ValueError(f"invalid box: {self.lo} > {self.hi}")

    @property
    def cardinality(self):
        out = 1
        for a, b in zip(self.lo, self.hi):
            out *= b - a + 1
        return out

    def __contains__(self, k):
        return leq_partial(self.lo, k) and leq_partial(k, self.hi)


@lru_cache(maxsize=None)
def _enumerate(lo, hi):
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return tuple(sorted(itertools.product(*ranges), key=grevlex_key))


def enumerate_box(box):
    """All indices of the box, ascending under grevlex."""
    return list(_enumerate(box.lo, box.hi))


@lru_cache(maxsize=None)
def _positions(lo, hi):
    return {k: i for i, k in enumerate(_enumerate(lo, hi))}


def box_position(box, k):
    """O(1) position of k inside the box's grevlex enumeration."""
    return _positions(box.lo, box.hi)[k]


def order_box(hi):
    """The derivative-order box [0, hi] used throughout: hi = nu(a) - 1."""
    return IndexBox((0,) * len(hi), tuple(hi))
