"""Hermite coordinate interpolation on rectilinear grids.

Values and mixed partial derivatives prescribed at the points of an
n-dimensional rectilinear grid determine a unique polynomial of bounded
per-axis degree.  This package constructs it exactly (rational
arithmetic) or in Binary64, evaluates it globally in factored form or
piecewise through local support windows, and computes remainders and
ideal membership of polynomial inputs by cascaded univariate division.
"""

from .grid import Axis, GridSpec, HermiteData, load_hgrid, dump_hgrid
from .ideal import (
    DivisionResult,
    cascaded_divide,
    groebner_basis,
    ideal_member,
    interpolate_polynomial,
)
from .interpolant import (
    HermiteInterpolant,
    build_basis,
    build_lambda,
    interpolate,
    lambda_inverse,
    solve_coefficients,
    spitzbart_interpolate,
    vandermonde_interpolate,
)
from .polyring import MultiPoly, UniPoly
from .spline import SplineInterpolant, continuity_report, eval_spline
from .harness import (
    PlaneSpec,
    TestFunction,
    derive_data,
    multilinear_baseline,
    rmse,
    sample_plane,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "GridSpec",
    "HermiteData",
    "HermiteInterpolant",
    "SplineInterpolant",
    "MultiPoly",
    "UniPoly",
    "PlaneSpec",
    "TestFunction",
    "DivisionResult",
    "build_basis",
    "build_lambda",
    "cascaded_divide",
    "continuity_report",
    "derive_data",
    "dump_hgrid",
    "eval_spline",
    "groebner_basis",
    "ideal_member",
    "interpolate",
    "interpolate_polynomial",
    "lambda_inverse",
    "load_hgrid",
    "multilinear_baseline",
    "rmse",
    "sample_plane",
    "solve_coefficients",
    "spitzbart_interpolate",
    "vandermonde_interpolate",
]
