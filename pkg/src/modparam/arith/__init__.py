"""
Exact arithmetic kernel

Coefficient rings, truncated Laurent series and rational reconstruction.
"""

from modparam.arith.reconstruct import (
    NoRationalInBall,
    nearest_integer,
    rational_reconstruct,
    reconstruct_cyclotomic,
)
from modparam.arith.scalars import (
    Cyclotomic,
    DenominatorNotCoprime,
    NotInvertible,
    Residue,
    ScalarError,
    format_scalar,
    is_zero,
    reduce_rational,
    scalar_kind,
    to_rational,
)
from modparam.arith.series import (
    LaurentSeries,
    NonUnitLeadingCoefficient,
    SeriesError,
    series_add,
    series_invert,
    series_mul,
    series_reduce_mod,
)

__all__ = [
    "Cyclotomic",
    "DenominatorNotCoprime",
    "LaurentSeries",
    "NoRationalInBall",
    "NonUnitLeadingCoefficient",
    "NotInvertible",
    "Residue",
    "ScalarError",
    "SeriesError",
    "format_scalar",
    "is_zero",
    "nearest_integer",
    "rational_reconstruct",
    "reconstruct_cyclotomic",
    "reduce_rational",
    "scalar_kind",
    "series_add",
    "series_invert",
    "series_mul",
    "series_reduce_mod",
    "to_rational",
]
