"""Exact recovery of rationals and cyclotomic numbers from high-precision floats"""

from fractions import Fraction
from typing import Optional
import logging

import mpmath

from modparam.arith.scalars import Cyclotomic, cyclotomic_coefficients


logger = logging.getLogger(__name__)


class NoRationalInBall(Exception):
    """Raised when no small-denominator rational lies within the error ball"""

    pass


def default_tolerance(scale=1):
    """Error ball 2^(-prec/2) relative to max(1, |scale|) at the current precision"""
    return mpmath.mpf(2) ** (-(mpmath.mp.prec // 2)) * max(mpmath.mpf(1), abs(scale))


def rational_reconstruct(x, denom_bound: int, tolerance: Optional[mpmath.mpf] = None) -> Fraction:
    """
    Recover p/q with 1 <= q <= denom_bound from a numeric approximation

    Walks the continued-fraction convergents of x and returns the first one
    whose distance from x is inside the tolerance.

    Args:
        x: mpmath real or complex value (imaginary part must be negligible)
        denom_bound: Largest admissible denominator
        tolerance: Absolute error ball; defaults to :func:`default_tolerance`

    Returns:
        The reconstructed rational

    Raises:
        NoRationalInBall: If no convergent with small denominator fits
    """
    if tolerance is None:
        tolerance = default_tolerance(x)
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc):
        if abs(x.imag) > tolerance:
            raise NoRationalInBall(f"Value {mpmath.nstr(x, 15)} is not real")
        x = x.real

    # convergents h/k of the continued fraction of x
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    rest = x
    for _ in range(4 * mpmath.mp.prec):
        a = int(mpmath.floor(rest))
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > denom_bound:
            break
        if abs(x - mpmath.mpf(h) / k) <= tolerance:
            return Fraction(h, k)
        frac = rest - a
        if frac == 0:
            break
        rest = 1 / frac
    raise NoRationalInBall(
        f"No rational with denominator <= {denom_bound} within "
        f"{mpmath.nstr(tolerance, 5)} of {mpmath.nstr(x, 20)}"
    )


def nearest_integer(x, tolerance: Optional[mpmath.mpf] = None) -> int:
    """Round x to an integer, refusing when it is not close to one"""
    return int(rational_reconstruct(x, 1, tolerance))


def reconstruct_cyclotomic(
    z, width: int, denom_bound: int, tolerance: Optional[mpmath.mpf] = None
) -> Cyclotomic:
    """
    Recover an element of Q(zeta_width) from its complex embedding

    Runs an integer relation search on the real vector obtained by folding
    real and imaginary parts together with an irrational weight.
    """
    degree = len(cyclotomic_coefficients(width)) - 1
    z = mpmath.mpmathify(z)
    if tolerance is None:
        tolerance = default_tolerance(z)
    if degree == 1:
        return Cyclotomic.from_rational(width, rational_reconstruct(z, denom_bound, tolerance))
    weight = mpmath.sqrt(2) + mpmath.mpf(1) / 7
    root = mpmath.expjpi(mpmath.mpf(2) / width)
    powers = [root ** i for i in range(degree)]
    fold = [mpmath.re(p) + weight * mpmath.im(p) for p in powers]
    target = mpmath.re(z) + weight * mpmath.im(z)
    relation = mpmath.pslq(
        [target] + fold,
        tol=tolerance,
        maxcoeff=denom_bound * max(1, int(abs(z)) + 1) * 10 ** 3,
        maxsteps=10 ** 5,
    )
    if relation is None or relation[0] == 0:
        raise NoRationalInBall(f"No element of Q(zeta_{width}) found near {mpmath.nstr(z, 15)}")
    lead = relation[0]
    coords = [Fraction(-c, lead) for c in relation[1:]]
    candidate = Cyclotomic(width, coords)
    if abs(candidate.to_complex() - z) > tolerance * 2 ** 8:
        raise NoRationalInBall(
            f"Relation for Q(zeta_{width}) fails the complex check at {mpmath.nstr(z, 15)}"
        )
    logger.debug(f"Reconstructed {candidate!r} in Q(zeta_{width})")
    return candidate
