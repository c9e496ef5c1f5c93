"""Klein's j-function as an exact q-series and recognition of rational functions in j"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional
import logging

import sympy

from modparam.arith.scalars import to_rational
from modparam.arith.series import LaurentSeries
from modparam.gamma0 import QuadraticSurd


logger = logging.getLogger(__name__)

J = sympy.Symbol("j")

# rational j-invariants with class number one, keyed by discriminant
CLASS_NUMBER_ONE = {
    -3: 0,
    -4: 1728,
    -7: -3375,
    -8: 8000,
    -11: -32768,
    -12: 54000,
    -16: 287496,
    -19: -884736,
    -27: -12288000,
    -28: 16581375,
    -43: -884736000,
    -67: -147197952000,
    -163: -262537412640768000,
}


class RecognitionError(Exception):
    """Base exception for j-recognition errors"""

    pass


class InsufficientPrecision(RecognitionError):
    """Raised when the series is too short to pin down a rational function"""

    pass


class NoMatch(RecognitionError):
    """Raised when no rational function within the degree bound fits"""

    pass


def _eisenstein(order: int, weight: int, scale: int) -> LaurentSeries:
    coeffs = [Fraction(1)] + [
        Fraction(scale * int(sympy.divisor_sigma(n, weight - 1))) for n in range(1, order)
    ]
    return LaurentSeries(coeffs, 0, order)


@lru_cache(maxsize=32)
def eisenstein_e4(order: int) -> LaurentSeries:
    return _eisenstein(order, 4, 240)


@lru_cache(maxsize=32)
def eisenstein_e6(order: int) -> LaurentSeries:
    return _eisenstein(order, 6, -504)


@lru_cache(maxsize=32)
def discriminant_series(order: int) -> LaurentSeries:
    """Delta = (E4^3 - E6^2) / 1728 = q - 24 q^2 + ..."""
    e4 = eisenstein_e4(order)
    e6 = eisenstein_e6(order)
    return (e4 * e4 * e4 - e6 * e6) / 1728


@lru_cache(maxsize=32)
def j_series(order: int) -> LaurentSeries:
    """j = q^-1 + 744 + 196884 q + ... known below q^order"""
    e4 = eisenstein_e4(order + 2)
    e4_cubed = e4 * e4 * e4
    series = e4_cubed / discriminant_series(order + 2)
    return series.truncate(order)


@lru_cache(maxsize=None)
def _j_power(k: int, order: int) -> LaurentSeries:
    if k == 0:
        return LaurentSeries.constant(Fraction(1), order)
    return (_j_power(k - 1, order + 1) * j_series(order + k)).truncate(order)


@dataclass
class JRational:
    """P(j) / Q(j) with rational coefficients, coprime, Q monic"""

    numerator: sympy.Poly
    denominator: sympy.Poly

    def __post_init__(self):
        """Normalize to coprime polynomials with monic denominator"""
        num = sympy.Poly(self.numerator, J, domain="QQ")
        den = sympy.Poly(self.denominator, J, domain="QQ")
        if den.is_zero:
            raise ValueError("Zero denominator")
        common = sympy.gcd(num, den)
        if common.degree() > 0:
            num = sympy.Poly(sympy.quo(num, common), J, domain="QQ")
            den = sympy.Poly(sympy.quo(den, common), J, domain="QQ")
        lead = den.LC()
        self.numerator = num.quo_ground(lead)
        self.denominator = den.monic()

    @classmethod
    def from_expr(cls, expr) -> "JRational":
        num, den = sympy.fraction(sympy.together(sympy.sympify(expr)))
        return cls(sympy.Poly(num, J), sympy.Poly(den, J))

    @property
    def expr(self):
        return self.numerator.as_expr() / self.denominator.as_expr()

    def __str__(self):
        num = sympy.factor(self.numerator.as_expr())
        den = self.denominator.as_expr()
        if self.denominator.degree() == 0:
            return str(num)
        return f"({num})/({sympy.factor(den)})"

    def __eq__(self, other):
        if not isinstance(other, JRational):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def coefficient_lists(self) -> Dict[str, List[str]]:
        """Constant term first, as exact rational strings"""
        return {
            "num": [str(c) for c in reversed(self.numerator.all_coeffs())],
            "den": [str(c) for c in reversed(self.denominator.all_coeffs())],
        }

    def expand(self, order: int) -> LaurentSeries:
        """q-expansion known below q^order"""
        pad = self.denominator.degree() + self.numerator.degree() + 2

        def evaluate(poly):
            total = LaurentSeries.zero(order + pad)
            for (k,), c in poly.terms():
                total = total + _j_power(k, order + pad) * Fraction(int(c.p), int(c.q))
            return total

        return (evaluate(self.numerator) / evaluate(self.denominator)).truncate(order)

    def poles(self) -> List:
        """Irreducible factors of the denominator with multiplicities"""
        _, factors = sympy.factor_list(self.denominator.as_expr(), J)
        return factors


def j_reduce(series: LaurentSeries) -> tuple:
    """
    Subtract a polynomial in j to leave a series in q O(q)

    Returns:
        (polynomial coefficients {degree: value}, remainder series)
    """
    remainder = series
    poly: Dict[int, Fraction] = {}
    top = -series.valuation if not series.is_zero() else 0
    order = series.order
    for k in range(top, -1, -1):
        coeff = remainder[-k] if -k < remainder.order else Fraction(0)
        if coeff:
            poly[k] = to_rational(coeff)
            remainder = remainder - _j_power(k, order + k) * poly[k]
    return poly, remainder


def j_recognize(series: LaurentSeries, degree_bound: int) -> JRational:
    """
    Recognize an invariant series as a rational function of j

    Tries denominators of increasing degree dq <= degree_bound; for each,
    the unknown monic Q is fixed by asking that series * Q(j) be a
    polynomial in j, a linear condition on the coefficients of Q.

    Args:
        series: Width-one series with rational coefficients
        degree_bound: Largest denominator degree to try

    Returns:
        JRational whose expansion matches the series through its order

    Raises:
        InsufficientPrecision: If the linear system is underdetermined
        NoMatch: If no denominator degree up to the bound works
    """
    if series.width != 1:
        raise ValueError("Only width-one series are SL2(Z)-invariant")
    series = series.rationalize()
    T = series.order
    pad = max(0, -series.valuation)
    for dq in range(degree_bound + 1):
        if T < 2 * dq + 2:
            raise InsufficientPrecision(
                f"Order {T} too small for a degree {dq} denominator (need {2 * dq + 2})"
            )
        remainders = []
        for i in range(dq + 1):
            product = series * _j_power(i, T + i + pad)
            remainders.append(j_reduce(product)[1])
        top = min(r.order for r in remainders)
        rows = range(1, top)
        if len(rows) < dq:
            raise InsufficientPrecision(f"Only {len(rows)} equations for {dq} unknowns")
        matrix = sympy.Matrix(
            [[_sym(remainders[i][n]) for i in range(dq)] for n in rows]
        ) if dq else None
        rhs = sympy.Matrix([-_sym(remainders[dq][n]) for n in rows])
        if dq == 0:
            if any(rhs):
                continue
            solution: List = []
        else:
            try:
                sol, params = matrix.gauss_jordan_solve(rhs)
            except ValueError:
                continue
            if params.shape[0]:
                raise InsufficientPrecision(f"Denominator of degree {dq} is not determined")
            solution = list(sol)
        den_coeffs = {i: Fraction(int(c.p), int(c.q)) for i, c in enumerate(solution)}
        den_coeffs[dq] = Fraction(1)
        combined = LaurentSeries.zero(T)
        for i, c in den_coeffs.items():
            if c:
                combined = combined + series * _j_power(i, T + i + pad) * c
        poly, remainder = j_reduce(combined)
        if not remainder.is_zero():
            continue
        num = sympy.Poly.from_dict({(k,): _sym(v) for k, v in poly.items()} or {(0,): 0}, J)
        den = sympy.Poly.from_dict({(k,): _sym(v) for k, v in den_coeffs.items()}, J)
        result = JRational(num, den)
        logger.info(f"Recognized series as {result}")
        return result
    raise NoMatch(f"No rational function in j with denominator degree <= {degree_bound}")


def _sym(value) -> sympy.Rational:
    value = to_rational(value)
    return sympy.Rational(value.numerator, value.denominator)


def default_degree_bound(index: int) -> int:
    return index // 6 + 2


def class_number_one_point(j_value) -> QuadraticSurd:
    """Reduced CM point tau with j(tau) = j_value for the thirteen rational CM j-invariants"""
    j_value = Fraction(j_value)
    for disc, value in CLASS_NUMBER_ONE.items():
        if value == j_value:
            b = disc % 2
            return QuadraticSurd(1, b, (b * b - disc) // 4)
    raise KeyError(f"{j_value} is not a rational CM j-invariant of class number one")


def cm_discriminant_of_j(j_value) -> Optional[int]:
    j_value = Fraction(j_value)
    for disc, value in CLASS_NUMBER_ONE.items():
        if value == j_value:
            return disc
    return None
