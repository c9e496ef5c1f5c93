"""Truncated Laurent series in a fractional local parameter"""

from fractions import Fraction
from math import gcd, inf
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union
import logging

import mpmath

from modparam.arith.scalars import (
    Cyclotomic,
    DenominatorNotCoprime,
    NotInvertible,
    Residue,
    is_unit,
    is_zero,
    reduce_rational,
    to_rational,
)


logger = logging.getLogger(__name__)


class SeriesError(Exception):
    """Base exception for series arithmetic errors"""

    pass


class NonUnitLeadingCoefficient(SeriesError):
    """Raised when inverting a series whose leading coefficient is not a unit"""

    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class LaurentSeries:
    """
    Expansion sum_{v <= n < T} a_n q_w^n with q_w = exp(2 pi i z / w)

    Coefficients are exact scalars (Fraction, Cyclotomic or Residue). The
    stored list starts at the valuation, so the leading coefficient is
    nonzero unless the series vanishes to its truncation order, in which
    case the coefficient list is empty and the valuation equals the order.
    Values are immutable once built.
    """

    __slots__ = ("width", "valuation", "order", "coeffs")

    def __init__(self, coeffs, valuation: int = 0, order: Optional[int] = None, width: int = 1):
        if width < 1:
            raise ValueError(f"Series width must be positive, got {width}")
        coeffs = list(coeffs)
        if order is None:
            order = valuation + len(coeffs)
        coeffs = coeffs[: max(order - valuation, 0)]
        skip = 0
        while skip < len(coeffs) and is_zero(coeffs[skip]):
            skip += 1
        if skip == len(coeffs):
            self.coeffs: Tuple = ()
            self.valuation = order
        else:
            self.coeffs = tuple(
                Fraction(c) if isinstance(c, int) else c for c in coeffs[skip:]
            )
            self.valuation = valuation + skip
        self.order = order
        self.width = width

    # construction helpers

    @classmethod
    def from_dict(cls, terms: Dict[int, object], order: int, width: int = 1) -> "LaurentSeries":
        """Build a series from {exponent: coefficient}, all exponents below order"""
        if not terms:
            return cls.zero(order, width)
        start = min(terms)
        coeffs = [Fraction(0)] * (order - start)
        for n, c in terms.items():
            if n < order:
                coeffs[n - start] = c
        return cls(coeffs, start, order, width)

    @classmethod
    def zero(cls, order: int, width: int = 1) -> "LaurentSeries":
        return cls([], order, order, width)

    @classmethod
    def monomial(cls, exponent: int, coeff, order: int, width: int = 1) -> "LaurentSeries":
        return cls.from_dict({exponent: coeff}, order, width)

    @classmethod
    def constant(cls, value, order: int, width: int = 1) -> "LaurentSeries":
        return cls.monomial(0, value, order, width)

    # inspection

    def is_zero(self) -> bool:
        return not self.coeffs

    def ord(self) -> Union[int, float]:
        """Valuation, or +inf when the series vanishes to its order"""
        return inf if self.is_zero() else self.valuation

    @property
    def leading_coefficient(self):
        if self.is_zero():
            raise ValueError("Zero series has no leading coefficient")
        return self.coeffs[0]

    def __getitem__(self, n: int):
        if n >= self.order:
            raise IndexError(f"Coefficient q^{n} beyond truncation order {self.order}")
        if n < self.valuation or n - self.valuation >= len(self.coeffs):
            return Fraction(0)
        return self.coeffs[n - self.valuation]

    def items(self) -> Iterator[Tuple[int, object]]:
        """Yield (exponent, coefficient) for every nonzero known term"""
        for i, c in enumerate(self.coeffs):
            if not is_zero(c):
                yield self.valuation + i, c

    def coefficient_list(self, start: int, stop: Optional[int] = None) -> List:
        stop = self.order if stop is None else min(stop, self.order)
        return [self[n] for n in range(start, stop)]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        shown = ", ".join(f"{n}: {c}" for n, c in list(self.items())[:6])
        return f"LaurentSeries(w={self.width}, {{{shown}}}, O(q^{self.order}))"

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.width == other.width
            and self.order == other.order
            and self.valuation == other.valuation
            and all(self[n] == other[n] for n in range(self.valuation, self.order))
        )

    __hash__ = None

    def agrees_with(self, other: "LaurentSeries", order: Optional[int] = None) -> bool:
        """True when both series agree below a common order (in the lcm width)"""
        a, b = _align(self, other)
        limit = min(a.order, b.order)
        if order is not None:
            limit = min(limit, order)
        start = min(a.valuation, b.valuation)
        return all(a[n] == b[n] for n in range(start, limit))

    # width handling

    def rescale(self, width: int) -> "LaurentSeries":
        """Rewrite in q_W for a multiple W of the current width"""
        if width % self.width:
            raise ValueError(f"Width {width} is not a multiple of {self.width}")
        k = width // self.width
        if k == 1:
            return self
        terms = {n * k: c for n, c in self.items()}
        return LaurentSeries.from_dict(terms, self.order * k, width)

    def contract(self, step: int) -> "LaurentSeries":
        """Keep exponents divisible by step and divide them by it (q_w^step -> q)"""
        if self.width % step:
            raise ValueError(f"Step {step} does not divide width {self.width}")
        terms = {n // step: c for n, c in self.items() if n % step == 0}
        order = -((-self.order) // step)
        return LaurentSeries.from_dict(terms, order, self.width // step)

    # arithmetic

    def map_coefficients(self, fn: Callable) -> "LaurentSeries":
        return LaurentSeries([fn(c) for c in self.coeffs], self.valuation, self.order, self.width)

    def __neg__(self):
        return self.map_coefficients(lambda c: -c)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            return self._add_scalar(other)
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _add_scalar(self, value):
        if is_zero(value) or self.order <= 0:
            return self
        return series_add(self, LaurentSeries.constant(value, self.order, self.width))

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return self.map_coefficients(lambda c: c * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, series_invert(other))
        if is_zero(other):
            raise ZeroDivisionError("Series divided by zero scalar")
        return self.map_coefficients(lambda c: c / other)

    def __rtruediv__(self, other):
        return series_invert(self) * other

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        result = LaurentSeries.constant(Fraction(1), self.order - self.valuation, self.width)
        base = self
        while k:
            if k & 1:
                result = series_mul(result, base)
            k >>= 1
            if k:
                base = series_mul(base, base)
        return result

    def truncate(self, order: int) -> "LaurentSeries":
        return LaurentSeries(self.coeffs, self.valuation, min(order, self.order), self.width)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by q_w^k"""
        return LaurentSeries(self.coeffs, self.valuation + k, self.order + k, self.width)

    def q_derivative(self) -> "LaurentSeries":
        """Apply q_w d/dq_w"""
        return LaurentSeries(
            [(self.valuation + i) * c for i, c in enumerate(self.coeffs)],
            self.valuation,
            self.order,
            self.width,
        )

    def twist(self, offset: int) -> "LaurentSeries":
        """Substitute q_w -> zeta_w^offset q_w"""
        if offset % self.width == 0:
            return self
        return LaurentSeries(
            [
                c * Cyclotomic.zeta(self.width, offset * (self.valuation + i))
                for i, c in enumerate(self.coeffs)
            ],
            self.valuation,
            self.order,
            self.width,
        )

    def reduce_mod(self, modulus: int) -> "LaurentSeries":
        return series_reduce_mod(self, modulus)

    def rationalize(self) -> "LaurentSeries":
        """Convert rational-valued cyclotomic coefficients to Fraction"""
        return self.map_coefficients(to_rational)

    def log(self) -> "LaurentSeries":
        """Logarithm of a series with constant term 1"""
        if self.valuation != 0 or self.coeffs[0] != 1:
            raise SeriesError("Logarithm needs a series of the form 1 + O(q)")
        quotient = series_mul(self.q_derivative(), series_invert(self))
        terms = {n: c / n for n, c in quotient.items() if n > 0}
        return LaurentSeries.from_dict(terms, self.order, self.width)

    def exp(self) -> "LaurentSeries":
        """Exponential of a series with positive valuation"""
        if not self.is_zero() and self.valuation < 1:
            raise SeriesError("Exponential needs a series in q O(1)")
        T = self.order
        h = [Fraction(0)] * T
        for n, c in self.items():
            h[n] = n * c
        e = [Fraction(1)] + [Fraction(0)] * (T - 1)
        for n in range(1, T):
            acc = Fraction(0)
            for k in range(1, n + 1):
                if not is_zero(h[k]):
                    acc = acc + h[k] * e[n - k]
            e[n] = acc / n
        return LaurentSeries(e, 0, T, self.width)

    def evaluate(self, q_value) -> mpmath.mpc:
        """Numeric value at q_w = q_value using the current mpmath precision"""
        total = mpmath.mpc(0)
        for n, c in self.items():
            total += _numeric(c) * q_value ** n
        return total


def _numeric(c):
    if isinstance(c, Cyclotomic):
        return c.to_complex()
    if isinstance(c, Residue):
        raise TypeError("Residue coefficients have no numeric value")
    c = Fraction(c)
    return mpmath.mpf(c.numerator) / c.denominator


def _align(a: LaurentSeries, b: LaurentSeries) -> Tuple[LaurentSeries, LaurentSeries]:
    if a.width == b.width:
        return a, b
    width = _lcm(a.width, b.width)
    return a.rescale(width), b.rescale(width)


def series_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Coefficientwise sum truncated at the smaller order"""
    a, b = _align(a, b)
    order = min(a.order, b.order)
    start = min(a.valuation, b.valuation, order)
    coeffs = []
    for n in range(start, order):
        ca = a.coeffs[n - a.valuation] if a.valuation <= n < a.valuation + len(a.coeffs) else None
        cb = b.coeffs[n - b.valuation] if b.valuation <= n < b.valuation + len(b.coeffs) else None
        if ca is None:
            coeffs.append(cb if cb is not None else Fraction(0))
        elif cb is None:
            coeffs.append(ca)
        else:
            coeffs.append(ca + cb)
    return LaurentSeries(coeffs, start, order, a.width)


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Cauchy product; order is min(T_a + v_b, T_b + v_a)"""
    a, b = _align(a, b)
    order = min(a.order + b.valuation, b.order + a.valuation)
    if a.is_zero() or b.is_zero():
        return LaurentSeries.zero(order, a.width)
    start = a.valuation + b.valuation
    size = order - start
    if size <= 0:
        return LaurentSeries.zero(order, a.width)
    out: List = [None] * size
    bc = b.coeffs
    for i, ca in enumerate(a.coeffs[:size]):
        if is_zero(ca):
            continue
        for j in range(min(len(bc), size - i)):
            cb = bc[j]
            if is_zero(cb):
                continue
            term = ca * cb
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return LaurentSeries(
        [Fraction(0) if c is None else c for c in out], start, order, a.width
    )


def series_invert(a: LaurentSeries) -> LaurentSeries:
    """Multiplicative inverse with the same relative precision"""
    if a.is_zero() or not is_unit(a.coeffs[0]):
        raise NonUnitLeadingCoefficient(
            f"Cannot invert series with leading coefficient "
            f"{a.coeffs[0] if a.coeffs else 0} at q^{a.valuation}"
        )
    precision = a.order - a.valuation
    try:
        lead_inv = 1 / a.coeffs[0]
    except NotInvertible as exc:
        raise NonUnitLeadingCoefficient(str(exc)) from exc
    inv = [lead_inv]
    ac = a.coeffs
    for k in range(1, precision):
        acc = None
        for i in range(1, min(k, len(ac) - 1) + 1):
            if is_zero(ac[i]):
                continue
            term = ac[i] * inv[k - i]
            acc = term if acc is None else acc + term
        inv.append(Fraction(0) if acc is None else -acc * lead_inv)
    return LaurentSeries(inv, -a.valuation, precision - a.valuation, a.width)


def series_reduce_mod(a: LaurentSeries, modulus: int) -> LaurentSeries:
    """Reduce every coefficient into Z/modulus"""

    def reduce(c):
        if isinstance(c, Residue):
            if c.modulus % modulus:
                raise ValueError(f"Cannot reduce mod {c.modulus} residues to mod {modulus}")
            return Residue(c.value, modulus)
        try:
            return reduce_rational(to_rational(c), modulus)
        except ValueError as exc:
            raise DenominatorNotCoprime(f"Irrational coefficient {c!r} has no residue") from exc

    return LaurentSeries(
        [reduce(c) for c in a.coeffs], a.valuation, a.order, a.width
    )
