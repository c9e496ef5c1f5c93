"""Exact coefficient rings for q-expansions

Three variants share one arithmetic contract:

- rationals are plain :class:`fractions.Fraction` values;
- :class:`Cyclotomic` holds an element of Q(zeta_w) in the power basis;
- :class:`Residue` holds a class of Z/mZ (m need not be prime).
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Tuple, Union
import logging

import mpmath
import sympy
from sympy.abc import x as _x


logger = logging.getLogger(__name__)


class ScalarError(Exception):
    """Base exception for coefficient arithmetic errors"""

    pass


class NotInvertible(ScalarError):
    """Raised when dividing by zero or by a non-unit residue"""

    pass


class DenominatorNotCoprime(ScalarError):
    """Raised when a rational cannot be reduced modulo m"""

    pass


@lru_cache(maxsize=None)
def cyclotomic_coefficients(width: int) -> Tuple[int, ...]:
    """Coefficients of the width-th cyclotomic polynomial, constant term first"""
    poly = sympy.Poly(sympy.cyclotomic_poly(width, _x), _x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _reduce_power_basis(coords, width: int) -> Tuple[Fraction, ...]:
    phi = cyclotomic_coefficients(width)
    degree = len(phi) - 1
    work = [Fraction(c) for c in coords]
    # phi is monic: fold every x^k with k >= degree back down
    for k in range(len(work) - 1, degree - 1, -1):
        lead = work[k]
        if lead:
            for i in range(degree):
                work[k - degree + i] -= lead * phi[i]
        work[k] = Fraction(0)
    work = work[:degree] + [Fraction(0)] * (degree - len(work))
    return tuple(work)


class Cyclotomic:
    """Element of the cyclotomic field Q(zeta_w), zeta_w = exp(2*pi*i/w)"""

    __slots__ = ("width", "coords")

    def __init__(self, width: int, coords):
        if width < 1:
            raise ValueError(f"Cyclotomic width must be positive, got {width}")
        self.width = width
        self.coords = _reduce_power_basis(coords, width)

    @classmethod
    def zeta(cls, width: int, power: int = 1) -> "Cyclotomic":
        """Return zeta_w ** power"""
        power %= width
        coords = [Fraction(0)] * (power + 1)
        coords[power] = Fraction(1)
        return cls(width, coords)

    @classmethod
    def from_rational(cls, width: int, value) -> "Cyclotomic":
        return cls(width, [Fraction(value)])

    @property
    def degree(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        """Return the value as a Fraction, raising ValueError if irrational"""
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coords[0] if self.coords else Fraction(0)

    def _coerce(self, other):
        """Both operands in Q(zeta_l), l the lcm of the two widths"""
        if isinstance(other, (int, Rational)):
            return self, Cyclotomic.from_rational(self.width, other)
        if not isinstance(other, Cyclotomic):
            return self, NotImplemented
        if other.width == self.width:
            return self, other
        common = self.width * other.width // gcd(self.width, other.width)
        return self.lift(common), other.lift(common)

    def lift(self, width: int) -> "Cyclotomic":
        """Embed Q(zeta_self.width) into Q(zeta_width)"""
        if width % self.width:
            raise ValueError(f"Cannot embed Q(zeta_{self.width}) into Q(zeta_{width})")
        step = width // self.width
        coords = [Fraction(0)] * (step * (len(self.coords) - 1) + 1)
        for i, c in enumerate(self.coords):
            coords[i * step] = c
        return Cyclotomic(width, coords)

    def __add__(self, other):
        this, other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(this.width, [a + b for a, b in zip(this.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.width, [-a for a in self.coords])

    def __sub__(self, other):
        this, other = self._coerce(other)
        if other is NotImplemented:
            return other
        return this + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return Cyclotomic(self.width, [a * other for a in self.coords])
        this, other = self._coerce(other)
        if other is NotImplemented:
            return other
        product = [Fraction(0)] * (len(this.coords) + len(other.coords) - 1)
        for i, a in enumerate(this.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        product[i + j] += a * b
        return Cyclotomic(this.width, product)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise NotInvertible("Division by zero in Q(zeta_%d)" % self.width)
        if self.is_rational():
            return Cyclotomic.from_rational(self.width, 1 / self.coords[0])
        element = sympy.Poly(
            [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coords)],
            _x,
            domain="QQ",
        )
        modulus = sympy.Poly(sympy.cyclotomic_poly(self.width, _x), _x, domain="QQ")
        inv = sympy.invert(element, modulus)
        coords = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return Cyclotomic(self.width, coords)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise NotInvertible("Division by zero in Q(zeta_%d)" % self.width)
            return Cyclotomic(self.width, [a / other for a in self.coords])
        this, other = self._coerce(other)
        if other is NotImplemented:
            return other
        return this * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.rational_value() == other
        if isinstance(other, Cyclotomic):
            if other.width != self.width:
                common = self.width * other.width // gcd(self.width, other.width)
                return self.lift(common).coords == other.lift(common).coords
            return self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_value())
        return hash((self.width, self.coords))

    def __bool__(self):
        return not self.is_zero()

    def conjugate_by(self, a: int) -> "Cyclotomic":
        """Apply the Galois automorphism zeta -> zeta**a (a coprime to the width)"""
        if gcd(a, self.width) != 1:
            raise ValueError(f"{a} is not a unit modulo {self.width}")
        result = Cyclotomic(self.width, [])
        for i, c in enumerate(self.coords):
            if c:
                result = result + Cyclotomic.zeta(self.width, i * a) * c
        return result

    def trace(self) -> Fraction:
        """Sum of all Galois conjugates, a rational number"""
        total = Cyclotomic(self.width, [])
        for a in range(1, self.width + 1):
            if gcd(a, self.width) == 1:
                total = total + self.conjugate_by(a)
        return total.rational_value()

    def to_complex(self):
        """Numeric value under the embedding zeta -> exp(2*pi*i/w), at mpmath precision"""
        root = mpmath.expjpi(mpmath.mpf(2) / self.width)
        value = mpmath.mpc(0)
        for i, c in enumerate(self.coords):
            if c:
                value += mpmath.mpf(c.numerator) / c.denominator * root ** i
        return value

    def __repr__(self):
        return f"Cyclotomic({self.width}, {[str(c) for c in self.coords]})"


class Residue:
    """Residue class modulo m, stored canonically in [0, m)"""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        if modulus < 1:
            raise ValueError(f"Modulus must be positive, got {modulus}")
        self.modulus = modulus
        self.value = value % modulus

    def _coerce(self, other):
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ValueError(
                    f"Mixed moduli {self.modulus} and {other.modulus} in residue arithmetic"
                )
            return other
        if isinstance(other, (int, Rational)):
            return reduce_rational(other, self.modulus)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return gcd(self.value, self.modulus) == 1

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Residue(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Residue(self.value - other.value, self.modulus)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Residue(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "Residue":
        if not self.is_unit():
            raise NotInvertible(f"{self.value} is not a unit modulo {self.modulus}")
        return Residue(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Residue({self.value}, {self.modulus})"


Scalar = Union[Fraction, Cyclotomic, Residue]


def reduce_rational(value, modulus: int) -> Residue:
    """Reduce a rational number modulo m"""
    value = Fraction(value)
    if gcd(value.denominator, modulus) != 1:
        raise DenominatorNotCoprime(
            f"Denominator of {value} shares a factor with {modulus}"
        )
    inv = pow(value.denominator, -1, modulus) if modulus > 1 else 0
    return Residue(value.numerator * inv, modulus)


def is_zero(value) -> bool:
    if isinstance(value, (Cyclotomic, Residue)):
        return value.is_zero()
    return value == 0


def scalar_kind(value) -> str:
    """Return the variant tag: 'rational', 'cyclotomic' or 'residue'"""
    if isinstance(value, Cyclotomic):
        return "cyclotomic"
    if isinstance(value, Residue):
        return "residue"
    if isinstance(value, (int, Rational)):
        return "rational"
    raise TypeError(f"Unsupported coefficient type {type(value).__name__}")


def is_unit(value) -> bool:
    if isinstance(value, Residue):
        return value.is_unit()
    return not is_zero(value)


def to_rational(value) -> Fraction:
    """Convert a rational-valued scalar to Fraction"""
    if isinstance(value, Cyclotomic):
        return value.rational_value()
    if isinstance(value, Residue):
        raise TypeError("Residues have no rational value")
    return Fraction(value)


def to_complex(value) -> complex:
    """Double-precision value of a rational or cyclotomic scalar"""
    if isinstance(value, Cyclotomic):
        return complex(value.to_complex())
    if isinstance(value, Residue):
        raise TypeError("Residues have no numeric value")
    return complex(float(Fraction(value)))


def format_scalar(value) -> Union[str, list]:
    """Serialize a scalar: 'p/q' strings, coordinate lists for cyclotomics"""
    if isinstance(value, Cyclotomic):
        if value.is_rational():
            return str(value.rational_value())
        return [str(c) for c in value.coords]
    if isinstance(value, Residue):
        return str(value.value)
    return str(Fraction(value))
