"""Weierstrass models, reduction data and newform coefficients"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
import sympy
from sympy.abc import x as _x


logger = logging.getLogger(__name__)

DEFAULT_COUNTING_BUDGET = 10 ** 6


class CurveError(Exception):
    """Base exception for elliptic curve errors"""

    pass


class SingularCurve(CurveError):
    """Raised when the discriminant of a Weierstrass model vanishes"""

    pass


class PrimeTooLarge(CurveError):
    """Raised when point counting would exceed the configured budget"""

    pass


class ConductorMismatch(CurveError):
    """Raised when the supplied conductor disagrees with the reduction data"""

    pass


class ReductionType(Enum):
    """Reduction type of a curve at a prime"""

    GOOD = "good"
    SPLIT = "split multiplicative"
    NONSPLIT = "nonsplit multiplicative"
    ADDITIVE = "additive"

    @property
    def is_multiplicative(self) -> bool:
        return self in (ReductionType.SPLIT, ReductionType.NONSPLIT)


@dataclass(frozen=True)
class AffinePoint:
    """Point (x, y) on a curve, or the point at infinity when x is None"""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    @classmethod
    def infinity(cls) -> "AffinePoint":
        return cls()

    @property
    def is_infinity(self) -> bool:
        return self.x is None


@dataclass(frozen=True)
class EllipticCurve:
    """
    Elliptic curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

    The derived invariants follow the usual Tate conventions. The model is
    trusted to be minimal; only the discriminant is validated here.
    """

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction
    conductor: Optional[int] = None
    label: Optional[str] = None

    def __post_init__(self):
        """Normalize coefficients and reject singular models"""
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.discriminant == 0:
            raise SingularCurve(f"Singular Weierstrass model {self.ainvs}")
        if self.conductor is not None and self.conductor < 1:
            raise ValueError(f"Conductor must be positive, got {self.conductor}")

    @property
    def ainvs(self) -> Tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> Fraction:
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self) -> Fraction:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> Fraction:
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self) -> Fraction:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 ** 2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 ** 2 - a4 ** 2

    @property
    def c4(self) -> Fraction:
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self) -> Fraction:
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 ** 2 * b8 - 8 * b4 ** 3 - 27 * b6 ** 2 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return self.c4 ** 3 / self.discriminant

    @property
    def g2(self) -> Fraction:
        """g2 of the lattice in the normalization X = wp - b2/12"""
        return self.c4 / 12

    @property
    def g3(self) -> Fraction:
        return self.c6 / 216

    @property
    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def __str__(self):
        name = self.label or "E"
        return f"{name} {[str(a) for a in self.ainvs]}"

    # points

    def residual(self, x, y):
        """Value of y^2 + a1xy + a3y - x^3 - a2x^2 - a4x - a6 (works on series too)"""
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6

    def is_on_curve(self, point: AffinePoint) -> bool:
        return point.is_infinity or self.residual(point.x, point.y) == 0

    def negate(self, point: AffinePoint) -> AffinePoint:
        if point.is_infinity:
            return point
        return AffinePoint(point.x, -point.y - self.a1 * point.x - self.a3)

    def add(self, p: AffinePoint, q: AffinePoint) -> AffinePoint:
        """Group law on points with rational coordinates"""
        if p.is_infinity:
            return q
        if q.is_infinity:
            return p
        a1, a2, a3, a4, a6 = self.ainvs
        if p.x == q.x:
            if p.y + q.y + a1 * q.x + a3 == 0:
                return AffinePoint.infinity()
            slope = (3 * p.x ** 2 + 2 * a2 * p.x + a4 - a1 * p.y) / (2 * p.y + a1 * p.x + a3)
        else:
            slope = (q.y - p.y) / (q.x - p.x)
        intercept = p.y - slope * p.x
        x3 = slope ** 2 + a1 * slope - a2 - p.x - q.x
        y3 = -(slope + a1) * x3 - intercept - a3
        return AffinePoint(x3, y3)

    def multiply(self, n: int, point: AffinePoint) -> AffinePoint:
        if n < 0:
            return self.multiply(-n, self.negate(point))
        result = AffinePoint.infinity()
        addend = point
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return result

    def order_of(self, point: AffinePoint, bound: int = 16) -> Optional[int]:
        """Order of a torsion point, or None if it exceeds bound"""
        current = point
        for n in range(1, bound + 1):
            if current.is_infinity:
                return n
            current = self.add(current, point)
        return None

    def is_two_torsion(self, point: AffinePoint) -> bool:
        return not point.is_infinity and 2 * point.y + self.a1 * point.x + self.a3 == 0

    def integral_points(self, bound: int) -> List[AffinePoint]:
        """Brute-force integral points with |x| <= bound"""
        points = []
        a1, a2, a3, a4, a6 = self.ainvs
        for x in range(-bound, bound + 1):
            # y^2 + (a1 x + a3) y - rhs = 0
            lin = a1 * x + a3
            rhs = x ** 3 + a2 * x ** 2 + a4 * x + a6
            disc = lin ** 2 + 4 * rhs
            if disc < 0 or disc.denominator != 1:
                continue
            root = isqrt(int(disc))
            if root * root != disc:
                continue
            for sign in {root, -root}:
                y = (-lin + sign) / 2
                if y.denominator == 1:
                    points.append(AffinePoint(Fraction(x), y))
        return points

    def torsion_points(self, bound: int = 100) -> List[AffinePoint]:
        """Integral torsion points found by brute force, infinity excluded"""
        return [p for p in self.integral_points(bound) if self.order_of(p) is not None]

    # polynomials in x

    def two_torsion_polynomial(self) -> sympy.Poly:
        """4x^3 + b2 x^2 + 2 b4 x + b6, whose roots are the 2-torsion x-coordinates"""
        return sympy.Poly(
            [4, _q(self.b2), 2 * _q(self.b4), _q(self.b6)], _x, domain="QQ"
        )

    def division_polynomial(self, n: int) -> sympy.Poly:
        """Polynomial in x vanishing exactly at x-coordinates of nonzero n-torsion"""
        f = _reduced_division_polynomial(self.ainvs, n)
        if n % 2 == 0:
            f = f * self.two_torsion_polynomial()
        return f.monic()

    def rescale(self, u) -> "EllipticCurve":
        """Isomorphic model under x = u^2 x', y = u^3 y'"""
        u = Fraction(u)
        a1, a2, a3, a4, a6 = self.ainvs
        return EllipticCurve(
            a1 / u, a2 / u ** 2, a3 / u ** 3, a4 / u ** 4, a6 / u ** 6, self.conductor, self.label
        )

    @classmethod
    def from_c_invariants(
        cls, c4, c6, conductor: Optional[int] = None, label: Optional[str] = None
    ) -> "EllipticCurve":
        """Short model y^2 = x^3 - c4/48 x - c6/864 with the given c4, c6"""
        return cls(0, 0, 0, -Fraction(c4) / 48, -Fraction(c6) / 864, conductor, label)


def _q(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


@lru_cache(maxsize=None)
def _reduced_division_polynomial(ainvs: Tuple[Fraction, ...], n: int) -> sympy.Poly:
    """psi_n for odd n and psi_n / psi_2 for even n, as polynomials in x"""
    curve = EllipticCurve(*ainvs)
    b2, b4, b6, b8 = (_q(v) for v in (curve.b2, curve.b4, curve.b6, curve.b8))
    if n <= 0:
        return sympy.Poly(0, _x, domain="QQ")
    if n in (1, 2):
        return sympy.Poly(1, _x, domain="QQ")
    if n == 3:
        return sympy.Poly([3, b2, 3 * b4, 3 * b6, b8], _x, domain="QQ")
    if n == 4:
        return sympy.Poly(
            [2, b2, 5 * b4, 10 * b6, 10 * b8, b2 * b8 - b4 * b6, b4 * b8 - b6 ** 2],
            _x,
            domain="QQ",
        )
    psi2_sq = curve.two_torsion_polynomial()

    def f(k):
        return _reduced_division_polynomial(ainvs, k)

    m = n // 2
    if n % 2:
        if m % 2 == 0:
            return psi2_sq ** 2 * f(m + 2) * f(m) ** 3 - f(m - 1) * f(m + 1) ** 3
        return f(m + 2) * f(m) ** 3 - psi2_sq ** 2 * f(m - 1) * f(m + 1) ** 3
    return f(m) * (f(m + 2) * f(m - 1) ** 2 - f(m - 2) * f(m + 1) ** 2)


@dataclass
class NewformCoefficients:
    """Coefficients a_1..a_{n_max} of the weight two newform attached to a curve"""

    level: int
    coefficients: List[int] = field(default_factory=list)
    manin: int = 1

    def __post_init__(self):
        """Validate normalization"""
        if self.coefficients and self.coefficients[0] != 1:
            raise ValueError("Newform coefficients must start with a_1 = 1")
        if self.manin < 1:
            raise ValueError(f"Manin constant must be positive, got {self.manin}")

    @property
    def n_max(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, n: int) -> int:
        """a_n, 1-indexed"""
        if n < 1 or n > self.n_max:
            raise IndexError(f"a_{n} not available (n_max={self.n_max})")
        return self.coefficients[n - 1]

    def scaled(self, n: int) -> int:
        """Manin-scaled coefficient m a_n"""
        return self.manin * self[n]


def reduction_type(curve: EllipticCurve, p: int) -> ReductionType:
    """Reduction type of an integral model at the prime p"""
    disc = curve.discriminant
    if disc.numerator % p:
        return ReductionType.GOOD
    if curve.c4.numerator % p:
        point = _singular_point(curve, p)
        x0, _ = point
        a1 = int(curve.a1) % p
        a2 = int(curve.a2) % p
        # tangent slopes t at the node solve t^2 + a1 t - (3 x0 + a2) = 0
        constant = -(3 * x0 + a2) % p
        splits = any((t * t + a1 * t + constant) % p == 0 for t in range(p))
        return ReductionType.SPLIT if splits else ReductionType.NONSPLIT
    return ReductionType.ADDITIVE


def _singular_point(curve: EllipticCurve, p: int) -> Tuple[int, int]:
    a1, a2, a3, a4, a6 = (int(a) % p for a in curve.ainvs)
    for x in range(p):
        for y in range(p):
            f = (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % p
            fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % p
            fy = (2 * y + a1 * x + a3) % p
            if f == 0 and fx == 0 and fy == 0:
                return x, y
    raise CurveError(f"No singular point of {curve} modulo {p}")


def count_points(curve: EllipticCurve, p: int, budget: int = DEFAULT_COUNTING_BUDGET) -> int:
    """Number of points of the reduction over F_p, infinity included"""
    if p > budget:
        raise PrimeTooLarge(f"Prime {p} exceeds counting budget {budget}")
    a1, a2, a3, a4, a6 = (int(a) % p for a in curve.ainvs)
    xs = np.arange(p, dtype=np.int64)
    if p == 2:
        total = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    total += 1
        return total
    b2, b4, b6 = (int(v) % p for v in (curve.b2, curve.b4, curve.b6))
    # the y-quadratic has discriminant 4x^3 + b2 x^2 + 2 b4 x + b6
    x2 = xs * xs % p
    disc = (4 * (x2 * xs % p) + b2 * x2 + 2 * b4 * xs + b6) % p
    squares = np.zeros(p, dtype=bool)
    squares[x2] = True
    solutions = np.where(disc == 0, 1, np.where(squares[disc], 2, 0))
    return 1 + int(solutions.sum())


def a_p(curve: EllipticCurve, p: int, budget: int = DEFAULT_COUNTING_BUDGET) -> int:
    """Trace of Frobenius at p, or the bad-reduction value"""
    kind = reduction_type(curve, p)
    if kind is ReductionType.GOOD:
        return p + 1 - count_points(curve, p, budget)
    if kind is ReductionType.SPLIT:
        return 1
    if kind is ReductionType.NONSPLIT:
        return -1
    return 0


def check_conductor(curve: EllipticCurve) -> None:
    """
    Compare the supplied conductor with the bad primes of the model

    Raises:
        ConductorMismatch: If the prime supports differ or an exponent is
            inconsistent with the reduction type
    """
    if curve.conductor is None:
        raise ConductorMismatch(f"Curve {curve} has no conductor")
    if not curve.is_integral:
        raise CurveError(f"Curve {curve} is not integral")
    bad = set(sympy.factorint(abs(curve.discriminant.numerator)))
    level = sympy.factorint(curve.conductor)
    if bad != set(level):
        raise ConductorMismatch(
            f"Conductor {curve.conductor} has primes {sorted(level)} "
            f"but the discriminant has {sorted(bad)}"
        )
    for p, e in level.items():
        kind = reduction_type(curve, p)
        if kind.is_multiplicative and e != 1:
            raise ConductorMismatch(f"Multiplicative reduction at {p} needs exponent 1, got {e}")
        if kind is ReductionType.ADDITIVE and e < 2:
            raise ConductorMismatch(f"Additive reduction at {p} needs exponent >= 2, got {e}")


def smallest_prime_factors(limit: int) -> np.ndarray:
    """Sieve of smallest prime factors for 0..limit"""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p:: p][spf[p:: p] == 0] = p
    return spf


def newform_coefficients(
    curve: EllipticCurve,
    n_max: int,
    manin: int = 1,
    budget: int = DEFAULT_COUNTING_BUDGET,
) -> NewformCoefficients:
    """
    Coefficients a_1..a_n_max of the newform attached to the curve

    Prime coefficients come from point counting or the reduction type;
    prime powers from the Hecke recursion; the rest by multiplicativity.

    Args:
        curve: Integral minimal model with conductor
        n_max: Number of coefficients
        manin: Manin constant to attach
        budget: Largest prime that may be point counted

    Returns:
        NewformCoefficients for the curve

    Raises:
        ConductorMismatch: If the conductor disagrees with the model
        PrimeTooLarge: If a prime below n_max exceeds the budget
    """
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    check_conductor(curve)
    spf = smallest_prime_factors(n_max)
    coeffs: Dict[int, int] = {1: 1}
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            coeffs[n] = coeffs[n // m] * coeffs[m]
            continue
        if k == 1:
            coeffs[n] = a_p(curve, p, budget)
        elif curve.conductor % p == 0:
            coeffs[n] = coeffs[p] * coeffs[n // p]
        else:
            coeffs[n] = coeffs[p] * coeffs[n // p] - p * coeffs[n // (p * p)]
    logger.debug(f"Computed {n_max} newform coefficients for {curve}")
    return NewformCoefficients(curve.conductor, [coeffs[n] for n in range(1, n_max + 1)], manin)
