"""Congruences between the parametrizations of isogenous curves"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple
import logging

import mpmath
import pandas as pd
import sympy

from modparam.arith.reconstruct import NoRationalInBall, rational_reconstruct
from modparam.arith.scalars import format_scalar, is_zero, to_rational
from modparam.arith.series import LaurentSeries
from modparam.curve import EllipticCurve
from modparam.gamma0 import index_gamma0
from modparam.modpoly import X, Y, modular_degree
from modparam.param import ModularParametrization
from modparam.periods import (
    PeriodLattice,
    lattice_invariants,
    lattice_relation,
    weierstrass_p,
    wp_laurent,
)


logger = logging.getLogger(__name__)

X3 = sympy.Symbol("X3")
INVARIANT_DENOM_BOUND = 10 ** 6


class CongruenceError(Exception):
    """Base exception for congruence computations"""

    pass


class DegenerateDifference(CongruenceError):
    """Raised when both lattices have the same g2 and g3"""

    pass


class NotIsogenous(CongruenceError):
    """Raised when the period lattices are not commensurable"""

    pass


class Verdict:
    """Decisions of the congruence procedure"""

    PROVED = "proved"
    REFUTED = "refuted"
    INSUFFICIENT = "insufficient-precision"
    # a lifted prime power p^e, e > 1: each division by p is checked to the window
    VERIFIED = "verified-to-window"


def _integer(value) -> int:
    value = to_rational(value)
    if value.denominator != 1:
        raise CongruenceError(f"Coefficient {value} is not integral")
    return value.numerator


def congruence_constant(first: EllipticCurve, second: EllipticCurve) -> Fraction:
    """
    Leading coefficient of wp(u, L1) - wp(u, L2) at u = 0

    (g2_1 - g2_2) / 20 when the g2 differ, else (g3_1 - g3_2) / 28.

    Raises:
        DegenerateDifference: If both invariants agree
    """
    if first.g2 != second.g2:
        return (first.g2 - second.g2) / 20
    if first.g3 != second.g3:
        return (first.g3 - second.g3) / 28
    raise DegenerateDifference(f"{first} and {second} have the same lattice invariants")


def parametrization_difference(
    first: ModularParametrization, second: ModularParametrization, coordinate: str = "X"
) -> LaurentSeries:
    """X_1 - X_2 (or Y_1 - Y_2) at infinity"""
    a, b = first.at_infinity(), second.at_infinity()
    if coordinate == "X":
        return a.x - b.x
    if coordinate == "Y":
        return a.y - b.y
    raise ValueError(f"Unknown coordinate {coordinate!r}, expected X or Y")


def _denominator_bound(poly: sympy.Poly) -> int:
    """Smallest D with D times every root an algebraic integer, for monic poly"""
    coeffs = poly.all_coeffs()[1:]
    primes = set()
    for c in coeffs:
        primes.update(sympy.primefactors(int(sympy.Rational(c).q)))
    result = 1
    for p in primes:
        need = 0
        for k, c in enumerate(coeffs, start=1):
            c = sympy.Rational(c)
            if c:
                e = sympy.multiplicity(p, int(c.q))
                need = max(need, -(-e // k))
        result *= p ** need
    return result


@dataclass
class DifferenceForm:
    """
    X_1 - X_2 = C prod(X_3 - R_i) / prod(X_3 - T_j) + K as functions of u

    X_3 is the X-coordinate attached to the intersection lattice L3.
    Numerator and denominator are monic in X_3; the R_i are the roots of
    the numerator and the T_j those of the denominator.
    """

    first: EllipticCurve
    second: EllipticCurve
    third: EllipticCurve
    relation: str
    constant: Fraction
    numerator: sympy.Poly
    denominator: sympy.Poly
    additive: Fraction
    x3: LaurentSeries
    difference: LaurentSeries
    denominators: List[Tuple[sympy.Expr, int]] = field(default_factory=list)
    torsion_integral: bool = True

    @property
    def D(self) -> int:
        result = 1
        for factor, bound in self.denominators:
            result *= bound ** sympy.degree(factor, X3)
        return result

    @property
    def modulus(self) -> Fraction:
        """|C| / D, which divides every non-constant coefficient when integral"""
        return abs(self.constant) / self.D

    @property
    def predicts_congruence(self) -> bool:
        m = self.modulus
        return self.torsion_integral and m.denominator == 1 and m > 1

    def zeros(self) -> List[Tuple[sympy.Expr, int]]:
        return sympy.factor_list(self.numerator.as_expr(), X3)[1]

    def poles(self) -> List[Tuple[sympy.Expr, int]]:
        return sympy.factor_list(self.denominator.as_expr(), X3)[1]

    def expand(self) -> LaurentSeries:
        """Re-expansion of the rational form in q through the X_3 series"""

        def evaluate(poly):
            total = LaurentSeries.zero(self.x3.order)
            for (k,), c in poly.terms():
                value = Fraction(int(c.p), int(c.q))
                total = total + (self.x3 ** k * value if k else value)
            return total

        return evaluate(self.numerator) / evaluate(self.denominator) * self.constant + self.additive

    def residual(self) -> LaurentSeries:
        return self.expand() - self.difference

    def expression(self) -> sympy.Expr:
        c = sympy.Rational(self.constant.numerator, self.constant.denominator)
        k = sympy.Rational(self.additive.numerator, self.additive.denominator)
        top = sympy.factor(self.numerator.as_expr())
        bottom = sympy.factor(self.denominator.as_expr())
        return c * top / bottom + k

    def to_dict(self) -> dict:
        return {
            "curves": [self.first.label, self.second.label],
            "relation": self.relation,
            "C": str(self.constant),
            "form": str(self.expression()),
            "zeros": [str(f) for f, _ in self.zeros()],
            "poles": [str(f) for f, _ in self.poles()],
            "D": self.D,
            "modulus": str(self.modulus),
            "torsion_integral": self.torsion_integral,
        }


def _lattice_curve(lattice: PeriodLattice, label: str) -> EllipticCurve:
    """Short model with the lattice's exact invariants"""
    with mpmath.workprec(lattice.bits):
        g2, g3 = lattice_invariants(lattice)
        try:
            g2 = rational_reconstruct(mpmath.re(g2), INVARIANT_DENOM_BOUND)
            g3 = rational_reconstruct(mpmath.re(g3), INVARIANT_DENOM_BOUND)
        except NoRationalInBall as exc:
            raise CongruenceError(
                f"Invariants of the common lattice are not rational: {exc}"
            ) from exc
    return EllipticCurve.from_c_invariants(12 * g2, 216 * g3, label=label)


def _on_lattice(lattice: PeriodLattice, z) -> bool:
    s, t = lattice.coordinates(z)
    tol = lattice.tolerance
    return abs(s - mpmath.nint(s)) < tol and abs(t - mpmath.nint(t)) < tol


def _quotient_points(lattice: PeriodLattice, common: PeriodLattice) -> List[mpmath.mpc]:
    """One representative of every nonzero class of lattice / common"""
    index = int(mpmath.nint(common.area / lattice.area))
    points: List[mpmath.mpc] = []
    for a in range(index):
        for b in range(index):
            t = lattice.point(a, b)
            if _on_lattice(common, t) or any(_on_lattice(common, t - r) for r in points):
                continue
            points.append(t)
    if len(points) != index - 1:
        raise CongruenceError(
            f"Found {len(points)} nonzero classes for a quotient of order {index}"
        )
    return points


def _pole_polynomial(
    first: PeriodLattice, second: PeriodLattice, common: PeriodLattice, third: EllipticCurve
) -> sympy.Poly:
    """
    prod (X_3 - T_j) over the nonzero classes t of L1 / L3 and L2 / L3

    A pair of classes +-t shares its x-value and gives a squared factor;
    a 2-torsion class gives a simple one.
    """
    values: List[mpmath.mpc] = []
    with mpmath.workprec(common.bits):
        shift = mpmath.mpf(third.b2.numerator) / third.b2.denominator / 12
        for lattice in (first, second):
            points = _quotient_points(lattice, common)
            values.extend(weierstrass_p(t, common) - shift for t in points)
        coeffs = [mpmath.mpc(1)]
        for v in values:
            coeffs = [a - v * b for a, b in zip(coeffs + [0], [0] + coeffs)]
        exact = []
        for c in coeffs:
            if abs(mpmath.im(c)) > common.tolerance * max(1, abs(c)):
                raise CongruenceError(
                    f"Pole polynomial coefficient {mpmath.nstr(c, 15)} is not real"
                )
            try:
                exact.append(rational_reconstruct(mpmath.re(c), INVARIANT_DENOM_BOUND))
            except NoRationalInBall as exc:
                raise CongruenceError(
                    f"Pole polynomial coefficient did not reconstruct: {exc}"
                ) from exc
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in exact], X3, domain="QQ")


def _reduce_in_powers(
    series: LaurentSeries, base: LaurentSeries
) -> Tuple[Dict[int, Fraction], LaurentSeries]:
    """Write series as a polynomial in base (valuation -2) plus a remainder of valuation > 0"""
    remainder = series
    poly: Dict[int, Fraction] = {}
    top = max(0, -series.valuation // 2) if not series.is_zero() else 0
    powers = {k: base ** k for k in range(top + 1)}
    for k in range(top, -1, -1):
        exponent = k * base.valuation
        if exponent >= remainder.order or remainder.is_zero():
            continue
        coeff = remainder[exponent]
        if not is_zero(coeff):
            coeff = to_rational(coeff) / to_rational(powers[k][exponent])
            poly[k] = coeff
            remainder = remainder - powers[k] * coeff if k else remainder - coeff
    return poly, remainder


def difference_rational_form(
    first: ModularParametrization, second: ModularParametrization
) -> DifferenceForm:
    """
    Rational form of X_1 - X_2 in the X-coordinate of L1 intersected with L2

    The poles T_j are the x-values of the nonzero classes of L1 and L2
    modulo their intersection; the numerator is the polynomial in X_3
    left after multiplying the difference by prod (X_3 - T_j).

    Raises:
        NotIsogenous: If the lattices are not commensurable
        DegenerateDifference: If the lattices coincide
    """
    e1, e2 = first.curve, second.curve
    if first.lam * first.manin != second.lam * second.manin:
        raise ValueError("Both parametrizations must use the same scaling of epsilon")
    constant = congruence_constant(e1, e2)
    l1, l2 = first.lattice, second.lattice
    with mpmath.workprec(l1.bits):
        relation = lattice_relation(l1, l2)
    if not relation:
        raise NotIsogenous(f"{e1.label or e1} and {e2.label or e2} have incommensurable lattices")
    if relation.kind == "equal":
        raise DegenerateDifference(f"{e1.label or e1} and {e2.label or e2} have the same lattice")
    difference = parametrization_difference(first, second)
    if relation.kind == "sublattice":
        third, common, x3 = e1, l1, first.at_infinity().x
    elif relation.kind == "superlattice":
        third, common, x3 = e2, l2, second.at_infinity().x
    else:
        common = PeriodLattice(*relation.common, bits=l1.bits)
        third = _lattice_curve(common, f"{e1.label}^{e2.label}")
        u = first.eichler_series()
        wp = wp_laurent(third.g2, third.g3, u.order // 2 + 2)
        x3 = wp.compose(u)[0] - third.b2 / 12
    denominator = _pole_polynomial(l1, l2, common, third)
    torsion_integral = all(sympy.Rational(c).q == 1 for c in denominator.all_coeffs())
    if not torsion_integral:
        logger.warning(
            f"Pole x-values of {e1.label}/{e2.label} are not integral: {denominator.as_expr()}"
        )
    additive = (e2.b2 - e1.b2) / 12
    g = difference - additive
    den_series = LaurentSeries.zero(x3.order)
    for (k,), c in denominator.terms():
        value = Fraction(int(c.p), int(c.q))
        den_series = den_series + (x3 ** k * value if k else value)
    poly, remainder = _reduce_in_powers(g * den_series, x3)
    if not remainder.is_zero():
        raise CongruenceError(
            "X_1 - X_2 is not rational in X_3 with these poles "
            f"(residue at q^{remainder.valuation})"
        )
    top = max(poly)
    lead = poly[top]
    if lead != constant:
        logger.warning(f"Leading coefficient {lead} differs from the lattice constant {constant}")
    normalized = {k: v / lead for k, v in poly.items()}
    numerator = sympy.Poly.from_dict(
        {(k,): sympy.Rational(v.numerator, v.denominator) for k, v in normalized.items()}, X3
    )
    denominators = [
        (factor, _denominator_bound(sympy.Poly(factor, X3).monic()))
        for factor, mult in sympy.factor_list(numerator.as_expr(), X3)[1]
        for _ in range(mult)
    ]
    form = DifferenceForm(
        e1, e2, third, relation.kind, lead, numerator, denominator, additive, x3, difference,
        denominators, torsion_integral,
    )
    logger.info(f"{e1.label} - {e2.label}: {form.expression()}, C = {lead}, D = {form.D}")
    return form


@dataclass
class SturmResult:
    """Outcome of the Sturm test: proved when no residue appears up to the threshold"""

    proved: bool
    threshold: Fraction
    first_nonzero: Optional[int] = None
    known_to: Optional[int] = None

    def __bool__(self):
        return self.proved

    @property
    def sufficient(self) -> bool:
        """The expansion reached past the threshold or a residue was found"""
        return self.first_nonzero is not None or self.known_to > self.threshold


def sturm_threshold(weight: int, index: int, pole_order_sum: int) -> Fraction:
    return Fraction(weight * index, 12) - pole_order_sum


def sturm_check(
    f: LaurentSeries, weight: int, index: int, pole_order_sum: int, modulus: Optional[int] = None
) -> SturmResult:
    """
    Meromorphic Sturm test: ord(f) > k m / 12 - pole_order_sum forces f = 0

    Args:
        f: Expansion at infinity, over Z/p or rational with modulus given
        weight: Weight k
        index: Index m of the group in SL2(Z)
        pole_order_sum: Sum of the (negative) orders at the poles
        modulus: Reduce rational coefficients modulo this first
    """
    threshold = sturm_threshold(weight, index, pole_order_sum)
    if modulus is not None:
        f = f.reduce_mod(modulus)
    for n, c in f.items():
        if n > threshold:
            break
        if not is_zero(c):
            return SturmResult(False, threshold, n, f.order)
    return SturmResult(f.order > threshold, threshold, None, f.order)


@dataclass
class CongruenceVerdict:
    """Decision on X_1 = X_2 mod the modulus, for the non-constant terms"""

    modulus: int
    decision: str
    threshold: Fraction
    degrees: Tuple[int, int]
    witnesses: List[Tuple[int, int]] = field(default_factory=list)
    bound: Optional[int] = None
    factors: Dict[int, str] = field(default_factory=dict)
    window_checked: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "decision": self.decision,
            "threshold": str(self.threshold),
            "degrees": list(self.degrees),
            "witnesses": [{"exponent": n, "coefficient": c} for n, c in self.witnesses],
            "bound": self.bound,
            "factors": {str(p): d for p, d in self.factors.items()},
            "window_checked": self.window_checked,
        }


def _refutation_witnesses(f: LaurentSeries, modulus: int) -> Tuple[List[Tuple[int, int]], int]:
    """
    First nonzero coefficient and the one that drops the running gcd below
    the modulus; their gcd bounds any congruence
    """
    running = 0
    first = None
    for n, c in f.items():
        value = _integer(c)
        if not value:
            continue
        if first is None:
            first = (n, value)
        running = gcd(running, value)
        if running % modulus:
            witnesses = [first] if first[0] == n else [first, (n, value)]
            return witnesses, running
    return ([first] if first else []), running


def _prime_power_decision(
    f: LaurentSeries, p: int, e: int, index: int, pole_order_sum: int
) -> str:
    """
    Iterated Sturm: once f = 0 mod p^k everywhere, f / p^k is again integral

    Only the first step is a proof; a lifted power is reported as verified
    to the window.
    """
    current = f
    for _ in range(e):
        result = sturm_check(current, 0, index, pole_order_sum, p)
        if result.first_nonzero is not None:
            return Verdict.REFUTED
        if not result.proved:
            return Verdict.INSUFFICIENT
        current = current.map_coefficients(lambda c: to_rational(c) / p)
    return Verdict.PROVED if e == 1 else Verdict.VERIFIED


def parametrization_congruence(
    first: ModularParametrization,
    second: ModularParametrization,
    modulus: int,
    degrees: Tuple[Optional[int], Optional[int]] = (None, None),
) -> CongruenceVerdict:
    """
    Decide X_1 = X_2 mod the modulus for the non-constant coefficients

    X_1 - X_2 has weight zero and poles of total order at most
    2 (d_1 + d_2), so vanishing through q^(2 (d_1 + d_2)) proves the
    congruence. Prime powers are handled by dividing out each proved
    power and testing again; composite moduli factor-wise. A proof also
    checks that nothing survives up to four times the threshold, so a
    shorter expansion is insufficient.
    """
    if modulus < 2:
        raise ValueError(f"Modulus must be at least 2, got {modulus}")
    d1 = modular_degree(first, degrees[0])
    d2 = modular_degree(second, degrees[1])
    pole_order_sum = -2 * (d1 + d2)
    index = index_gamma0(first.level)
    threshold = sturm_threshold(0, index, pole_order_sum)
    difference = parametrization_difference(first, second)
    constant = difference[0] if difference.valuation <= 0 < difference.order else 0
    f = difference - constant
    verdict = CongruenceVerdict(modulus, Verdict.PROVED, threshold, (d1, d2))
    for p, e in sympy.factorint(modulus).items():
        verdict.factors[p ** e] = _prime_power_decision(f, p, e, index, pole_order_sum)
    decisions = set(verdict.factors.values())
    if Verdict.REFUTED in decisions:
        verdict.decision = Verdict.REFUTED
        verdict.witnesses, verdict.bound = _refutation_witnesses(f, modulus)
    elif Verdict.INSUFFICIENT in decisions:
        verdict.decision = Verdict.INSUFFICIENT
    elif f.order <= 4 * threshold:
        logger.warning(
            f"Expansion to q^{f.order} is too short for the window 4 * {threshold}; "
            "raise the order"
        )
        verdict.decision = Verdict.INSUFFICIENT
    else:
        # soundness window: nothing nonzero past the threshold either
        window = 4 * int(threshold) + 1
        reduced = f.reduce_mod(modulus)
        stray = next((n for n, c in reduced.items() if n < window and not is_zero(c)), None)
        if stray is not None:
            raise CongruenceError(f"Residue at q^{stray} beyond a proved threshold {threshold}")
        verdict.window_checked = window
    logger.info(
        f"{first.curve.label} vs {second.curve.label} mod {modulus}: {verdict.decision} "
        f"(threshold {threshold}, degrees {d1}, {d2})"
    )
    return verdict


@dataclass
class BasisElement:
    """Row-reduced element q^-k + ... of Q[X, Y]"""

    pole_order: int
    expr: sympy.Expr
    series: LaurentSeries


def _monomial(k: int):
    if k == 0:
        return 0, 0
    if k % 2 == 0:
        return k // 2, 0
    return (k - 3) // 2, 1


def reduced_basis(
    parametrization: ModularParametrization, max_pole_order: int
) -> List[BasisElement]:
    """
    Row-reduced basis of the functions in Q[X, Y] with pole order at most
    max_pole_order at infinity

    Pole orders 0, 2, 3, 4, ... occur once each. Every element is
    normalized to q^-k + ... and has no term at q^-k' for the other pivots k'.
    """
    if max_pole_order < 0:
        raise ValueError("Pole order must be nonnegative")
    expansion = parametrization.at_infinity()
    x, y = expansion.x, expansion.y
    order = min(x.order, y.order)
    basis: List[BasisElement] = []
    for k in [0] + list(range(2, max_pole_order + 1)):
        i, j = _monomial(k)
        series = LaurentSeries.constant(Fraction(1), order)
        if i:
            series = series * x ** i
        if j:
            series = series * y
        expr = X ** i * Y ** j
        lead = to_rational(series[-k])
        series = series / lead
        expr = expr / sympy.Rational(lead.numerator, lead.denominator)
        for element in reversed(basis):
            c = 0
            if -element.pole_order < series.order:
                c = to_rational(series[-element.pole_order])
            if c:
                series = series - element.series * c
                expr = expr - element.expr * sympy.Rational(c.numerator, c.denominator)
        basis.append(BasisElement(k, sympy.expand(expr), series))
    return basis


def reduced_basis_table(basis: List[BasisElement], max_exponent: int) -> pd.DataFrame:
    """One row per basis element, coefficient columns q^-k ... q^max_exponent"""
    low = -max(element.pole_order for element in basis)
    columns = [f"q^{n}" for n in range(low, max_exponent + 1)]
    rows = []
    for element in basis:
        row = {"pole_order": element.pole_order, "element": str(element.expr)}
        for n in range(low, max_exponent + 1):
            row[f"q^{n}"] = format_scalar(element.series[n]) if n < element.series.order else ""
        rows.append(row)
    df = pd.DataFrame(rows, columns=["pole_order", "element"] + columns)
    df.set_index("pole_order", inplace=True)
    return df
