"""Modular polynomials of functions on X_0(N), divisors, CM preimages and Atkin-Lehner action"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple, Union
import logging

import mpmath
import sympy

from modparam.arith.scalars import to_rational
from modparam.arith.series import LaurentSeries, SeriesError
from modparam.curve import AffinePoint
from modparam.gamma0 import (
    Cusp,
    Matrix,
    QuadraticSurd,
    atkin_lehner_matrix,
    coset_reps,
    cusps,
    decompose,
    gamma0_equivalence,
    index_gamma0,
    is_square_mod,
)
from modparam.jfunction import (
    CLASS_NUMBER_ONE,
    J,
    JRational,
    class_number_one_point,
    default_degree_bound,
    j_recognize,
)
from modparam.param import ModularParametrization


logger = logging.getLogger(__name__)

X, Y = sympy.symbols("X Y")
PHI = sympy.Symbol("x")

SEARCH_BITS = 256
VERIFY_BITS = 512
DEGREE_BITS = 64
DEGREE_TOLERANCE = 10 ** -6


class ModularPolynomialError(Exception):
    """Base exception for modular polynomial computations"""

    pass


class ExpansionUndefined(ModularPolynomialError):
    """Raised when the expression cannot be expanded at some cusp"""

    def __init__(self, message: str, cusp: Optional[Cusp] = None):
        super().__init__(message)
        self.cusp = cusp


class GaloisResidue(ModularPolynomialError):
    """Raised when a symmetrized series keeps irrational coefficients"""

    pass


class NoPreimageFound(ModularPolynomialError):
    """Raised when no coset translate of the CM point hits the target"""

    pass


class CriterionViolated(ModularPolynomialError):
    """Raised when a fixed point has a discriminant outside the CM bound"""

    pass


@dataclass
class ModularFunction:
    """
    A function F(X, Y) on X_0(N) held through its expansion at every cusp

    The expansion in q_w at cusp rho is F((X, Y)(gamma_rho z)). The value
    at any other coset gamma_rho T^k follows by q_w -> zeta_w^k q_w.
    """

    label: str
    parametrization: ModularParametrization
    expansions: Dict[Cusp, LaurentSeries]
    expr: Optional[sympy.Expr] = None

    @property
    def level(self) -> int:
        return self.parametrization.level

    @property
    def index(self) -> int:
        return index_gamma0(self.level)

    def at(self, cusp: Cusp) -> LaurentSeries:
        return self.expansions[cusp]

    def at_infinity(self) -> LaurentSeries:
        return self.expansions[cusps(self.level)[0]]

    def valuations(self) -> Dict[Cusp, int]:
        """Order of F at each cusp in its local parameter q_w"""
        result = {}
        for cusp, series in self.expansions.items():
            if series.is_zero():
                raise ExpansionUndefined(
                    f"{self.label} vanishes to the working order at {cusp}", cusp
                )
            result[cusp] = series.valuation
        return result

    def coset_series(self) -> List[Tuple[Matrix, LaurentSeries]]:
        """F(g z) in q_w for every coset representative g"""
        result = []
        for g in coset_reps(self.level):
            cusp, offset, _ = decompose(g, self.level)
            result.append((g, self.expansions[cusp].twist(offset)))
        return result

    def evaluate(self, g: Matrix, z, bits: Optional[int] = None) -> mpmath.mpc:
        """Numeric F(g z) through the numeric parametrization"""
        if self.expr is None:
            raise ValueError(f"{self.label} has no expression in X and Y")
        x, y = self.parametrization.evaluate_coset(g, z, bits)
        num, den = sympy.fraction(sympy.together(self.expr))
        value = sympy.lambdify((X, Y), num, "mpmath")(x, y)
        return value / sympy.lambdify((X, Y), den, "mpmath")(x, y)


def parse_expression(text: Union[str, sympy.Expr]) -> sympy.Expr:
    expr = sympy.sympify(text, locals={"X": X, "Y": Y})
    extra = expr.free_symbols - {X, Y}
    if extra:
        raise ValueError(f"Expression {text} uses symbols other than X and Y: {extra}")
    return sympy.together(expr)


def _evaluate_polynomial(poly: sympy.Poly, x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    total = LaurentSeries.zero(min(x.order, y.order), x.width)
    x_powers: Dict[int, LaurentSeries] = {}
    y_powers: Dict[int, LaurentSeries] = {}
    for (i, j), c in poly.terms():
        coeff = Fraction(int(c.p), int(c.q))
        if i == 0 and j == 0:
            total = total + coeff
            continue
        if i not in x_powers:
            x_powers[i] = x ** i
        if j not in y_powers:
            y_powers[j] = y ** j
        total = total + x_powers[i] * y_powers[j] * coeff
    return total


def build_modular_function(
    parametrization: ModularParametrization,
    expr: Union[str, sympy.Expr],
    label: Optional[str] = None,
) -> ModularFunction:
    """
    Expand a rational expression in X, Y at every cusp

    Raises:
        ExpansionUndefined: If the denominator vanishes to the working order at a cusp
    """
    expr = parse_expression(expr)
    num, den = sympy.fraction(expr)
    if den == 0 or sympy.simplify(den) == 0:
        raise ExpansionUndefined(f"Denominator of {expr} is zero")
    num_poly = sympy.Poly(num, X, Y, domain="QQ")
    den_poly = sympy.Poly(den, X, Y, domain="QQ")
    expansions = {}
    for expansion in parametrization.expansions():
        top = _evaluate_polynomial(num_poly, expansion.x, expansion.y)
        bottom = _evaluate_polynomial(den_poly, expansion.x, expansion.y)
        if bottom.is_zero():
            raise ExpansionUndefined(
                f"Denominator of {expr} vanishes to order {bottom.order} at cusp {expansion.cusp}",
                expansion.cusp,
            )
        try:
            expansions[expansion.cusp] = top / bottom
        except SeriesError as exc:
            raise ExpansionUndefined(
                f"{expr} at cusp {expansion.cusp}: {exc}", expansion.cusp
            ) from exc
        logger.debug(f"{expr} at {expansion.cusp}: valuation {expansions[expansion.cusp].ord()}")
    return ModularFunction(label or str(expr), parametrization, expansions, expr)


def _rational(series: LaurentSeries, what: str) -> LaurentSeries:
    try:
        return series.rationalize()
    except ValueError as exc:
        raise GaloisResidue(f"{what} is not rational: {exc}") from exc


def power_sums(F: ModularFunction, count: int) -> List[LaurentSeries]:
    """p_r = sum over cosets of F(g z)^r for r = 1..count, as series in q"""
    sums: List[LaurentSeries] = []
    powers = {cusp: series for cusp, series in F.expansions.items()}
    for r in range(1, count + 1):
        total = None
        for cusp, power in powers.items():
            w = power.width
            # summing over q_w -> zeta^k q_w keeps exponents divisible by w
            orbit = power.contract(w) * w
            total = orbit if total is None else total + orbit
        sums.append(_rational(total, f"Power sum p_{r} of {F.label}"))
        if r < count:
            powers = {cusp: power * F.expansions[cusp] for cusp, power in powers.items()}
    return sums


def trace_series(F: ModularFunction) -> LaurentSeries:
    return power_sums(F, 1)[0]


def norm_series(F: ModularFunction) -> LaurentSeries:
    """
    Product of F(g z) over all cosets as a series in q

    Per cusp, writing F = alpha q_w^v (1 + r), the orbit product is
    alpha^w (-1)^(v (w - 1)) q^v exp(w contract(log(1 + r))).
    """
    total_log = None
    scale = Fraction(1)
    shift = 0
    leading = 1
    for cusp, series in F.expansions.items():
        if series.is_zero():
            raise ExpansionUndefined(f"{F.label} vanishes to the working order at {cusp}", cusp)
        w = series.width
        v = series.valuation
        alpha = series.leading_coefficient
        unit = series.shift(-v) / alpha
        orbit_log = unit.log().contract(w) * w
        total_log = orbit_log if total_log is None else total_log + orbit_log
        leading = leading * alpha ** w
        if (v * (w - 1)) % 2:
            scale = -scale
        shift += v
    total_log = _rational(total_log, f"Log-norm of {F.label}")
    try:
        scale *= to_rational(leading)
    except ValueError as exc:
        raise GaloisResidue(f"Leading coefficient of the norm of {F.label}: {exc}") from exc
    return total_log.exp().shift(shift) * scale


@dataclass
class ModularPolynomial:
    """
    Coefficients A_i of prod_g (x - F(g z)) = sum A_i x^i

    Only the top `count` coefficients below the leading 1 are held when
    the polynomial is truncated.
    """

    function: ModularFunction
    index: int
    series: Dict[int, LaurentSeries] = field(default_factory=dict)
    recognized: Dict[int, JRational] = field(default_factory=dict)

    def coefficient(self, i: int) -> LaurentSeries:
        if i == self.index:
            return LaurentSeries.constant(Fraction(1), min(s.order for s in self.series.values()))
        return self.series[i]

    def recognize(self, i: int, degree_bound: Optional[int] = None) -> JRational:
        if i not in self.recognized:
            bound = degree_bound if degree_bound is not None else default_degree_bound(self.index)
            self.recognized[i] = j_recognize(self.series[i], bound)
        return self.recognized[i]

    def polynomial(self) -> sympy.Expr:
        """Phi_F(x) over Q(j), from the recognized coefficients"""
        missing = [i for i in self.series if i not in self.recognized]
        if missing:
            raise ValueError(f"Coefficients {missing} are not recognized yet")
        expr = PHI ** self.index
        for i, value in self.recognized.items():
            expr += value.expr * PHI ** i
        return expr

    def to_dict(self) -> dict:
        return {
            "label": self.function.label,
            "level": self.function.level,
            "index": self.index,
            "coefficients": {
                str(i): value.coefficient_lists() for i, value in sorted(self.recognized.items())
            },
        }


def modular_polynomial(F: ModularFunction, count: Optional[int] = None) -> ModularPolynomial:
    """
    Coefficients A_{m-1}, ..., A_{m-count} of the modular polynomial of F

    Elementary symmetric functions e_k come from the power sums by Newton's
    identities, k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i, and
    A_{m-k} = (-1)^k e_k.

    Raises:
        GaloisResidue: If a power sum has irrational coefficients
    """
    m = F.index
    count = m if count is None else min(count, m)
    sums = power_sums(F, count)
    order = min(p.order for p in sums)
    e: List[LaurentSeries] = [LaurentSeries.constant(Fraction(1), order)]
    result = ModularPolynomial(F, m)
    for k in range(1, count + 1):
        acc = LaurentSeries.zero(order)
        for i in range(1, k + 1):
            term = e[k - i] * sums[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(acc / k)
        result.series[m - k] = e[k] if k % 2 == 0 else -e[k]
    logger.info(f"Modular polynomial of {F.label}: {count} of {m} coefficients, order {order}")
    return result


@dataclass
class Place:
    """A point of X_0(N) in a divisor: a j-value orbit or a cusp"""

    multiplicity: int
    minpoly: Optional[sympy.Expr] = None
    cusp: Optional[Cusp] = None
    representatives: List[QuadraticSurd] = field(default_factory=list)

    @property
    def degree(self) -> int:
        if self.cusp is not None:
            return 1
        return sympy.degree(self.minpoly, J)

    def to_dict(self) -> dict:
        if self.cusp is not None:
            return {"cusp": str(self.cusp), "mult": self.multiplicity}
        coeffs = sympy.Poly(self.minpoly, J).all_coeffs()
        entry = {"minpoly": [str(c) for c in reversed(coeffs)], "mult": self.multiplicity}
        if self.representatives:
            entry["z0"] = [str(z) for z in self.representatives]
        return entry


@dataclass
class Divisor:
    """Zeros (positive) and poles (negative) of a function on X_0(N)"""

    label: str
    places: List[Place]
    norm: JRational

    @property
    def degree(self) -> int:
        return sum(p.multiplicity * p.degree for p in self.places)

    def zeros(self) -> List[Place]:
        return [p for p in self.places if p.multiplicity > 0]

    def poles(self) -> List[Place]:
        return [p for p in self.places if p.multiplicity < 0]

    def pole_polynomial(self) -> sympy.Expr:
        """Product of the minimal polynomials of the interior poles, with multiplicity"""
        expr = sympy.Integer(1)
        for place in self.poles():
            if place.minpoly is not None:
                expr *= place.minpoly ** (-place.multiplicity)
        return expr

    def to_dict(self) -> dict:
        return {"label": self.label, "places": [p.to_dict() for p in self.places]}


def _cm_value(minpoly: sympy.Expr) -> Optional[Fraction]:
    poly = sympy.Poly(minpoly, J)
    if poly.degree() != 1:
        return None
    root = -poly.all_coeffs()[1] / poly.all_coeffs()[0]
    value = Fraction(int(root.p), int(root.q))
    return value if value in CLASS_NUMBER_ONE.values() else None


def _resolve_representatives(
    F: ModularFunction, j_value: Fraction, pole: bool
) -> List[QuadraticSurd]:
    """Coset translates of the CM point where F has its zero or pole"""
    tau = class_number_one_point(j_value)
    found = []
    with mpmath.workprec(F.parametrization.bits):
        z = tau.value()
        for g in coset_reps(F.level):
            try:
                value = F.evaluate(g, z)
            except ZeroDivisionError:
                if pole:
                    found.append(tau.act(g))
                continue
            if pole:
                small = 1 / value if value else mpmath.inf
            else:
                small = value
            if abs(small) < mpmath.mpf(2) ** (-F.parametrization.bits // 4):
                found.append(tau.act(g))
    return found


def divisor_of(
    F: ModularFunction, degree_bound: Optional[int] = None, resolve: bool = False
) -> Divisor:
    """
    Divisor of F on X_0(N)

    Interior places come from the norm of F, recognized as P(j) / Q(j):
    zeros of P are zeros of F and zeros of Q are poles. Cusps contribute
    the valuations of the per-cusp expansions.

    Args:
        F: The function
        degree_bound: Largest denominator degree for recognition
        resolve: Find quadratic surd representatives of CM places

    Raises:
        NoMatch: If the norm is not recognized within the bound
        InsufficientPrecision: If the expansions are too short
    """
    bound = degree_bound if degree_bound is not None else default_degree_bound(F.index)
    norm = j_recognize(norm_series(F), bound)
    places: List[Place] = []
    for poly, sign in ((norm.numerator, 1), (norm.denominator, -1)):
        if poly.degree() <= 0:
            continue
        _, factors = sympy.factor_list(poly.as_expr(), J)
        for factor, mult in factors:
            place = Place(sign * mult, minpoly=sympy.Poly(factor, J).monic().as_expr())
            j_value = _cm_value(place.minpoly)
            if resolve and j_value is not None and F.expr is not None:
                place.representatives = _resolve_representatives(F, j_value, sign < 0)
            places.append(place)
    for cusp, v in F.valuations().items():
        if v:
            places.append(Place(v, cusp=cusp))
    divisor = Divisor(F.label, places, norm)
    if divisor.degree != 0:
        logger.warning(f"Divisor of {F.label} has degree {divisor.degree}")
    logger.info(f"Divisor of {F.label}: {len(places)} places, norm {norm}")
    return divisor


def modular_degree(
    parametrization: ModularParametrization,
    override: Optional[int] = None,
) -> int:
    """
    Degree of X_0(N) -> E

    epsilon pulls the flat area form of C / Lambda back to 4 pi^2 |m f|^2 dx dy,
    so lambda^2 4 pi^2 ||m f||^2 = degree * area(Lambda). X has a double pole
    above O, so the poles of X at the cusps account for part of the fibre
    over O; whatever is left lies in the upper half plane.

    An override from the curve record is returned as is.

    Raises:
        ModularPolynomialError: If the area ratio is not an integer, or the
            cusps carry more poles than the degree allows
    """
    if override is not None:
        return override
    norm = parametrization.petersson_norm()
    with mpmath.workprec(DEGREE_BITS):
        area = parametrization.lattice.area
        ratio = parametrization.lam ** 2 * 4 * mpmath.pi ** 2 * mpmath.mpf(norm) / area
        degree = int(mpmath.nint(ratio))
        if degree < 1 or abs(ratio - degree) > DEGREE_TOLERANCE:
            raise ModularPolynomialError(
                f"Area ratio {mpmath.nstr(ratio, 15)} is not a positive integer"
            )
    at_cusps = sum(-e.x.valuation for e in parametrization.expansions() if e.x.valuation < 0)
    if at_cusps > 2 * degree:
        raise ModularPolynomialError(
            f"Cusps carry {at_cusps} poles of X, more than twice the degree {degree}"
        )
    name = parametrization.curve.label or parametrization.curve
    logger.info(
        f"Modular degree of {name}: {degree}, "
        f"{degree - at_cusps // 2} points above O off the cusps"
    )
    return degree


@dataclass
class Preimage:
    """A point z0 of the upper half plane mapping to a target point"""

    z0: QuadraticSurd
    coset: Matrix

    def to_dict(self) -> dict:
        A, B, C = self.z0.form
        return {
            "z0": str(self.z0),
            "minpoly": [A, B, C],
            "discriminant": self.z0.discriminant,
            "coset": list(self.coset),
        }


def _close(value, target: Fraction, tolerance) -> bool:
    target = mpmath.mpf(target.numerator) / target.denominator
    return abs(value - target) <= tolerance * max(1, abs(target))


def preimage_search(
    source: Union[ModularFunction, ModularParametrization],
    point: AffinePoint,
    target_j,
    bits: int = SEARCH_BITS,
    verify_bits: int = VERIFY_BITS,
) -> List[Preimage]:
    """
    CM points z0 with (X, Y)(z0) equal to the target point

    Every coset translate g tau of the reduced CM point tau with j(tau) =
    target_j is tested at `bits` and each match is confirmed at
    `verify_bits` before it is reported.

    Raises:
        KeyError: If target_j is not a class-number-one j-invariant
        NoPreimageFound: If no translate matches
    """
    parametrization = source.parametrization if isinstance(source, ModularFunction) else source
    tau = class_number_one_point(target_j)
    level = parametrization.level
    matches = []
    for g in coset_reps(level):
        with mpmath.workprec(bits):
            x, y = parametrization.evaluate_coset(g, tau.value(), bits)
            tol = mpmath.mpf(2) ** (-bits // 4)
            if not (_close(x, point.x, tol) and _close(y, point.y, tol)):
                continue
        with mpmath.workprec(verify_bits):
            x, y = parametrization.evaluate_coset(g, tau.value(), verify_bits)
            tol = mpmath.mpf(2) ** (-verify_bits // 4)
            if not (_close(x, point.x, tol) and _close(y, point.y, tol)):
                logger.warning(f"Coset {g} matched at {bits} bits but not at {verify_bits}")
                continue
        matches.append(Preimage(tau.act(g), g))
        logger.info(f"Preimage of {point} at {tau.act(g)} via coset {g}")
    if not matches:
        raise NoPreimageFound(f"No translate of {tau} maps to {point} at {bits} bits")
    return matches


def _cusp_of_width(level: int, width: int) -> Cusp:
    for cusp in cusps(level):
        if cusp.width == width:
            return cusp
    raise ValueError(f"No cusp of width {width} at level {level}")


def atkin_lehner_apply(F: ModularFunction, m: int) -> ModularFunction:
    """
    F composed with W_m on a squarefree level

    The cusp of width m' is W_m'(oo) and W_m W_m' agrees with W_{m*m'}
    up to Gamma_0(N) and scalars, where m*m' = m m' / gcd(m, m')^2. So the
    new expansion at width m' carries the old coefficients at width m*m'.
    """
    level = F.level
    if level % m or gcd(m, level // m) != 1:
        raise ValueError(f"{m} is not an exact divisor of {level}")
    if not F.parametrization.is_squarefree:
        raise ValueError(f"Atkin-Lehner relabelling needs a squarefree level, got {level}")
    expansions = {}
    for cusp in cusps(level):
        partner = _cusp_of_width(level, m * cusp.width // gcd(m, cusp.width) ** 2)
        old = F.expansions[partner]
        expansions[cusp] = LaurentSeries(old.coeffs, old.valuation, old.order, cusp.width)
    label = F.label[: -len(f"|W_{m}")] if F.label.endswith(f"|W_{m}") else f"{F.label}|W_{m}"
    return ModularFunction(label, F.parametrization, expansions)


def fixed_by_atkin_lehner(z: QuadraticSurd, m: int, level: int) -> bool:
    """W_m z is Gamma_0(N)-equivalent to z"""
    return gamma0_equivalence(z.act(atkin_lehner_matrix(level, m)), z, level) is not None


@dataclass
class CMVerdict:
    """Outcome of the CM test for a point fixed (or not) by W_m"""

    m: int
    fixed: bool
    discriminant: Optional[int] = None
    witness: Optional[int] = None

    @property
    def conclusion(self) -> str:
        if self.fixed:
            return f"CM by discriminant {self.discriminant}"
        return (
            f"the curve admits an {self.m}-isogeny over the field of definition, "
            f"or the point is not W_{self.m}-fixed"
        )

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "fixed": self.fixed,
            "discriminant": self.discriminant,
            "witness": self.witness,
            "conclusion": self.conclusion,
        }


def cm_criterion(
    z: QuadraticSurd, m: int, fixed: Optional[bool] = None, level: Optional[int] = None
) -> CMVerdict:
    """
    CM test for a preimage z of a rational point under W_m

    A fixed point must have discriminant -4m <= D < 0 with D a square mod
    4m. When fixedness is not given it is decided from the level.

    Raises:
        CriterionViolated: If a fixed point fails the bound or the square test
    """
    if fixed is None:
        if level is None:
            raise ValueError("Either fixed or level is required")
        fixed = fixed_by_atkin_lehner(z, m, level)
    if not fixed:
        return CMVerdict(m, False)
    D = z.discriminant
    if not (-4 * m <= D < 0):
        raise CriterionViolated(f"Discriminant {D} of {z} is outside [-{4 * m}, 0)")
    witness = is_square_mod(D, 4 * m)
    if witness is None:
        raise CriterionViolated(f"Discriminant {D} of {z} is not a square mod {4 * m}")
    logger.info(f"{z} is W_{m}-fixed with D = {D} = {witness}^2 mod {4 * m}")
    return CMVerdict(m, True, D, witness)
