"""Exact q-expansions of the modular parametrization at every cusp of Gamma_0(N)"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple
import logging

import mpmath
import sympy

from modparam.arith.reconstruct import (
    NoRationalInBall,
    nearest_integer,
    rational_reconstruct,
    reconstruct_cyclotomic,
)
from modparam.arith.scalars import format_scalar, is_zero, to_complex
from modparam.arith.series import LaurentSeries
from modparam.curve import (
    DEFAULT_COUNTING_BUDGET,
    AffinePoint,
    EllipticCurve,
    NewformCoefficients,
    newform_coefficients,
)
from modparam.gamma0 import (
    Cusp,
    Matrix,
    act,
    atkin_lehner_matrix,
    cusps,
    decompose,
    is_squarefree,
    mat_mul,
    reduce_to_upper,
)
from modparam.periods import (
    DEFAULT_BITS,
    PeriodLattice,
    curve_point,
    period_lattice,
    eichler_integral,
    strip_integral,
    strip_terms,
    terms_needed,
    wp_laurent,
)


logger = logging.getLogger(__name__)

SEED_TERMS = 3
CONSTANT_DENOM_BOUND = 10 ** 6
MAX_EICHLER_TERMS = 20000
EIGENVALUE_BITS = 64
SLASH_EXTRA = 4
# numeric slash samples lie on Im z = w / SAMPLE_LINE
SAMPLE_LINE = 4
# extra working bits per unit of field degree for the cyclotomic reconstruction
FIELD_BITS = 12
STRIP_TAIL_WARNING = 10 ** -12


class ParametrizationError(Exception):
    """Base exception for cusp expansion errors"""

    pass


class RecursionSingular(ParametrizationError):
    """Raised when a recursion step has a vanishing determinant"""

    pass


class ReconstructionFailed(ParametrizationError):
    """Raised when a numeric value cannot be snapped to an exact one"""

    pass


class RecursionCase:
    """Labels of the three ways the cusp recursion is solved"""

    POLE = "pole"
    GENERIC = "no-pole"
    TWO_TORSION = "two-torsion"


@dataclass
class CuspData:
    """Slash expansion h = (m f)|gamma_rho = sum c_n q_w^n at one cusp"""

    cusp: Cusp
    matrix: Matrix
    slash: LaurentSeries
    route: str
    eigenvalue: Optional[int] = None

    @property
    def width(self) -> int:
        return self.slash.width

    def c(self, n: int):
        return self.slash[n] if n < self.slash.order else None


@dataclass
class CuspExpansion:
    """X and Y of the parametrization expanded in q_w at one cusp"""

    data: CuspData
    x: LaurentSeries
    y: LaurentSeries
    curve: EllipticCurve
    lam: int = 1
    case: str = RecursionCase.POLE
    constant_point: Optional[AffinePoint] = None
    kappa_coordinates: Optional[Tuple[Fraction, Fraction]] = None
    steps: Dict[int, str] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.data.width

    @property
    def cusp(self) -> Cusp:
        return self.data.cusp

    def weierstrass_residual(self) -> LaurentSeries:
        return self.curve.residual(self.x, self.y)

    def differential_residual(self) -> LaurentSeries:
        """q_w dX/dq_w - w (2Y + a1 X + a3) lambda h"""
        e = self.curve
        h = self.data.slash * self.lam
        return self.x.q_derivative() - (2 * self.y + e.a1 * self.x + e.a3) * h * self.width

    def negated(self) -> "CuspExpansion":
        """Expansion for lambda -> -lambda: X unchanged, Y -> -Y - a1 X - a3"""
        e = self.curve
        return CuspExpansion(
            self.data,
            self.x,
            -self.y - e.a1 * self.x - e.a3,
            self.curve,
            -self.lam,
            self.case,
            e.negate(self.constant_point) if self.constant_point else None,
            self.kappa_coordinates,
            dict(self.steps),
        )

    def evaluate(self, z) -> Tuple[mpmath.mpc, mpmath.mpc]:
        """Numeric (X(gamma_rho z), Y(gamma_rho z)) by summing the series"""
        q = mpmath.expjpi(2 * z / self.width)
        return self.x.evaluate(q), self.y.evaluate(q)

    def to_dict(self) -> dict:
        return {
            "label": self.curve.label,
            "cusp": str(self.cusp),
            "width": self.width,
            "lambda": self.lam,
            "case": self.case,
            "X": [[n, format_scalar(c)] for n, c in self.x.items()],
            "Y": [[n, format_scalar(c)] for n, c in self.y.items()],
        }


def atkin_lehner_eigenvalue(
    f: NewformCoefficients, m: int, bits: int = EIGENVALUE_BITS
) -> int:
    """
    Eigenvalue of W_m on the newform

    When every prime of m divides the level exactly this is the product
    of -a_p. Where p^2 divides the level a_p vanishes and the sign is read
    off from epsilon(W_m z) - lambda_m epsilon(z), which is the constant
    period of W_m.

    Raises:
        ReconstructionFailed: If the numeric ratio is not +-1 or the
            newform is too short
    """
    primes = sympy.primefactors(m)
    if all((f.level // p) % p for p in primes):
        sign = 1
        for p in primes:
            sign *= -f[p]
        return sign
    return _numeric_eigenvalue(f, m, bits)


def _eigenvalue_points(level: int, m: int) -> Tuple[Matrix, List]:
    """W_m and two points z_k = (-m t + i k sqrt(m)) / N with Im W_m z_k = sqrt(m) / (k N)"""
    w_m = atkin_lehner_matrix(level, m)
    _, _, _, mt = w_m
    root = mpmath.sqrt(m)
    return w_m, [mpmath.mpc(-mt, k * root) / level for k in (1, 2)]


def eigenvalue_terms(level: int, m: int, bits: int = EIGENVALUE_BITS) -> int:
    """Newform coefficients read by the numeric W_m eigenvalue"""
    with mpmath.workprec(bits + 32):
        return terms_needed(mpmath.sqrt(m) / (2 * level), bits)


def _numeric_eigenvalue(f: NewformCoefficients, m: int, bits: int) -> int:
    needed = eigenvalue_terms(f.level, m, bits)
    if needed > f.n_max:
        raise ReconstructionFailed(
            f"Sign of W_{m} needs {needed} newform coefficients, have {f.n_max}"
        )
    with mpmath.workprec(bits + 32):
        w_m, points = _eigenvalue_points(f.level, m)
        eps = [_partial_eichler(f, mpmath.expjpi(2 * z), needed) for z in points]
        moved = [_partial_eichler(f, mpmath.expjpi(2 * act(w_m, z)), needed) for z in points]
        ratio = (moved[0] - moved[1]) / (eps[0] - eps[1])
        try:
            sign = nearest_integer(ratio, mpmath.mpf(2) ** (-(bits // 2)))
        except NoRationalInBall as exc:
            raise ReconstructionFailed(f"W_{m} ratio {mpmath.nstr(ratio, 15)}: {exc}") from exc
    if sign not in (1, -1):
        raise ReconstructionFailed(f"W_{m} ratio rounds to {sign}, not a sign")
    logger.debug(f"Sign of W_{m} at level {f.level} read off numerically: {sign}")
    return sign


def _eichler_series(data: CuspData, order: int) -> LaurentSeries:
    """w sum (c_n / n) q_w^n, the non-constant part of epsilon(gamma_rho z)"""
    terms = {n: c * data.width / n for n, c in data.slash.items() if n < order}
    return LaurentSeries.from_dict(terms, min(order, data.slash.order), data.width)


def slash_route(cusp: Cusp) -> str:
    """How the slash expansion at a cusp is obtained"""
    if cusp.is_infinity:
        return "infinity"
    m = cusp.atkin_lehner_index
    if m is not None and m == cusp.width:
        return "atkin-lehner"
    return "numeric"


def slash_f_at_cusp(
    curve: EllipticCurve,
    f: NewformCoefficients,
    cusp: Cusp,
    n_max: int,
    bits: int = DEFAULT_BITS,
) -> CuspData:
    """
    Coefficients c_n of (m f)|[gamma_rho]_2 in q_w

    At infinity these are m a_n. When gcd(c, N/c) = 1 the cusp is W_m(oo)
    and the slash expansion is (m lambda_m / w) sum a_n q_w^n. Otherwise the
    coefficients are computed numerically and reconstructed in Q(zeta_L),
    L = slash_field(cusp).

    Raises:
        ReconstructionFailed: If a numeric coefficient does not snap
    """
    if f.n_max < n_max:
        raise ValueError(f"Need {n_max} newform coefficients, have {f.n_max}")
    route = slash_route(cusp)
    if route == "infinity":
        slash = LaurentSeries([0] + [f.scaled(n) for n in range(1, n_max)], 0, n_max, 1)
        return CuspData(cusp, cusp.scaling_matrix, slash, route, 1)
    if route == "atkin-lehner":
        m = w = cusp.width
        sign = atkin_lehner_eigenvalue(f, m)
        coeffs = [Fraction(0)] + [Fraction(sign * f.scaled(n), w) for n in range(1, n_max)]
        slash = LaurentSeries(coeffs, 0, n_max, w)
        logger.debug(f"Cusp {cusp}: Atkin-Lehner sign {sign} for W_{m}")
        return CuspData(cusp, cusp.scaling_matrix, slash, route, sign)
    return _numeric_slash(f, cusp, n_max, bits)


def slash_field(cusp: Cusp) -> int:
    """
    Order L of the cyclotomic field Q(zeta_L) holding the slash coefficients

    For gamma_rho with lower row (c, d), the Galois automorphism zeta -> zeta^k
    sends (m f)|gamma_rho to (m f)|gamma' with gamma' = (a, b/k; c k, d) mod N,
    which is gamma_rho again up to Gamma_0(N) when k = 1 mod N / gcd(c, N).
    """
    if cusp.is_infinity:
        return 1
    c = cusp.scaling_matrix[2]
    return cusp.level // gcd(c, cusp.level)


def _slash_precision(cusp: Cusp, n_max: int, bits: int) -> Tuple[int, int]:
    """Working precision of the numeric slash, and the bits lost dividing by |q_w|^n"""
    lost = int(mpmath.ceil(2 * mpmath.pi * n_max / (SAMPLE_LINE * mpmath.log(2))))
    degree = int(sympy.totient(slash_field(cusp)))
    return bits + 64 + lost + FIELD_BITS * degree, lost


@lru_cache(maxsize=64)
def _slash_samples(
    cusp: Cusp, n_max: int, bits: int
) -> List[Tuple[mpmath.mpc, Matrix, mpmath.mpc]]:
    """
    Sample points z of one period of the line Im z = w / SAMPLE_LINE

    Each z comes with g in Gamma_0(N) gamma_rho moving it as high as
    Gamma_0(N) allows, so that ((m f)|gamma_rho)(z) = (m f)(g z) / (c_g z + d_g)^2.
    """
    gamma = cusp.scaling_matrix
    _, _, c, d = gamma
    w = cusp.width
    prec, _ = _slash_precision(cusp, n_max, bits)
    with mpmath.workprec(prec):
        height = mpmath.mpf(w) / SAMPLE_LINE
        count = n_max + terms_needed(height / w, prec) + 1
        start = mpmath.mpf(-d) / c
        samples = []
        for k in range(count):
            z = mpmath.mpc(start + mpmath.mpf(w * k) / count, height)
            delta, moved = reduce_to_upper(act(gamma, z), cusp.level)
            samples.append((z, mat_mul(delta, gamma), moved))
    return samples


def numeric_slash_terms(cusp: Cusp, n_max: int, bits: int = DEFAULT_BITS) -> int:
    """Newform coefficients read by the numeric slash expansion, from its lowest sample"""
    prec, _ = _slash_precision(cusp, n_max, bits)
    with mpmath.workprec(prec):
        lowest = min(mpmath.im(moved) for _, _, moved in _slash_samples(cusp, n_max, bits))
        return terms_needed(lowest, prec)


def _numeric_slash(f: NewformCoefficients, cusp: Cusp, n_max: int, bits: int) -> CuspData:
    """Discrete Fourier inversion of (m f)|gamma along a horizontal line"""
    gamma = cusp.scaling_matrix
    _, _, c, d = gamma
    w = cusp.width
    needed = numeric_slash_terms(cusp, n_max, bits)
    if needed > f.n_max:
        raise ReconstructionFailed(
            f"Cusp {cusp} needs {needed} newform coefficients, have {f.n_max}"
        )
    samples = _slash_samples(cusp, n_max, bits)
    count = len(samples)
    prec, lost = _slash_precision(cusp, n_max, bits)
    field_order = slash_field(cusp)
    with mpmath.workprec(prec):
        values = []
        for z, g, moved in samples:
            terms = terms_needed(mpmath.im(moved), prec)
            q = mpmath.expjpi(2 * moved)
            total = mpmath.mpc(0)
            qn = mpmath.mpc(1)
            for n in range(1, terms + 1):
                qn *= q
                total += f.scaled(n) * qn
            values.append(total / (g[2] * z + g[3]) ** 2)
        radius = mpmath.exp(-2 * mpmath.pi / SAMPLE_LINE)
        start = mpmath.mpf(-d) / c
        tolerance = mpmath.mpf(2) ** (lost - prec + 48)
        coeffs: List = [Fraction(0)]
        for n in range(1, n_max):
            acc = mpmath.fsum(
                values[k] * mpmath.expjpi(mpmath.mpf(-2 * n * k) / count)
                for k in range(count)
            )
            # account for the shift by -d/c in the sample abscissae
            phase = mpmath.expjpi(-2 * n * start / w)
            value = acc / count / radius ** n * phase
            try:
                coeffs.append(
                    reconstruct_cyclotomic(value, field_order, CONSTANT_DENOM_BOUND, tolerance)
                )
            except NoRationalInBall as exc:
                logger.error(f"Coefficient c_{n} at cusp {cusp} did not reconstruct")
                raise ReconstructionFailed(f"c_{n} at cusp {cusp}: {exc}") from exc
    slash = LaurentSeries(coeffs, 0, n_max, w)
    logger.debug(f"Cusp {cusp}: {n_max} slash coefficients from {count} samples")
    return CuspData(cusp, gamma, slash, "numeric")


def _partial_eichler(f: NewformCoefficients, q, terms: int, scale=1) -> mpmath.mpc:
    total = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for n in range(1, terms + 1):
        qn *= q
        a = f.scaled(n)
        if a:
            total += mpmath.mpf(scale * a) / n * qn
    return total


def _constant_point(cusp: Cusp, route: str, order: int, bits: int) -> mpmath.mpc:
    """
    Point z0 at which epsilon(gamma_rho z0) is compared with its q_w-series

    By default z0 = (-d + i sqrt(w)) / c, so that z0 / w and gamma_rho z0
    have the same imaginary part. A numeric slash expansion is known only
    below its order, so there z0 is raised until the series converges
    within it.
    """
    _, _, c, d = cusp.scaling_matrix
    w = cusp.width
    height = mpmath.sqrt(w) / c
    if route == "numeric":
        converged = w * (bits + 8) * mpmath.log(2) / (2 * mpmath.pi * (order - 1))
        height = max(height, converged)
    return mpmath.mpc(mpmath.mpf(-d) / c, height)


def constant_terms(cusp: Cusp, route: str, order: int, bits: int = DEFAULT_BITS) -> int:
    """Newform coefficients read by the integration constant at a cusp"""
    with mpmath.workprec(bits + 32):
        z0 = _constant_point(cusp, route, order, bits)
        return terms_needed(mpmath.im(act(cusp.scaling_matrix, z0)), bits)


def cusp_constant(
    f: NewformCoefficients, data: CuspData, bits: int = DEFAULT_BITS
) -> mpmath.mpc:
    """
    Integration constant kappa with epsilon(gamma_rho z) = kappa + w sum (c_n/n) q_w^n

    On the Atkin-Lehner route the q_w-series is lambda_m epsilon(z / w) and
    is summed from the newform directly; a numeric slash expansion is
    summed as far as it is known.
    """
    if data.cusp.is_infinity:
        return mpmath.mpc(0)
    w = data.width
    with mpmath.workprec(bits + 32):
        z0 = _constant_point(data.cusp, data.route, data.slash.order, bits)
        image = act(data.matrix, z0)
        needed = terms_needed(mpmath.im(image), bits)
        if needed > f.n_max:
            raise ReconstructionFailed(
                f"Cusp constant at {data.cusp} needs {needed} coefficients, have {f.n_max}"
            )
        eps = _partial_eichler(f, mpmath.expjpi(2 * image), needed)
        q_w = mpmath.expjpi(2 * z0 / w)
        if data.route == "atkin-lehner":
            tail_terms = terms_needed(mpmath.im(z0) / w, bits)
            if tail_terms > f.n_max:
                raise ReconstructionFailed(
                    f"Cusp constant at {data.cusp} needs {tail_terms} coefficients, "
                    f"have {f.n_max}"
                )
            tail = _partial_eichler(f, q_w, tail_terms, data.eigenvalue)
        else:
            tail = _eichler_series(data, data.slash.order).evaluate(q_w)
        return eps - tail


def _snap_constant(value, width: int, what: str):
    try:
        return rational_reconstruct(value, CONSTANT_DENOM_BOUND)
    except NoRationalInBall:
        if width == 1:
            raise ReconstructionFailed(f"{what} = {mpmath.nstr(value, 20)} is not rational")
    try:
        return reconstruct_cyclotomic(value, width, CONSTANT_DENOM_BOUND)
    except NoRationalInBall as exc:
        raise ReconstructionFailed(f"{what} = {mpmath.nstr(value, 20)} did not snap") from exc


class _Recursion:
    """
    Coefficient bookkeeping for the two relations

        q X' = w (2Y + a1 X + a3) h
        Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6

    b and d hold the coefficients of X and Y; missing entries count as 0.
    """

    def __init__(self, curve: EllipticCurve, h: List, width: int, vb: int, vd: int):
        self.curve = curve
        self.h = h
        self.w = width
        self.vb = vb
        self.vd = vd
        self.b: Dict[int, object] = {}
        self.d: Dict[int, object] = {}
        self.b_final = vb - 1
        self._x2: Dict[int, object] = {}

    def hc(self, n: int):
        return self.h[n] if 0 <= n < len(self.h) else 0

    def _conv(self, left: Dict, right: Dict, e: int):
        total = 0
        for i, value in left.items():
            other = right.get(e - i)
            if other is not None and not is_zero(value) and not is_zero(other):
                total = total + value * other
        return total

    def x2(self, j: int):
        """Coefficient of X^2 at q^j, cached once every contributing b is final"""
        if j in self._x2:
            return self._x2[j]
        value = self._conv(self.b, self.b, j)
        if j - self.vb <= self.b_final:
            self._x2[j] = value
        return value

    def r1(self, e: int):
        """Coefficient of q^e in q X' - w (2Y + a1 X + a3) h"""
        a1, a3 = self.curve.a1, self.curve.a3
        total = e * self.b.get(e, 0)
        acc = 0
        for k in range(min(self.vb, self.vd), e):
            ck = self.hc(e - k)
            if is_zero(ck):
                continue
            term = 2 * self.d.get(k, 0) + a1 * self.b.get(k, 0)
            if k == 0:
                term = term + a3
            if not is_zero(term):
                acc = acc + term * ck
        return total - self.w * acc

    def r2(self, e: int):
        """Coefficient of q^e in Y^2 + a1 XY + a3 Y - X^3 - a2 X^2 - a4 X - a6"""
        a1, a2, a3, a4, a6 = self.curve.ainvs
        y2 = self._conv(self.d, self.d, e)
        xy = self._conv(self.b, self.d, e)
        x3 = 0
        for i, value in self.b.items():
            if not is_zero(value):
                x3 = x3 + value * self.x2(e - i)
        total = y2 + a1 * xy + a3 * self.d.get(e, 0) - x3 - a2 * self.x2(e) - a4 * self.b.get(e, 0)
        if e == 0:
            total = total - a6
        return total

    def set_b(self, n: int, value):
        self.b[n] = value
        self.b_final = max(self.b_final, n)


def _solve2(m11, m12, m21, m22, r1, r2, index: int):
    det = m11 * m22 - m12 * m21
    if is_zero(det):
        raise RecursionSingular(f"Vanishing determinant at index {index}")
    return (r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det


def _expand_pole(curve: EllipticCurve, data: CuspData, lam: int, n_max: int):
    w = data.width
    h = [lam * c for c in data.slash.coefficient_list(0)]
    c1 = h[1] if len(h) > 1 else 0
    if is_zero(c1):
        raise RecursionSingular(f"Slash expansion at {data.cusp} starts beyond q_w")
    rec = _Recursion(curve, h, w, -2, -3)
    steps: Dict[int, str] = {}

    # seeds from wp composed with the non-constant part of epsilon
    series = _eichler_series(data, SEED_TERMS + 1) * lam
    wp, wp_prime = wp_laurent(curve.g2, curve.g3, SEED_TERMS).compose(series)
    x_seed = wp - curve.b2 / 12
    y_seed = (wp_prime - curve.a1 * x_seed - curve.a3) / 2
    for k in range(SEED_TERMS):
        rec.set_b(k - 2, x_seed[k - 2])
        rec.d[k - 3] = y_seed[k - 3]
        steps[k - 2] = "seed"
    b_lead, d_lead = rec.b[-2], rec.d[-3]
    if d_lead * d_lead != b_lead ** 3:
        raise RecursionSingular(f"Inconsistent leading terms at {data.cusp}")

    for n in range(SEED_TERMS - 2, n_max):
        if n + 3 >= len(h):
            raise ValueError(f"Slash expansion too short for index {n}")
        # unknowns (b_n, d_{n-1}); residuals computed with both set to 0
        rec.b.pop(n, None)
        rec.d.pop(n - 1, None)
        r1 = -rec.r1(n)
        r2 = -rec.r2(n - 4)
        bn, dn = _solve2(n, -2 * w * c1, -3 * b_lead * b_lead, 2 * d_lead, r1, r2, n)
        rec.set_b(n, bn)
        rec.d[n - 1] = dn
        steps[n] = RecursionCase.POLE
    x = LaurentSeries([rec.b.get(k, 0) for k in range(-2, n_max)], -2, n_max, w)
    y = LaurentSeries([rec.d.get(k, 0) for k in range(-3, n_max - 1)], -3, n_max - 1, w)
    return x, y, steps


def _expand_regular(curve: EllipticCurve, data: CuspData, lam: int, n_max: int, b0, d0):
    w = data.width
    h = [lam * c for c in data.slash.coefficient_list(0)]
    a1, a2, a3, a4, a6 = curve.ainvs
    rec = _Recursion(curve, h, w, 0, 0)
    rec.set_b(0, b0)
    rec.d[0] = d0
    tangent = 2 * d0 + a1 * b0 + a3
    slope = 3 * b0 * b0 + 2 * a2 * b0 + a4 - a1 * d0
    steps: Dict[int, str] = {0: "seed"}
    if not is_zero(tangent):
        for n in range(1, n_max):
            # b_n follows from the differential relation alone
            bn = -rec.r1(n) / n
            rec.set_b(n, bn)
            rn = rec.r2(n)
            rec.d[n] = -rn / tangent
            steps[n] = RecursionCase.GENERIC
        x = LaurentSeries([rec.b[k] for k in range(n_max)], 0, n_max, w)
        y = LaurentSeries([rec.d[k] for k in range(n_max)], 0, n_max, w)
        return x, y, steps, RecursionCase.GENERIC

    c1 = h[1] if len(h) > 1 else 0
    if is_zero(c1):
        raise RecursionSingular(f"Slash expansion at {data.cusp} starts beyond q_w")
    rec.set_b(1, 0 * c1)
    d1 = slope * w * c1
    if is_zero(d1):
        raise RecursionSingular(f"Constant point at {data.cusp} is singular")
    rec.d[1] = d1
    rec.set_b(2, w * c1 * d1)
    steps[1] = steps[2] = RecursionCase.TWO_TORSION
    for n in range(3, n_max):
        # unknowns (b_n, d_{n-1})
        rec.b.pop(n, None)
        rec.d.pop(n - 1, None)
        r1 = -rec.r1(n)
        r2 = -rec.r2(n)
        bn, dn = _solve2(n, -2 * w * c1, -slope, 2 * d1, r1, r2, n)
        rec.set_b(n, bn)
        rec.d[n - 1] = dn
        steps[n] = RecursionCase.TWO_TORSION
    x = LaurentSeries([rec.b.get(k, 0) for k in range(n_max)], 0, n_max, w)
    y = LaurentSeries([rec.d.get(k, 0) for k in range(n_max - 1)], 0, n_max - 1, w)
    return x, y, steps, RecursionCase.TWO_TORSION


def expand_with_constant(
    curve: EllipticCurve,
    data: CuspData,
    n_max: int,
    lam: int = 1,
    constant: Optional[AffinePoint] = None,
) -> CuspExpansion:
    """
    Run the recursion at a cusp whose constant point is already known

    A None or infinite constant selects the pole case. Otherwise the
    tangent value 2 d0 + a1 b0 + a3 picks the generic or 2-torsion case.
    """
    if constant is None or constant.is_infinity:
        x, y, steps = _expand_pole(curve, data, lam, n_max)
        case = RecursionCase.POLE
        point = AffinePoint.infinity()
    else:
        x, y, steps, case = _expand_regular(curve, data, lam, n_max, constant.x, constant.y)
        point = constant
    logger.debug(f"Expanded {curve.label or curve} at cusp {data.cusp} ({case}) to order {n_max}")
    return CuspExpansion(data, x, y, curve, lam, case, point, steps=steps)


def expand_infinity(curve: EllipticCurve, f: NewformCoefficients, n_max: int) -> CuspExpansion:
    """
    X = q^-2 + ..., Y = -q^-3 + ... at infinity

    Raises:
        RecursionSingular: Never for a genuine newform; kept as a check
    """
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    cusp = cusps(f.level)[0]
    data = slash_f_at_cusp(curve, f, cusp, n_max + SLASH_EXTRA)
    return expand_with_constant(curve, data, n_max)


def classify_constant(
    curve: EllipticCurve, lattice: PeriodLattice, kappa, width: int
) -> Tuple[Optional[AffinePoint], Tuple[Fraction, Fraction]]:
    """
    Locate kappa in C / lattice

    Returns:
        (constant point, lattice coordinates of kappa); the point is None
        when kappa is a lattice point
    """
    try:
        coords = lattice.rational_coordinates(kappa, 64)
    except NoRationalInBall as exc:
        raise ReconstructionFailed(
            f"Cusp constant {mpmath.nstr(kappa, 15)} is not a torsion value"
        ) from exc
    if all(c.denominator == 1 for c in coords):
        return None, coords
    s, t = coords
    exact = lattice.point(s, t)
    x_val, y_val = curve_point(curve, lattice, exact)
    x = _snap_constant(x_val, width, "constant term of X")
    y = _snap_constant(y_val, width, "constant term of Y")
    point = AffinePoint(x, y)
    if curve.residual(x, y) != 0:
        raise ReconstructionFailed(f"Constant point ({x}, {y}) is not on {curve}")
    return point, coords


def expand_cusp(
    curve: EllipticCurve,
    f: NewformCoefficients,
    cusp: Cusp,
    n_max: int,
    lam: int = 1,
    lattice: Optional[PeriodLattice] = None,
    bits: int = DEFAULT_BITS,
) -> CuspExpansion:
    """
    Expansion of (X_lambda, Y_lambda)(gamma_rho z) in q_w

    Args:
        curve: The curve
        f: Newform coefficients, enough for the cusp constant and n_max + SLASH_EXTRA
        cusp: Cusp of Gamma_0(N)
        n_max: Truncation order of X
        lam: Integer multiplication endomorphism
        lattice: Period lattice; computed when omitted
        bits: Numeric precision for the cusp constant

    Raises:
        RecursionSingular: If a step cannot be solved
        ReconstructionFailed: If the constant or slash data does not snap
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    data = slash_f_at_cusp(curve, f, cusp, n_max + SLASH_EXTRA, bits)
    if cusp.is_infinity:
        return expand_with_constant(curve, data, n_max, lam)
    lattice = lattice or period_lattice(curve, bits)
    with mpmath.workprec(bits):
        kappa = lam * cusp_constant(f, data, bits)
        point, coords = classify_constant(curve, lattice, kappa, data.width)
    expansion = expand_with_constant(curve, data, n_max, lam, point)
    expansion.kappa_coordinates = coords
    logger.info(f"Cusp {cusp} of {curve.label or curve}: {expansion.case}, kappa at {coords}")
    return expansion


def act_coset(expansion: CuspExpansion, offset: int) -> Tuple[LaurentSeries, LaurentSeries]:
    """(X, Y)(gamma_rho T^offset z): substitute q_w -> zeta_w^offset q_w"""
    return expansion.x.twist(offset), expansion.y.twist(offset)


class ModularParametrization:
    """
    Parametrization X_0(N) -> E with cached expansions at every cusp

    Holds the curve, its newform coefficients and period lattice and
    serves per-cusp and per-coset expansions.
    """

    def __init__(
        self,
        curve: EllipticCurve,
        n_max: int = 60,
        bits: int = DEFAULT_BITS,
        manin: int = 1,
        lam: int = 1,
        counting_budget: int = DEFAULT_COUNTING_BUDGET,
    ):
        if curve.conductor is None:
            raise ValueError(f"Curve {curve} needs a conductor")
        self.curve = curve
        self.n_max = n_max
        self.bits = bits
        self.manin = manin
        self.lam = lam
        self.counting_budget = counting_budget
        self.level = curve.conductor
        self._newform: Optional[NewformCoefficients] = None
        self._lattice: Optional[PeriodLattice] = None
        self._lattices: Dict[int, PeriodLattice] = {}
        self._expansions: Dict[Cusp, CuspExpansion] = {}
        logger.info(f"Parametrization of {curve.label or curve} at level {self.level}")

    def newform(self, count: Optional[int] = None) -> NewformCoefficients:
        """Newform coefficients, extended on demand"""
        count = max(count or 0, self.n_max + 8)
        if self._newform is None or self._newform.n_max < count:
            self._newform = newform_coefficients(
                self.curve, count, self.manin, self.counting_budget
            )
        return self._newform

    @property
    def lattice(self) -> PeriodLattice:
        if self._lattice is None:
            self._lattice = period_lattice(self.curve, self.bits)
        return self._lattice

    def terms_for(self, cusp: Cusp) -> int:
        """Newform coefficients read when expanding at a cusp"""
        route = slash_route(cusp)
        if route == "infinity":
            return 0
        order = self.n_max + SLASH_EXTRA
        needed = constant_terms(cusp, route, order, self.bits)
        if route == "numeric":
            needed = max(needed, numeric_slash_terms(cusp, order, self.bits))
        else:
            needed = max(needed, eigenvalue_terms(self.level, cusp.width))
        return needed + 8

    def expansion(self, cusp: Cusp) -> CuspExpansion:
        if cusp not in self._expansions:
            f = self.newform(self.terms_for(cusp))
            if cusp.is_infinity:
                data = slash_f_at_cusp(self.curve, f, cusp, self.n_max + SLASH_EXTRA, self.bits)
                self._expansions[cusp] = expand_with_constant(
                    self.curve, data, self.n_max, self.lam
                )
            else:
                self._expansions[cusp] = expand_cusp(
                    self.curve, f, cusp, self.n_max, self.lam, self.lattice, self.bits
                )
        return self._expansions[cusp]

    def expansions(self) -> List[CuspExpansion]:
        # one newform long enough for every cusp
        self.newform(max(self.terms_for(c) for c in cusps(self.level)))
        return [self.expansion(c) for c in cusps(self.level)]

    def at_infinity(self) -> CuspExpansion:
        return self.expansion(cusps(self.level)[0])

    def slash_coefficients(self, cusp: Cusp, count: int) -> List[complex]:
        """
        c_1 .. c_count of (m f)|gamma_rho in double precision

        Off the numeric route these come straight from the newform; a numeric
        expansion stops short at its order.
        """
        route = slash_route(cusp)
        if route == "numeric":
            slash = self.expansion(cusp).data.slash
            return [to_complex(slash[n]) for n in range(1, min(count + 1, slash.order))]
        if route == "infinity":
            f = self.newform(count)
            return [complex(f.scaled(n)) for n in range(1, count + 1)]
        f = self.newform(max(count, eigenvalue_terms(self.level, cusp.width) + 8))
        sign = atkin_lehner_eigenvalue(f, cusp.width)
        return [complex(sign * f.scaled(n) / cusp.width) for n in range(1, count + 1)]

    def petersson_norm(self) -> float:
        """
        Integral of |m f|^2 dx dy over Gamma_0(N) \\ H

        The cosets gamma_rho T^k of one cusp tile the width-w strip over the
        standard fundamental domain, so the norm is a sum of strip integrals.
        """
        total = 0.0
        for cusp in cusps(self.level):
            coefficients = self.slash_coefficients(cusp, strip_terms(cusp.width))
            # |q_w|^2 above the unit arcs is at most exp(-2 pi sqrt(3) / w)
            dropped = mpmath.exp(-2 * mpmath.pi * mpmath.sqrt(3) * len(coefficients) / cusp.width)
            if dropped > STRIP_TAIL_WARNING:
                logger.warning(
                    f"Cusp {cusp}: strip integral truncated after {len(coefficients)} terms"
                )
            total += strip_integral(coefficients, cusp.width)
        logger.debug(f"Petersson norm of {self.curve.label or self.curve}: {total}")
        return total

    def coset_expansion(self, g: Matrix) -> Tuple[LaurentSeries, LaurentSeries, int]:
        """(X(g z), Y(g z)) in q_w for any g in SL2(Z), with the width"""
        cusp, offset, _ = decompose(g, self.level)
        expansion = self.expansion(cusp)
        x, y = act_coset(expansion, offset)
        return x, y, expansion.width

    def eichler_series(self) -> LaurentSeries:
        """lambda epsilon(z) at infinity as a series in q"""
        data = self.at_infinity().data
        return _eichler_series(data, data.slash.order) * self.lam

    def eichler(self, z) -> mpmath.mpc:
        """epsilon(z), with newform coefficients extended as far as the point needs"""
        z = mpmath.mpmathify(z)
        needed = terms_needed(mpmath.im(z), self.bits) if mpmath.im(z) > 0 else 0
        f = self.newform(min(needed, MAX_EICHLER_TERMS))
        return eichler_integral(f, z, self.bits, self.lattice)

    def evaluate_point(self, z) -> Tuple[mpmath.mpc, mpmath.mpc]:
        """Numeric (X(z), Y(z)) = point attached to lambda epsilon(z)"""
        with mpmath.workprec(self.bits):
            u = self.lam * self.eichler(z)
            return curve_point(self.curve, self.lattice, u)

    def lattice_at(self, bits: int) -> PeriodLattice:
        if bits == self.bits:
            return self.lattice
        if bits not in self._lattices:
            self._lattices[bits] = period_lattice(self.curve, bits)
        return self._lattices[bits]

    def evaluate_coset(
        self, g: Matrix, z, bits: Optional[int] = None
    ) -> Tuple[mpmath.mpc, mpmath.mpc]:
        """
        Numeric (X(g z), Y(g z)) for z in the upper half plane

        On the Atkin-Lehner route g z = delta gamma_rho (z + k) and the
        value is kappa + lambda_m epsilon((z + k) / w), with kappa taken
        exactly from its lattice coordinates. Non-squarefree levels go
        through the general Eichler integral at g z.
        """
        bits = bits or self.bits
        cusp, offset, _ = decompose(g, self.level)
        if not self.is_squarefree:
            if bits != self.bits:
                raise ValueError("Only squarefree levels evaluate at a different precision")
            return self.evaluate_point(act(g, mpmath.mpmathify(z)))
        expansion = self.expansion(cusp)
        lattice = self.lattice_at(bits)
        with mpmath.workprec(bits + 32):
            shifted = (mpmath.mpmathify(z) + offset) / expansion.width
            needed = terms_needed(mpmath.im(shifted), bits)
            if needed > MAX_EICHLER_TERMS:
                raise ValueError(f"Point {z} is too close to the real line")
            f = self.newform(needed)
            q = mpmath.expjpi(2 * shifted)
            tail = _partial_eichler(f, q, needed, expansion.data.eigenvalue)
            kappa = 0
            if expansion.kappa_coordinates:
                kappa = lattice.point(*expansion.kappa_coordinates)
            return curve_point(self.curve, lattice, kappa + self.lam * tail)

    @property
    def is_squarefree(self) -> bool:
        return is_squarefree(self.level)

