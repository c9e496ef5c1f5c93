"""Period lattices, the Weierstrass function and Eichler integrals"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple
import logging

import mpmath
import numpy as np

from modparam.arith.reconstruct import NoRationalInBall, rational_reconstruct
from modparam.arith.series import LaurentSeries
from modparam.curve import EllipticCurve, NewformCoefficients
from modparam.gamma0 import Matrix, act, in_gamma0, reduce_to_upper


logger = logging.getLogger(__name__)

DEFAULT_BITS = 256


class PeriodError(Exception):
    """Base exception for numeric period computations"""

    pass


class PrecisionUnreachable(PeriodError):
    """Raised when an iteration stalls before the requested precision"""

    pass


class ConvergenceBudgetExceeded(PeriodError):
    """Raised when a q-series needs more terms than are available"""

    pass


class LatticeSnapFailed(PeriodError):
    """Raised when a value is not within tolerance of a lattice point"""

    pass


def _mpf(value: Fraction):
    value = Fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


@dataclass
class PeriodLattice:
    """Lattice Z omega1 + Z omega2 with Im(omega2 / omega1) > 0"""

    omega1: mpmath.mpc
    omega2: mpmath.mpc
    bits: int = DEFAULT_BITS
    curve: Optional[EllipticCurve] = None

    def __post_init__(self):
        """Fix orientation"""
        self.omega1 = mpmath.mpc(self.omega1)
        self.omega2 = mpmath.mpc(self.omega2)
        if mpmath.im(self.omega2 / self.omega1) < 0:
            self.omega2 = -self.omega2
        if mpmath.im(self.omega2 / self.omega1) == 0:
            raise PeriodError("Lattice generators are linearly dependent")

    @property
    def tau(self) -> mpmath.mpc:
        return self.omega2 / self.omega1

    @property
    def area(self) -> mpmath.mpf:
        return abs(mpmath.im(mpmath.conj(self.omega1) * self.omega2))

    @property
    def tolerance(self) -> mpmath.mpf:
        """Snap tolerance 2^(-bits/2)"""
        return mpmath.mpf(2) ** (-(self.bits // 2))

    def coordinates(self, z) -> Tuple[mpmath.mpf, mpmath.mpf]:
        """Real (s, t) with z = s omega1 + t omega2"""
        w1, w2 = self.omega1, self.omega2
        det = mpmath.im(mpmath.conj(w1) * w2)
        s = mpmath.im(mpmath.conj(z) * w2) / det
        t = mpmath.im(mpmath.conj(w1) * z) / det
        return s, t

    def point(self, s, t) -> mpmath.mpc:
        s, t = (_mpf(v) if isinstance(v, (int, Fraction)) else v for v in (s, t))
        return s * self.omega1 + t * self.omega2

    def reduce(self, z) -> mpmath.mpc:
        """Representative of z modulo the lattice near the origin"""
        s, t = self.coordinates(z)
        return z - mpmath.nint(s) * self.omega1 - mpmath.nint(t) * self.omega2

    def snap(self, z, tolerance=None) -> Tuple[int, int]:
        """
        Integer coordinates of the lattice point at z

        Raises:
            LatticeSnapFailed: If z is not within tolerance of the lattice
        """
        tolerance = self.tolerance if tolerance is None else tolerance
        s, t = self.coordinates(z)
        m, n = int(mpmath.nint(s)), int(mpmath.nint(t))
        distance = abs(z - m * self.omega1 - n * self.omega2)
        if distance > tolerance * max(1, abs(self.omega1)):
            raise LatticeSnapFailed(
                f"Value {mpmath.nstr(z, 12)} is {mpmath.nstr(distance, 5)} from the lattice"
            )
        return m, n

    def contains(self, z, tolerance=None) -> bool:
        try:
            self.snap(z, tolerance)
        except LatticeSnapFailed:
            return False
        return True

    def rational_coordinates(self, z, denom_bound: int = 64) -> Tuple[Fraction, Fraction]:
        """Exact rational lattice coordinates of a torsion value"""
        s, t = self.coordinates(z)
        tolerance = self.tolerance * 2 ** 8
        return (
            rational_reconstruct(s, denom_bound, tolerance),
            rational_reconstruct(t, denom_bound, tolerance),
        )

    def reduced_basis(self) -> Tuple[mpmath.mpc, mpmath.mpc]:
        """Gauss-reduced basis with the same orientation"""
        w1, w2 = self.omega1, self.omega2
        while True:
            if abs(w2) < abs(w1):
                w1, w2 = w2, -w1
            k = mpmath.nint(mpmath.re(w2 / w1))
            if k == 0:
                break
            w2 = w2 - k * w1
            if abs(w2) >= abs(w1):
                break
        return w1, w2

    def invariants(self) -> Tuple[mpmath.mpc, mpmath.mpc]:
        """Numeric (g2, g3) from Eisenstein series in the nome"""
        return lattice_invariants(self)


def _cubic_roots(curve: EllipticCurve):
    coeffs = [4, _mpf(curve.b2), 2 * _mpf(curve.b4), _mpf(curve.b6)]
    return mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * mpmath.mp.prec)


def period_lattice(curve: EllipticCurve, bits: int = DEFAULT_BITS) -> PeriodLattice:
    """
    Period lattice of the invariant differential dx / (2y + a1 x + a3)

    Uses the arithmetic-geometric mean; the first generator is the real
    period. For negative discriminant the second generator is chosen with
    real part in [0, omega1).

    Args:
        curve: The Weierstrass model
        bits: Working precision

    Returns:
        PeriodLattice at the requested precision

    Raises:
        PrecisionUnreachable: If the cubic roots cannot be isolated
    """
    with mpmath.workprec(bits + 32):
        try:
            roots = _cubic_roots(curve)
        except mpmath.libmp.libhyper.NoConvergence as exc:
            logger.error(f"Root isolation failed for {curve}")
            raise PrecisionUnreachable(f"Cubic roots of {curve} did not converge") from exc
        if curve.discriminant > 0:
            e3, e2, e1 = sorted((mpmath.re(r) for r in roots))
            omega1 = mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2))
            omega2 = mpmath.mpc(0, 1) * mpmath.pi / mpmath.agm(
                mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3)
            )
        else:
            e1 = max((r for r in roots), key=lambda r: -abs(mpmath.im(r)))
            e1 = mpmath.re(e1)
            a = 3 * e1 + _mpf(curve.b2) / 4
            b = mpmath.sqrt(3 * e1 ** 2 + _mpf(curve.b2) / 2 * e1 + _mpf(curve.b4) / 2)
            omega1 = 2 * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b + a))
            omega2 = -omega1 / 2 + mpmath.mpc(0, 1) * mpmath.pi / mpmath.agm(
                2 * mpmath.sqrt(b), mpmath.sqrt(2 * b - a)
            )
            if mpmath.re(omega2) < 0:
                omega2 += omega1
        lattice = PeriodLattice(mpmath.mpc(omega1), mpmath.mpc(omega2), bits, curve)
    logger.debug(
        f"Periods of {curve}: {mpmath.nstr(lattice.omega1, 12)}, {mpmath.nstr(lattice.omega2, 12)}"
    )
    return lattice


def lattice_invariants(lattice: PeriodLattice) -> Tuple[mpmath.mpc, mpmath.mpc]:
    """g2 = (4 pi^4 / 3) E4(tau) / omega1^4 and g3 = (8 pi^6 / 27) E6(tau) / omega1^6"""
    w1, w2 = lattice.reduced_basis()
    tau = w2 / w1
    q = mpmath.expjpi(2 * tau)
    e4 = mpmath.mpc(1)
    e6 = mpmath.mpc(1)
    qn = mpmath.mpc(1)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    n = 0
    while True:
        n += 1
        qn *= q
        denom = 1 - qn
        e4 += 240 * n ** 3 * qn / denom
        e6 -= 504 * n ** 5 * qn / denom
        if abs(qn) * n ** 5 < eps:
            break
    pi = mpmath.pi
    g2 = 4 * pi ** 4 / 3 * e4 / w1 ** 4
    g3 = 8 * pi ** 6 / 27 * e6 / w1 ** 6
    return g2, g3


def _wp_normalized(v, tau, derivative: bool):
    """wp(v; Z + tau Z) or its derivative from the nome expansion"""
    two_pi_i = 2 * mpmath.pi * mpmath.mpc(0, 1)
    # shift v towards the real segment to keep |u^{+-1} q^n| small
    t = mpmath.im(v) / mpmath.im(tau)
    v = v - mpmath.nint(t) * tau
    v = v - mpmath.nint(mpmath.re(v))
    u = mpmath.expjpi(2 * v)
    q = mpmath.expjpi(2 * tau)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 8)

    if derivative:
        def term(w):
            return w * (1 + w) / (1 - w) ** 3

        total = term(u)
    else:
        def term(w):
            return w / (1 - w) ** 2

        total = mpmath.mpf(1) / 12 + term(u)
    qn = mpmath.mpc(1)
    u_inv = 1 / u
    n = 0
    while True:
        n += 1
        qn *= q
        if derivative:
            increment = term(qn * u) - term(qn * u_inv)
        else:
            increment = term(qn * u) + term(qn * u_inv) - 2 * qn / (1 - qn) ** 2
        total += increment
        if abs(increment) < eps * max(1, abs(total)) and abs(qn) < eps:
            break
        if n > 100000:
            raise ConvergenceBudgetExceeded("Nome series for wp did not converge")
    return total * (two_pi_i ** 3 if derivative else two_pi_i ** 2)


def weierstrass_p(z, lattice: PeriodLattice) -> mpmath.mpc:
    """Numeric wp(z) for the lattice"""
    w1, w2 = lattice.reduced_basis()
    return _wp_normalized(z / w1, w2 / w1, False) / w1 ** 2


def weierstrass_p_prime(z, lattice: PeriodLattice) -> mpmath.mpc:
    w1, w2 = lattice.reduced_basis()
    return _wp_normalized(z / w1, w2 / w1, True) / w1 ** 3


def curve_point(curve: EllipticCurve, lattice: PeriodLattice, u) -> Tuple[mpmath.mpc, mpmath.mpc]:
    """Point (x, y) of the curve attached to u in C / lattice"""
    wp = weierstrass_p(u, lattice)
    wp_prime = weierstrass_p_prime(u, lattice)
    x = wp - _mpf(curve.b2) / 12
    y = (wp_prime - _mpf(curve.a1) * x - _mpf(curve.a3)) / 2
    return x, y


@dataclass
class WpLaurent:
    """Exact Laurent coefficients wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)"""

    g2: Fraction
    g3: Fraction
    coefficients: List[Fraction] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.coefficients)

    def c(self, k: int) -> Fraction:
        """c_k for k >= 2"""
        if k < 2:
            raise IndexError("wp coefficients start at k = 2")
        return self.coefficients[k - 2] if k - 2 < len(self.coefficients) else None

    def series_terms(self) -> List[Tuple[int, Fraction]]:
        """(exponent, coefficient) pairs of wp with exponents 2k - 2"""
        return [(-2, Fraction(1))] + [
            (2 * k - 2, self.coefficients[k - 2]) for k in range(2, self.count + 2)
        ]

    def derivative_terms(self) -> List[Tuple[int, Fraction]]:
        return [(n - 1, n * c) for n, c in self.series_terms() if n != 0]

    def compose(self, s: LaurentSeries) -> Tuple[LaurentSeries, LaurentSeries]:
        """
        Compose wp and wp' with a series s of valuation 1

        Returns:
            (wp(s), wp'(s)), truncated at the precision the available
            coefficients and the precision of s allow
        """
        if s.valuation != 1:
            raise ValueError(f"Composition needs valuation 1, got {s.valuation}")
        inv = 1 / s
        inv2 = inv * inv
        wp = inv2
        wp_prime = -2 * inv2 * inv
        power = LaurentSeries.constant(Fraction(1), s.order - 1, s.width)
        s2 = s * s
        for k in range(2, self.count + 2):
            # power = s^(2k-4) on entry
            c = self.coefficients[k - 2]
            if k > 2:
                power = power * s2
            if power.is_zero() or power.valuation >= wp.order:
                break
            if c:
                wp = wp + c * power * s2
                wp_prime = wp_prime + (2 * k - 2) * c * power * s
        # the first missing coefficient contributes at s^(2 count + 2)
        limit = 2 * self.count + 2
        return wp.truncate(limit), wp_prime.truncate(limit - 1)

    def evaluate(self, z) -> mpmath.mpc:
        total = 1 / z ** 2
        for n, c in self.series_terms()[1:]:
            total += _mpf(c) * z ** n
        return total


def wp_laurent(g2, g3, count: int) -> WpLaurent:
    """
    Exact Laurent coefficients of wp from g2, g3

    c_2 = g2/20, c_3 = g3/28 and
    c_k = 3 sum_{m=2}^{k-2} c_m c_{k-m} / ((2k+1)(k-3)) for k >= 4.
    """
    if count < 2:
        raise ValueError(f"Need at least two coefficients, got {count}")
    g2, g3 = Fraction(g2), Fraction(g3)
    coeffs = [g2 / 20, g3 / 28]
    for k in range(4, count + 2):
        acc = sum(coeffs[m - 2] * coeffs[k - m - 2] for m in range(2, k - 1))
        coeffs.append(3 * acc / ((2 * k + 1) * (k - 3)))
    return WpLaurent(g2, g3, coeffs[:count])


def terms_needed(imag_part, bits: int, slack: int = 8) -> int:
    """Number of q-series terms so that |q|^n < 2^(-bits - slack)"""
    decay = 2 * mpmath.pi * imag_part
    if decay <= 0:
        raise ConvergenceBudgetExceeded("Point is not in the upper half plane")
    return int(mpmath.ceil((bits + slack) * mpmath.log(2) / decay)) + 1


def _direct_eichler(f: NewformCoefficients, z, terms: int) -> mpmath.mpc:
    q = mpmath.expjpi(2 * z)
    total = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for n in range(1, terms + 1):
        qn *= q
        a = f[n]
        if a:
            total += mpmath.mpf(f.manin * a) / n * qn
    return total


def eichler_integral(
    f: NewformCoefficients,
    z,
    bits: int = DEFAULT_BITS,
    lattice: Optional[PeriodLattice] = None,
) -> mpmath.mpc:
    """
    epsilon(z) = sum_{n>=1} (m a_n / n) q^n

    When the point is too close to the real line for the available
    coefficients, it is first moved by Gamma_0(N) and corrected by the
    exact lattice value of the period map.

    Args:
        f: Newform coefficients
        z: Point of the upper half plane
        bits: Target precision
        lattice: Period lattice, needed only for the Gamma_0(N) correction

    Raises:
        ConvergenceBudgetExceeded: If even the moved point needs more terms
    """
    z = mpmath.mpmathify(z)
    if mpmath.im(z) <= 0:
        raise ConvergenceBudgetExceeded(f"{z} is not in the upper half plane")
    needed = terms_needed(mpmath.im(z), bits)
    if needed <= f.n_max:
        return _direct_eichler(f, z, needed)
    if lattice is None:
        raise ConvergenceBudgetExceeded(
            f"Need {needed} coefficients at Im z = {mpmath.nstr(mpmath.im(z), 6)}, have {f.n_max}"
        )
    delta, moved = reduce_to_upper(z, f.level)
    needed = terms_needed(mpmath.im(moved), bits)
    if needed > f.n_max:
        raise ConvergenceBudgetExceeded(
            f"Need {needed} coefficients even after moving to Im z = "
            f"{mpmath.nstr(mpmath.im(moved), 6)}"
        )
    correction = period_map(f, delta, lattice, bits)
    return _direct_eichler(f, moved, needed) - correction


def period_map(
    f: NewformCoefficients,
    gamma: Matrix,
    lattice: PeriodLattice,
    bits: int = DEFAULT_BITS,
    snap_bits: int = 48,
) -> mpmath.mpc:
    """
    C(gamma) = epsilon(gamma z) - epsilon(z), snapped to the lattice

    Evaluated at z = -d/c + i/|c| where both z and gamma z have imaginary
    part 1/|c|, using only enough terms to identify the lattice point.

    Raises:
        LatticeSnapFailed: If the value is not within tolerance of the lattice
    """
    if not in_gamma0(gamma, f.level):
        raise ValueError(f"{gamma} is not in Gamma_0({f.level})")
    a, b, c, d = gamma
    if c == 0:
        return mpmath.mpc(0)
    z = mpmath.mpc(mpmath.mpf(-d) / c, mpmath.mpf(1) / abs(c))
    needed = terms_needed(mpmath.im(z), snap_bits)
    if needed > f.n_max:
        raise ConvergenceBudgetExceeded(
            f"Period map of {gamma} needs {needed} coefficients, have {f.n_max}"
        )
    value = _direct_eichler(f, act(gamma, z), needed) - _direct_eichler(f, z, needed)
    tolerance = mpmath.mpf(2) ** (-(snap_bits // 2))
    try:
        m, n = lattice.snap(value, tolerance * f.manin)
    except LatticeSnapFailed:
        logger.error(f"Period map of {gamma} is not a lattice point")
        raise
    return m * lattice.omega1 + n * lattice.omega2


@dataclass
class LatticeRelation:
    """Outcome of comparing two period lattices"""

    kind: str
    index: Optional[int] = None
    matrix: Optional[Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]] = None
    common: Optional[Tuple[mpmath.mpc, mpmath.mpc]] = None
    indices: Optional[Tuple[int, int]] = None

    def __bool__(self):
        return self.kind != "unrelated"


def _integer_row_basis(rows: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Hermite basis of the rank-two lattice spanned by integer rows"""
    rows = [list(r) for r in rows if r != (0, 0)]
    # eliminate the first column by Euclid
    while sum(1 for r in rows if r[0] != 0) > 1:
        rows.sort(key=lambda r: (r[0] == 0, abs(r[0])))
        pivot = rows[0]
        for r in rows[1:]:
            if r[0]:
                k = r[0] // pivot[0]
                r[0] -= k * pivot[0]
                r[1] -= k * pivot[1]
        rows = [r for r in rows if r != [0, 0]]
    first = next(r for r in rows if r[0] != 0)
    second = 0
    for r in rows:
        if r is not first:
            second = gcd(second, r[1])
    if first[0] < 0:
        first = [-first[0], -first[1]]
    if second == 0:
        raise ValueError("Rows do not span a rank-two lattice")
    first[1] %= second
    return (first[0], first[1]), (0, second)


def _rational_row_basis(rows):
    denom = 1
    for r in rows:
        for v in r:
            denom = denom * Fraction(v).denominator // gcd(denom, Fraction(v).denominator)
    scaled = [(int(Fraction(r[0]) * denom), int(Fraction(r[1]) * denom)) for r in rows]
    (p, q), (_, s) = _integer_row_basis(scaled)
    return (Fraction(p, denom), Fraction(q, denom)), (Fraction(0), Fraction(s, denom))


def _dual(basis):
    (a, b), (c, d) = basis
    det = a * d - b * c
    # rows of the inverse transpose
    return ((d / det, -c / det), (-b / det, a / det))


def lattice_relation(
    first: PeriodLattice, second: PeriodLattice, denom_bound: int = 64
) -> LatticeRelation:
    """
    Commensurability of two lattices

    The generators of the second lattice are written in coordinates of
    the first and reconstructed as rationals; the intersection is then
    computed exactly in those coordinates.

    Returns:
        LatticeRelation with kind "equal", "sublattice" (first inside
        second), "superlattice", "common-sublattice" or "unrelated"
    """
    try:
        rows = [first.rational_coordinates(w, denom_bound) for w in (second.omega1, second.omega2)]
    except NoRationalInBall:
        logger.debug("Lattices are not commensurable at this precision")
        return LatticeRelation("unrelated")
    matrix = (tuple(rows[0]), tuple(rows[1]))
    (a, b), (c, d) = matrix
    det = a * d - b * c
    if det == 0:
        return LatticeRelation("unrelated")
    integral = all(v.denominator == 1 for row in matrix for v in row)
    inverse_integral = all(v.denominator == 1 for row in _dual(matrix) for v in row)
    if integral and abs(det) == 1:
        return LatticeRelation("equal", 1, matrix, (first.omega1, first.omega2), (1, 1))
    if integral:
        index = int(abs(det))
        return LatticeRelation(
            "superlattice", index, matrix, (second.omega1, second.omega2), (index, 1)
        )
    if inverse_integral:
        index = int(abs(1 / det))
        return LatticeRelation(
            "sublattice", index, matrix, (first.omega1, first.omega2), (1, index)
        )
    # intersection = dual(dual(first) + dual(second)) in first-lattice coordinates
    unit_rows = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    dual_sum = _rational_row_basis(unit_rows + list(_dual(matrix)))
    common = _dual(dual_sum)
    common = _rational_row_basis(list(common))
    (p, q), (r, s) = common
    common_det = abs(p * s - q * r)
    generators = tuple(first.point(_mpf(u), _mpf(v)) for u, v in common)
    return LatticeRelation(
        "common-sublattice",
        None,
        matrix,
        generators,
        (int(common_det), int(common_det / abs(det))),
    )


def eichler_trace(
    f: NewformCoefficients,
    path: List,
    samples: int,
    bits: int = DEFAULT_BITS,
    lattice: Optional[PeriodLattice] = None,
) -> List[Tuple[mpmath.mpc, mpmath.mpc]]:
    """
    Sample epsilon along a polyline

    Args:
        f: Newform coefficients
        path: Vertices of the polyline in the upper half plane
        samples: Points per segment (the last vertex is always included)
        bits: Precision
        lattice: Optional lattice for the Gamma_0(N) correction

    Returns:
        List of (z, epsilon(z))
    """
    if not path:
        return []
    points = []
    for start, end in zip(path, path[1:]):
        for i in range(samples):
            points.append(start + (end - start) * mpmath.mpf(i) / samples)
    points.append(path[-1])
    return [(z, eichler_integral(f, z, bits, lattice)) for z in points]


def closure_defect(trace: List[Tuple[mpmath.mpc, mpmath.mpc]]) -> mpmath.mpc:
    """Difference of the images of the last and first trace points"""
    if not trace:
        return mpmath.mpc(0)
    return trace[-1][1] - trace[0][1]



def strip_terms(width: int) -> int:
    """Coefficients after which |c_n q_w^n|^2 is below double precision on the strip"""
    # |q_w|^2 <= exp(-2 pi sqrt(3) / w) above the unit arcs
    return int(np.ceil(width * 53 * np.log(2) / (2 * np.pi * np.sqrt(3)))) + 8


def strip_integral(coefficients: Sequence[complex], width: int, nodes: int = 96) -> float:
    """
    Integral of |g|^2 dx dy over the union of F + k, 0 <= k < w

    g = sum_{n>=1} c_n q_w^n with coefficients[n - 1] = c_n and F the standard
    fundamental domain of SL2(Z). Summing over the w translates keeps only
    the pairs n = n' mod w; the y-integral above the arc y0(x) = sqrt(1 - x^2)
    is done in closed form and the x-integral by Gauss-Legendre quadrature.
    """
    c = np.asarray(coefficients, dtype=complex)
    if width < 1:
        raise ValueError(f"Width must be positive, got {width}")
    n = np.arange(1, len(c) + 1)
    t, weights = np.polynomial.legendre.leggauss(nodes)
    x = t / 2
    z = (x + 1j * np.sqrt(1 - x * x)) / width
    u = c[None, :] * np.exp(2j * np.pi * np.outer(z, n))
    density = np.zeros(nodes)
    for r in range(min(width, len(c))):
        idx = np.arange(r, len(c), width)
        k = n[idx]
        hilbert = 1.0 / (k[:, None] + k[None, :])
        block = u[:, idx]
        density += np.real(np.einsum("ia,ab,ib->i", block, hilbert, np.conj(block)))
    return float(width ** 2 / (2 * np.pi) * np.dot(weights, density) / 2)
