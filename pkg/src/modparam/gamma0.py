"""Cosets, cusps and Atkin-Lehner matrices of Gamma_0(N), and CM points as quadratic surds"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple
import logging

import mpmath
import sympy


logger = logging.getLogger(__name__)

Matrix = Tuple[int, int, int, int]

IDENTITY: Matrix = (1, 0, 0, 1)
S_MATRIX: Matrix = (0, -1, 1, 0)


class CosetDecompositionFailed(Exception):
    """Raised when a matrix cannot be matched to a (cusp, offset) pair"""

    pass


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    a, b, c, d = g
    e, f, k, m = h
    return (a * e + b * k, a * f + b * m, c * e + d * k, c * f + d * m)


def adjugate(g: Matrix) -> Matrix:
    """Adjugate (the inverse when det = 1)"""
    a, b, c, d = g
    return (d, -b, -c, a)


def det(g: Matrix) -> int:
    a, b, c, d = g
    return a * d - b * c


def translation(k: int) -> Matrix:
    return (1, k, 0, 1)


def act(g: Matrix, z):
    """Moebius action on a point of the upper half plane"""
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


def in_gamma0(g: Matrix, level: int) -> bool:
    return det(g) == 1 and g[2] % level == 0


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def index_gamma0(level: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)"""
    result = level
    for p in sympy.primefactors(level):
        result = result // p * (p + 1)
    return result


def is_squarefree(level: int) -> bool:
    return all(e == 1 for e in sympy.factorint(level).values())


def exact_divisors(level: int) -> List[int]:
    """Divisors m of N with gcd(m, N/m) = 1"""
    return [m for m in sympy.divisors(level) if gcd(m, level // m) == 1]


def lift_to_sl2(c: int, d: int, level: int) -> Matrix:
    """A matrix of SL2(Z) whose bottom row reduces to (c : d) mod N"""
    c %= level
    d %= level
    if level == 1:
        return IDENTITY
    if c == 0:
        c = level
    k = 0
    while gcd(c, d + k * level) != 1:
        k += 1
    d = d + k * level
    g, x, y = _xgcd(d, c)
    # x d + y c = 1, so (x, -y; c, d) has determinant 1
    return (x, -y, c, d)


class P1List:
    """
    Normalized elements of the projective line over Z/N

    Each class (c : d) with gcd(c, d, N) = 1 is stored once; index()
    returns its position for any representative pair.
    """

    def __init__(self, level: int):
        if level < 1:
            raise ValueError(f"Level must be positive, got {level}")
        self.level = level
        units = [u for u in range(1, level + 1) if gcd(u, level) == 1] if level > 1 else [1]
        self._units = units
        seen: Dict[Tuple[int, int], int] = {}
        elements: List[Tuple[int, int]] = []
        for c in range(level):
            for d in range(level):
                if level > 1 and gcd(gcd(c, d), level) != 1:
                    continue
                key = self.normalize(c, d)
                if key not in seen:
                    seen[key] = len(elements)
                    elements.append(key)
        if level == 1:
            elements = [(0, 0)]
            seen = {(0, 0): 0}
        self.elements = elements
        self._lookup = seen
        logger.debug(f"P1List({level}) has {len(elements)} elements")

    def normalize(self, c: int, d: int) -> Tuple[int, int]:
        N = self.level
        if N == 1:
            return (0, 0)
        return min(((u * c) % N, (u * d) % N) for u in self._units)

    def index(self, c: int, d: int) -> int:
        key = self.normalize(c, d)
        try:
            return self._lookup[key]
        except KeyError as exc:
            raise CosetDecompositionFailed(f"({c} : {d}) is not in P1(Z/{self.level})") from exc

    def index_of_matrix(self, g: Matrix) -> int:
        return self.index(g[2], g[3])

    def __len__(self):
        return len(self.elements)


@lru_cache(maxsize=None)
def p1_list(level: int) -> P1List:
    return P1List(level)


def coset_reps(level: int, style: str = "bottom_row") -> List[Matrix]:
    """
    Right coset representatives of Gamma_0(N) in SL2(Z)

    Args:
        level: The level N
        style: "bottom_row" lifts every element of P1(Z/N); "prime" gives
            the identity together with (0, -1; 1, j), 0 <= j < N, for N prime

    Returns:
        List of matrices, the first one the identity
    """
    if style == "prime":
        if not sympy.isprime(level):
            raise ValueError(f"Prime-style representatives need a prime level, got {level}")
        return [IDENTITY] + [(0, -1, 1, j) for j in range(level)]
    if style != "bottom_row":
        raise ValueError(f"Unknown coset style: {style}")
    plist = p1_list(level)
    reps = []
    for c, d in plist.elements:
        if plist.normalize(c, d) == plist.normalize(0, 1):
            reps.append(IDENTITY)
        else:
            reps.append(lift_to_sl2(c, d, level))
    reps.sort(key=lambda g: g != IDENTITY)
    return reps


@dataclass(frozen=True)
class Cusp:
    """Cusp a/c of Gamma_0(N) with c | N, together with its width"""

    numerator: int
    denominator: int
    level: int

    @property
    def width(self) -> int:
        c = self.denominator
        return self.level // gcd(c * c, self.level)

    @property
    def is_infinity(self) -> bool:
        return self.denominator == self.level

    def __str__(self):
        if self.is_infinity:
            return "oo"
        if self.numerator == 0 or self.denominator == 1:
            return "0"
        return f"{self.numerator}/{self.denominator}"

    @property
    def scaling_matrix(self) -> Matrix:
        """gamma with gamma(oo) = a/c; for squarefree levels this is W_m diag(m, 1)^-1"""
        if self.is_infinity:
            return IDENTITY
        a, c, N = self.numerator, self.denominator, self.level
        if c == 1:
            a = 1
        a_inv = pow(a, -1, c) if c > 1 else 0
        rest = N // c
        if gcd(c, rest) == 1:
            d = (a_inv * rest * pow(rest, -1, c)) % (c * rest) if c > 1 else 0
        else:
            d = a_inv if a_inv else 1
        b = (a * d - 1) // c
        g = (a, b, c, d)
        if det(g) != 1:
            raise CosetDecompositionFailed(f"Cannot build scaling matrix for cusp {self}")
        return g

    @property
    def atkin_lehner_index(self) -> Optional[int]:
        """m with W_m(oo) equivalent to this cusp, when gcd(c, N/c) = 1"""
        c = self.denominator
        if gcd(c, self.level // c) != 1:
            return None
        return self.level // c


@lru_cache(maxsize=None)
def cusps(level: int) -> List[Cusp]:
    """Inequivalent cusps of Gamma_0(N), infinity first"""
    result = []
    for c in sorted(sympy.divisors(level), reverse=True):
        g = gcd(c, level // c)
        for a in range(g if g > 1 else 1):
            if g > 1 and gcd(a, g) != 1:
                continue
            # lift a to a numerator coprime with c
            num = a
            while gcd(num, c) != 1:
                num += g
            result.append(Cusp(1 if c == level else num, c, level))
    total = sum(cusp.width for cusp in result)
    if total != index_gamma0(level):
        raise CosetDecompositionFailed(
            f"Cusp widths sum to {total}, expected index {index_gamma0(level)}"
        )
    return result


@lru_cache(maxsize=None)
def coset_table(level: int) -> List[Tuple[int, int]]:
    """
    Map each P1 index to (cusp index, offset k) with coset Gamma_0(N) gamma_rho T^k

    Raises:
        CosetDecompositionFailed: If two (cusp, offset) pairs land on one coset
            or a coset is never reached
    """
    plist = p1_list(level)
    table: List[Optional[Tuple[int, int]]] = [None] * len(plist)
    for i, cusp in enumerate(cusps(level)):
        g = cusp.scaling_matrix
        for k in range(cusp.width):
            idx = plist.index_of_matrix(mat_mul(g, translation(k)))
            if table[idx] is not None:
                raise CosetDecompositionFailed(
                    f"Cosets of cusp {cusp} offset {k} and {table[idx]} coincide"
                )
            table[idx] = (i, k)
    if any(entry is None for entry in table):
        raise CosetDecompositionFailed(f"Cusp data does not cover all cosets of level {level}")
    return table  # type: ignore


def decompose(g: Matrix, level: int) -> Tuple[Cusp, int, Matrix]:
    """
    Write g = delta gamma_rho T^k with delta in Gamma_0(N)

    Returns:
        (cusp, offset k, delta)
    """
    plist = p1_list(level)
    cusp_index, k = coset_table(level)[plist.index_of_matrix(g)]
    cusp = cusps(level)[cusp_index]
    base = mat_mul(cusp.scaling_matrix, translation(k))
    delta = mat_mul(g, adjugate(base))
    if not in_gamma0(delta, level):
        raise CosetDecompositionFailed(f"{g} does not decompose through cusp {cusp}")
    return cusp, k, delta


def atkin_lehner_matrix(level: int, m: int) -> Matrix:
    """W_m = (m, y; N, m t) with determinant m, for m exactly dividing N"""
    if level % m or gcd(m, level // m) != 1:
        raise ValueError(f"{m} does not exactly divide {level}")
    rest = level // m
    if m == 1:
        return IDENTITY
    if rest == 1:
        return (level, -1, level, 0)
    t = pow(m, -1, rest)
    y = (t * m - 1) // rest
    return (m, y, level, m * t)


def reduce_to_upper(z, level: int, max_steps: int = 1000):
    """
    Move z by Gamma_0(N) to a point of larger imaginary part

    Returns:
        (delta, delta z) with delta in Gamma_0(N)
    """
    delta = IDENTITY
    current = z
    for _ in range(max_steps):
        shift = -int(mpmath.nint(mpmath.re(current)))
        if shift:
            delta = mat_mul(translation(shift), delta)
            current = current + shift
        y = mpmath.im(current)
        x = mpmath.re(current)
        best = None
        best_norm = mpmath.mpf(1)
        c_limit = int(1 / (level * y)) + 1
        for k in range(1, c_limit + 1):
            c = k * level
            centre = -c * x
            for d in range(int(mpmath.floor(centre)) - 1, int(mpmath.ceil(centre)) + 2):
                if gcd(c, d) != 1:
                    continue
                norm = abs(c * current + d)
                if norm < best_norm - mpmath.mpf(2) ** (-40):
                    best, best_norm = (c, d), norm
        if best is None:
            return delta, current
        c, d = best
        _, a, b = _xgcd(d, c)
        step = (a, -b, c, d)
        delta = mat_mul(step, delta)
        current = act(step, current)
    return delta, current


class QuadraticSurd:
    """
    Imaginary quadratic point z = (-B + sqrt(D)) / (2A) of the upper half plane

    Stored as the primitive positive definite form (A, B, C), so the SL2
    action and reduction are exact integer operations.
    """

    __slots__ = ("a", "b", "c")

    def __init__(self, a: int, b: int, c: int):
        g = gcd(gcd(a, b), c)
        if g == 0:
            raise ValueError("Zero quadratic form")
        if a < 0:
            g = -g
        self.a, self.b, self.c = a // g, b // g, c // g
        if self.discriminant >= 0:
            raise ValueError(f"Form ({a}, {b}, {c}) is not positive definite")

    @classmethod
    def from_components(cls, p: int, d: int, q: int) -> "QuadraticSurd":
        """Point (p + sqrt(d)) / q with d < 0 and q > 0"""
        # z = (p + s)/q  =>  q^2 z^2 - 2pq z + p^2 - d = 0
        return cls(q * q, -2 * p * q, p * p - d)

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def form(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __eq__(self, other):
        return isinstance(other, QuadraticSurd) and self.form == other.form

    def __hash__(self):
        return hash(self.form)

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.c})"

    def __str__(self):
        return f"({-self.b} + sqrt({self.discriminant}))/{2 * self.a}"

    def value(self):
        """Numeric value at the current mpmath precision"""
        real = mpmath.mpf(-self.b) / (2 * self.a)
        imag = mpmath.sqrt(-self.discriminant) / (2 * self.a)
        return mpmath.mpc(real, imag)

    def act(self, g: Matrix) -> "QuadraticSurd":
        """Image g z for an integral matrix of positive determinant"""
        if det(g) <= 0:
            raise ValueError(f"Matrix {g} does not preserve the upper half plane")
        # z = adj(g) z', substitute into A z^2 + B z + C
        a, b, c, d = g
        A, B, C = self.form
        new_a = A * d * d - B * c * d + C * c * c
        new_b = -2 * A * b * d + B * (a * d + b * c) - 2 * C * a * c
        new_c = A * b * b - B * a * b + C * a * a
        return QuadraticSurd(new_a, new_b, new_c)

    def is_reduced(self) -> bool:
        A, B, C = self.form
        if not (abs(B) <= A <= C):
            return False
        if (abs(B) == A or A == C) and B < 0:
            return False
        return True

    def reduce(self) -> Tuple["QuadraticSurd", Matrix]:
        """Reduced representative in the standard fundamental domain and g with g z = it"""
        g = IDENTITY
        current = self
        while not current.is_reduced():
            A, B, C = current.form
            # translate so that -A < B <= A
            k = -((A - B) // (2 * A))
            if k:
                step = translation(k)
                current = current.act(step)
                g = mat_mul(step, g)
                continue
            if A > C or (A == C and B < 0):
                current = current.act(S_MATRIX)
                g = mat_mul(S_MATRIX, g)
                continue
            break
        return current, g

    def stabilizer(self) -> List[Matrix]:
        """Elements of SL2(Z) with small entries fixing the point"""
        result = []
        for a in (-1, 0, 1):
            for b in (-1, 0, 1):
                for c in (-1, 0, 1):
                    for d in (-1, 0, 1):
                        g = (a, b, c, d)
                        if det(g) == 1 and self.act(g) == self:
                            result.append(g)
        return result


def gamma0_equivalence(z1: QuadraticSurd, z2: QuadraticSurd, level: int) -> Optional[Matrix]:
    """Return delta in Gamma_0(N) with delta z1 = z2, or None"""
    r1, g1 = z1.reduce()
    r2, g2 = z2.reduce()
    if r1 != r2:
        return None
    for s in r1.stabilizer():
        delta = mat_mul(adjugate(g2), mat_mul(s, g1))
        if delta[2] % level == 0:
            return delta
    return None


def is_square_mod(value: int, modulus: int) -> Optional[int]:
    """Smallest s >= 0 with s^2 = value mod modulus, or None"""
    for s in range(modulus):
        if (s * s - value) % modulus == 0:
            return s
    return None

