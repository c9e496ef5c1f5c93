"""Tests for curves, point arithmetic and newform coefficients"""

from fractions import Fraction
import math

import pytest

from modparam.curve import (
    AffinePoint,
    ConductorMismatch,
    EllipticCurve,
    NewformCoefficients,
    PrimeTooLarge,
    ReductionType,
    SingularCurve,
    a_p,
    check_conductor,
    count_points,
    newform_coefficients,
    reduction_type,
    smallest_prime_factors,
)


class TestEllipticCurve:
    """Tests for the Weierstrass model and its invariants"""

    def test_invariants(self, curve_11a1):
        """Test Tate invariants of 11a1"""
        assert curve_11a1.b2 == -4
        assert curve_11a1.c4 == 496
        assert curve_11a1.c6 == 20008
        assert curve_11a1.discriminant == -161051
        assert curve_11a1.j_invariant == Fraction(-122023936, 161051)

    def test_lattice_invariants(self, curve_14a1):
        """Test g2 = c4 / 12 and g3 = c6 / 216"""
        assert curve_14a1.g2 == curve_14a1.c4 / 12
        assert curve_14a1.g3 == curve_14a1.c6 / 216

    def test_singular_model(self):
        """Test that a cusp curve is rejected"""
        with pytest.raises(SingularCurve):
            EllipticCurve(0, 0, 0, 0, 0)

    def test_invalid_conductor(self):
        """Test that the conductor must be positive"""
        with pytest.raises(ValueError):
            EllipticCurve(0, -1, 1, -10, -20, conductor=0)

    def test_from_c_invariants(self, curve_11a1):
        """Test the short model keeps c4 and c6"""
        short = EllipticCurve.from_c_invariants(curve_11a1.c4, curve_11a1.c6)
        assert short.c4 == curve_11a1.c4
        assert short.c6 == curve_11a1.c6
        assert short.j_invariant == curve_11a1.j_invariant

    def test_rescale(self, curve_11a1):
        """Test that rescaling preserves j"""
        assert curve_11a1.rescale(2).j_invariant == curve_11a1.j_invariant


class TestPoints:
    """Tests for the group law"""

    def test_on_curve(self, curve_11a1):
        """Test membership of the 5-torsion points"""
        for x, y in ((5, 5), (5, -6), (16, 60), (16, -61)):
            assert curve_11a1.is_on_curve(AffinePoint(Fraction(x), Fraction(y)))
        assert not curve_11a1.is_on_curve(AffinePoint(Fraction(5), Fraction(6)))

    def test_negate(self, curve_11a1):
        """Test -(x, y) = (x, -y - a1 x - a3)"""
        point = AffinePoint(Fraction(5), Fraction(5))
        assert curve_11a1.negate(point) == AffinePoint(Fraction(5), Fraction(-6))

    def test_doubling(self, curve_11a1):
        """Test 2 (5, 5) = (16, -61)"""
        point = AffinePoint(Fraction(5), Fraction(5))
        assert curve_11a1.multiply(2, point) == AffinePoint(Fraction(16), Fraction(-61))

    def test_order(self, curve_11a1):
        """Test that (5, 5) has order five"""
        point = AffinePoint(Fraction(5), Fraction(5))
        assert curve_11a1.order_of(point) == 5
        assert curve_11a1.multiply(5, point).is_infinity

    def test_two_torsion(self, curve_14a1):
        """Test a 2-torsion point of 14a1"""
        point = AffinePoint(Fraction(1), Fraction(-1))
        assert curve_14a1.is_two_torsion(point)
        assert curve_14a1.order_of(point) == 2

    def test_torsion_points(self, curve_11a1):
        """Test brute-force torsion search"""
        points = set(curve_11a1.torsion_points(20))
        assert AffinePoint(Fraction(16), Fraction(60)) in points
        assert AffinePoint(Fraction(5), Fraction(-6)) in points

    def test_division_polynomial(self, curve_11a1):
        """Test that the 5-division polynomial vanishes at x = 5 and 16"""
        psi5 = curve_11a1.division_polynomial(5)
        assert psi5.eval(5) == 0
        assert psi5.eval(16) == 0
        assert psi5.degree() == 12


class TestReduction:
    """Tests for reduction types and point counts"""

    def test_reduction_type(self, curve_11a1, curve_14a1):
        """Test split, nonsplit and good reduction"""
        assert reduction_type(curve_11a1, 11) is ReductionType.SPLIT
        assert reduction_type(curve_11a1, 3) is ReductionType.GOOD
        assert reduction_type(curve_14a1, 2) is ReductionType.NONSPLIT
        assert reduction_type(curve_14a1, 7) is ReductionType.SPLIT

    def test_count_points(self, curve_11a1):
        """Test point counts of 11a1"""
        assert count_points(curve_11a1, 2) == 5
        assert count_points(curve_11a1, 3) == 5
        assert count_points(curve_11a1, 13) == 10

    def test_count_points_budget(self, curve_11a1):
        """Test that the budget is enforced"""
        with pytest.raises(PrimeTooLarge):
            count_points(curve_11a1, 101, budget=100)

    def test_a_p(self, curve_14a1):
        """Test traces of Frobenius of 14a1"""
        assert a_p(curve_14a1, 3) == -2
        assert a_p(curve_14a1, 2) == -1
        assert a_p(curve_14a1, 7) == 1

    def test_check_conductor(self, curve_11a1):
        """Test conductor validation"""
        check_conductor(curve_11a1)
        wrong = EllipticCurve(*curve_11a1.ainvs, conductor=13)
        with pytest.raises(ConductorMismatch):
            check_conductor(wrong)
        with pytest.raises(ConductorMismatch):
            check_conductor(EllipticCurve(*curve_11a1.ainvs, conductor=121))


class TestNewform:
    """Tests for newform coefficients"""

    def test_11a1(self, curve_11a1):
        """Test q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 ..."""
        f = newform_coefficients(curve_11a1, 13)
        assert f.coefficients == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]
        assert f.level == 11

    def test_14a1(self, curve_14a1):
        """Test the first coefficients of the level 14 newform"""
        f = newform_coefficients(curve_14a1, 9)
        assert f.coefficients == [1, -1, -2, 1, 0, 2, 1, -1, 1]

    def test_manin_scaling(self, curve_11a1):
        """Test m a_n"""
        f = newform_coefficients(curve_11a1, 5, manin=2)
        assert f.scaled(2) == -4
        assert f[2] == -2

    def test_budget(self, curve_11a1):
        """Test that point counting beyond the budget fails"""
        with pytest.raises(PrimeTooLarge):
            newform_coefficients(curve_11a1, 10, budget=5)

    def test_invalid_length(self, curve_11a1):
        """Test that n_max must be positive"""
        with pytest.raises(ValueError):
            newform_coefficients(curve_11a1, 0)

    def test_validation(self):
        """Test normalization and Manin constant checks"""
        with pytest.raises(ValueError):
            NewformCoefficients(11, [2, 1])
        with pytest.raises(ValueError):
            NewformCoefficients(11, [1], manin=0)
        with pytest.raises(IndexError):
            NewformCoefficients(11, [1, -2])[3]

    def test_sieve(self):
        """Test smallest prime factors"""
        spf = smallest_prime_factors(12)
        assert [int(spf[n]) for n in (2, 9, 10, 11, 12)] == [2, 3, 2, 11, 2]


HECKE_LIMIT = 2000

HECKE_CURVES = {
    "11a1": EllipticCurve(0, -1, 1, -10, -20, conductor=11, label="11a1"),
    "14a1": EllipticCurve(1, 0, 1, 4, -6, conductor=14, label="14a1"),
    "26b1": EllipticCurve(1, -1, 1, -3, 3, conductor=26, label="26b1"),
    "15a3": EllipticCurve(1, 1, 1, -5, 2, conductor=15, label="15a3"),
    "37a1": EllipticCurve(0, 0, 1, -1, 0, conductor=37, label="37a1"),
}


@pytest.fixture(scope="module", params=sorted(HECKE_CURVES))
def hecke_form(request):
    curve = HECKE_CURVES[request.param]
    return curve, newform_coefficients(curve, HECKE_LIMIT)


class TestHeckeRelations:
    """Tests of the Hasse bound and the Hecke relations up to HECKE_LIMIT"""

    @staticmethod
    def primes():
        spf = smallest_prime_factors(HECKE_LIMIT)
        return [p for p in range(2, HECKE_LIMIT + 1) if spf[p] == p]

    def test_hasse_bound(self, hecke_form):
        """Test |a_p| <= 2 sqrt(p)"""
        _, f = hecke_form
        for p in self.primes():
            assert f[p] ** 2 <= 4 * p

    def test_bad_primes(self, hecke_form):
        """Test a_p in {-1, 0, 1} and a_(p^k) = a_p^k at primes dividing N"""
        curve, f = hecke_form
        for p in self.primes():
            if curve.conductor % p:
                continue
            assert f[p] in (-1, 0, 1)
            power = p
            while power * p <= HECKE_LIMIT:
                power *= p
                assert f[power] == f[p] * f[power // p]

    def test_prime_power_recursion(self, hecke_form):
        """Test a_(p^(k+1)) = a_p a_(p^k) - p a_(p^(k-1)) at good primes"""
        curve, f = hecke_form
        for p in self.primes():
            if curve.conductor % p == 0:
                continue
            previous, current = 1, p
            while current * p <= HECKE_LIMIT:
                assert f[current * p] == f[p] * f[current] - p * f[previous]
                previous, current = current, current * p

    def test_multiplicative(self, hecke_form):
        """Test a_mn = a_m a_n for coprime m and n"""
        _, f = hecke_form
        for m in range(2, HECKE_LIMIT + 1):
            for n in range(m + 1, HECKE_LIMIT // m + 1):
                if math.gcd(m, n) == 1:
                    assert f[m * n] == f[m] * f[n]

    def test_good_prime_counts(self, hecke_form):
        """Test a_p = p + 1 - #E(F_p) at the good primes below 200"""
        curve, f = hecke_form
        for p in self.primes():
            if p > 200:
                break
            if curve.conductor % p:
                assert f[p] == p + 1 - count_points(curve, p)
