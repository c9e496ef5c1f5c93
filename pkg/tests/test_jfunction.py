"""Tests for the j-function and recognition of rational functions in j"""

from fractions import Fraction

import pytest
import sympy

from modparam.arith.series import LaurentSeries
from modparam.gamma0 import QuadraticSurd
from modparam.jfunction import (
    CLASS_NUMBER_ONE,
    J,
    InsufficientPrecision,
    JRational,
    NoMatch,
    class_number_one_point,
    cm_discriminant_of_j,
    default_degree_bound,
    discriminant_series,
    eisenstein_e4,
    eisenstein_e6,
    j_recognize,
    j_reduce,
    j_series,
)


@pytest.fixture
def rational_function():
    return JRational.from_expr("(j**2 - 3*j + 5)/(j - 1728)")


class TestSeries:
    """Tests for Eisenstein series, Delta and j"""

    def test_eisenstein(self):
        """Test the first coefficients of E4 and E6"""
        assert eisenstein_e4(4).coefficient_list(0) == [1, 240, 2160, 6720]
        assert eisenstein_e6(3).coefficient_list(0) == [1, -504, -16632]

    def test_discriminant(self):
        """Test Delta = q - 24 q^2 + 252 q^3 - 1472 q^4"""
        assert discriminant_series(5).coefficient_list(1) == [1, -24, 252, -1472]

    def test_j(self):
        """Test j = 1/q + 744 + 196884 q + ..."""
        series = j_series(4)
        assert series.valuation == -1
        assert series.coefficient_list(-1) == [1, 744, 196884, 21493760, 864299970]

    def test_j_reduce(self):
        """Test that j reduces to the polynomial j"""
        poly, remainder = j_reduce(j_series(6))
        assert poly == {1: Fraction(1)}
        assert remainder.is_zero()

    def test_j_reduce_remainder(self):
        """Test that a pure power of q is left over"""
        series = j_series(6) + LaurentSeries([Fraction(3)], 2, 6)
        poly, remainder = j_reduce(series)
        assert poly == {1: Fraction(1)}
        assert remainder.coefficient_list(1) == [0, 3, 0, 0, 0]


class TestJRational:
    """Tests for rational functions of j"""

    def test_normalization(self):
        """Test that common factors cancel and the denominator is monic"""
        value = JRational.from_expr("(2*j - 2)/(2*j**2 - 2)")
        assert value.denominator.as_expr() == J + 1
        assert value.numerator.as_expr() == 1

    def test_zero_denominator(self):
        """Test that a zero denominator is rejected"""
        with pytest.raises(ValueError):
            JRational(sympy.Poly(J, J), sympy.Poly(0, J))

    def test_coefficient_lists(self, rational_function):
        """Test exact coefficient strings, constant term first"""
        assert rational_function.coefficient_lists() == {
            "num": ["5", "-3", "1"],
            "den": ["-1728", "1"],
        }

    def test_poles(self, rational_function):
        """Test the factored denominator"""
        assert rational_function.poles() == [(J - 1728, 1)]

    def test_str(self, rational_function):
        """Test the printed form"""
        assert str(rational_function) == "(j**2 - 3*j + 5)/(j - 1728)"

    def test_expand(self, rational_function):
        """Test that the expansion starts at q^-1"""
        series = rational_function.expand(10)
        assert series.valuation == -1
        assert series[-1] == 1


class TestRecognize:
    """Tests for recognition of series as rational functions of j"""

    def test_round_trip(self, rational_function):
        """Test that an expansion is recognized as its own function"""
        assert j_recognize(rational_function.expand(20), 2) == rational_function

    def test_polynomial(self):
        """Test that j itself needs no denominator"""
        result = j_recognize(j_series(10), 1)
        assert result.denominator.degree() == 0
        assert result.numerator.as_expr() == J

    def test_not_invariant(self):
        """Test that q alone is no rational function of j"""
        with pytest.raises(NoMatch):
            j_recognize(LaurentSeries([1], 1, 20), 1)

    def test_width(self):
        """Test that width-one series are required"""
        with pytest.raises(ValueError):
            j_recognize(LaurentSeries([1], 1, 20, width=2), 1)

    def test_insufficient(self):
        """Test that short series are rejected"""
        with pytest.raises(InsufficientPrecision):
            j_recognize(LaurentSeries([1], -1, 2), 1)

    def test_default_bound(self):
        """Test the default denominator degree bound"""
        assert default_degree_bound(42) == 9
        assert default_degree_bound(12) == 4


class TestClassNumberOne:
    """Tests for rational CM j-invariants"""

    def test_points(self):
        """Test reduced CM points of small discriminant"""
        assert class_number_one_point(1728) == QuadraticSurd(1, 0, 1)
        assert class_number_one_point(0) == QuadraticSurd(1, 1, 1)
        assert class_number_one_point(-32768).discriminant == -11

    def test_all_discriminants(self):
        """Test that each point has the keyed discriminant"""
        for disc, value in CLASS_NUMBER_ONE.items():
            assert class_number_one_point(value).discriminant == disc

    def test_unknown(self):
        """Test that other j-invariants are rejected"""
        with pytest.raises(KeyError):
            class_number_one_point(5)
        assert cm_discriminant_of_j(5) is None

    def test_discriminant_of_j(self):
        """Test lookup by j-invariant"""
        assert cm_discriminant_of_j(287496) == -16
        assert cm_discriminant_of_j(Fraction(-3375)) == -7
