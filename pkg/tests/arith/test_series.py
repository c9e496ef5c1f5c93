"""Tests for truncated Laurent series"""

from fractions import Fraction

import mpmath
import pytest

from modparam.arith.scalars import Cyclotomic, DenominatorNotCoprime, Residue
from modparam.arith.series import (
    LaurentSeries,
    NonUnitLeadingCoefficient,
    SeriesError,
    series_invert,
)


@pytest.fixture
def geometric():
    """Create 1/(1 - q) + O(q^6)"""
    return series_invert(LaurentSeries([1, -1], 0, 6))


class TestConstruction:
    """Tests for building and inspecting series"""

    def test_valuation_and_order(self):
        """Test explicit valuation and implied order"""
        s = LaurentSeries([1, 2, 3], valuation=-1)
        assert s.valuation == -1
        assert s.order == 2
        assert s[-1] == 1
        assert s[1] == 3

    def test_leading_zeros_stripped(self):
        """Test that leading zeros raise the valuation"""
        s = LaurentSeries([0, 0, 5], 0)
        assert s.valuation == 2
        assert s.leading_coefficient == 5

    def test_zero_series(self):
        """Test a series vanishing to its order"""
        s = LaurentSeries.zero(4)
        assert s.is_zero()
        assert s.valuation == 4
        assert s.ord() == float("inf")
        with pytest.raises(ValueError):
            s.leading_coefficient

    def test_indexing(self):
        """Test coefficients below the valuation and beyond the order"""
        s = LaurentSeries([1, 1], 1, 4)
        assert s[0] == 0
        assert s[-3] == 0
        with pytest.raises(IndexError):
            s[4]

    def test_from_dict(self):
        """Test building from exponent map"""
        s = LaurentSeries.from_dict({-2: 1, 3: Fraction(1, 2), 9: 7}, 5)
        assert s.valuation == -2
        assert s[3] == Fraction(1, 2)
        assert list(s.items()) == [(-2, 1), (3, Fraction(1, 2))]

    def test_invalid_width(self):
        """Test that a non-positive width is rejected"""
        with pytest.raises(ValueError):
            LaurentSeries([1], width=0)


class TestArithmetic:
    """Tests for series arithmetic"""

    def test_add_truncates(self):
        """Test that a sum is known to the smaller order"""
        a = LaurentSeries([1, 1, 1, 1], 0, 4)
        b = LaurentSeries([1, 2], 0, 2)
        total = a + b
        assert total.order == 2
        assert total.coefficient_list(0) == [2, 3]

    def test_add_scalar(self):
        """Test adding a constant"""
        s = LaurentSeries([1], -1, 3) + 5
        assert s[0] == 5
        assert s[-1] == 1

    def test_multiply(self):
        """Test (1 + q)(1 - q) = 1 - q^2"""
        product = LaurentSeries([1, 1], 0, 5) * LaurentSeries([1, -1], 0, 5)
        assert product.order == 5
        assert product.coefficient_list(0) == [1, 0, -1, 0, 0]

    def test_multiply_order(self):
        """Test the order of a product of series with poles"""
        a = LaurentSeries([1, 3], -2, 3)
        b = LaurentSeries([1, 1], 1, 6)
        assert (a * b).order == min(3 + 1, 6 - 2)

    def test_invert(self, geometric):
        """Test the geometric series"""
        assert geometric.order == 6
        assert geometric.coefficient_list(0) == [1] * 6

    def test_invert_with_pole(self):
        """Test inverting q + q^2"""
        inv = series_invert(LaurentSeries([1, 1], 1, 6))
        assert inv.valuation == -1
        assert inv.order == 4
        assert inv.coefficient_list(-1) == [1, -1, 1, -1, 1]

    def test_invert_non_unit(self):
        """Test that a non-unit residue leading coefficient is rejected"""
        s = LaurentSeries([Residue(2, 4), Residue(1, 4)], 0, 3)
        with pytest.raises(NonUnitLeadingCoefficient):
            series_invert(s)
        with pytest.raises(NonUnitLeadingCoefficient):
            series_invert(LaurentSeries.zero(3))

    def test_division(self):
        """Test series and scalar division"""
        s = LaurentSeries([2, 4], 0, 4)
        assert (s / 2).coefficient_list(0) == [1, 2, 0, 0]
        assert (s / s).coefficient_list(0) == [1, 0, 0, 0]
        with pytest.raises(ZeroDivisionError):
            s / 0

    def test_power(self):
        """Test positive and negative powers"""
        s = LaurentSeries([1, 1], 0, 5)
        assert (s ** 3).coefficient_list(0) == [1, 3, 3, 1, 0]
        assert (s ** -1).coefficient_list(0) == [1, -1, 1, -1, 1]

    def test_residue_coefficients(self):
        """Test arithmetic over Z/mZ"""
        s = LaurentSeries([Residue(1, 4), Residue(3, 4)], 0, 3)
        product = s * s
        assert product[1] == Residue(2, 4)
        assert product[2] == Residue(1, 4)


class TestTransformations:
    """Tests for width changes, twists and derivatives"""

    def test_rescale(self):
        """Test rewriting in q_2"""
        s = LaurentSeries([1, 1], 1, 3).rescale(2)
        assert s.width == 2
        assert s.order == 6
        assert list(s.items()) == [(2, 1), (4, 1)]

    def test_rescale_invalid(self):
        """Test that the new width must be a multiple"""
        with pytest.raises(ValueError):
            LaurentSeries([1], 0, 3, width=2).rescale(3)

    def test_contract(self):
        """Test keeping exponents divisible by the step"""
        s = LaurentSeries.from_dict({0: 1, 2: 5, 3: 7}, 5, width=2).contract(2)
        assert s.width == 1
        assert s.order == 3
        assert list(s.items()) == [(0, 1), (1, 5)]

    def test_mixed_width_sum(self):
        """Test that sums align widths to the lcm"""
        total = LaurentSeries([1], 1, 3, width=2) + LaurentSeries([1], 1, 2, width=3)
        assert total.width == 6
        assert total[2] == 1
        assert total[3] == 1

    def test_twist(self):
        """Test substituting q_4 -> zeta_4 q_4"""
        s = LaurentSeries([1, 1], 0, 3, width=4).twist(1)
        assert s[0] == 1
        assert s[1] == Cyclotomic.zeta(4)
        assert LaurentSeries([1], 0, 2, width=4).twist(4)[0] == 1

    def test_shift_and_derivative(self):
        """Test multiplying by q and applying q d/dq"""
        s = LaurentSeries([1, 2, 3], -1, 2)
        assert s.shift(2).valuation == 1
        assert s.q_derivative().coefficient_list(-1) == [-1, 0, 3]

    def test_reduce_mod(self):
        """Test reducing rational coefficients"""
        s = LaurentSeries([Fraction(1, 3), 2], 1, 3).reduce_mod(7)
        assert s[1] == Residue(5, 7)
        assert s[2] == Residue(2, 7)

    def test_reduce_mod_irrational(self):
        """Test that irrational coefficients have no residue"""
        s = LaurentSeries([Cyclotomic.zeta(3)], 0, 1, width=3)
        with pytest.raises(DenominatorNotCoprime):
            s.reduce_mod(5)

    def test_rationalize(self):
        """Test converting rational cyclotomic coefficients"""
        s = LaurentSeries([Cyclotomic.from_rational(3, Fraction(1, 2))], 0, 1, width=3)
        assert s.rationalize()[0] == Fraction(1, 2)
        assert isinstance(s.rationalize()[0], Fraction)


class TestLogExp:
    """Tests for formal logarithm and exponential"""

    def test_log(self, geometric):
        """Test log 1/(1 - q) = sum q^n / n"""
        log = geometric.log()
        assert [log[n] for n in range(1, 6)] == [Fraction(1, n) for n in range(1, 6)]
        assert log[0] == 0

    def test_exp_of_log(self, geometric):
        """Test that exp inverts log"""
        assert geometric.log().exp() == geometric

    def test_exp(self):
        """Test exp(q) = sum q^n / n!"""
        e = LaurentSeries([1], 1, 5).exp()
        assert e.coefficient_list(0) == [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)]

    def test_log_needs_unit_constant(self):
        """Test that log rejects a constant term other than 1"""
        with pytest.raises(SeriesError):
            LaurentSeries([2, 1], 0, 4).log()

    def test_exp_needs_positive_valuation(self):
        """Test that exp rejects a nonzero constant term"""
        with pytest.raises(SeriesError):
            LaurentSeries([1, 1], 0, 4).exp()


class TestEvaluate:
    """Tests for numeric evaluation"""

    def test_evaluate(self):
        """Test evaluating 1 + 2q at q = 1/2"""
        value = LaurentSeries([1, 2], 0, 2).evaluate(mpmath.mpf("0.5"))
        assert abs(value - 2) < mpmath.mpf(10) ** -12

    def test_evaluate_residue(self):
        """Test that residues have no numeric value"""
        with pytest.raises(TypeError):
            LaurentSeries([Residue(1, 3)], 0, 1).evaluate(mpmath.mpf(1))

    def test_agrees_with(self):
        """Test comparison to a common order"""
        a = LaurentSeries([1, 1, 1], 0, 3)
        b = LaurentSeries([1, 1, 5], 0, 3)
        assert a.agrees_with(b, order=2)
        assert not a.agrees_with(b)
