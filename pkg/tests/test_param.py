"""Tests for the expansion of X and Y at the cusps of X_0(N)"""

from fractions import Fraction

import mpmath
import pytest

from modparam.curve import AffinePoint, EllipticCurve, newform_coefficients
from modparam.gamma0 import IDENTITY, S_MATRIX, cusps
from modparam.param import (
    CuspExpansion,
    ModularParametrization,
    ReconstructionFailed,
    RecursionCase,
    act_coset,
    atkin_lehner_eigenvalue,
    classify_constant,
    cusp_constant,
    expand_cusp,
    expand_infinity,
    numeric_slash_terms,
    slash_field,
    slash_f_at_cusp,
    slash_route,
)
from modparam.periods import period_lattice

BITS = 128


@pytest.fixture
def param_11a1(curve_11a1):
    return ModularParametrization(curve_11a1, n_max=30, bits=BITS)


@pytest.fixture
def infinity_11a1(param_11a1):
    return param_11a1.at_infinity()


def close(a, b, digits=20):
    return abs(a - b) < mpmath.mpf(10) ** (-digits)


class TestSlash:
    """Tests for the slash expansion at each cusp"""

    def test_eigenvalue(self, curve_11a1):
        """Test the W_11 sign of the level 11 newform"""
        f = newform_coefficients(curve_11a1, 12)
        assert atkin_lehner_eigenvalue(f, 11) == -1

    def test_eigenvalue_square(self, curve_48a5):
        """Test the W_16 and W_48 signs read off the Eichler integral at level 48"""
        f = newform_coefficients(curve_48a5, 400)
        w3 = atkin_lehner_eigenvalue(f, 3)
        w16 = atkin_lehner_eigenvalue(f, 16)
        w48 = atkin_lehner_eigenvalue(f, 48)
        assert w3 == -f[3]
        assert w16 in (1, -1)
        assert w48 == w3 * w16
        # 48a has rank 0, so the functional equation sign -w_48 is +1
        assert w48 == -1

    def test_eigenvalue_square_too_few(self, curve_48a5):
        """Test that a short newform cannot fix the W_16 sign"""
        f = newform_coefficients(curve_48a5, 20)
        with pytest.raises(ReconstructionFailed):
            atkin_lehner_eigenvalue(f, 16)

    def test_infinity(self, curve_11a1):
        """Test that the slash expansion at infinity is m f"""
        f = newform_coefficients(curve_11a1, 10)
        data = slash_f_at_cusp(curve_11a1, f, cusps(11)[0], 8)
        assert data.route == "infinity"
        assert data.slash.coefficient_list(1) == [1, -2, -1, 2, 1, 2, -2]

    def test_atkin_lehner(self, curve_11a1):
        """Test c_n = lambda_m m a_n / w at cusp 0"""
        f = newform_coefficients(curve_11a1, 10)
        data = slash_f_at_cusp(curve_11a1, f, cusps(11)[1], 8)
        assert data.route == "atkin-lehner"
        assert data.eigenvalue == -1
        assert data.width == 11
        assert data.c(1) == Fraction(-1, 11)
        assert data.c(2) == Fraction(2, 11)

    def test_too_few(self, curve_11a1):
        """Test that the newform must be long enough"""
        f = newform_coefficients(curve_11a1, 5)
        with pytest.raises(ValueError):
            slash_f_at_cusp(curve_11a1, f, cusps(11)[0], 8)


class TestInfinity:
    """Tests for the pole-case recursion at infinity"""

    def test_x_coefficients(self, infinity_11a1):
        """Test X = q^-2 + 2 q^-1 + 4 + 5 q + ..."""
        assert infinity_11a1.x.valuation == -2
        assert infinity_11a1.x.coefficient_list(-2, 2) == [1, 2, 4, 5]
        assert infinity_11a1.case == RecursionCase.POLE

    def test_y_leading(self, infinity_11a1):
        """Test Y = -q^-3 + ..."""
        assert infinity_11a1.y.valuation == -3
        assert infinity_11a1.y[-3] == -1

    def test_residuals(self, infinity_11a1):
        """Test both defining relations to the working order"""
        assert infinity_11a1.weierstrass_residual().is_zero()
        assert infinity_11a1.differential_residual().is_zero()

    def test_integral(self, infinity_11a1):
        """Test that the coefficients at infinity are integers"""
        assert all(c.denominator == 1 for _, c in infinity_11a1.x.items())
        assert all(c.denominator == 1 for _, c in infinity_11a1.y.items())

    def test_negated(self, infinity_11a1, curve_11a1):
        """Test lambda = -1 gives the negated point"""
        negated = infinity_11a1.negated()
        assert negated.lam == -1
        assert negated.x == infinity_11a1.x
        assert negated.weierstrass_residual().is_zero()
        assert negated.differential_residual().is_zero()

    def test_expand_infinity(self, curve_14a1):
        """Test the standalone expansion at infinity"""
        f = newform_coefficients(curve_14a1, 30)
        expansion = expand_infinity(curve_14a1, f, 20)
        assert isinstance(expansion, CuspExpansion)
        assert expansion.x[-2] == 1
        assert expansion.weierstrass_residual().is_zero()

    def test_expand_infinity_invalid(self, curve_14a1):
        """Test that n_max must be positive"""
        f = newform_coefficients(curve_14a1, 10)
        with pytest.raises(ValueError):
            expand_infinity(curve_14a1, f, 0)

    def test_lambda_two(self, curve_11a1):
        """Test the expansion of [2] composed with the parametrization"""
        param = ModularParametrization(curve_11a1, n_max=16, bits=BITS, lam=2)
        expansion = param.at_infinity()
        assert expansion.weierstrass_residual().is_zero()
        assert expansion.differential_residual().is_zero()


class TestFiniteCusps:
    """Tests for the constant and the recursion at finite cusps"""

    def test_cusp_zero(self, param_11a1, curve_11a1):
        """Test that cusp 0 of 11a1 lands on a point with x = 16"""
        expansion = param_11a1.expansion(cusps(11)[1])
        assert expansion.case == RecursionCase.GENERIC
        assert expansion.x[0] == 16
        assert curve_11a1.order_of(expansion.constant_point) == 5
        assert expansion.weierstrass_residual().is_zero()
        assert expansion.differential_residual().is_zero()

    def test_constant(self, curve_11a1):
        """Test that the cusp constant is a torsion value"""
        f = newform_coefficients(curve_11a1, 200)
        data = slash_f_at_cusp(curve_11a1, f, cusps(11)[1], 20)
        lattice = period_lattice(curve_11a1, BITS)
        with mpmath.workprec(BITS):
            kappa = cusp_constant(f, data, BITS)
            s, t = lattice.rational_coordinates(kappa)
        assert (5 * s).denominator == 1
        assert (5 * t).denominator == 1

    def test_classify(self, curve_11a1):
        """Test lattice points and torsion values"""
        lattice = period_lattice(curve_11a1, BITS)
        with mpmath.workprec(BITS):
            point, coords = classify_constant(curve_11a1, lattice, lattice.omega1, 1)
            assert point is None
            assert coords == (1, 0)
            point, coords = classify_constant(curve_11a1, lattice, 3 * lattice.omega1 / 5, 1)
        assert point == AffinePoint(Fraction(5), Fraction(5))
        assert coords == (Fraction(3, 5), 0)

    def test_lambda_zero(self, curve_11a1):
        """Test that lambda must be nonzero"""
        f = newform_coefficients(curve_11a1, 200)
        with pytest.raises(ValueError):
            expand_cusp(curve_11a1, f, cusps(11)[1], 10, lam=0)

    @pytest.mark.parametrize("fixture", ["curve_14a1", "curve_26b1"])
    def test_all_cusps(self, fixture, request):
        """Test both relations at every cusp of a squarefree level"""
        curve = request.getfixturevalue(fixture)
        param = ModularParametrization(curve, n_max=12, bits=BITS)
        expansions = param.expansions()
        assert len(expansions) == len(cusps(curve.conductor))
        for expansion in expansions:
            assert expansion.weierstrass_residual().is_zero()
            assert expansion.differential_residual().is_zero()
            assert expansion.case in (
                RecursionCase.POLE,
                RecursionCase.GENERIC,
                RecursionCase.TWO_TORSION,
            )
        assert expansions[0].case == RecursionCase.POLE

    def test_isomorphic_cusps(self, curve_14a1):
        """Test that only infinity maps to the origin when X_0(14) is the curve"""
        param = ModularParametrization(curve_14a1, n_max=8, bits=BITS)
        cases = [e.case for e in param.expansions()]
        assert cases.count(RecursionCase.POLE) == 1


class TestNonSquarefreeLevel:
    """Tests for the cusps of X_0(48), where 2^4 divides the level"""

    def test_routes(self):
        """Test which cusps are Atkin-Lehner images of infinity"""
        routes = {str(c): slash_route(c) for c in cusps(48)}
        assert routes["oo"] == "infinity"
        assert routes["0"] == "atkin-lehner"
        assert routes["1/3"] == "atkin-lehner"
        assert routes["1/16"] == "atkin-lehner"
        assert routes["1/24"] == "numeric"
        assert sum(route == "numeric" for route in routes.values()) == 8

    def test_sizing(self, curve_48a5):
        """Test the newform covers the lowest moved sample point"""
        param = ModularParametrization(curve_48a5, n_max=8, bits=BITS)
        for cusp in cusps(48):
            if slash_route(cusp) == "numeric":
                assert param.terms_for(cusp) > numeric_slash_terms(cusp, 12, BITS)

    def test_slash_field(self):
        """Test the cyclotomic field of the slash coefficients at cusps a/c"""
        fields = {c.denominator: slash_field(c) for c in cusps(48)}
        assert fields[4] == 12
        assert fields[24] == 2
        assert fields[2] == 24
        assert fields[48] == 1
        for cusp in cusps(48):
            assert fields[cusp.denominator] % cusp.width == 0

    def test_numeric_cusp(self, curve_48a5):
        """Test both relations at a cusp reached only numerically"""
        param = ModularParametrization(curve_48a5, n_max=8, bits=BITS)
        cusp = next(c for c in cusps(48) if c.denominator == 4)
        expansion = param.expansion(cusp)
        assert expansion.data.route == "numeric"
        assert expansion.width == 3
        assert expansion.weierstrass_residual().is_zero()
        assert expansion.differential_residual().is_zero()

    def test_square_atkin_lehner_cusp(self, curve_48a5):
        """Test the W_16 cusp 1/3 once its sign is known"""
        param = ModularParametrization(curve_48a5, n_max=8, bits=BITS)
        cusp = next(c for c in cusps(48) if c.denominator == 3)
        expansion = param.expansion(cusp)
        assert expansion.data.route == "atkin-lehner"
        assert expansion.data.eigenvalue in (1, -1)
        assert expansion.width == 16
        assert expansion.weierstrass_residual().is_zero()
        assert expansion.differential_residual().is_zero()

    @pytest.mark.slow
    def test_all_cusps(self, curve_48a5):
        """Test that every cusp of X_0(48) expands"""
        param = ModularParametrization(curve_48a5, n_max=12, bits=BITS)
        expansions = param.expansions()
        assert sum(e.width for e in expansions) == 96
        for expansion in expansions:
            assert expansion.weierstrass_residual().is_zero()
            assert expansion.differential_residual().is_zero()


class TestModularParametrization:
    """Tests for the cached parametrization object"""

    def test_needs_conductor(self):
        """Test that a curve without conductor is rejected"""
        with pytest.raises(ValueError):
            ModularParametrization(EllipticCurve(0, -1, 1, -10, -20))

    def test_coset_identity(self, param_11a1, infinity_11a1):
        """Test that the identity coset is the expansion at infinity"""
        x, y, width = param_11a1.coset_expansion(IDENTITY)
        assert width == 1
        assert x == infinity_11a1.x
        assert y == infinity_11a1.y

    def test_coset_twist(self, param_11a1):
        """Test that translated cosets twist the q_w coefficients"""
        x, _, width = param_11a1.coset_expansion((0, -1, 1, 3))
        assert width == 11
        assert x[0] == 16

    def test_act_coset(self, param_11a1):
        """Test that a full turn of q_w leaves the cusp expansion unchanged"""
        expansion = param_11a1.expansion(cusps(11)[1])
        assert act_coset(expansion, 11) == (expansion.x, expansion.y)
        x, y = act_coset(expansion, 3)
        assert x.valuation == expansion.x.valuation
        assert x[0] == 16
        assert y.width == 11

    def test_eichler_series(self, param_11a1):
        """Test epsilon = q - q^2 - q^3/3 + ..."""
        series = param_11a1.eichler_series()
        assert series.coefficient_list(1, 4) == [1, -1, Fraction(-1, 3)]

    def test_numeric_agrees(self, param_11a1, infinity_11a1):
        """Test the q-series against the point attached to epsilon"""
        with mpmath.workprec(BITS):
            z = mpmath.mpc("0.2", "1")
            x, y = param_11a1.evaluate_point(z)
            sx, sy = infinity_11a1.evaluate(z)
            assert close(x, sx)
            assert close(y, sy)

    def test_evaluate_coset(self, param_11a1):
        """Test X(S i) = X(i) through the Atkin-Lehner route"""
        with mpmath.workprec(BITS):
            z = mpmath.mpc(0, 1)
            x, y = param_11a1.evaluate_coset(S_MATRIX, z)
            px, py = param_11a1.evaluate_point(z)
            assert close(x, px)
            assert close(y, py)

    def test_slash_coefficients(self, param_11a1):
        """Test c_n = -a_n / 11 at cusp 0 in double precision"""
        coefficients = param_11a1.slash_coefficients(cusps(11)[1], 4)
        assert coefficients == pytest.approx([-1 / 11, 2 / 11, 1 / 11, -2 / 11])

    def test_to_dict(self, infinity_11a1):
        """Test the serialized expansion"""
        data = infinity_11a1.to_dict()
        assert data["label"] == "11a1"
        assert data["cusp"] == "oo"
        assert data["width"] == 1
        assert data["X"][0] == [-2, "1"]
