"""Test configuration for pytest"""
import sys
from pathlib import Path

import pytest

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from modparam.curve import EllipticCurve  # noqa: E402


@pytest.fixture
def curve_11a1():
    """Create the conductor 11 curve y^2 + y = x^3 - x^2 - 10x - 20"""
    return EllipticCurve(0, -1, 1, -10, -20, conductor=11, label="11a1")


@pytest.fixture
def curve_14a1():
    """Create 14a1: y^2 + xy + y = x^3 + 4x - 6"""
    return EllipticCurve(1, 0, 1, 4, -6, conductor=14, label="14a1")


@pytest.fixture
def curve_14a2():
    """Create 14a2, 2-isogenous to 14a1"""
    return EllipticCurve(1, 0, 1, -36, -70, conductor=14, label="14a2")


@pytest.fixture
def curve_26b1():
    """Create 26b1: y^2 + xy + y = x^3 - x^2 - 3x + 3"""
    return EllipticCurve(1, -1, 1, -3, 3, conductor=26, label="26b1")


@pytest.fixture
def curve_48a5():
    """Create 48a5: y^2 = x^3 + x^2 - 384x + 2772"""
    return EllipticCurve(0, 1, 0, -384, 2772, conductor=48, label="48a5")


@pytest.fixture
def curve_96a3():
    """Create 96a3: y^2 = x^3 + x^2 - 32x + 60"""
    return EllipticCurve(0, 1, 0, -32, 60, conductor=96, label="96a3")
