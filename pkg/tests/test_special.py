import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gainlearn.errors import DomainError
from gainlearn.special import digamma, polygamma

mpmath.mp.dps = 40


def test_digamma_at_one_is_minus_euler_gamma():
    assert_allclose(digamma(1.0), -0.5772156649015329, rtol=0, atol=1e-15)


@pytest.mark.parametrize("x", [0.5, 1.0, 7.25])
def test_digamma_recurrence(x):
    assert_allclose(digamma(x + 1.0) - digamma(x), 1.0 / x, rtol=0, atol=1e-13)


def test_trigamma_at_one():
    assert_allclose(polygamma(1, 1.0), math.pi**2 / 6, rtol=0, atol=1e-12)


def test_polygamma_zero_is_digamma():
    assert polygamma(0, 3.3) == digamma(3.3)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("x", [1e-3, 0.02, 0.5, 1.0, 2.4, 11.99, 12.0, 37.5, 1e4, 1e8])
def test_against_mpmath(k, x):
    ref = float(mpmath.polygamma(k, x))
    # absolute error 1e-12, relative for values larger than one
    assert abs(polygamma(k, x) - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 3), st.floats(1e-3, 1e6))
def test_property_against_mpmath(k, x):
    ref = float(mpmath.polygamma(k, x))
    assert abs(polygamma(k, x) - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_domain(x):
    with pytest.raises(DomainError):
        digamma(x)


def test_order_out_of_range():
    with pytest.raises(DomainError):
        polygamma(4, 1.0)
