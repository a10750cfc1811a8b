import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmode.quadrature import (GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureError,
                               integrate_panels)


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(NODES, -NODES[::-1], atol=0)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_polynomial_exactness(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert KRONROD_WEIGHTS @ NODES**deg == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 14))
def test_gauss_polynomial_exactness(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert GAUSS_WEIGHTS @ NODES**deg == pytest.approx(exact, abs=1e-14)


def test_oscillatory_complex_exponential():
    w = 200.0
    r = integrate_panels(lambda x: np.exp(1j * w * x - 0.1 * x), 0.0, 30.0, max_width=0.1,
                         atol=1e-12)
    exact = (np.exp((1j * w - 0.1) * 30.0) - 1) / (1j * w - 0.1)
    assert abs(r.value - exact) < 1e-11


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_reversed_interval(a, length):
    f = lambda x: np.cos(x) + 1j * x**2
    fwd = integrate_panels(f, a, a + length, max_width=0.5).value
    back = integrate_panels(f, a + length, a, max_width=0.5).value
    assert back == pytest.approx(-fwd, abs=1e-12)


def test_non_finite_raises():
    with pytest.raises(QuadratureError):
        integrate_panels(lambda x: np.where(x > 0.3, np.nan, 1.0), 0, 1, max_width=0.1)


def test_budget_exhaustion_raises():
    with pytest.raises(QuadratureError):
        integrate_panels(lambda x: np.abs(x - 0.3) ** -0.9, 0, 1, max_width=0.5, atol=1e-14,
                         max_panels=200)
