import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltbounds.errors import QuadratureNotConverged
from ltbounds.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, adaptive_quad, gk15, integrate_log
from ltbounds.search import golden_section_max, golden_section_min


def test_rule_weights_sum_to_two():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_exact_for_polynomials(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert KRONROD_WEIGHTS @ NODES**degree == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("degree", range(0, 8))
def test_gauss_exact_for_polynomials(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert GAUSS_WEIGHTS @ NODES**degree == pytest.approx(exact, abs=1e-14)


def test_gk15_single_panel():
    val, err = gk15(np.exp, 0.0, 1.0)
    assert val == pytest.approx(math.e - 1, rel=1e-15)
    assert err < 1e-12


@pytest.mark.parametrize("f, a, b, exact", [
    (np.sin, 0.0, math.pi, 2.0),
    (lambda x: 1.0 / (1.0 + x * x), -50.0, 50.0, 2 * math.atan(50.0)),
    (lambda x: np.sqrt(np.abs(x)), 0.0, 1.0, 2.0 / 3.0),
    (lambda x: np.exp(-x * x), -10.0, 10.0, math.sqrt(math.pi)),
])
def test_adaptive_quad_known_integrals(f, a, b, exact):
    val, err = adaptive_quad(f, a, b)
    assert val == pytest.approx(exact, abs=1e-10)
    assert err <= 1e-10 or err <= 1e-13 * abs(val)


def test_adaptive_quad_reversed_interval():
    assert adaptive_quad(np.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0), rel=1e-14)


def test_adaptive_quad_empty_interval():
    assert adaptive_quad(np.cos, 2.0, 2.0) == (0.0, 0.0)


def test_adaptive_quad_budget():
    with pytest.raises(QuadratureNotConverged):
        adaptive_quad(lambda x: np.sign(np.sin(1e4 * x)), 0.0, 1.0, limit=20)


def test_adaptive_quad_rejects_infinite():
    with pytest.raises(ValueError):
        adaptive_quad(np.cos, 0.0, math.inf)


def test_integrate_log_extends_misplaced_window():
    # window far off the mass of a Gaussian centered at 3
    val, _ = integrate_log(lambda s: np.exp(-((s - 3.0) ** 2)), -1.0, 1.0)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_integrate_log_nondecaying():
    with pytest.raises(QuadratureNotConverged):
        integrate_log(lambda s: np.ones_like(s), -1.0, 1.0, max_extensions=5)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-2.5, max_value=2.5), st.floats(min_value=0.05, max_value=3.0))
def test_integrate_log_gaussian_property(center, width):
    # mass anywhere within one window width of the seed window is found
    val, _ = integrate_log(lambda s: np.exp(-(((s - center) / width) ** 2)), -1.0, 1.0)
    assert val == pytest.approx(width * math.sqrt(math.pi), rel=1e-11)


def test_golden_section_parabola():
    x, fx = golden_section_min(lambda x: (x - 1.234) ** 2 + 5.0, -10, 10, rtol=1e-12)
    # a minimizer is only resolvable to about sqrt(machine eps) from function values
    assert x == pytest.approx(1.234, abs=1e-7)
    assert fx == pytest.approx(5.0, abs=1e-15)


def test_golden_section_swapped_bracket():
    x, _ = golden_section_min(lambda x: abs(x + 2.0), 3.0, -7.0, rtol=1e-12)
    assert x == pytest.approx(-2.0, abs=1e-10)


def test_golden_section_max():
    x, fx = golden_section_max(lambda x: math.sin(x), 0.0, math.pi, rtol=1e-12)
    assert x == pytest.approx(math.pi / 2, abs=1e-6)
    assert fx == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=0.1, max_value=10))
def test_golden_section_property(center, scale):
    x, _ = golden_section_min(lambda x: scale * (x - center) ** 2, -100, 100, rtol=1e-12)
    assert x == pytest.approx(center, abs=1e-7 * max(1, abs(center)))
