import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import eigh_tridiagonal

from ltbounds.tridiagonal import (
    bisect_eigenvalue,
    gershgorin_bounds,
    inverse_iteration,
    rayleigh_quotient,
    sturm_count,
    tridiag_matvec,
)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False)


@st.composite
def tridiagonals(draw, max_n=30):
    n = draw(st.integers(min_value=2, max_value=max_n))
    diag = draw(arrays(float, n, elements=finite))
    off = draw(arrays(float, n - 1, elements=finite))
    return diag, off


def laplacian(n):
    return np.full(n, 2.0), np.full(n - 1, -1.0)


@settings(max_examples=100, deadline=None)
@given(tridiagonals(), finite)
def test_sturm_count_matches_eigvalsh(mat, x):
    diag, off = mat
    w = eigh_tridiagonal(diag, off, eigvals_only=True)
    # skip shifts within rounding distance of an eigenvalue
    if np.min(np.abs(w - x)) < 1e-8 * (1 + np.max(np.abs(w))):
        return
    assert sturm_count(diag, off, x) == int(np.sum(w < x))


@settings(max_examples=60, deadline=None)
@given(tridiagonals(), st.data())
def test_bisect_every_eigenvalue(mat, data):
    diag, off = mat
    w = eigh_tridiagonal(diag, off, eigvals_only=True)
    k = data.draw(st.integers(min_value=0, max_value=diag.size - 1))
    value, (lo, hi) = bisect_eigenvalue(diag, off, k)
    scale = 1 + np.max(np.abs(w))
    assert value == pytest.approx(w[k], abs=1e-12 * scale)
    assert lo <= w[k] + 1e-12 * scale and w[k] - 1e-12 * scale <= hi


def test_laplacian_eigenvalues_closed_form():
    n = 50
    diag, off = laplacian(n)
    for k in (0, 1, 7, n - 1):
        exact = 2 - 2 * np.cos((k + 1) * np.pi / (n + 1))
        assert bisect_eigenvalue(diag, off, k)[0] == pytest.approx(exact, abs=1e-14)


def test_bisect_widens_bad_bracket():
    diag, off = laplacian(20)
    exact = 2 - 2 * np.cos(np.pi / 21)
    value, _ = bisect_eigenvalue(diag, off, 0, lo=1.0, hi=1.5)
    assert value == pytest.approx(exact, abs=1e-14)


def test_gershgorin_contains_spectrum():
    rng = np.random.default_rng(3)
    diag, off = rng.normal(size=40), rng.normal(size=39)
    lo, hi = gershgorin_bounds(diag, off)
    w = eigh_tridiagonal(diag, off, eigvals_only=True)
    assert lo <= w.min() and w.max() <= hi


def test_inverse_iteration_eigenvector():
    n = 200
    diag, off = laplacian(n)
    value, (lo, _) = bisect_eigenvalue(diag, off, 0)
    v = inverse_iteration(diag, off, lo)
    exact = np.sin(np.pi * np.arange(1, n + 1) / (n + 1))
    exact /= np.linalg.norm(exact)
    assert abs(abs(v @ exact) - 1) < 1e-12
    assert rayleigh_quotient(diag, off, v) == pytest.approx(value, abs=1e-13)


def test_inverse_iteration_exact_shift():
    # shift equal to an eigenvalue of a diagonal matrix makes the solve singular
    diag = np.array([1.0, 2.0, 3.0])
    off = np.zeros(2)
    v = inverse_iteration(diag, off, 1.0)
    assert abs(v[0]) == pytest.approx(1.0)


def test_matvec_against_dense():
    rng = np.random.default_rng(0)
    diag, off = rng.normal(size=6), rng.normal(size=5)
    dense = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    v = rng.normal(size=6)
    np.testing.assert_allclose(tridiag_matvec(diag, off, v), dense @ v, rtol=1e-14)
