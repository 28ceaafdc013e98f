import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from scipy.linalg import eigh_tridiagonal

from ltbounds import radial_spectral as rs
from ltbounds.constants import airy_first_zero
from ltbounds.errors import DomainTooSmall, NotConverged
from ltbounds.radial_spectral import (
    SpectralProblem,
    choose_t_max,
    discrete_ground_state,
    e_d,
    fd_matrix,
    ground_state_energy,
    is_nodeless,
    liouville_transform,
    scaling_check,
)
from ltbounds.rd_solver import rd_from_ed
from ltbounds.tridiagonal import rayleigh_quotient


@pytest.mark.parametrize("d, t, expected", [
    (1, 2.0, 2.0),
    (2, 2.0, 3 / 16 + 4.0),
    (3, 2.0, 2 / 4 + 8.0),
])
def test_liouville_examples(d, t, expected):
    assert liouville_transform(d)(t) == pytest.approx(expected, rel=1e-15)


def test_liouville_inverse_square_coefficients():
    assert liouville_transform(1).inverse_square == 0.0
    assert liouville_transform(2).inverse_square == 0.75
    assert liouville_transform(3).inverse_square == 2.0


@pytest.mark.parametrize("d, lam", [(0.5, 1.0), (2, 0.0), (2, -1.0)])
def test_liouville_rejects(d, lam):
    with pytest.raises(ValueError):
        liouville_transform(d, lam)


@pytest.mark.parametrize("kwargs", [
    {"d": 0.5}, {"d": 2, "lam": 0.0}, {"d": 2, "n_grid": 50}, {"d": 2, "n_grid": 300.5}, {"d": 2, "t_max": -1.0},
])
def test_problem_validation(kwargs):
    with pytest.raises(ValueError):
        SpectralProblem(**kwargs)


def test_e1_is_minus_airy_zero():
    assert e_d(1) == pytest.approx(-airy_first_zero(), abs=1e-8)
    assert e_d(1) == pytest.approx(2.33810741, abs=1e-8)


def test_e2_is_four():
    res = ground_state_energy(SpectralProblem(2))
    assert abs(res.energy - 4.0) < 1e-7
    assert res.converged
    assert res.error_estimate < 1e-7


def test_e3_matches_rounded_r3():
    e3 = e_d(3)
    # inverting R_3 ~ 0.331 through the closed relation
    e_from_r = (5 / 2) * (2 * 0.331 / 3) ** (-3 / 5)
    assert e3 == pytest.approx(e_from_r, rel=2e-3)
    assert rd_from_ed(3, e3) == pytest.approx(0.331, abs=1e-3)


@pytest.mark.parametrize("d", [1, 2])
def test_eigenfunction_matches_exact(d):
    res = ground_state_energy(SpectralProblem(d))
    t, u = res.eigenfunction_samples.T
    if d == 1:
        exact = special.airy(t + airy_first_zero())[0]
    else:
        exact = t**1.5 * np.exp(-t * t / 2)
    h = t[1] - t[0]
    exact /= math.sqrt(np.sum(exact**2) * h)
    assert np.max(np.abs(u - exact)) < 1e-5


def test_eigenfunction_samples_read_only():
    res = ground_state_energy(SpectralProblem(2))
    with pytest.raises(ValueError):
        res.eigenfunction_samples[0, 0] = 1.0


@pytest.mark.parametrize("d", range(1, 7))
def test_nodeless(d):
    assert is_nodeless(ground_state_energy(SpectralProblem(d)))


def test_energies_increase_with_d():
    values = [e_d(d) for d in range(1, 7)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("d, lam, tol", [(2, 16.0, 1e-6), (3, 0.1, 1e-5)])
def test_scaling_examples(d, lam, tol):
    assert scaling_check(d, lam) < tol


def test_scaling_lambda_one_is_zero():
    assert scaling_check(1, 1.0) == 0.0


def test_e2_at_lambda_16():
    assert e_d(2, 16.0) == pytest.approx(16.0, abs=1e-5)


@pytest.mark.parametrize("lam", [1e-3, 1e3])
def test_scaling_check_range(lam):
    with pytest.raises(ValueError):
        scaling_check(2, lam)


@settings(max_examples=8, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.floats(min_value=0.05, max_value=50.0))
def test_scaling_law_property(d, lam):
    assert scaling_check(d, lam) < 1e-5


@pytest.mark.parametrize("d", [1, 2, 3])
def test_mesh_convergence_order(d):
    # differences between successive grid levels shrink by about 4 per doubling
    e1, e2, e4 = ground_state_energy(SpectralProblem(d)).level_energies
    assert (e2 - e1) / (e4 - e2) >= 3.5


@pytest.mark.parametrize("d", [1, 2, 3])
def test_fd_eigenvalues_approach_from_below(d):
    e1, e2, e4 = ground_state_energy(SpectralProblem(d)).level_energies
    assert e1 < e2 < e4 < e_d(d) + 1e-9


@pytest.mark.parametrize("d", [1, 2, 3])
def test_rayleigh_quotient_consistency(d):
    pot = liouville_transform(d)
    t_max = ground_state_energy(SpectralProblem(d)).t_max
    gs = discrete_ground_state(pot, t_max, 2000)
    assert rayleigh_quotient(gs.diag, gs.off, gs.u) == pytest.approx(gs.energy, rel=1e-9)


def test_discrete_ground_state_against_scipy():
    pot = liouville_transform(3)
    _, diag, off, _ = fd_matrix(pot, 8.0, 1500)
    ref = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 0))[0]
    assert discrete_ground_state(pot, 8.0, 1500).energy == pytest.approx(ref, rel=1e-11)


def test_discrete_eigenvector_normalized_and_positive():
    gs = discrete_ground_state(liouville_transform(2), 9.0, 1000)
    assert np.sum(gs.u**2) * gs.h == pytest.approx(1.0, rel=1e-12)
    assert gs.u.min() > -1e-12


def test_domain_too_small():
    with pytest.raises(DomainTooSmall):
        ground_state_energy(SpectralProblem(2, t_max=2.5))


def test_explicit_t_max():
    res = ground_state_energy(SpectralProblem(2, t_max=9.0))
    assert res.t_max == 9.0
    assert res.energy == pytest.approx(4.0, abs=1e-6)


def test_choose_t_max_clears_turning_point():
    pot = liouville_transform(4)
    t = choose_t_max(pot, 9.0)
    assert pot(t) >= 9.0 + 40.0


@pytest.fixture
def unreachable_tolerance(monkeypatch):
    monkeypatch.setattr(rs, "CONVERGED_TOL", 1e-30)
    rs._solve.cache_clear()
    yield
    rs._solve.cache_clear()


def test_unconverged_result_warns(unreachable_tolerance, caplog):
    res = ground_state_energy(SpectralProblem(3, n_grid=400))
    assert not res.converged
    assert "error estimate" in caplog.text


def test_strict_mode_raises_when_unconverged(unreachable_tolerance):
    with pytest.raises(NotConverged):
        ground_state_energy(SpectralProblem(3, n_grid=400), strict=True)


def test_result_to_dict():
    out = ground_state_energy(SpectralProblem(1)).to_dict()
    assert set(out) == {"energy", "error_estimate", "converged", "t_max", "level_energies"}
    assert len(out["level_energies"]) == 3



def test_exact_profile_rayleigh_quotient_d2():
    # the sampled exact ground state is a trial vector for the discrete operator, so its
    # Rayleigh quotient bounds the eigenvalue of that same matrix (the finest level) from above
    res = ground_state_energy(SpectralProblem(2))
    n = 4 * 2000
    t, diag, off, _ = fd_matrix(liouville_transform(2), res.t_max, n)
    rq = rayleigh_quotient(diag, off, t**1.5 * np.exp(-t * t / 2))
    assert rq >= res.level_energies[-1] - 1e-7
    assert rq == pytest.approx(4.0, abs=5e-6)


def test_non_integer_dimension():
    # the internals accept real d >= 1; 2.5 lies between the integer neighbours
    e = e_d(2.5)
    assert e_d(2) < e < e_d(3)
    assert is_nodeless(ground_state_energy(SpectralProblem(2.5)))
