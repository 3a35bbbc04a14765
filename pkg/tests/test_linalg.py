import numpy as np
import pytest

from mdlsys import (
    IndefiniteError,
    NotHermitianError,
    hermitian_factor,
    nc_gramian,
    psd_check,
    solve_sylvester_vectorized,
    spectral_norm,
)
from mdlsys.linalg import tensor_poly_interpolate


def test_psd_identity():
    v = psd_check(np.eye(3))
    assert v.is_psd
    assert v.min_eigenvalue == pytest.approx(1.0)


def test_psd_indefinite_witness():
    v = psd_check(np.diag([1.0, -1.0]))
    assert not v.is_psd
    assert v.min_eigenvalue == pytest.approx(-1.0)
    assert abs(v.witness[1]) == pytest.approx(1.0)


def test_stated_reverse_stein_matrix_not_psd():
    M = np.array([[7 / 8, 5 / 8, 3 / 8], [5 / 8, 0, 1 / 4], [3 / 8, 1 / 4, 0]])
    assert not psd_check(M).is_psd


def test_psd_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        psd_check(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_random_products(rng):
    for _ in range(200):
        m = rng.integers(1, 9)
        X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        assert psd_check(X.conj().T @ X).is_psd


def test_factor_identity():
    S = hermitian_factor(np.eye(2))
    assert np.allclose(S.conj().T @ S, np.eye(2))


def test_factor_diagonal():
    H = np.diag([4.0, 9.0])
    S = hermitian_factor(H)
    assert np.allclose(S.conj().T @ S, H)
    # up to a left unitary the factor is diag(2, 3)
    assert np.allclose(np.sort(np.linalg.svd(S, compute_uv=False)), [2.0, 3.0])


def test_factor_random_reconstruction(rng):
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = X.conj().T @ X
    S = hermitian_factor(H)
    assert spectral_norm(S.conj().T @ S - H) <= 1e-10 * spectral_norm(H)


def test_factor_rejects_indefinite():
    with pytest.raises(IndefiniteError):
        hermitian_factor(np.diag([1.0, -1.0]))


def test_stein_solve_scalar_geometric():
    rep = solve_sylvester_vectorized([np.array([[0.5]])], np.array([[1.0]]))
    assert rep.solution[0, 0] == pytest.approx(4 / 3)
    assert rep.nullspace_dim == 0


def test_stein_solve_zero_map():
    rhs = np.array([[2.0, 1.0], [1.0, 3.0]])
    rep = solve_sylvester_vectorized(
        [np.zeros((2, 2)), np.zeros((2, 2))], rhs
    )
    assert np.allclose(rep.solution, rhs)


def test_stein_solve_singular_reported():
    # column-isometric, not strongly stable: homogeneous solutions exist
    A1 = np.array([[1.0, 0], [0, 0]])
    A2 = np.array([[0, 1.0], [0, 0]])
    rep = solve_sylvester_vectorized([A1, A2], np.zeros((2, 2)))
    assert rep.singular
    assert rep.nullspace_dim >= 1


def test_stein_solve_matches_series_gramian(rs_pair):
    rhs = rs_pair.C.conj().T @ rs_pair.C
    rep = solve_sylvester_vectorized(rs_pair.A, rhs)
    series = nc_gramian(rs_pair, tol=1e-12)
    assert series.converged
    assert spectral_norm(rep.solution - series.value) <= 1e-8


def test_stein_solve_matches_iteration_random(rng):
    from mdlsys.ensembles import random_contractive_pair

    for _ in range(5):
        pair = random_contractive_pair(rng, d=2, m=4, column_norm=0.55)
        rep = solve_sylvester_vectorized(pair.A, pair.C.conj().T @ pair.C)
        series = nc_gramian(pair, max_level=200, tol=1e-12)
        assert series.converged
        assert spectral_norm(rep.solution - series.value) <= 1e-8


def test_tensor_poly_interpolation_roundtrip():
    def f(x):
        return 1 - 2 * x[0] + 3 * x[0] * x[1] ** 2

    coeffs = tensor_poly_interpolate(f, d=2, deg=2)
    expected = np.zeros((3, 3))
    expected[0, 0] = 1
    expected[1, 0] = -2
    expected[1, 2] = 3
    assert np.abs(coeffs - expected).max() < 1e-12
