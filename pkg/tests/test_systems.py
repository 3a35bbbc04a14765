import numpy as np
import pytest

from mdlsys import (
    CommutativityError,
    OutputPair,
    SystemRealization,
    abelianize,
    comm_transfer_eval,
    det_pencil_coeffs,
    lattice_simulate,
    nc_simulate,
    nc_transfer_coeff,
    project_trajectory,
    tuple_power_multi,
    tuple_power_word,
    words_up_to,
)
from mdlsys.ensembles import random_commuting_tuple, random_realization
from mdlsys.linalg import taylor_coeffs_fft
from mdlsys.registry import A_OBS_DET_COEFFS
from mdlsys.systems import project_input


def test_power_empty_word(rng):
    A = (rng.standard_normal((3, 3)),)
    assert np.allclose(tuple_power_word(A, ()), np.eye(3))


def test_power_word_a_stable(astable_pair):
    got = tuple_power_word(astable_pair.A, (1, 2))
    assert np.allclose(got, np.array([[2, 0, 0], [0, 0, 0], [0, 0, -2]]))


def test_power_word_triple_product(rng):
    A = tuple(rng.standard_normal((4, 4)) for _ in range(2))
    assert np.allclose(tuple_power_word(A, (1, 2, 1)), A[0] @ A[1] @ A[0])


def test_power_multi_basics():
    A = (np.array([[2.0]]),)
    assert tuple_power_multi(A, (0,))[0, 0] == 1
    assert tuple_power_multi(A, (3,))[0, 0] == 8


def test_power_multi_diagonal(rng):
    D1 = np.diag(rng.standard_normal(3))
    D2 = np.diag(rng.standard_normal(3))
    got = tuple_power_multi((D1, D2), (1, 2))
    assert np.allclose(np.diag(got), np.diag(D1) * np.diag(D2) ** 2)


def test_power_multi_rejects_noncommuting(astable_pair):
    with pytest.raises(CommutativityError):
        tuple_power_multi(astable_pair.A, (1, 1))


def test_power_word_matches_multi_for_commuting(rng):
    A = random_commuting_tuple(rng, d=2, m=4, column_norm=0.8)
    for v in words_up_to(2, 4):
        diff = tuple_power_word(A, v) - tuple_power_multi(A, abelianize(v, 2))
        assert np.abs(diff).max() <= 1e-12


def test_nc_simulate_zero_input_outputs(rng):
    sys_ = random_realization(rng, d=2, m=3, p=2, q=1)
    x0 = rng.standard_normal(3)
    traj = nc_simulate(sys_, x0, None, depth=4)
    for v in words_up_to(2, 4):
        want = sys_.pair.C @ tuple_power_word(sys_.pair.A, v) @ x0
        assert np.allclose(traj.y[v], want)


def test_nc_simulate_a_obs_word_output(aobs_pair):
    sys_ = SystemRealization(pair=aobs_pair)
    e1 = np.zeros(4)
    e1[0] = 1.0
    traj = nc_simulate(sys_, e1, None, depth=2)
    assert traj.y[(1, 2)][0] == pytest.approx(-1 / 128, abs=1e-15)


def test_nc_simulate_degenerate_system(rng):
    m, p, q = 3, 2, 2
    C = rng.standard_normal((p, m))
    D = rng.standard_normal((p, q))
    pair = OutputPair(C=C, A=(np.zeros((m, m)), np.zeros((m, m))))
    sys_ = SystemRealization(pair=pair, B=(np.zeros((m, q)), np.zeros((m, q))), D=D)
    x0 = rng.standard_normal(m)
    u = {(): rng.standard_normal(q), (2, 1): rng.standard_normal(q)}
    traj = nc_simulate(sys_, x0, u, depth=3)
    assert np.allclose(traj.y[()], C @ x0 + D @ u[()])
    assert np.allclose(traj.y[(2, 1)], D @ u[(2, 1)])
    assert np.allclose(traj.y[(1, 1, 1)], 0)


def test_impulse_response_matches_transfer_coeffs(rng):
    sys_ = random_realization(rng, d=2, m=3, p=2, q=2)
    u0 = rng.standard_normal(2)
    traj = nc_simulate(sys_, np.zeros(3), {(): u0}, depth=4)
    for v in words_up_to(2, 4):
        if v == ():
            want = sys_.D @ u0
        else:
            want = nc_transfer_coeff(sys_, v) @ u0
        assert np.allclose(traj.y[v], want, atol=1e-12)


def test_transfer_coeff_basics(rng):
    sys_ = random_realization(rng, d=2, m=3, p=2, q=2)
    assert np.allclose(nc_transfer_coeff(sys_, ()), sys_.D)
    assert np.allclose(nc_transfer_coeff(sys_, (1,)), sys_.pair.C @ sys_.B[0])
    assert np.allclose(nc_transfer_coeff(sys_, (2,)), sys_.pair.C @ sys_.B[1])


def test_lattice_simulate_classical(rng):
    A = 0.5 * rng.standard_normal((3, 3))
    C = rng.standard_normal((2, 3))
    sys_ = SystemRealization(pair=OutputPair(C=C, A=(A,)))
    x0 = rng.standard_normal(3)
    traj = lattice_simulate(sys_, x0, None, depth=5)
    for n in range(6):
        assert np.allclose(traj.x[(n,)], np.linalg.matrix_power(A, n) @ x0)


def test_lattice_simulate_pure_input(rng):
    m, q = 3, 2
    B = tuple(rng.standard_normal((m, q)) for _ in range(2))
    pair = OutputPair(C=np.eye(m), A=(np.zeros((m, m)), np.zeros((m, m))))
    sys_ = SystemRealization(pair=pair, B=B)
    u = {(0, 0): rng.standard_normal(q), (1, 0): rng.standard_normal(q)}
    traj = lattice_simulate(sys_, np.zeros(m), u, depth=3)
    assert np.allclose(traj.x[(1, 0)], B[0] @ u[(0, 0)])
    assert np.allclose(traj.x[(0, 1)], B[1] @ u[(0, 0)])
    assert np.allclose(traj.x[(2, 0)], B[0] @ u[(1, 0)])


def test_projection_depth_zero(rng):
    sys_ = random_realization(rng, d=2, m=2, p=1, q=1)
    x0 = rng.standard_normal(2)
    traj = nc_simulate(sys_, x0, None, depth=0)
    lat = project_trajectory(traj, 2)
    assert np.allclose(lat.x[(0, 0)], x0)
    assert np.allclose(lat.y[(0, 0)], traj.y[()])


def test_projection_diagram_random_systems(rng):
    for _ in range(10):
        d = int(rng.integers(1, 4))
        sys_ = random_realization(rng, d=d, m=int(rng.integers(1, 5)), p=2, q=2)
        x0 = rng.standard_normal(sys_.pair.state_dim)
        u = {
            v: rng.standard_normal(2)
            for v in words_up_to(d, 3)
            if rng.uniform() < 0.4
        }
        traj = nc_simulate(sys_, x0, u, depth=4)
        lat = lattice_simulate(sys_, x0, project_input(u, d), depth=4)
        proj = project_trajectory(traj, d)
        for n in lat.y:
            assert np.abs(lat.y[n] - proj.y[n]).max() <= 1e-12
            assert np.abs(lat.x[n] - proj.x[n]).max() <= 1e-12


def test_projection_a_stable_cancellation(astable_pair):
    sys_ = SystemRealization(pair=astable_pair)
    e1 = np.zeros(3)
    e1[0] = 1.0
    traj = nc_simulate(sys_, e1, None, depth=2)
    lat = project_trajectory(traj, 2)
    # the two words over the index (1,1) cancel in the first output entry
    assert np.allclose(lat.y[(1, 1)], 0.0)


def test_comm_transfer_at_origin(rng):
    sys_ = random_realization(rng, d=2, m=3, p=2, q=2)
    assert np.allclose(comm_transfer_eval(sys_, [0, 0]), sys_.D)


def test_comm_transfer_classical(rng):
    sys_ = random_realization(rng, d=1, m=3, p=2, q=2)
    lam = 0.3 - 0.2j
    A, B, C, D = sys_.pair.A[0], sys_.B[0], sys_.pair.C, sys_.D
    direct = D + lam * C @ np.linalg.inv(np.eye(3) - lam * A) @ B
    assert np.allclose(comm_transfer_eval(sys_, [lam]), direct)


def test_comm_transfer_taylor_vs_word_coefficients(rng):
    # independent quadrature oracle for the lattice Taylor coefficients
    sys_ = random_realization(rng, d=2, m=3, p=2, q=2)
    coeffs = taylor_coeffs_fft(
        lambda lam: comm_transfer_eval(sys_, lam), d=2, max_total=3, radius=0.4
    )
    for n, got in coeffs.items():
        want = np.zeros_like(sys_.D)
        for v in words_up_to(2, 3):
            if abelianize(v, 2) == n:
                want = want + nc_transfer_coeff(sys_, v)
        assert np.abs(got - want).max() <= 1e-8


def test_det_pencil_coeffs_a_obs(aobs_pair):
    coeffs = det_pencil_coeffs(aobs_pair.A)
    for idx in np.ndindex(coeffs.shape):
        want = A_OBS_DET_COEFFS.get(idx, 0.0)
        assert abs(coeffs[idx] - want) <= 1e-12
