import numpy as np
import pytest
import scipy.linalg

from qnetid.dynamics import (
    Trajectory,
    check_density,
    exact_gram,
    liouvillian,
    propagate,
    read_trajectory_csv,
    sample_trajectory,
    unitary_conjugate,
    write_trajectory_csv,
)
from qnetid.linalg import spectral_norm, vec

from conftest import random_density, random_hermitian

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
E1 = np.diag([1.0, 0.0]).astype(complex)


class TestCheckDensity:
    def test_accepts_valid(self):
        rng = np.random.default_rng(0)
        rho = check_density(random_density(rng, 4))
        assert np.array_equal(rho, rho.conj().T)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            check_density(2.0 * E1)

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="positive"):
            check_density(np.diag([1.5, -0.5]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            check_density(np.array([[1.0, 1.0], [0.0, 0.0]]))


class TestLiouvillian:
    def test_hand_computed_diagonal(self):
        out = liouvillian(np.diag([1.0, -1.0]).astype(complex))
        assert np.allclose(out, np.diag([0.0, 2.0j, -2.0j, 0.0]), atol=1e-14)

    def test_zero_hamiltonian(self):
        assert np.array_equal(liouvillian(np.zeros((3, 3))), np.zeros((9, 9)))

    def test_annihilates_own_hamiltonian(self):
        rng = np.random.default_rng(1)
        h = random_hermitian(rng, 4)
        out = liouvillian(h) @ vec(h)
        assert np.max(np.abs(out)) <= 1e-12 * spectral_norm(h)

    def test_skew_hermitian(self):
        rng = np.random.default_rng(2)
        lv = liouvillian(random_hermitian(rng, 3), hbar=0.7)
        assert spectral_norm(lv + lv.conj().T) <= 1e-12 * spectral_norm(lv)

    def test_hbar_scaling(self):
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 3)
        assert np.allclose(liouvillian(h, hbar=2.0), 0.5 * liouvillian(h), atol=1e-14)

    def test_rejects_bad_hbar(self):
        with pytest.raises(ValueError):
            liouvillian(SX, hbar=0.0)


class TestPropagate:
    def test_time_zero_identity(self):
        rng = np.random.default_rng(4)
        rho = random_density(rng, 3)
        assert np.allclose(propagate(random_hermitian(rng, 3), rho, 0.0), rho, atol=1e-13)

    def test_two_level_flip(self):
        # U(pi/2) under sigma_x maps |1><1| to |2><2|
        out = propagate(SX, E1, np.pi / 2)
        assert np.allclose(out, np.diag([0.0, 1.0]), atol=1e-12)

    def test_stationary_state(self):
        h = np.diag([1.0, -1.0]).astype(complex)
        for t in (0.3, 1.7, 9.1):
            assert np.allclose(propagate(h, E1, t), E1, atol=1e-13)

    def test_preserves_invariants(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 4)
        rho = random_density(rng, 4)
        out = propagate(h, rho, 2.1)
        assert abs(np.trace(out).real - 1.0) <= 1e-12
        assert np.array_equal(out, out.conj().T)
        w_in = np.linalg.eigvalsh(rho)
        w_out = np.linalg.eigvalsh(out)
        assert np.allclose(w_in, w_out, atol=1e-10)

    def test_matches_vectorized_exponential(self):
        # independent oracle: expm of the vectorized generator
        rng = np.random.default_rng(6)
        for d in (2, 3, 4):
            h = random_hermitian(rng, d)
            rho = random_density(rng, d)
            t = float(rng.uniform(0.2, 2.0))
            direct = vec(propagate(h, rho, t))
            via_l = scipy.linalg.expm(liouvillian(h) * t) @ vec(rho)
            assert np.linalg.norm(direct - via_l) <= 1e-9 * np.linalg.norm(via_l)

    def test_rejects_invalid_state(self):
        with pytest.raises(ValueError):
            propagate(SX, np.diag([2.0, -1.0]), 1.0)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            propagate(SX, E1, -1.0)


class TestUnitaryConjugate:
    def test_linear_extension(self):
        rng = np.random.default_rng(7)
        h = random_hermitian(rng, 3)
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        t = 0.8
        lhs = unitary_conjugate(h, 2.0 * x + 3.0 * y, t)
        rhs = 2.0 * unitary_conjugate(h, x, t) + 3.0 * unitary_conjugate(h, y, t)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_negative_time_inverts(self):
        rng = np.random.default_rng(8)
        h = random_hermitian(rng, 3)
        x = rng.normal(size=(3, 3))
        back = unitary_conjugate(h, unitary_conjugate(h, x, 0.9), -0.9)
        assert np.allclose(back, x, atol=1e-12)


class TestSampleTrajectory:
    def test_grid_and_first_sample(self):
        traj = sample_trajectory(SX, E1, 1.0, 0.01)
        assert traj.n_samples == 100
        assert len(traj.times) == 101
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 1.0
        assert np.array_equal(traj.states[0], E1)
        assert traj.dt == pytest.approx(0.01)

    def test_constant_for_zero_hamiltonian(self):
        traj = sample_trajectory(np.zeros((2, 2)), E1, 0.5, 0.1)
        assert np.allclose(traj.states, traj.states[0], atol=1e-15)

    def test_unit_traces(self):
        rng = np.random.default_rng(9)
        traj = sample_trajectory(random_hermitian(rng, 3), random_density(rng, 3), 2.0, 0.05)
        traces = np.einsum("kii->k", traj.states).real
        assert np.max(np.abs(traces - 1.0)) <= 1e-10

    def test_rejects_non_integer_grid(self):
        with pytest.raises(ValueError, match="integer"):
            sample_trajectory(SX, E1, 1.0, 0.3)


class TestExactGram:
    def test_zero_hamiltonian(self):
        p = exact_gram(np.zeros((2, 2)), E1, 2.5)
        assert np.allclose(p, 2.5 * E1, atol=1e-14)

    def test_stationary_state(self):
        p = exact_gram(np.diag([1.0, -1.0]).astype(complex), E1, 1.8)
        assert np.allclose(p, 1.8 * E1, atol=1e-13)

    def test_matches_fine_trapezoid(self):
        from qnetid.identify import build_P_trapezoid

        p = exact_gram(SX, E1, 1.0)
        traj = sample_trajectory(SX, E1, 1.0, 1e-4)
        assert spectral_norm(build_P_trapezoid(traj) - p) <= 1e-7

    def test_second_order_convergence(self):
        from qnetid.identify import build_P_trapezoid

        rng = np.random.default_rng(10)
        for _ in range(5):
            d = int(rng.integers(2, 6))
            h = random_hermitian(rng, d, norm=1.5)
            rho = random_density(rng, d)
            pex = exact_gram(h, rho, 1.0)
            e1 = spectral_norm(build_P_trapezoid(sample_trajectory(h, rho, 1.0, 0.05)) - pex)
            e2 = spectral_norm(build_P_trapezoid(sample_trajectory(h, rho, 1.0, 0.025)) - pex)
            assert 3.5 <= e1 / e2 <= 4.5

    def test_degenerate_frequency_continuity(self):
        # nearly equal eigenvalues must agree with the exactly degenerate limit
        rho = np.full((2, 2), 0.5, dtype=complex)
        p_exact = exact_gram(np.diag([1.0, 1.0]).astype(complex), rho, 1.0)
        p_near = exact_gram(np.diag([1.0, 1.0 + 1e-9]).astype(complex), rho, 1.0)
        assert spectral_norm(p_exact - p_near) <= 1e-6

    def test_hermitian_psd(self):
        rng = np.random.default_rng(11)
        h = random_hermitian(rng, 4)
        p = exact_gram(h, random_density(rng, 4), 2.0)
        assert np.array_equal(p, p.conj().T)
        assert np.linalg.eigvalsh(p)[0] >= -1e-10


class TestTrajectoryCsv:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(12)
        traj = sample_trajectory(random_hermitian(rng, 3), random_density(rng, 3), 0.4, 0.1)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path)
        back = read_trajectory_csv(path)
        assert np.array_equal(back.times, traj.times)
        assert np.array_equal(back.states, traj.states)

    def test_header_layout(self, tmp_path):
        traj = sample_trajectory(SX, E1, 0.2, 0.1)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path)
        header = path.read_text().splitlines()[0]
        assert header == "t,re_1_1,im_1_1,re_2_1,im_2_1,re_1_2,im_1_2,re_2_2,im_2_2"

    def test_rejects_malformed(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError):
            read_trajectory_csv(bad)
