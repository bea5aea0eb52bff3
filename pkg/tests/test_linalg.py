import numpy as np
import pytest
from numpy.testing import assert_allclose

from vibrodimer.errors import NoConvergence, NotDensityMatrix, NotHermitian
from vibrodimer.hilbert import SIGMA_Z, HilbertSpace, partial_transpose
from vibrodimer.linalg import (eigh, evolution_operator, jacobi_eigh, trace_norm,
                               von_neumann_entropy)
from vibrodimer.model import TWO_PI_C, thermal_populations
from vibrodimer.sampling import random_density_matrix, random_hermitian, random_unitary


class TestEigh:
    def test_pauli_z(self):
        assert_allclose(eigh(SIGMA_Z).eigenvalues, [-1.0, 1.0])

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_dimer_closed_form(self, method):
        de, v = 1042.0, 92.0
        m = np.array([[de / 2, v], [v, -de / 2]])
        lam = np.sqrt(de**2 + 4 * v**2) / 2
        assert_allclose(eigh(m, method=method).eigenvalues, [-lam, lam], rtol=1e-14)
        assert_allclose(lam, 529.06, atol=5e-3)

    def test_identity(self):
        assert_allclose(eigh(np.eye(4)).eigenvalues, np.ones(4))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_tolerates_tiny_defect(self):
        m = np.diag([1.0, 2.0]).astype(complex)
        m[0, 1] = 1e-12
        eigh(m)

    @pytest.mark.parametrize("dim", [1, 2, 7, 40])
    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_reconstruction(self, rng, dim, method):
        h = random_hermitian(dim, rng)
        dec = eigh(h, method=method)
        v = dec.eigenvectors
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-10 * dim
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) <= 1e-10

    def test_reconstruction_large(self, rng):
        dim = 1000
        h = random_hermitian(dim, rng)
        dec = eigh(h)
        assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-10 * dim

    def test_jacobi_matches_lapack(self, rng):
        h = random_hermitian(25, rng)
        assert_allclose(jacobi_eigh(h).eigenvalues, np.linalg.eigvalsh(h), atol=1e-11)

    def test_jacobi_degenerate(self):
        h = np.kron(SIGMA_Z, np.eye(3))
        assert_allclose(jacobi_eigh(h).eigenvalues, [-1, -1, -1, 1, 1, 1])

    def test_jacobi_sweep_budget(self, rng):
        with pytest.raises(NoConvergence):
            eigh(random_hermitian(12, rng), method="jacobi", max_sweeps=1)


class TestTraceNorm:
    def test_density_matrix_is_one(self, rng):
        rho = random_density_matrix(HilbertSpace.of(x=5), rng)
        assert_allclose(trace_norm(rho), 1.0)

    def test_bell_partial_transpose(self, bell):
        assert_allclose(trace_norm(partial_transpose(bell, "b")), 2.0)

    def test_diag(self):
        assert trace_norm(np.diag([3.0, -4.0])) == pytest.approx(7.0)

    def test_rectangular(self):
        m = np.array([[3.0, 0, 0], [0, 4.0, 0]])
        assert trace_norm(m) == pytest.approx(7.0)


class TestEntropy:
    def test_pure(self, rng):
        k = rng.normal(size=6) + 1j * rng.normal(size=6)
        k /= np.linalg.norm(k)
        assert von_neumann_entropy(np.outer(k, k.conj())) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_qubit(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)

    def test_thermal_oscillator(self):
        # Gibbs weights summed directly: p_n ∝ exp(-n ω / k_B T), n = 0..5
        x = 1111.0 / (0.6950348 * 270.0)
        w = np.exp(-x * np.arange(6))
        p = w / w.sum()
        expected = -np.sum(p * np.log2(p))
        assert expected == pytest.approx(0.026867592638141032, rel=1e-12)
        rho = np.diag(thermal_populations(1111.0, 270.0, 5))
        assert von_neumann_entropy(rho) == pytest.approx(expected, rel=1e-12)

    def test_basis_independent(self, rng):
        space = HilbertSpace.of(x=6)
        for _ in range(20):
            rho = random_density_matrix(space, rng, rank=3).matrix
            u = random_unitary(6, rng)
            assert abs(von_neumann_entropy(u @ rho @ u.conj().T) - von_neumann_entropy(rho)) < 1e-9

    @pytest.mark.parametrize("bad", [
        np.diag([0.6, 0.6]),
        np.diag([1.2, -0.2]),
        np.array([[0.5, 0.5], [0.0, 0.5]]),
    ])
    def test_rejects_invalid(self, bad):
        with pytest.raises(NotDensityMatrix):
            von_neumann_entropy(bad)

    def test_clamps_roundoff_negatives(self):
        assert von_neumann_entropy(np.diag([1.0 + 5e-10, -5e-10])) == pytest.approx(0.0, abs=1e-8)


class TestEvolutionOperator:
    def test_time_zero(self, rng):
        dec = eigh(random_hermitian(5, rng))
        assert_allclose(evolution_operator(dec, 0.0, TWO_PI_C), np.eye(5), atol=1e-12)

    def test_single_phase(self):
        energy = 500.0
        dec = eigh(np.diag([0.0, energy]))
        t = np.pi / (TWO_PI_C * energy)
        u = evolution_operator(dec, t, TWO_PI_C)
        assert_allclose(u, np.diag([1.0, -1.0]), atol=1e-12)

    def test_group_property(self, rng):
        dec = eigh(random_hermitian(6, rng, scale=100.0))
        u1 = evolution_operator(dec, 13.0, TWO_PI_C)
        u2 = evolution_operator(dec, 29.5, TWO_PI_C)
        assert_allclose(u1 @ u2, evolution_operator(dec, 42.5, TWO_PI_C), atol=1e-12)

    def test_unitary_and_spectrum_preserving(self, rng):
        dec = eigh(random_hermitian(8, rng, scale=300.0))
        u = evolution_operator(dec, 123.4, TWO_PI_C)
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-10
        a = random_hermitian(8, rng)
        assert_allclose(np.linalg.eigvalsh(u @ a @ u.conj().T), np.linalg.eigvalsh(a), atol=1e-9)
