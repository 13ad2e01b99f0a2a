import math

import numpy as np
import pytest

from corrdyn.channels import PAULI
from corrdyn.linalg import (
    DensityMatrix,
    Observable,
    kron,
    matrices_close,
    matrix_from_json,
    matrix_to_json,
    mutual_information,
    partial_trace,
    permute_subsystems,
    random_density_matrix,
    random_unitary,
    relative_entropy,
    state_from_json,
    state_to_json,
    support_contained,
    trace_norm,
    vn_entropy,
)

X, Y, Z = PAULI["X"], PAULI["Y"], PAULI["Z"]


def ket(*bits):
    v = np.ones(1, dtype=complex)
    for b in bits:
        v = np.kron(v, np.array([1, 0]) if b == 0 else np.array([0, 1]))
    return v


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_zz_diagonal(self):
        assert np.allclose(kron(Z, Z), np.diag([1, -1, -1, 1]))

    def test_xx_flips_both_qubits(self):
        assert np.allclose(kron(X, X) @ ket(0, 0), ket(1, 1))


class TestPartialTrace:
    def test_product_state(self):
        rho = np.outer(ket(0, 0), ket(0, 0))
        assert np.allclose(partial_trace(rho, [2, 2], keep=[0]), np.outer(ket(0), ket(0)))

    def test_product_factorization(self, rng):
        a = random_density_matrix((2,), rng).mat
        b = random_density_matrix((2,), rng).mat
        assert np.allclose(partial_trace(np.kron(a, b), [2, 2], keep=[0]), a)
        assert np.allclose(partial_trace(np.kron(a, b), [2, 2], keep=[1]), b)

    def test_maximally_entangled_marginal(self):
        psi = (ket(0, 1) + ket(1, 0)) / math.sqrt(2)
        rho = np.outer(psi, psi.conj())
        assert np.allclose(partial_trace(rho, [2, 2], keep=[0]), np.eye(2) / 2)

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError, match="cannot trace out all"):
            partial_trace(np.eye(4) / 4, [2, 2], keep=[])

    def test_sequential_equals_joint(self, rng):
        rho = random_density_matrix((2, 2, 2), rng)
        joint = rho.partial_trace([2]).mat
        seq = partial_trace(rho.partial_trace([1, 2]).mat, [2, 2], keep=[1])
        assert np.max(np.abs(joint - seq)) < 1e-12

    def test_trace_preserved(self, rng):
        rho = random_density_matrix((2, 2, 2), rng)
        assert abs(np.trace(partial_trace(rho.mat, [2, 2, 2], keep=[2])) - 1) < 1e-12


class TestEntropy:
    def test_pure_state(self):
        assert vn_entropy(DensityMatrix.from_vector(ket(0), (2,))) == 0.0

    def test_maximally_mixed_qubit(self):
        assert vn_entropy(DensityMatrix.maximally_mixed((2,))) == pytest.approx(1.0)

    def test_additive_on_products(self):
        assert vn_entropy(DensityMatrix.maximally_mixed((2, 2))) == pytest.approx(2.0)

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            rho = random_density_matrix((2, 2), rng)
            u = random_unitary(4, rng)
            rotated = DensityMatrix((2, 2), u @ rho.mat @ u.conj().T)
            assert abs(vn_entropy(rotated) - vn_entropy(rho)) < 1e-9

    def test_nonnegative(self, rng):
        for _ in range(20):
            assert vn_entropy(random_density_matrix((2, 2), rng, rank=2)) >= -1e-9


class TestRelativeEntropy:
    def test_identical_arguments(self, rng):
        for _ in range(10):
            rho = random_density_matrix((2, 2), rng)
            assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-9)

    def test_pure_vs_maximally_mixed(self):
        # -Tr[rho log2 I/2] = 1 and S(rho) = 0, so S(rho || I/2) = 1 bit
        rho = DensityMatrix.from_vector(ket(0), (2,))
        assert relative_entropy(rho, DensityMatrix.maximally_mixed((2,))) == pytest.approx(1.0)

    def test_matches_mutual_information(self, rng):
        # S(rho_AB || rho_A x rho_B) equals the entropy-sum mutual information
        for _ in range(10):
            rho = random_density_matrix((2, 2), rng)
            product = DensityMatrix(
                (2, 2), np.kron(rho.partial_trace([0]).mat, rho.partial_trace([1]).mat)
            )
            lhs = relative_entropy(rho, product)
            rhs = mutual_information(rho, [0])
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_support_violation_is_flagged_infinity(self):
        rho = DensityMatrix.from_vector(ket(0), (2,))
        sigma = DensityMatrix.from_vector(ket(1), (2,))
        assert not support_contained(rho, sigma)
        assert relative_entropy(rho, sigma) == math.inf

    def test_monotone_under_partial_trace(self, rng):
        # data-processing: discarding a subsystem cannot increase S(rho||sigma)
        for _ in range(50):
            rho = random_density_matrix((2, 2), rng)
            sigma = random_density_matrix((2, 2), rng)
            full = relative_entropy(rho, sigma)
            reduced = relative_entropy(rho.partial_trace([0]), sigma.partial_trace([0]))
            assert full >= reduced - 1e-9

    def test_pinsker(self, rng):
        for _ in range(100):
            rho = random_density_matrix((2, 2), rng)
            sigma = random_density_matrix((2, 2), rng)
            lhs = relative_entropy(rho, sigma)
            rhs = trace_norm(rho.mat - sigma.mat) ** 2 / (2 * math.log(2))
            assert lhs >= rhs - 1e-9


class TestTraceNorm:
    def test_pauli_z(self):
        assert trace_norm(Z) == pytest.approx(2.0)

    def test_density_matrix(self, rng):
        assert trace_norm(random_density_matrix((2, 2), rng).mat) == pytest.approx(1.0)

    def test_orthogonal_pure_states(self):
        rho = np.outer(ket(0), ket(0))
        sigma = np.outer(ket(1), ket(1))
        assert trace_norm(rho - sigma) == pytest.approx(2.0)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            trace_norm(np.ones((2, 3)))

    def test_matches_singular_values(self, rng):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert trace_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False).sum(), abs=1e-10)


class TestDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix((2,), m)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix((2,), np.eye(2))

    def test_rejects_negative_eigenvalues(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix((2,), m)

    def test_immutable(self, rng):
        rho = random_density_matrix((2,), rng)
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 0.0


class TestObservable:
    def test_norm_is_largest_abs_eigenvalue(self, rng):
        obs = Observable((2,), 3.0 * Z)
        assert obs.norm == pytest.approx(3.0, abs=1e-10)

    def test_expectation(self):
        plus = DensityMatrix.from_vector(np.array([1, 1]) / math.sqrt(2), (2,))
        assert Observable((2,), X).expectation(plus) == pytest.approx(1.0)


class TestPermuteAndJson:
    def test_permute_subsystems_roundtrip(self, rng):
        rho = random_density_matrix((2, 2, 2), rng)
        back = rho.permute([2, 0, 1]).permute([1, 2, 0])
        assert back.close_to(rho, 1e-12)

    def test_matrix_json_roundtrip(self, rng):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.allclose(matrix_from_json(matrix_to_json(a)), a)

    def test_state_json_roundtrip(self, rng):
        rho = random_density_matrix((2, 2), rng)
        again = state_from_json(state_to_json(rho))
        assert again.dims == rho.dims
        assert matrices_close(again.mat, rho.mat, 1e-12)
