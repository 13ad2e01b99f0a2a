import math

import numpy as np
import pytest

from corrdyn.channels import (
    PAULI,
    PauliOpBasis,
    QuantumChannel,
    channel_from_json,
    channel_to_json,
    chi_to_kraus,
    compose_channels,
    depolarizing_channel,
    full_dephasing_channel,
    identity_channel,
    kraus_to_chi,
    random_channel,
    swap_channel,
    tensor_channels,
    unitary_channel,
)
from corrdyn.linalg import (
    DensityMatrix,
    kron,
    mutual_information,
    random_density_matrix,
    vn_entropy,
)
from corrdyn.noise import PhaseNoiseModel, analytic_dephasing_channel

BELL = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def bell_pair_state():
    # |psi+>_{S1 S1'} x |psi+>_{S2 S2'}, already in interleaved party order
    psi = np.kron(BELL, BELL)
    return DensityMatrix.from_vector(psi, (2, 2, 2, 2)).mat


class TestChoiState:
    def test_identity_channel_gives_bell_pairs(self):
        cj = identity_channel((2, 2)).choi_state([2, 2])
        expected = np.kron(np.outer(BELL, BELL.conj()), np.outer(BELL, BELL.conj()))
        assert np.max(np.abs(cj.mat - expected)) < 1e-12

    def test_swap_choi_is_pure_with_maximally_mixed_marginal(self):
        cj = swap_channel(2).choi_state([2, 2])
        assert vn_entropy(cj) == pytest.approx(0.0, abs=1e-9)
        marginal = cj.partial_trace([0, 1])
        assert np.max(np.abs(marginal.mat - np.eye(4) / 4)) < 1e-10

    def test_depolarizing_choi_is_maximally_mixed(self):
        cj = depolarizing_channel((2, 2)).choi_state([2, 2])
        assert np.max(np.abs(cj.mat - np.eye(16) / 16)) < 1e-10

    def test_party_dim_mismatch_rejected(self):
        with pytest.raises(ValueError, match="party dims"):
            identity_channel((2, 2)).choi_state([2, 3])

    def test_choi_is_valid_state_for_random_channels(self, rng):
        for _ in range(10):
            ch = random_channel((2, 2), kraus_rank=3, rng=rng)
            cj = ch.choi_state([2, 2])  # DensityMatrix validates PSD/trace
            assert abs(np.trace(cj.mat) - 1) < 1e-10


class TestApplyChannel:
    def test_identity(self, rng):
        rho = random_density_matrix((2, 2), rng)
        assert identity_channel((2, 2)).apply(rho).close_to(rho, 1e-12)

    def test_full_dephasing_kills_coherence(self):
        plus = DensityMatrix.from_vector(np.array([1, 1]) / math.sqrt(2), (2,))
        out = full_dephasing_channel((2,)).apply(plus)
        assert np.max(np.abs(out.mat - np.eye(2) / 2)) < 1e-12

    def test_long_time_dephasing_on_plus_plus(self):
        # perfectly correlated dephasing sends |++> to the Bell-plus-diagonal mixture
        model = PhaseNoiseModel(sigma_b=50.0, sigma_l=0.0, suscept=(1.0, 1.0))
        plus2 = DensityMatrix.from_vector(np.ones(4) / 2, (2, 2))
        out = analytic_dephasing_channel(model).apply(plus2)
        psi = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
        expected = (
            0.25 * np.diag([1.0, 0, 0, 1.0]).astype(complex) + 0.5 * np.outer(psi, psi)
        )
        assert np.max(np.abs(out.mat - expected)) < 1e-9

    def test_linear_in_input(self, rng):
        ch = random_channel((2,), kraus_rank=2, rng=rng)
        a = random_density_matrix((2,), rng)
        b = random_density_matrix((2,), rng)
        mix = DensityMatrix((2,), 0.3 * a.mat + 0.7 * b.mat)
        lhs = ch.apply(mix).mat
        rhs = 0.3 * ch.apply(a).mat + 0.7 * ch.apply(b).mat
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_apply_agrees_with_choi_application(self, rng):
        for _ in range(10):
            ch = random_channel((2, 2), kraus_rank=4, rng=rng)
            rho = random_density_matrix((2, 2), rng)
            assert ch.apply(rho).close_to(ch.apply_via_choi(rho), 1e-9)


class TestTensorCompose:
    def test_tensor_identities(self):
        t = tensor_channels(identity_channel((2,)), identity_channel((2,)))
        cj = t.choi_state([2, 2])
        assert np.max(np.abs(cj.mat - bell_pair_state())) < 1e-12

    def test_tensor_dephasing_kraus_count(self):
        t = tensor_channels(full_dephasing_channel((2,)), full_dephasing_channel((2,)))
        assert len(t.kraus) == 4

    def test_tensor_choi_factorizes_with_permutation(self, rng):
        # oracle: build the product of individual Choi states, then reorder
        # block (S1, S1', S2, S2') into the interleaved party convention
        for _ in range(5):
            a = random_channel((2,), kraus_rank=2, rng=rng)
            b = random_channel((2,), kraus_rank=2, rng=rng)
            joint = tensor_channels(a, b).choi_state([2, 2])
            prod = np.kron(a.choi_state([2]).mat, b.choi_state([2]).mat)
            assert np.max(np.abs(joint.mat - prod)) < 1e-9

    def test_compose_identity(self, rng):
        ch = random_channel((2,), kraus_rank=2, rng=rng)
        composed = compose_channels(identity_channel((2,)), ch)
        rho = random_density_matrix((2,), rng)
        assert composed.apply(rho).close_to(ch.apply(rho), 1e-10)

    def test_full_dephasing_idempotent(self, rng):
        deph = full_dephasing_channel((2,))
        twice = compose_channels(deph, deph)
        rho = random_density_matrix((2,), rng)
        assert twice.apply(rho).close_to(deph.apply(rho), 1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            compose_channels(identity_channel((2,)), identity_channel((2, 2)))


class TestChoiBijectivity:
    def test_kraus_roundtrip_through_choi(self, rng):
        # one-to-one correspondence: the rebuilt channel acts identically
        for _ in range(10):
            ch = random_channel((2, 2), kraus_rank=3, rng=rng)
            rebuilt = QuantumChannel.from_choi(ch.choi, ch.dims)
            for _ in range(3):
                rho = random_density_matrix((2, 2), rng)
                assert ch.apply(rho).close_to(rebuilt.apply(rho), 1e-9)

    def test_product_channels_have_uncorrelated_choi(self, rng):
        for _ in range(10):
            a = random_channel((2,), kraus_rank=2, rng=rng)
            b = random_channel((2,), kraus_rank=2, rng=rng)
            cj = tensor_channels(a, b).choi_state([2, 2])
            assert mutual_information(cj, [0, 1]) < 1e-9

    def test_completeness_enforced(self):
        with pytest.raises(ValueError, match="completeness"):
            QuantumChannel.from_kraus([PAULI["X"] * 0.5], (2,))


class TestChiRepresentation:
    def test_basis_orthogonality_enforced(self):
        with pytest.raises(ValueError, match="orthogonal"):
            PauliOpBasis(1, ("I", "P"), (np.eye(2), np.eye(2) + PAULI["Z"]))

    def test_identity_chi(self):
        basis = PauliOpBasis.dephasing_pair()
        ch = chi_to_kraus(np.diag([1.0, 0, 0, 0]), basis)
        rho = DensityMatrix.from_vector(np.array([1, 1, 1, 1]) / 2, (2, 2))
        assert ch.apply(rho).close_to(rho, 1e-12)

    def test_balanced_zz_dephasing(self):
        basis = PauliOpBasis.dephasing_pair()
        ch = chi_to_kraus(np.diag([0.5, 0, 0, 0.5]), basis)
        assert len(ch.kraus) == 2
        rho = DensityMatrix.from_vector(np.array([1, 1, 1, 1]) / 2, (2, 2))
        out = ch.apply(rho)
        # ZZ mixing halves the single-flip coherences and keeps |00><11|
        assert out.mat[0, 3] == pytest.approx(0.25)
        assert out.mat[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_chi_at_zero_widths_is_identity(self, rng):
        from corrdyn.noise import chi_matrix_closed_form

        chi = chi_matrix_closed_form(PhaseNoiseModel(sigma_b=0.0, sigma_l=0.0))
        ch = chi_to_kraus(chi, PauliOpBasis.dephasing_pair())
        rho = random_density_matrix((2, 2), rng)
        assert ch.apply(rho).close_to(rho, 1e-9)

    def test_chi_kraus_roundtrip(self):
        basis = PauliOpBasis.dephasing_pair()
        from corrdyn.noise import chi_matrix_closed_form

        chi = chi_matrix_closed_form(PhaseNoiseModel(sigma_b=0.7, sigma_l=0.3, suscept=(1.0, -0.83)))
        ch = chi_to_kraus(chi, basis)
        again = kraus_to_chi(ch, basis)
        assert np.max(np.abs(again - chi)) < 1e-9

    def test_non_psd_chi_rejected_with_eigenvalue(self):
        basis = PauliOpBasis.dephasing_pair()
        bad = np.diag([1.2, 0, 0, -0.2])
        with pytest.raises(ValueError, match="-2.0"):
            chi_to_kraus(bad, basis)


class TestChannelJson:
    def test_kraus_roundtrip(self, rng):
        ch = random_channel((2,), kraus_rank=2, rng=rng)
        again = channel_from_json(channel_to_json(ch))
        rho = random_density_matrix((2,), rng)
        assert ch.apply(rho).close_to(again.apply(rho), 1e-12)

    def test_choi_roundtrip(self, rng):
        ch = random_channel((2, 2), kraus_rank=2, rng=rng)
        again = channel_from_json(channel_to_json(ch, include_choi=True))
        rho = random_density_matrix((2, 2), rng)
        assert ch.apply(rho).close_to(again.apply(rho), 1e-8)

    def test_unknown_payload(self):
        with pytest.raises(ValueError, match="kraus"):
            channel_from_json({"dims": [2]})


def test_unitary_channel_is_reversible(rng):
    from corrdyn.linalg import random_unitary

    u = random_unitary(4, rng)
    ch = unitary_channel(u, (2, 2))
    inv = unitary_channel(u.conj().T, (2, 2))
    rho = random_density_matrix((2, 2), rng)
    assert compose_channels(inv, ch).apply(rho).close_to(rho, 1e-10)
