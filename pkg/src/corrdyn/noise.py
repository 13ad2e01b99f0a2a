"""Engineered noise processes of the trapped-ion experiments.

Two-source dephasing: every run accumulates a global magnetic random phase
phi_B (weighted per qubit by its susceptibility coefficient) and a laser
random phase phi_L on the addressed qubit, both Gaussian. Averaging the
resulting diagonal unitaries multiplies each computational-basis coherence
|u><v| by a Gaussian decay factor, which is available in closed form; the
Monte-Carlo sampler estimates the same factors from finite draws.

Uncorrelated noise: independent spontaneous decay of the excited qubit
level |0> to the ground level |1>, simulated by quantum-jump trajectories
whose ensemble average is the amplitude-damping channel with
gamma = 1 - exp(-t / T_spont).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import product

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .channels import QuantumChannel, identity_channel, tensor_channels
from .linalg import DensityMatrix, dag
from .rng import stream

_TRAJ_CHUNK = 8192


@dataclass(frozen=True)
class PhaseNoiseModel:
    """Gaussian random-phase dephasing parameters.

    ``suscept[i]`` is the dimensionless susceptibility coefficient of qubit i
    (encoding ratios such as b/a = -0.83 enter here); ``laser_qubit`` is the
    single addressed qubit picking up the laser phase.
    """

    sigma_b: float
    sigma_l: float = 0.0
    suscept: tuple[float, ...] = (1.0, 1.0)
    laser_qubit: int = 1

    def __post_init__(self):
        if self.sigma_b < 0 or self.sigma_l < 0:
            raise ValueError("phase widths must be nonnegative")
        suscept = tuple(float(c) for c in self.suscept)
        if not suscept:
            raise ValueError("need at least one susceptibility coefficient")
        if self.sigma_l > 0 and not 0 <= self.laser_qubit < len(suscept):
            raise ValueError(f"laser qubit {self.laser_qubit} out of range")
        object.__setattr__(self, "suscept", suscept)

    @property
    def n_qubits(self) -> int:
        return len(self.suscept)

    def at_time(self, t_over_tau: float) -> "PhaseNoiseModel":
        """Model at normalized waiting time t/tau (see sigma_b_for_time)."""
        a_ref = abs(self.suscept[0])
        return replace(self, sigma_b=sigma_b_for_time(t_over_tau, a_ref))


def sigma_b_for_time(t_over_tau: float, a_ref: float = 1.0) -> float:
    """Phase width after waiting time t, calibrated so the coherence of the
    reference qubit decays as exp(-t/tau): exp(-2 a^2 sigma_B^2) = e^(-t/tau).

    The noise spectrum is not modeled; Gaussian phases with this exponential
    coherence-decay calibration reproduce the engineered white-noise setting.
    """
    if t_over_tau < 0:
        raise ValueError("waiting time must be nonnegative")
    return math.sqrt(t_over_tau / (2.0 * a_ref**2))


@dataclass(frozen=True)
class DecayModel:
    """Independent spontaneous decay with effective lifetime ``t_spont``
    (seconds) acting on the listed qubits."""

    t_spont: float
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.t_spont <= 0:
            raise ValueError("effective lifetime must be positive")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

    def gamma(self, t: float) -> float:
        return 1.0 - math.exp(-t / self.t_spont)


@dataclass(frozen=True)
class AlphaCoefficients:
    """Closed-form decay factors of the two-qubit Choi-state coherences.

    All diagonal factors are 1; by Hermitian symmetry the four listed values
    determine the rest.
    """

    a1112: float
    a1121: float
    a1122: float
    a1221: float

    @classmethod
    def from_model(cls, model: PhaseNoiseModel) -> "AlphaCoefficients":
        if model.n_qubits != 2:
            raise ValueError("alpha coefficients are defined for 2 qubits")
        a, b = model.suscept
        sb2 = model.sigma_b**2
        sl2 = model.sigma_l**2
        return cls(
            a1112=math.exp(-2.0 * (b**2 * sb2 + sl2)),
            a1121=math.exp(-2.0 * a**2 * sb2),
            a1122=math.exp(-2.0 * ((a + b) ** 2 * sb2 + sl2)),
            a1221=math.exp(-2.0 * ((a - b) ** 2 * sb2 + sl2)),
        )


def _z_signs(n: int) -> np.ndarray:
    """[qubit, basis state] -> +-1 (sigma_z eigenvalue)."""
    u = np.arange(2**n)
    return np.stack([1.0 - 2.0 * ((u >> (n - 1 - q)) & 1) for q in range(n)])


def dephasing_decay_mask(model: PhaseNoiseModel) -> np.ndarray:
    """Exact coherence decay factors of the averaged dephasing channel.

    Entry [u, v] multiplies the coherence |u><v|; Gaussian averaging gives
    exp(-sigma_B^2/2 (sum_i c_i (s_i(u)-s_i(v)))^2 - sigma_L^2/2 (..laser..)^2).
    """
    n = model.n_qubits
    signs = _z_signs(n)
    weighted = np.asarray(model.suscept) @ signs  # [state]
    db = weighted[:, None] - weighted[None, :]
    mask = np.exp(-0.5 * model.sigma_b**2 * db**2)
    if model.sigma_l > 0:
        dl = signs[model.laser_qubit][:, None] - signs[model.laser_qubit][None, :]
        mask = mask * np.exp(-0.5 * model.sigma_l**2 * dl**2)
    return mask


def channel_from_decay_mask(mask: np.ndarray, dims) -> QuantumChannel:
    """Channel multiplying each basis coherence |u><v| by mask[u, v]."""
    d = mask.shape[0]
    choi = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d) * d + np.arange(d)  # |uu> positions
    choi[np.ix_(idx, idx)] = np.asarray(mask) / d
    return QuantumChannel.from_choi(choi, dims)


def analytic_dephasing_channel(model: PhaseNoiseModel) -> QuantumChannel:
    """Two-qubit dephasing channel with the closed-form alpha coefficients.

    The analytic form is derived for two qubits; other sizes are rejected.
    """
    if model.n_qubits != 2:
        raise ValueError(
            f"analytic dephasing channel is defined for 2 qubits, got {model.n_qubits}"
        )
    return channel_from_decay_mask(dephasing_decay_mask(model), (2, 2))


# ---------------------------------------------------------------------------
# Process-matrix coefficients over the restricted basis {II, ZI, IZ, ZZ}.

# Diagonal signs of the basis elements on |00>, |01>, |10>, |11>.
_G_SIGNS = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ],
    dtype=float,
)


def chi_matrix_closed_form(model: PhaseNoiseModel) -> np.ndarray:
    """Chi coefficients from the Gaussian closed-form decay mask."""
    mask = dephasing_decay_mask(model)
    if mask.shape != (4, 4):
        raise ValueError("chi coefficients are defined for 2 qubits")
    return (_G_SIGNS @ mask @ _G_SIGNS.T).astype(complex) / 16.0


def chi_matrix_quadrature(model: PhaseNoiseModel, nodes: int = 64) -> np.ndarray:
    """Chi coefficients by Gauss-Hermite quadrature of the phase integrals.

    The integrands are Gaussians times trigonometric polynomials, so the
    64-node rule converges far below the comparison tolerances. Independent
    oracle for :func:`chi_matrix_closed_form`.
    """
    if model.n_qubits != 2:
        raise ValueError("chi coefficients are defined for 2 qubits")
    a, b = model.suscept
    x, w = hermgauss(nodes)
    phi_b = (math.sqrt(2.0) * model.sigma_b * x)[:, None]
    phi_l = (math.sqrt(2.0) * model.sigma_l * x)[None, :]
    weight = (w[:, None] * w[None, :]) / math.pi
    c1 = np.cos(a * phi_b) * np.ones_like(phi_l)
    s1 = np.sin(a * phi_b) * np.ones_like(phi_l)
    arg2 = b * phi_b + phi_l
    c2, s2 = np.cos(arg2), np.sin(arg2)
    # unitary expanded over {II, ZI, IZ, ZZ}: u = (c1 c2, -i s1 c2, -i c1 s2, -s1 s2)
    u = np.stack([c1 * c2, -1j * s1 * c2, -1j * c1 * s2, -(s1 * s2)])
    flat = u.reshape(4, -1)
    return (flat * weight.ravel()) @ flat.conj().T


# ---------------------------------------------------------------------------
# Monte-Carlo random-phase dephasing.


def _sampled_decay_mask(model: PhaseNoiseModel, n_traj: int, seed: int) -> np.ndarray:
    if n_traj < 1:
        raise ValueError("need at least one trajectory")
    n = model.n_qubits
    signs = _z_signs(n)
    weighted = np.asarray(model.suscept) @ signs
    rng = stream(seed, 0xDE9A)
    acc = np.zeros((2**n, 2**n), dtype=complex)
    done = 0
    while done < n_traj:
        m = min(_TRAJ_CHUNK, n_traj - done)
        theta = rng.normal(0.0, model.sigma_b, size=m)[:, None] * weighted[None, :]
        if model.sigma_l > 0:
            theta = theta + (
                rng.normal(0.0, model.sigma_l, size=m)[:, None]
                * signs[model.laser_qubit][None, :]
            )
        w = np.exp(-1j * theta)
        acc += w.T @ w.conj()
        done += m
    mask = acc / n_traj
    np.fill_diagonal(mask, 1.0)
    return mask


def sample_dephasing_trajectories(
    model: PhaseNoiseModel, rho_in: DensityMatrix, n_traj: int, seed: int
) -> DensityMatrix:
    """Average of U rho U^dag over iid Gaussian phase draws.

    Each draw applies the diagonal unitary exp(-i phi_B sum_i c_i sz_i)
    (times the laser term), so the average acts entrywise on basis
    coherences. Deterministic for a fixed seed.
    """
    if rho_in.dim != 2**model.n_qubits:
        raise ValueError(
            f"state dimension {rho_in.dim} does not match {model.n_qubits} qubits"
        )
    mask = _sampled_decay_mask(model, n_traj, seed)
    return DensityMatrix(rho_in.dims, mask * rho_in.mat)


def sampled_dephasing_channel(
    model: PhaseNoiseModel, n_traj: int, seed: int
) -> QuantumChannel:
    """The random-unitary channel realized by a finite trajectory ensemble.

    One set of phase draws defines the channel for every input, mirroring a
    noise realization acting identically regardless of the prepared state.
    """
    mask = _sampled_decay_mask(model, n_traj, seed)
    return channel_from_decay_mask(mask, (2,) * model.n_qubits)


# ---------------------------------------------------------------------------
# Uncorrelated spontaneous decay.

def amplitude_damping_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Jump and no-jump operators for decay of |0> (excited) to |1>."""
    no_jump = np.array([[math.sqrt(1.0 - gamma), 0.0], [0.0, 1.0]], dtype=complex)
    jump = np.array([[0.0, 0.0], [math.sqrt(gamma), 0.0]], dtype=complex)
    return no_jump, jump


def decay_channel(model: DecayModel, t: float, n_qubits: int) -> QuantumChannel:
    """Exact tensor-product amplitude-damping channel at waiting time t."""
    gamma = model.gamma(t)
    single = QuantumChannel.from_kraus(amplitude_damping_kraus(gamma), (2,))
    out = None
    for q in range(n_qubits):
        ch = single if q in model.qubits else identity_channel((2,))
        out = ch if out is None else tensor_channels(out, ch)
    assert out is not None
    return out


def sample_decay_trajectories(
    model: DecayModel, rho_in: DensityMatrix, t: float, n_traj: int, seed: int
) -> DensityMatrix:
    """Quantum-jump unraveling of independent spontaneous decay.

    Per trajectory each affected qubit either jumps to the ground state or
    evolves jump-free, with the Born probabilities of the two Kraus branches
    (an excited qubit jumps with probability 1 - exp(-t/T_spont)). The
    trajectory average converges to :func:`decay_channel` as 1/sqrt(n_traj).
    """
    if t < 0:
        raise ValueError("waiting time must be nonnegative")
    if n_traj < 1:
        raise ValueError("need at least one trajectory")
    n = int(round(math.log2(rho_in.dim)))
    if 2**n != rho_in.dim:
        raise ValueError("decay trajectories require a qubit register")
    if any(q < 0 or q >= n for q in model.qubits):
        raise ValueError(f"decay qubits {model.qubits} out of range for {n} qubits")
    affected = list(model.qubits)
    gamma = model.gamma(t)
    ops = amplitude_damping_kraus(gamma)
    branches = []  # (probability, normalized post-trajectory state)
    for pattern in product((0, 1), repeat=len(affected)):
        k = np.eye(rho_in.dim, dtype=complex)
        for q, jumped in zip(affected, pattern):
            full = np.eye(1, dtype=complex)
            for pos in range(n):
                full = np.kron(full, ops[jumped] if pos == q else np.eye(2))
            k = full @ k
        out = k @ rho_in.mat @ dag(k)
        p = float(out.trace().real)
        if p > 1e-15:
            branches.append((p, out / p))
    probs = np.array([p for p, _ in branches])
    probs = probs / probs.sum()
    rng = stream(seed, 0xDECA)
    draws = rng.multinomial(n_traj, probs)
    avg = sum(cnt * state for cnt, (_, state) in zip(draws, branches)) / n_traj
    return DensityMatrix(rho_in.dims, (avg + dag(avg)) / 2)


# ---------------------------------------------------------------------------
# Closed-form long-time states under perfectly/partially correlated dephasing.


def _dicke(n: int, k: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    for u in range(2**n):
        if bin(u).count("1") == k:
            v[u] = 1.0
    return v / np.linalg.norm(v)


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


LONG_TIME_CONFIGS = ("sym2", "sym4", "mixed22", "mixed31")


def long_time_state(config: str, n_qubits: int | None = None) -> DensityMatrix:
    """Exact long-time limits of |+>^n under the engineered dephasing.

    sym2:    two equally-susceptible qubits -> mixture of |00>, |11> and the
             decoherence-free Bell state.
    sym4:    four equally-susceptible qubits -> Dicke-projector mixture
             (fixed excitation number subspaces are decoherence-free).
    mixed22: pairs in different encodings -> product of two sym2 states.
    mixed31: three qubits in one encoding, the fourth in another -> 3-qubit
             Dicke-block state times a maximally mixed qubit; every all-X
             correlator vanishes.
    """
    if config == "sym2":
        dims: tuple[int, ...] = (2, 2)
        psi_plus = np.zeros(4, dtype=complex)
        psi_plus[0b01] = psi_plus[0b10] = 1.0 / math.sqrt(2.0)
        mat = 0.25 * (_proj(_dicke(2, 0)) + _proj(_dicke(2, 2))) + 0.5 * _proj(psi_plus)
    elif config == "sym4":
        dims = (2, 2, 2, 2)
        mat = (
            (_proj(_dicke(4, 0)) + _proj(_dicke(4, 4))) / 16.0
            + (_proj(_dicke(4, 1)) + _proj(_dicke(4, 3))) / 4.0
            + 3.0 / 8.0 * _proj(_dicke(4, 2))
        )
    elif config == "mixed22":
        half = long_time_state("sym2").mat
        dims = (2, 2, 2, 2)
        mat = np.kron(half, half)
    elif config == "mixed31":
        dims = (2, 2, 2, 2)
        block = (
            (_proj(_dicke(3, 0)) + _proj(_dicke(3, 3))) / 8.0
            + 3.0 / 8.0 * (_proj(_dicke(3, 1)) + _proj(_dicke(3, 2)))
        )
        mat = np.kron(block, np.eye(2) / 2.0)
    else:
        raise ValueError(f"unknown long-time config {config!r}; choose from {LONG_TIME_CONFIGS}")
    if n_qubits is not None and n_qubits != len(dims):
        raise ValueError(f"config {config!r} describes {len(dims)} qubits, not {n_qubits}")
    return DensityMatrix(dims, mat)


# ---------------------------------------------------------------------------
# Scenario JSON (shared file schema).


def scenario_to_json(model: PhaseNoiseModel | DecayModel, **extras) -> dict:
    if isinstance(model, PhaseNoiseModel):
        doc = {
            "model": "dephasing",
            "sigmaB": model.sigma_b,
            "sigmaL": model.sigma_l,
            "suscept": list(model.suscept),
            "laserQubit": model.laser_qubit,
        }
    else:
        doc = {"model": "decay", "tSpont": model.t_spont, "qubits": list(model.qubits)}
    doc.update(extras)
    return doc


def scenario_from_json(doc: dict) -> PhaseNoiseModel | DecayModel:
    kind = doc.get("model")
    if kind == "dephasing":
        return PhaseNoiseModel(
            sigma_b=float(doc["sigmaB"]),
            sigma_l=float(doc.get("sigmaL", 0.0)),
            suscept=tuple(doc.get("suscept", (1.0, 1.0))),
            laser_qubit=int(doc.get("laserQubit", 1)),
        )
    if kind == "decay":
        return DecayModel(
            t_spont=float(doc["tSpont"]),
            qubits=tuple(doc.get("qubits", (0, 1))),
        )
    raise ValueError(f"unknown scenario model {kind!r}")
