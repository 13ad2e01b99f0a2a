"""Tomographic measurement simulation and iterative maximum-likelihood
reconstruction of states and processes.

Settings are local Pauli bases (X, Y, Z per qubit); process tomography adds
per-qubit input preparations from {|0>, |1>, |+>, |+i>}, giving the full
4 x 3 = 12 per-qubit grid. Records carry multinomial counts ("projection
noise") or exact expected counts.

Reconstruction is the fixed-point iteration rho -> N[R rho R] with
R = sum_k (f_k / p_k) Pi_k, diluted towards the identity whenever a full
step would decrease the likelihood. The process variant runs on the Choi
state and restores trace preservation after every step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .channels import QuantumChannel
from .linalg import DensityMatrix, dag, fidelity, partial_trace
from .records import MeasurementRecord, MeasurementSetting
from .rng import stream

LOGLIK_TOL = 1e-10
MAX_ITERATIONS = 10_000

# Columns are the +1 and -1 eigenvectors of each measurement axis.
_EIGBASIS = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0),
    "Y": np.array([[1, 1], [1j, -1j]], dtype=complex) / math.sqrt(2.0),
    "Z": np.eye(2, dtype=complex),
}

_INPUT_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2.0),
    "i": np.array([1, 1j], dtype=complex) / math.sqrt(2.0),
}


def state_tomography_settings(n_qubits: int) -> list[MeasurementSetting]:
    """All 3^N local Pauli measurement bases."""
    return [
        MeasurementSetting(bases="".join(c)) for c in product("XYZ", repeat=n_qubits)
    ]


def process_tomography_settings(n_qubits: int) -> list[MeasurementSetting]:
    """The full input x basis grid: exactly 12^N settings."""
    per_qubit = [(i, b) for i in "01+i" for b in "XYZ"]
    out = []
    for combo in product(per_qubit, repeat=n_qubits):
        out.append(
            MeasurementSetting(
                bases="".join(b for _, b in combo),
                input_state="".join(i for i, _ in combo),
            )
        )
    return out


@lru_cache(maxsize=None)
def _outcome_vectors(bases: str) -> np.ndarray:
    """(D, 2^n) matrix whose column s is the measured eigenvector of the
    outcome bitstring s."""
    v = np.ones((1, 1), dtype=complex)
    for b in bases:
        v = np.kron(v, _EIGBASIS[b])
    v.setflags(write=False)
    return v


def input_state_vector(labels: str) -> np.ndarray:
    v = np.ones(1, dtype=complex)
    for c in labels:
        v = np.kron(v, _INPUT_KETS[c])
    return v


def born_probabilities(rho: np.ndarray, bases: str) -> np.ndarray:
    v = _outcome_vectors(bases)
    p = np.einsum("is,ij,js->s", v.conj(), rho, v).real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def simulate_record(
    source: DensityMatrix | QuantumChannel,
    settings,
    shots: int,
    seed: int,
    exact: bool = False,
) -> MeasurementRecord:
    """Sample multinomial counts for every setting (Born rule after local
    basis rotation). ``exact=True`` stores the expected counts instead of
    sampling, i.e. a record free of projection noise.
    """
    if shots < 1:
        raise ValueError("need at least one shot per setting")
    settings = list(settings)
    if isinstance(source, DensityMatrix):
        if any(s.input_state is not None for s in settings):
            raise ValueError("a state source cannot use settings with input preparations")
        n = int(round(math.log2(source.dim)))

        def rho_for(s):
            return source.mat

    else:
        if any(s.input_state is None for s in settings):
            raise ValueError("a channel source needs input preparations in every setting")
        n = int(round(math.log2(source.dim)))
        cache: dict[str, np.ndarray] = {}

        def rho_for(s):
            if s.input_state not in cache:
                psi = input_state_vector(s.input_state)
                cache[s.input_state] = source.apply_matrix(np.outer(psi, psi.conj()))
            return cache[s.input_state]

    counts = np.zeros((len(settings), 2**n))
    for k, s in enumerate(settings):
        p = born_probabilities(rho_for(s), s.bases)
        if exact:
            counts[k] = shots * p
        else:
            counts[k] = stream(seed, k).multinomial(shots, p)
    return MeasurementRecord(
        n_qubits=n,
        settings=tuple(settings),
        counts=counts,
        shots=np.full(len(settings), float(shots)),
        seed=seed,
    )


def simulate_record_from_table(
    table, settings, shots: int, seed: int, exact: bool = False
) -> MeasurementRecord:
    """Record whose per-setting states come from ``table[input_state]``;
    used when the evolved states are trajectory averages rather than the
    output of a closed-form channel."""
    settings = list(settings)
    first = next(iter(table.values()))
    n = int(round(math.log2(first.dim)))
    counts = np.zeros((len(settings), 2**n))
    for k, s in enumerate(settings):
        if s.input_state not in table:
            raise ValueError(f"state table is missing input {s.input_state!r}")
        p = born_probabilities(table[s.input_state].mat, s.bases)
        if exact:
            counts[k] = shots * p
        else:
            counts[k] = stream(seed, k).multinomial(shots, p)
    return MeasurementRecord(
        n_qubits=n,
        settings=tuple(settings),
        counts=counts,
        shots=np.full(len(settings), float(shots)),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Maximum likelihood reconstruction.


@dataclass(frozen=True)
class MLEInfo:
    iterations: int
    converged: bool
    logliks: tuple[float, ...]


def _check_state_coverage(record: MeasurementRecord, allow_incomplete: bool) -> None:
    have = {s.bases for s in record.settings}
    needed = {"".join(c) for c in product("XYZ", repeat=record.n_qubits)}
    missing = sorted(needed - have)
    if missing:
        if not allow_incomplete:
            raise ValueError(f"record is missing measurement bases: {', '.join(missing)}")
        warnings.warn(
            f"reconstructing from an informationally incomplete record; "
            f"missing bases: {', '.join(missing)}",
            stacklevel=3,
        )


def _check_process_coverage(record: MeasurementRecord, allow_incomplete: bool) -> None:
    have = {(s.input_state, s.bases) for s in record.settings}
    needed = {
        (s.input_state, s.bases) for s in process_tomography_settings(record.n_qubits)
    }
    missing = sorted(needed - have)
    if missing:
        if not allow_incomplete:
            preview = ", ".join(f"{i}/{b}" for i, b in missing[:8])
            more = "" if len(missing) <= 8 else f" (+{len(missing) - 8} more)"
            raise ValueError(f"record is missing input/basis settings: {preview}{more}")
        warnings.warn(
            f"reconstructing from {len(missing)} missing input/basis settings",
            stacklevel=3,
        )


def _rank_one_mle(b: np.ndarray, counts: np.ndarray, dim: int, tp_project, tol: float, max_iter: int):
    """Shared fixed-point loop. ``b`` holds one measurement vector per
    column; ``tp_project`` post-processes a candidate (identity for states,
    trace-preservation restoration for processes)."""
    total = counts.sum()
    active = counts > 0
    n_active = counts[active]
    bc = b.conj()
    b_dag = bc.T.copy()

    def probs(rho):
        return np.clip(np.einsum("ik,ik->k", bc, rho @ b).real, 1e-15, None)

    def loglik(p):
        return float(n_active @ np.log(p[active]))

    rho = np.eye(dim, dtype=complex) / dim
    rho = tp_project(rho)
    p = probs(rho)
    ll = loglik(p)
    logliks = [ll]
    converged = False
    it = 0
    eye = np.eye(dim, dtype=complex)
    for it in range(1, max_iter + 1):
        w = np.where(active, counts / (p * total), 0.0)
        r = (b * w) @ b_dag
        accepted = None
        eps = 1.0
        while eps >= 1.0 / 64.0:
            t = r if eps == 1.0 else eye * (1.0 - eps) + eps * r
            cand = t @ rho @ dag(t)
            cand = tp_project((cand + dag(cand)) / 2)
            p_cand = probs(cand)
            ll_cand = loglik(p_cand)
            if ll_cand >= ll - 1e-12:
                accepted = (cand, p_cand, ll_cand)
                break
            eps *= 0.5  # dilute towards the identity
        if accepted is None:
            converged = True
            break
        rho, p, ll_new = accepted
        gain = ll_new - ll
        ll = ll_new
        logliks.append(ll)
        if gain < tol:
            converged = True
            break
    return rho, MLEInfo(iterations=it, converged=converged, logliks=tuple(logliks))


def _state_measurement_matrix(record: MeasurementRecord) -> tuple[np.ndarray, np.ndarray]:
    cols = []
    for s in record.settings:
        cols.append(_outcome_vectors(s.bases))
    b = np.concatenate(cols, axis=1)
    return b, record.counts.ravel()


def mle_state_tomography(
    record: MeasurementRecord,
    n_qubits: int,
    allow_incomplete: bool = False,
    return_info: bool = False,
    tol: float = LOGLIK_TOL,
    max_iter: int = MAX_ITERATIONS,
):
    """Iterative MLE state reconstruction from a count record."""
    if record.n_qubits != n_qubits:
        raise ValueError(f"record covers {record.n_qubits} qubits, expected {n_qubits}")
    _check_state_coverage(record, allow_incomplete)
    b, counts = _state_measurement_matrix(record)
    mat, info = _rank_one_mle(
        b, counts, 2**n_qubits, lambda r: r / r.trace().real, tol, max_iter
    )
    rho = DensityMatrix((2,) * n_qubits, _positivity_cleanup(mat))
    return (rho, info) if return_info else rho


def _positivity_cleanup(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((mat + dag(mat)) / 2)
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    return (v * w) @ dag(v)


def _inv_sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((mat + dag(mat)) / 2)
    w = np.clip(w, 1e-14, None)
    return (v / np.sqrt(w)) @ dag(v)


def mle_process_tomography(
    record: MeasurementRecord,
    n_qubits: int,
    allow_incomplete: bool = False,
    return_info: bool = False,
    tol: float = LOGLIK_TOL,
    max_iter: int = MAX_ITERATIONS,
):
    """Iterative MLE over the Choi state with trace preservation restored
    after every accepted step."""
    if record.n_qubits != n_qubits:
        raise ValueError(f"record covers {record.n_qubits} qubits, expected {n_qubits}")
    if not record.is_process_record():
        raise ValueError("process tomography needs input preparations in every setting")
    _check_process_coverage(record, allow_incomplete)
    d = 2**n_qubits
    cols = []
    for s in record.settings:
        outs = _outcome_vectors(s.bases)  # (d, 2^n)
        psi = input_state_vector(s.input_state).conj()
        # measurement vector on the Choi space: sqrt(d) |outcome> x |psi*>
        cols.append(math.sqrt(d) * np.einsum("ms,u->mus", outs, psi).reshape(d * d, -1))
    b = np.concatenate(cols, axis=1)
    counts = record.counts.ravel()

    def tp_project(sigma):
        lam = partial_trace(sigma, [d, d], keep=[1])
        s = _inv_sqrt_psd(lam)
        # (1 x s) sigma (1 x s^dag), blockwise on the input-copy factor:
        # contract s into axis 1 and s* into axis 3 of sigma[i, u, j, v]
        sr = sigma.reshape(d, d, d, d)
        out = np.tensordot(s, sr, axes=([1], [1]))  # [a, i, j, v]
        out = np.tensordot(out, s.conj(), axes=([3], [1]))  # [a, i, j, b]
        out = out.transpose(1, 0, 2, 3)
        return out.reshape(d * d, d * d) / d

    choi, info = _rank_one_mle(b, counts, d * d, tp_project, tol, max_iter)
    channel = QuantumChannel.from_choi(_choi_cleanup(choi, d), (2,) * n_qubits)
    return (channel, info) if return_info else channel


def _choi_cleanup(choi: np.ndarray, d: int) -> np.ndarray:
    w, v = np.linalg.eigh((choi + dag(choi)) / 2)
    w = np.clip(w, 0.0, None)
    mat = (v * w) @ dag(v)
    # restore exact trace preservation after eigenvalue clipping
    lam = partial_trace(mat, [d, d], keep=[1])
    a = np.kron(np.eye(d, dtype=complex), _inv_sqrt_psd(lam))
    return (a @ mat @ dag(a)) / d


def process_fidelity(a: QuantumChannel, b: QuantumChannel) -> float:
    """Uhlmann fidelity of the normalized Choi states."""
    d = a.dim
    return fidelity(
        DensityMatrix((d, d), a.choi),
        DensityMatrix((d, d), b.choi),
    )
