"""Measurement-based lower bound on the correlation measure.

Preparing a product state, evolving it, and measuring one local observable
X_i per party bounds the exact measure from below:

    ibar >= c^2 / (4 M ln(d) |X_1|^2 ... |X_M|^2),

where c = <X_1...X_M> - <X_1>...<X_M> is the connected correlator of the
evolved state. d is the single-party dimension (d = 2 per qubit), also when
a pair is picked out of a larger register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .channels import PAULI
from .linalg import DensityMatrix, Observable, kron_all
from .measure import PartyStructure
from .records import MeasurementRecord, outcome_eigenvalues
from .rng import stream


@dataclass(frozen=True)
class CorrelatorResult:
    joint: float
    singles: tuple[float, ...]
    c: float
    lower_bound: float
    std_err: float | None = None

    def as_dict(self) -> dict:
        return {
            "joint": self.joint,
            "singles": list(self.singles),
            "c": self.c,
            "lower_bound": self.lower_bound,
            "std_err": self.std_err,
        }


def _bound_denominator(parties: PartyStructure, norms) -> float:
    norms = list(norms)
    if any(n <= 0.0 for n in norms):
        raise ValueError("observables must have nonzero operator norm")
    return 4.0 * parties.m * math.log(parties.d) * math.prod(n**2 for n in norms)


def _grouped(rho: DensityMatrix, parties: PartyStructure) -> np.ndarray:
    if rho.dim != parties.total_dim:
        raise ValueError(
            f"state dimension {rho.dim} does not form {parties.m} parties of dimension {parties.d}"
        )
    return rho.mat


def connected_correlator(
    rho: DensityMatrix, obs, parties: PartyStructure
) -> CorrelatorResult:
    """Exact connected correlator of one local observable per party."""
    obs = list(obs)
    if len(obs) != parties.m:
        raise ValueError(f"need one observable per party, got {len(obs)}")
    for x in obs:
        if x.mat.shape != (parties.d, parties.d):
            raise ValueError(
                f"observable dimension {x.mat.shape[0]} does not match party dimension {parties.d}"
            )
    mat = _grouped(rho, parties)
    joint_op = kron_all([x.mat for x in obs])
    joint = float(np.trace(joint_op @ mat).real)
    eye = np.eye(parties.d)
    singles = []
    for i, x in enumerate(obs):
        factors = [eye] * parties.m
        factors[i] = x.mat
        singles.append(float(np.trace(kron_all(factors) @ mat).real))
    c = joint - math.prod(singles)
    return CorrelatorResult(joint=joint, singles=tuple(singles), c=c, lower_bound=0.0)


def lower_bound_from_state(
    rho: DensityMatrix, obs, parties: PartyStructure
) -> CorrelatorResult:
    """Lower bound evaluated exactly from a density matrix."""
    obs = list(obs)
    base = connected_correlator(rho, obs, parties)
    denom = _bound_denominator(parties, (x.norm for x in obs))
    return CorrelatorResult(
        joint=base.joint,
        singles=base.singles,
        c=base.c,
        lower_bound=base.c**2 / denom,
    )


def lower_bound_from_counts(
    record: MeasurementRecord,
    obs_labels,
    parties: PartyStructure,
    bootstrap: bool = False,
    n_boot: int = 1000,
    seed: int = 0,
) -> CorrelatorResult:
    """Plug-in estimate of the bound from a finite-shot record.

    The record must contain at least one setting measuring the requested
    Pauli axis on every qubit simultaneously (all expectation values commute
    there); matching settings are pooled. The standard error comes from the
    multinomial covariance propagated to c by a first-order delta method,
    or from ``n_boot`` resamples when ``bootstrap`` is set.
    """
    labels = [str(c) for c in obs_labels]
    if len(labels) != parties.m or parties.d != 2:
        raise ValueError("counts-based bound expects one Pauli label per qubit party")
    if record.n_qubits != parties.m:
        raise ValueError(
            f"record covers {record.n_qubits} qubits but {parties.m} parties were declared; "
            "marginalize the record first"
        )
    wanted = "".join(labels)
    rows = [i for i, s in enumerate(record.settings) if s.bases == wanted]
    if not rows:
        missing = ", ".join(f"{c} on qubit {q}" for q, c in enumerate(labels))
        raise ValueError(f"record has no setting measuring {missing}")
    counts = record.counts[rows].sum(axis=0)
    total = float(counts.sum())
    p_hat = counts / total
    eig = outcome_eigenvalues(parties.m)  # [qubit, outcome]
    joint_vals = eig.prod(axis=0)
    joint = float(p_hat @ joint_vals)
    singles = tuple(float(p_hat @ eig[q]) for q in range(parties.m))
    c = joint - math.prod(singles)
    denom = _bound_denominator(parties, [1.0] * parties.m)
    # delta method: grad_s c = J(s) - sum_i E_i(s) prod_{j != i} m_j
    grad = joint_vals.copy()
    for i in range(parties.m):
        rest = math.prod(singles[j] for j in range(parties.m) if j != i)
        grad = grad - eig[i] * rest
    var_c = float(p_hat @ grad**2 - (p_hat @ grad) ** 2) / total
    se_c = math.sqrt(max(var_c, 0.0))
    if bootstrap:
        rng = stream(seed, 0xB007)
        resamples = rng.multinomial(int(round(total)), p_hat, size=n_boot) / total
        js = resamples @ joint_vals
        ss = resamples @ eig.T  # [resample, qubit]
        cs = js - ss.prod(axis=1)
        se_lb = float(np.std(cs**2 / denom, ddof=1))
    else:
        se_lb = abs(2.0 * c) * se_c / denom
    return CorrelatorResult(
        joint=joint,
        singles=singles,
        c=c,
        lower_bound=c**2 / denom,
        std_err=se_lb,
    )


def best_pauli_pair_bound(
    rho: DensityMatrix, parties: PartyStructure
) -> tuple[tuple[str, ...], CorrelatorResult]:
    """Convenience grid search over per-party Pauli observables; returns the
    labels and result of the largest bound. Not an optimizer: there is no
    universal recipe for the tightest observables."""
    if parties.d != 2:
        raise ValueError("Pauli grid search is defined for qubit parties")
    best_labels: tuple[str, ...] = ()
    best: CorrelatorResult | None = None
    for combo in product("XYZ", repeat=parties.m):
        obs = [Observable((2,), PAULI[c]) for c in combo]
        res = lower_bound_from_state(rho, obs, parties)
        if best is None or res.lower_bound > best.lower_bound:
            best = res
            best_labels = combo
    assert best is not None
    return best_labels, best
