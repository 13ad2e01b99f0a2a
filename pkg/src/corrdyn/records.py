"""Measurement settings and finite-shot count records.

Outcome bitstrings are indexed big-endian: qubit 0 is the leftmost tensor
factor and contributes the most significant bit. Outcome bit 0 corresponds
to the +1 eigenstate of the measured Pauli axis, bit 1 to the -1 eigenstate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

BASIS_CHARS = "XYZ"
INPUT_CHARS = "01+i"


@dataclass(frozen=True)
class MeasurementSetting:
    """Per-qubit measurement bases, plus the prepared input state for
    process tomography (one of |0>, |1>, |+>, |+i> per qubit)."""

    bases: str
    input_state: str | None = None

    def __post_init__(self):
        if any(c not in BASIS_CHARS for c in self.bases):
            raise ValueError(f"bases must be drawn from {BASIS_CHARS}, got {self.bases!r}")
        if self.input_state is not None:
            if len(self.input_state) != len(self.bases):
                raise ValueError("input state and bases must cover the same qubits")
            if any(c not in INPUT_CHARS for c in self.input_state):
                raise ValueError(
                    f"input labels must be drawn from {INPUT_CHARS!r}, got {self.input_state!r}"
                )


@dataclass(frozen=True)
class MeasurementRecord:
    """Counts per outcome per setting. Counts are floats so that exact
    (infinite-shot) records can be represented alongside sampled ones."""

    n_qubits: int
    settings: tuple[MeasurementSetting, ...]
    counts: np.ndarray  # (n_settings, 2**n_qubits)
    shots: np.ndarray  # (n_settings,)
    seed: int | None = None

    def __post_init__(self):
        counts = np.array(self.counts, dtype=float)
        shots = np.array(self.shots, dtype=float)
        n_out = 2**self.n_qubits
        if counts.shape != (len(self.settings), n_out):
            raise ValueError(
                f"counts shape {counts.shape} does not match "
                f"{len(self.settings)} settings x {n_out} outcomes"
            )
        if shots.shape != (len(self.settings),):
            raise ValueError("need one shot count per setting")
        for s in self.settings:
            if len(s.bases) != self.n_qubits:
                raise ValueError(f"setting {s} does not cover {self.n_qubits} qubits")
        if np.any(np.abs(counts.sum(axis=1) - shots) > 1e-6 * np.maximum(shots, 1.0)):
            raise ValueError("per-setting counts must sum to the shot count")
        counts.setflags(write=False)
        shots.setflags(write=False)
        object.__setattr__(self, "settings", tuple(self.settings))
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "shots", shots)

    @property
    def total_shots(self) -> float:
        return float(self.shots.sum())

    def is_process_record(self) -> bool:
        return all(s.input_state is not None for s in self.settings)


def outcome_eigenvalues(n_qubits: int) -> np.ndarray:
    """Array [q, s] of the +-1 eigenvalue of qubit q in outcome s."""
    s = np.arange(2**n_qubits)
    return np.stack([1.0 - 2.0 * ((s >> (n_qubits - 1 - q)) & 1) for q in range(n_qubits)])


def marginalize_record(record: MeasurementRecord, keep_qubits) -> MeasurementRecord:
    """Discard the outcomes of every qubit not in ``keep_qubits`` by summing
    counts over their bits."""
    keep = sorted(set(keep_qubits))
    if any(q < 0 or q >= record.n_qubits for q in keep):
        raise ValueError(f"keep set {keep} out of range for {record.n_qubits} qubits")
    n_new = len(keep)
    counts = record.counts.reshape((len(record.settings),) + (2,) * record.n_qubits)
    drop_axes = tuple(1 + q for q in range(record.n_qubits) if q not in keep)
    counts = counts.sum(axis=drop_axes).reshape(len(record.settings), 2**n_new)
    settings = tuple(
        MeasurementSetting(
            bases="".join(s.bases[q] for q in keep),
            input_state=None if s.input_state is None else "".join(s.input_state[q] for q in keep),
        )
        for s in record.settings
    )
    return MeasurementRecord(n_new, settings, counts, record.shots.copy(), record.seed)


def record_to_json(record: MeasurementRecord) -> dict:
    settings = []
    for s in record.settings:
        entry = {"bases": s.bases}
        if s.input_state is not None:
            entry["input"] = s.input_state
        settings.append(entry)
    return {
        "n": record.n_qubits,
        "settings": settings,
        "counts": record.counts.tolist(),
        "shots": record.shots.tolist(),
        "seed": record.seed,
    }


def record_from_json(doc: dict) -> MeasurementRecord:
    settings = tuple(
        MeasurementSetting(bases=s["bases"], input_state=s.get("input"))
        for s in doc["settings"]
    )
    return MeasurementRecord(
        n_qubits=int(doc["n"]),
        settings=settings,
        counts=np.asarray(doc["counts"], dtype=float),
        shots=np.asarray(doc["shots"], dtype=float),
        seed=doc.get("seed"),
    )


def save_record(record: MeasurementRecord, path) -> None:
    with open(path, "w") as fh:
        json.dump(record_to_json(record), fh)


def load_record(path) -> MeasurementRecord:
    with open(path) as fh:
        return record_from_json(json.load(fh))
