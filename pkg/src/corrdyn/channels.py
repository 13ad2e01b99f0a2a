"""CPTP maps in Kraus, Choi and process-matrix (chi) representations.

The Choi state of a channel on a register of total dimension D is stored in
block order: the first tensor factor is the channel output S, the second the
unperturbed copy S'. ``choi_state`` exposes the party-interleaved ordering
S1 S1' S2 S2' ... used by the correlation measure, where bipartite cuts are
contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .linalg import (
    DensityMatrix,
    dag,
    kron,
    kron_all,
    is_hermitian,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    permute_subsystems,
)

COMPLETENESS_ATOL = 1e-9
KRAUS_EIG_CUTOFF = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map on a ``dims`` register."""

    dims: tuple[int, ...]
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        d = int(np.prod(dims))
        ops = []
        for k in self.kraus:
            k = np.array(k, dtype=complex)
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator shape {k.shape} does not match dims {dims}")
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        comp = sum(dag(k) @ k for k in ops)
        if np.max(np.abs(comp - np.eye(d))) > COMPLETENESS_ATOL:
            raise ValueError("Kraus operators do not satisfy the completeness relation")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "kraus", tuple(ops))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @classmethod
    def from_kraus(cls, kraus, dims) -> "QuantumChannel":
        return cls(tuple(dims), tuple(kraus))

    @classmethod
    def from_choi(cls, choi: np.ndarray, dims) -> "QuantumChannel":
        """Build a channel from its trace-normalized Choi state in block
        (output, input-copy) order."""
        dims = tuple(int(d) for d in dims)
        d = int(np.prod(dims))
        choi = np.asarray(choi, complex)
        if choi.shape != (d * d, d * d):
            raise ValueError(f"Choi matrix shape {choi.shape} does not match dims {dims}")
        if abs(choi.trace() - 1.0) > 1e-8:
            raise ValueError(f"Choi state trace is {choi.trace():.6f}, expected 1")
        marginal = partial_trace(choi, [d, d], keep=[1])
        if np.max(np.abs(marginal - np.eye(d) / d)) > 1e-7:
            raise ValueError("Choi state does not describe a trace-preserving map")
        hermitized = (choi + dag(choi)) / 2
        w, v = np.linalg.eigh(hermitized)
        if w[0] < -1e-8:
            raise ValueError(f"Choi state has eigenvalue {w[0]:.3e}, not CP")
        kraus = [
            np.sqrt(d * lam) * v[:, i].reshape(d, d)
            for i, lam in enumerate(w)
            if lam > KRAUS_EIG_CUTOFF
        ]
        channel = cls(dims, tuple(kraus))
        # the input Choi state is exact for the derived Kraus set; seed the
        # cache rather than rebuilding it from the Kraus outer products
        hermitized = hermitized.copy()
        hermitized.setflags(write=False)
        channel.__dict__["choi"] = hermitized
        return channel

    @cached_property
    def choi(self) -> np.ndarray:
        """Trace-normalized Choi state, block (output, input-copy) order."""
        d = self.dim
        vecs = np.stack([k.ravel() for k in self.kraus])
        c = vecs.T @ vecs.conj() / d  # sum_j vec(K_j) vec(K_j)^dag / d
        return (c + dag(c)) / 2

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, complex)
        return sum(k @ m @ dag(k) for k in self.kraus)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dims != self.dims:
            raise ValueError(f"state dims {rho.dims} do not match channel dims {self.dims}")
        return DensityMatrix(self.dims, self.apply_matrix(rho.mat))

    def apply_via_choi(self, rho: DensityMatrix) -> DensityMatrix:
        """Channel action computed from the Choi form; cross-representation
        oracle for :meth:`apply`."""
        if rho.dims != self.dims:
            raise ValueError(f"state dims {rho.dims} do not match channel dims {self.dims}")
        d = self.dim
        c = self.choi.reshape(d, d, d, d)
        out = d * np.einsum("aubv,uv->ab", c, rho.mat)
        return DensityMatrix(self.dims, (out + dag(out)) / 2)

    def choi_state(self, party_dims=None) -> DensityMatrix:
        """Choi-Jamiolkowski state with parties interleaved: S1 S1' S2 S2' ...

        ``party_dims`` groups the register into parties (contiguous blocks);
        default is one party per subsystem of ``dims``.
        """
        party_dims = list(self.dims) if party_dims is None else [int(d) for d in party_dims]
        if int(np.prod(party_dims)) != self.dim:
            raise ValueError(
                f"party dims {party_dims} do not match channel dims {self.dims}"
            )
        m = len(party_dims)
        block_dims = party_dims + party_dims  # S parties then S' parties
        perm = []
        for i in range(m):
            perm += [i, m + i]
        mat = permute_subsystems(self.choi, block_dims, perm)
        inter_dims = []
        for d in party_dims:
            inter_dims += [d, d]
        return DensityMatrix(tuple(inter_dims), mat)


def choi_state(channel: QuantumChannel, party_dims=None) -> DensityMatrix:
    return channel.choi_state(party_dims)


def apply_channel(channel: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    return channel.apply(rho)


def tensor_channels(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    kraus = tuple(kron(ka, kb) for ka, kb in product(a.kraus, b.kraus))
    return QuantumChannel(a.dims + b.dims, kraus)


def compose_channels(outer: QuantumChannel, inner: QuantumChannel) -> QuantumChannel:
    """The map ``rho -> outer(inner(rho))``."""
    if outer.dims != inner.dims:
        raise ValueError(f"dimension mismatch: {outer.dims} vs {inner.dims}")
    kraus = tuple(ko @ ki for ko, ki in product(outer.kraus, inner.kraus))
    return QuantumChannel(outer.dims, kraus)


def identity_channel(dims) -> QuantumChannel:
    d = int(np.prod(list(dims)))
    return QuantumChannel(tuple(dims), (np.eye(d, dtype=complex),))


def unitary_channel(u: np.ndarray, dims) -> QuantumChannel:
    return QuantumChannel(tuple(dims), (np.asarray(u, complex),))


def swap_channel(d: int = 2) -> QuantumChannel:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return unitary_channel(s, (d, d))


def depolarizing_channel(dims) -> QuantumChannel:
    """Fully depolarizing map: every input goes to the maximally mixed state."""
    d = int(np.prod(list(dims)))
    kraus = tuple(
        np.sqrt(1.0 / d) * np.outer(_basis(d, i), _basis(d, j).conj())
        for i in range(d)
        for j in range(d)
    )
    return QuantumChannel(tuple(dims), kraus)


def full_dephasing_channel(dims) -> QuantumChannel:
    """Kills every computational-basis coherence."""
    d = int(np.prod(list(dims)))
    kraus = tuple(np.outer(_basis(d, i), _basis(d, i).conj()) for i in range(d))
    return QuantumChannel(tuple(dims), kraus)


def _basis(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def random_channel(dims, kraus_rank: int, rng: np.random.Generator) -> QuantumChannel:
    """Haar-random CPTP map via a random Stinespring isometry."""
    d = int(np.prod(list(dims)))
    g = rng.standard_normal((d * kraus_rank, d)) + 1j * rng.standard_normal((d * kraus_rank, d))
    q, _ = np.linalg.qr(g)
    return QuantumChannel(tuple(dims), tuple(q.reshape(kraus_rank, d, d)))


# ---------------------------------------------------------------------------
# Process-matrix (chi) representation over a fixed Hermitian operator basis.


@dataclass(frozen=True)
class PauliOpBasis:
    """Ordered Hermitian, mutually trace-orthogonal operator basis."""

    n: int
    labels: tuple[str, ...]
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        d = 2**self.n
        elems = []
        for e in self.elements:
            e = np.array(e, dtype=complex)
            if e.shape != (d, d):
                raise ValueError(f"basis element shape {e.shape} does not fit {self.n} qubits")
            if not is_hermitian(e):
                raise ValueError("basis elements must be Hermitian")
            e.setflags(write=False)
            elems.append(e)
        gram = np.array([[np.trace(a @ b) for b in elems] for a in elems])
        if np.max(np.abs(gram - np.diag(np.diag(gram)))) > 1e-10:
            raise ValueError("basis elements must be mutually trace-orthogonal")
        object.__setattr__(self, "elements", tuple(elems))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def full(cls, n: int) -> "PauliOpBasis":
        labels, elems = [], []
        for combo in product("IXYZ", repeat=n):
            labels.append("".join(combo))
            elems.append(kron_all([PAULI[c] for c in combo]))
        return cls(n, tuple(labels), tuple(elems))

    @classmethod
    def dephasing_pair(cls) -> "PauliOpBasis":
        """Restricted 2-qubit basis {1x1, Zx1, 1xZ, ZxZ} of the analytic
        dephasing process matrix."""
        labels = ("II", "ZI", "IZ", "ZZ")
        elems = tuple(kron(PAULI[a], PAULI[b]) for a, b in ("II", "ZI", "IZ", "ZZ"))
        return cls(2, labels, elems)

    def __len__(self) -> int:
        return len(self.elements)


def chi_to_kraus(chi: np.ndarray, basis: PauliOpBasis, dims=None) -> QuantumChannel:
    """Channel from process-matrix coefficients: rho -> sum chi_ab G_a rho G_b."""
    chi = np.asarray(chi, complex)
    nb = len(basis)
    if chi.shape != (nb, nb):
        raise ValueError(f"chi shape {chi.shape} does not match basis size {nb}")
    if not is_hermitian(chi, atol=1e-9):
        raise ValueError("chi matrix must be Hermitian")
    w, v = np.linalg.eigh((chi + dag(chi)) / 2)
    if w[0] < -COMPLETENESS_ATOL:
        raise ValueError(f"chi matrix is not PSD: eigenvalue {w[0]:.3e}")
    comp = sum(
        chi[a, b] * basis.elements[b] @ basis.elements[a]
        for a in range(nb)
        for b in range(nb)
    )
    d = basis.elements[0].shape[0]
    if np.max(np.abs(comp - np.eye(d))) > COMPLETENESS_ATOL:
        raise ValueError("chi coefficients do not describe a trace-preserving map")
    kraus = []
    for i, lam in enumerate(w):
        if lam > KRAUS_EIG_CUTOFF:
            op = sum(v[a, i] * basis.elements[a] for a in range(nb))
            kraus.append(np.sqrt(lam) * op)
    dims = tuple(dims) if dims is not None else (2,) * basis.n
    return QuantumChannel(dims, tuple(kraus))


def kraus_to_chi(channel: QuantumChannel, basis: PauliOpBasis) -> np.ndarray:
    """Expand a channel over the basis; exact only when the Kraus operators
    lie in the basis span (checked)."""
    nb = len(basis)
    norms = np.array([np.trace(g @ g).real for g in basis.elements])
    coeffs = np.array(
        [[np.trace(g @ k) / n for g, n in zip(basis.elements, norms)] for k in channel.kraus]
    )
    for k, c in zip(channel.kraus, coeffs):
        recon = sum(ci * g for ci, g in zip(c, basis.elements))
        if np.max(np.abs(recon - k)) > 1e-8:
            raise ValueError("Kraus operator outside the span of the basis")
    return coeffs.T @ coeffs.conj()


# ---------------------------------------------------------------------------
# JSON serialization of channels. The CLI accepts either form.


def channel_to_json(channel: QuantumChannel, include_choi: bool = False) -> dict:
    doc: dict = {"dims": list(channel.dims)}
    if include_choi:
        doc["choi"] = matrix_to_json(channel.choi)
    else:
        doc["kraus"] = [matrix_to_json(k) for k in channel.kraus]
    return doc


def channel_from_json(doc: dict) -> QuantumChannel:
    dims = tuple(doc["dims"])
    if "kraus" in doc:
        return QuantumChannel.from_kraus([matrix_from_json(m) for m in doc["kraus"]], dims)
    if "choi" in doc:
        return QuantumChannel.from_choi(matrix_from_json(doc["choi"]), dims)
    raise ValueError("channel JSON needs a 'kraus' or 'choi' field")
