"""Dense complex linear algebra for multi-qubit operators.

Conventions used throughout the package:

* Matrices are ``numpy`` arrays of ``complex128`` in row-major layout.
* A register is an ordered list of subsystem dimensions ``dims``;
  ``dims[0]`` is the leftmost tensor factor, and a basis index ``u`` of the
  full space decomposes big-endian over ``dims``.
* Entropies are in bits (binary logarithm). Formulas that need a natural
  logarithm apply ``ln d`` explicitly at the call site.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

# Tolerances: eigensolver noise floor on <=256x256 Hermitian matrices sets
# the support cutoff; reconstruction (MLE, Monte-Carlo) outputs are PSD only
# up to solver tolerance, hence the wider PSD slack.
HERM_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9
EIG_CUTOFF = 1e-12

LN2 = math.log(2.0)


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a, complex), np.asarray(b, complex))


def kron_all(mats) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence of matrices."""
    return reduce(kron, mats)


def is_hermitian(a: np.ndarray, atol: float = HERM_ATOL) -> bool:
    return bool(np.allclose(a, a.conj().T, atol=atol, rtol=0.0))


def matrices_close(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def permute_subsystems(a: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder tensor factors of an operator.

    ``perm[i]`` is the index (into ``dims``) of the subsystem that ends up at
    position ``i`` of the output register.
    """
    dims = list(dims)
    perm = list(perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"not a permutation of {len(dims)} subsystems: {perm}")
    n = len(dims)
    t = np.asarray(a, complex).reshape(dims + dims)
    t = t.transpose(perm + [p + n for p in perm])
    d = int(np.prod(dims))
    return np.ascontiguousarray(t.reshape(d, d))


def embed_operator(op: np.ndarray, dims, targets) -> np.ndarray:
    """Embed an operator acting on ``targets`` (in that order) into the full
    register described by ``dims``, identity elsewhere."""
    dims = list(dims)
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target subsystems: {targets}")
    rest = [i for i in range(len(dims)) if i not in targets]
    full = kron(op, np.eye(int(np.prod([dims[i] for i in rest], initial=1.0))))
    # full is ordered targets + rest; permute back to the register order
    order = targets + rest
    inv = [order.index(i) for i in range(len(dims))]
    return permute_subsystems(full, [dims[i] for i in order], inv)


def partial_trace(a: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem not in ``keep``; kept subsystems stay in
    their original order."""
    dims = list(dims)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("cannot trace out all subsystems")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep set {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = np.asarray(a, complex).reshape(dims + dims)
    for ax in sorted((i for i in range(n) if i not in keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def _clip_spectrum(a: np.ndarray, psd_atol: float = PSD_ATOL):
    """Eigendecompose a Hermitian matrix; clamp eigenvalues in [-psd_atol, 0)
    to zero and reject anything more negative."""
    w, v = np.linalg.eigh(a)
    if w[0] < -psd_atol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, None), v


def vn_entropy_eigvals(w: np.ndarray) -> float:
    w = w[w > EIG_CUTOFF]
    return float(-(w * np.log2(w)).sum()) if w.size else 0.0


def trace_norm(a: np.ndarray) -> float:
    """Trace norm, the sum of singular values."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace norm requires a square matrix, got shape {a.shape}")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def op_norm(a: np.ndarray) -> float:
    """Operator norm of a Hermitian matrix (largest absolute eigenvalue)."""
    return float(np.max(np.abs(np.linalg.eigvalsh(a))))


@dataclass(frozen=True)
class DensityMatrix:
    """Positive unit-trace operator with a subsystem dimension layout.

    Validates hermiticity, unit trace and positivity (up to numerical slack)
    on construction; instances are immutable.
    """

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        m = np.array(self.mat, dtype=complex)
        d = int(np.prod(dims))
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian within tolerance")
        tr = m.trace()
        if abs(tr - 1.0) > max(TRACE_ATOL, 1e-12 * d):
            raise ValueError(f"trace is {tr:.12f}, expected 1")
        wmin = float(np.linalg.eigvalsh(m)[0])
        if wmin < -PSD_ATOL:
            raise ValueError(f"density matrix has eigenvalue {wmin:.3e} < -{PSD_ATOL}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_vector(cls, psi, dims) -> "DensityMatrix":
        psi = np.asarray(psi, complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims), np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dims) -> "DensityMatrix":
        d = int(np.prod(list(dims)))
        return cls(tuple(dims), np.eye(d) / d)

    def partial_trace(self, keep) -> "DensityMatrix":
        keep = sorted(set(keep))
        sub = partial_trace(self.mat, self.dims, keep)
        return DensityMatrix(tuple(self.dims[i] for i in keep), sub)

    def permute(self, perm) -> "DensityMatrix":
        return DensityMatrix(
            tuple(self.dims[p] for p in perm),
            permute_subsystems(self.mat, self.dims, perm),
        )

    def eigvals(self) -> np.ndarray:
        w, _ = _clip_spectrum(self.mat)
        return w

    def close_to(self, other: "DensityMatrix", atol: float) -> bool:
        return self.dims == other.dims and matrices_close(self.mat, other.mat, atol)


@dataclass(frozen=True)
class Observable:
    """Hermitian operator with its spectral norm cached."""

    dims: tuple[int, ...]
    mat: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = np.array(self.mat, dtype=complex)
        d = int(np.prod(dims))
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if not is_hermitian(m):
            raise ValueError("observable is not Hermitian within tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "norm", op_norm(m))

    def expectation(self, rho: DensityMatrix | np.ndarray) -> float:
        m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return float(np.trace(self.mat @ m).real)


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits; eigenvalues below the support cutoff
    contribute zero."""
    return vn_entropy_eigvals(rho.eigvals())


def support_contained(rho: DensityMatrix, sigma: DensityMatrix, cutoff: float = EIG_CUTOFF) -> bool:
    """True when the support of rho lies inside the support of sigma."""
    w, v = _clip_spectrum(sigma.mat)
    kernel = v[:, w <= cutoff]
    if kernel.shape[1] == 0:
        return True
    overlap = kernel.conj().T @ rho.mat @ kernel
    return float(np.trace(overlap).real) <= math.sqrt(cutoff)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy S(rho||sigma) in bits.

    Returns ``math.inf`` exactly when the support condition fails; use
    :func:`support_contained` for the explicit check.
    """
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    if not support_contained(rho, sigma):
        return math.inf
    wr, vr = _clip_spectrum(rho.mat)
    ws, vs = _clip_spectrum(sigma.mat)
    # -Tr[rho log sigma] via the overlap matrix |<s_j|r_i>|^2
    ws = np.clip(ws, EIG_CUTOFF, None)
    overlap = np.abs(vs.conj().T @ vr) ** 2  # [j, i]
    cross = float(-(np.log2(ws) @ overlap @ wr))
    return max(0.0, cross - vn_entropy_eigvals(wr))


def mutual_information(rho: DensityMatrix, part_a) -> float:
    """Quantum mutual information (bits) across the bipartition given by the
    subsystem index set ``part_a`` versus the rest."""
    part_a = sorted(set(part_a))
    part_b = [i for i in range(len(rho.dims)) if i not in part_a]
    if not part_a or not part_b:
        raise ValueError("bipartition must be nontrivial")
    return (
        vn_entropy(rho.partial_trace(part_a))
        + vn_entropy(rho.partial_trace(part_b))
        - vn_entropy(rho)
    )


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    wr, vr = _clip_spectrum(rho.mat)
    sqrt_rho = (vr * np.sqrt(wr)) @ vr.conj().T
    inner = sqrt_rho @ sigma.mat @ sqrt_rho
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sqrt(w).sum() ** 2)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    return 0.5 * trace_norm(rho.mat - sigma.mat)


def random_density_matrix(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-induced random state of the given rank (full rank by default)."""
    d = int(np.prod(list(dims)))
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    w = g @ g.conj().T
    return DensityMatrix(tuple(dims), w / w.trace())


def random_pure_state(dims, rng: np.random.Generator) -> DensityMatrix:
    d = int(np.prod(list(dims)))
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.from_vector(psi, dims)


def random_observable(dims, rng: np.random.Generator) -> Observable:
    d = int(np.prod(list(dims)))
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return Observable(tuple(dims), (g + g.conj().T) / 2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# JSON serialization, shared by every module.
# A complex matrix is a flat row-major list of [re, im] pairs.

def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, complex)
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(d: dict) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    entries = d["entries"]
    if rows * cols != len(entries):
        raise ValueError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(rows, cols)


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "matrix": matrix_to_json(rho.mat)}


def state_from_json(d: dict) -> DensityMatrix:
    return DensityMatrix(tuple(d["dims"]), matrix_from_json(d["matrix"]))


def save_state(rho: DensityMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)


def load_state(path) -> DensityMatrix:
    with open(path) as fh:
        return state_from_json(json.load(fh))
