"""Dense complex linear algebra for small multi-qubit registers.

Everything in this package works on explicit density matrices, so the
helpers here are deliberately plain: validated Hermitian
eigendecompositions, Kronecker products, partial traces, and a thin
``DensityOperator`` wrapper that checks physicality once at construction
and then hands out a read-only array.

Conventions
-----------
* Composite indices are built with ``np.kron`` left-to-right, so the
  leftmost factor is the most significant. Register 0 (and qubit 0
  inside a register) always sits on the left.
* ``hermitian_eig`` returns eigenvalues in descending order with a
  deterministic phase fix, so repeated calls on the same matrix give the
  same basis.  Exact ties are broken lexicographically.
* Dense simulation is capped at ``MAX_DIM = 2**13``; anything larger
  raises ``DimensionCapError`` before memory blows up.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

MAX_QUBITS = 13
MAX_DIM = 2**MAX_QUBITS

HERMITICITY_ATOL = 1e-10
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10
_PHASE_FLOOR = 1e-12


class DimensionCapError(ValueError):
    """Raised when a requested dense dimension exceeds ``MAX_DIM``."""


def check_dimension(dim: int) -> int:
    """Validate a dense matrix dimension against the hard cap.

    Parameters
    ----------
    dim : int
        Proposed Hilbert-space dimension.

    Returns
    -------
    int
        The same dimension, for chaining.
    """
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    if dim > MAX_DIM:
        raise DimensionCapError(
            f"dense dimension {dim} exceeds the cap {MAX_DIM} (= 2**{MAX_QUBITS})"
        )
    return dim


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, leftmost most significant."""
    factors = list(factors)
    if not factors:
        return np.eye(1, dtype=complex)
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def kron_power(a: np.ndarray, m: int) -> np.ndarray:
    """``a`` tensored with itself ``m`` times (``m >= 1``)."""
    if m < 1:
        raise ValueError(f"kron power needs m >= 1, got {m}")
    return kron_all([a] * m)


def is_hermitian(a: np.ndarray, atol: float = HERMITICITY_ATOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= atol)


def hermitian_eig(a: np.ndarray, atol: float = HERMITICITY_ATOL):
    """Eigendecomposition of a Hermitian matrix with a deterministic basis.

    Parameters
    ----------
    a : ndarray
        Square matrix, Hermitian within ``atol``.
    atol : float
        Hermiticity tolerance.

    Returns
    -------
    (w, v) : tuple of ndarray
        ``w`` descending real eigenvalues, ``v`` unitary with columns the
        matching eigenvectors.  Each column is phase-fixed so its first
        entry of magnitude above 1e-12 is real positive; columns with
        exactly equal eigenvalues are ordered lexicographically.

    Raises
    ------
    ValueError
        If ``a`` is not square or not Hermitian within ``atol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian: max |a - a^dag| = {dev:.3e} > {atol:.1e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > _PHASE_FLOOR)
        if nz.size:
            pivot = col[nz[0]]
            v[:, j] = col * (pivot.conjugate() / abs(pivot))
    # stable order inside exactly tied eigenvalue clusters
    j = 0
    while j < len(w):
        k = j + 1
        while k < len(w) and w[k] == w[j]:
            k += 1
        if k - j > 1:
            cols = sorted(
                range(j, k),
                key=lambda c: tuple(
                    x for e in v[:, c] for x in (round(e.real, 12), round(e.imag, 12))
                ),
            )
            v[:, j:k] = v[:, cols]
        j = k
    return w, v


def partial_trace(a: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    Parameters
    ----------
    a : ndarray
        Operator on the tensor product of subsystems with dimensions
        ``dims`` (leftmost factor most significant).
    dims : sequence of int
        Subsystem dimensions; their product must match ``a``'s size.
    keep : iterable of int
        Indices of subsystems to retain, in original order.

    Returns
    -------
    ndarray
        Operator on the kept subsystems.
    """
    a = np.asarray(a, dtype=complex)
    dims = [int(d) for d in dims]
    total = prod(dims)
    if a.shape != (total, total):
        raise ValueError(f"operator shape {a.shape} does not match dims {dims}")
    n = len(dims)
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= n for i in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = a.reshape(dims + dims)
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = np.transpose(t, perm)
    dk = prod(dims[i] for i in keep) if keep else 1
    dt = prod(dims[i] for i in traced) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("itjt->ij", t)


@dataclass(frozen=True)
class DensityOperator:
    """A validated density matrix (optionally non-normalized).

    Attributes
    ----------
    matrix : ndarray
        Square complex matrix, Hermitian and positive semidefinite
        within tolerance.  Stored read-only.
    normalized : bool
        When True (default) the trace must be 1 within ``TRACE_ATOL``.
        Dual states are the one place this is False: they stay PSD but
        their trace is whatever the adjoint channel produces.
    """

    matrix: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        check_dimension(mat.shape[0])
        dev = float(np.max(np.abs(mat - mat.conj().T)))
        if dev > HERMITICITY_ATOL:
            raise ValueError(f"density matrix not Hermitian: deviation {dev:.3e}")
        mat = (mat + mat.conj().T) / 2.0
        evals = np.linalg.eigvalsh(mat)
        if evals[0] < -PSD_ATOL:
            raise ValueError(f"density matrix not PSD: min eigenvalue {evals[0]:.3e}")
        tr = float(mat.trace().real)
        if self.normalized and abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)

    @classmethod
    def pure(cls, psi: np.ndarray) -> "DensityOperator":
        """Rank-1 projector onto the unit vector ``psi``."""
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"state vector norm {nrm!r} != 1")
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def computational_zero(cls, n_qubits: int) -> "DensityOperator":
        """|0...0><0...0| on ``n_qubits`` qubits."""
        dim = check_dimension(2**n_qubits)
        mat = np.zeros((dim, dim), dtype=complex)
        mat[0, 0] = 1.0
        return cls(mat)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        check_dimension(dim)
        return cls(np.eye(dim, dtype=complex) / dim)


def as_matrix(state) -> np.ndarray:
    """Accept either a DensityOperator or a bare ndarray."""
    if isinstance(state, DensityOperator):
        return state.matrix
    return np.asarray(state, dtype=complex)


def pure_fidelity(psi: np.ndarray, state) -> float:
    """Fidelity <psi|rho|psi> of a state against a unit reference vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"reference vector norm {nrm!r} != 1")
    mat = as_matrix(state)
    if mat.shape[0] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: state {mat.shape[0]}, vector {psi.shape[0]}")
    val = np.vdot(psi, mat @ psi)
    return float(val.real)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2.0


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a normalized Ginibre product."""
    if rank is None:
        rank = dim
    z = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    mat = z @ z.conj().T
    return DensityOperator(mat / mat.trace().real)
