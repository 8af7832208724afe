"""Small dense complex linear algebra over one and two qubits.

Matrices are plain numpy complex128 arrays: 2x2 for single-qubit operators,
4x4 for two-qubit operators, indexed row-major so basis state |ab> sits at
index 2a+b. All heavy lifting dispatches to :mod:`entconv.kernels`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import NotHermitianError

EYE2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class EigenDecomposition(NamedTuple):
    """Spectral data of a Hermitian matrix.

    values: real eigenvalues sorted non-ascending.
    vectors: orthonormal eigenvectors as the matching columns.
    """

    values: np.ndarray
    vectors: np.ndarray


def as_cmat(m, dim: int) -> np.ndarray:
    """Coerce to a contiguous complex128 square array of the given dimension."""
    out = np.ascontiguousarray(m, dtype=np.complex128)
    if out.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {out.shape}")
    return out


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))

def frobenius_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def dag(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def kron2(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 operators (first factor acts on qubit A)."""
    return kernels.kron2(as_cmat(a, 2), as_cmat(b, 2))


def hermitian_eig(m, tol: float = 1e-9) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian 4x4 (or 2x2) matrix.

    Raises NotHermitianError when ||m - m^dagger||_F exceeds tol. The matrix
    is symmetrized before solving, so drift below tol cannot skew results.
    """
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if frobenius_distance(m, dag(m)) > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian within {tol:g} (deviation "
            f"{frobenius_distance(m, dag(m)):.3e})"
        )
    sym = 0.5 * (m + dag(m))
    values, vectors = kernels.hermitian_eigh(sym)
    return EigenDecomposition(values, vectors)


def partial_transpose(m, subsystem: str = "b") -> np.ndarray:
    """Transpose one tensor factor of a 4x4 operator ("a" or "b")."""
    idx = _subsystem_index(subsystem)
    return kernels.partial_transpose(as_cmat(m, 4), idx)


def partial_trace(m, keep: str = "a") -> np.ndarray:
    """Trace out one qubit of a 4x4 operator, keeping "a" or "b"."""
    idx = _subsystem_index(keep)
    return kernels.partial_trace(as_cmat(m, 4), idx)


def _subsystem_index(name: str) -> int:
    label = str(name).lower()
    if label in ("a", "0"):
        return 0
    if label in ("b", "1"):
        return 1
    raise ValueError(f"subsystem must be 'a' or 'b', got {name!r}")


def numeric_rank(values, tol: float = 1e-9) -> int:
    """Count eigenvalues strictly above tol.

    `values` is a real spectrum (any order); tol must be positive.
    """
    if not tol > 0:
        raise ValueError(f"rank tolerance must be positive, got {tol!r}")
    return int(np.sum(np.asarray(values, dtype=np.float64) > tol))


def singular_values(m) -> np.ndarray:
    """Singular values of a 4x4 matrix, non-ascending."""
    return kernels.singular_values(as_cmat(m, 4))


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    return frobenius_distance(dag(u) @ u, np.eye(u.shape[0])) <= tol
