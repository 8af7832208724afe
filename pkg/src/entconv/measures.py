"""Entanglement measures and the ordering monotones for Bell-diagonal states.

The three Bell-diagonal monotones compare as extended reals: a zero
denominator always means +inf, whatever the numerator would have been. This
keeps the comparison e_k(source) >= e_k(target) a plain float comparison
(inf >= inf holds), which is exactly the convertibility test downstream.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels, qmat
from .errors import OutOfRangeError
from .states import BellWeights, DensityMatrix

_YY = qmat.kron2(qmat.SIGMA_Y, qmat.SIGMA_Y)


class MonotoneTriple(NamedTuple):
    """The three ordering monotones of a Bell-diagonal state.

    Only meaningful for non-ascending weights; values may be +inf.
    """

    e1: float
    e2: float
    e3: float

    def dominates(self, other: "MonotoneTriple") -> bool:
        return self.e1 >= other.e1 and self.e2 >= other.e2 and self.e3 >= other.e3


def bell_monotones(weights) -> MonotoneTriple:
    """Monotone triple of a Bell-diagonal state given its sorted weights."""
    bw = weights if isinstance(weights, BellWeights) else BellWeights(tuple(weights))
    l1, l2, l3, l4 = bw.weights
    e1 = l1
    e2 = math.inf if l3 + l4 == 0.0 else (1.0 - 2.0 * l2) / (l3 + l4)
    e3 = math.inf if l4 == 0.0 else (1.0 - 2.0 * l2 - 2.0 * l3) / l4
    return MonotoneTriple(e1, e2, e3)


def _mat_of(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return qmat.as_cmat(rho, 4)


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    values, vectors = qmat.hermitian_eig(mat, tol=1e-8)
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def concurrence(rho) -> float:
    """Concurrence of a two-qubit state.

    Computed as max(0, s1 - s2 - s3 - s4) from the singular values of
    sqrt(rho) (sy x sy) conj(sqrt(rho)). Taking singular values of this
    product, rather than square roots of eigenvalues of rho rho~, keeps the
    small values accurate to machine precision instead of sqrt(eps).
    """
    mat = _mat_of(rho)
    root = _sqrt_psd(mat)
    k = root @ _YY @ root.conj()
    s = kernels.singular_values(np.ascontiguousarray(k))
    return max(0.0, float(s[0] - s[1] - s[2] - s[3]))


def binary_entropy(x: float) -> float:
    """Entropy in bits of a (x, 1-x) coin; exact 0 at both endpoints."""
    if not -1e-12 <= x <= 1.0 + 1e-12:
        raise OutOfRangeError(f"binary_entropy argument must lie in [0, 1], got {x!r}")
    x = min(1.0, max(0.0, x))
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def eof(rho) -> float:
    """Entanglement of formation in bits, from the concurrence."""
    c = concurrence(rho)
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c))))


def negativity(rho) -> float:
    """Sum of the absolute negative eigenvalues of the partial transpose."""
    pt = qmat.partial_transpose(_mat_of(rho), "b")
    values, _ = qmat.hermitian_eig(pt)
    return float(np.sum(np.clip(values, None, 0.0)) * -1.0)
