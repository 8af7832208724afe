"""Two-qubit density matrices, named state families, and classification.

Conventions used throughout the package:

* computational basis order |00>, |01>, |10>, |11>, so |ab> sits at 2a+b;
* Bell basis order (psi-, phi+, phi-, psi+) with the singlet
  (|01> - |10>)/sqrt(2) first, matching the convention that the largest
  Bell weight multiplies the singlet projector.

Three parameterized families get first-class support:

* Werner: w * |psi-><psi-| + (1-w) * I/4 for w in [0, 1];
* Bell-diagonal: a mixture of the four Bell projectors with non-ascending
  weights;
* the maximally-entangled-mixture form: decomposition weights
  (l1-l3) on the singlet projector, l3 on each of |00><00| and |11><11|,
  l2 on |01><01|, l4 on |10><10|. The weights are decomposition
  coefficients, not eigenvalues: the singlet projector overlaps the
  |01>/|10> block, so the spectrum generally differs from the weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from . import qmat
from .errors import NotHermitianError, OutOfRangeError

_SQ2 = 1.0 / np.sqrt(2.0)

BELL_LABELS = ("psi_minus", "phi_plus", "phi_minus", "psi_plus")

BELL_VECTORS = np.array(
    [
        [0.0, _SQ2, -_SQ2, 0.0],  # (|01> - |10>)/sqrt(2), the singlet
        [_SQ2, 0.0, 0.0, _SQ2],   # (|00> + |11>)/sqrt(2)
        [_SQ2, 0.0, 0.0, -_SQ2],  # (|00> - |11>)/sqrt(2)
        [0.0, _SQ2, _SQ2, 0.0],   # (|01> + |10>)/sqrt(2)
    ],
    dtype=np.complex128,
)

BELL_PROJECTORS = tuple(np.outer(v, v.conj()) for v in BELL_VECTORS)
SINGLET_PROJECTOR = BELL_PROJECTORS[0]

MAX_MIXED = np.eye(4, dtype=np.complex128) / 4.0

_WEIGHT_SUM_TOL = 1e-12
_ORDER_TOL = 1e-12


@dataclass(frozen=True)
class WernerParam:
    """Mixing weight of the singlet against the maximally mixed state."""

    w: float

    def __post_init__(self):
        if not (0.0 <= self.w <= 1.0):
            raise OutOfRangeError(f"werner weight must lie in [0, 1], got {self.w!r}")


def _check_weight_vector(weights, what: str) -> tuple:
    vals = tuple(float(x) for x in weights)
    if len(vals) != 4:
        raise OutOfRangeError(f"{what} needs exactly 4 weights, got {len(vals)}")
    for i, x in enumerate(vals):
        if x < 0.0 or not np.isfinite(x):
            raise OutOfRangeError(f"{what}[{i}] must be nonnegative, got {x!r}")
    for i in range(3):
        if vals[i + 1] > vals[i] + _ORDER_TOL:
            raise OutOfRangeError(
                f"{what} must be non-ascending ({what}[{i + 1}]={vals[i + 1]!r} "
                f"exceeds {what}[{i}]={vals[i]!r})"
            )
    total = vals[0] + vals[1] + vals[2] + vals[3]
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise OutOfRangeError(f"{what} must sum to 1 within {_WEIGHT_SUM_TOL:g}, got {total!r}")
    return vals


@dataclass(frozen=True)
class BellWeights:
    """Non-ascending mixture weights over the four Bell projectors."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weight_vector(self.weights, "lambda"))


@dataclass(frozen=True)
class MemsWeights:
    """Non-ascending decomposition weights of the maximally-entangled-mixture form."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weight_vector(self.weights, "lambda"))


@dataclass(frozen=True)
class FamilyTag:
    """Classification result: family kind plus its fitted parameters."""

    kind: str  # "werner" | "bell_diagonal" | "mems" | "general"
    params: Union[WernerParam, BellWeights, MemsWeights, None] = None


class DensityMatrix:
    """A validated 4x4 density matrix with its eigendecomposition cached.

    Construction checks Hermiticity (1e-9), unit trace (1e-9) and positive
    semidefiniteness (eigenvalues >= -1e-10). The stored array is read-only.
    """

    __slots__ = ("_mat", "_eig")

    def __init__(self, matrix, *, _skip_checks: bool = False):
        mat = np.array(matrix, dtype=np.complex128)
        if mat.shape != (4, 4):
            raise OutOfRangeError(f"expected a 4x4 matrix, got shape {mat.shape}")
        if not _skip_checks:
            dev = qmat.frobenius_distance(mat, qmat.dag(mat))
            if dev > 1e-9:
                raise NotHermitianError(
                    f"density matrix is not Hermitian within 1e-9 (deviation {dev:.3e})"
                )
            tr = complex(np.trace(mat))
            if abs(tr - 1.0) > 1e-9:
                raise OutOfRangeError(f"density matrix trace must be 1 within 1e-9, got {tr!r}")
        mat = 0.5 * (mat + qmat.dag(mat))
        eig = qmat.hermitian_eig(mat, tol=1e-8)
        if not _skip_checks and eig.values[-1] < -1e-10:
            raise OutOfRangeError(
                f"density matrix has eigenvalue {eig.values[-1]:.3e} below -1e-10"
            )
        mat.setflags(write=False)
        self._mat = mat
        self._eig = eig

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def eig(self) -> qmat.EigenDecomposition:
        return self._eig

    def purity(self) -> float:
        return float(np.sum(np.abs(self._mat) ** 2))

    def entropy(self) -> float:
        w = self._eig.values
        w = w[w > 1e-12]
        return float(-np.sum(w * np.log2(w)))

    def rank(self, tol: float = 1e-9) -> int:
        return qmat.numeric_rank(self._eig.values, tol)

    def __repr__(self):
        lam = ", ".join(f"{x:.6g}" for x in self._eig.values)
        return f"DensityMatrix(spectrum=[{lam}])"


def _mat_of(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return qmat.as_cmat(rho, 4)


def make_werner(w) -> DensityMatrix:
    """Werner state w * singlet + (1-w) * I/4."""
    param = w if isinstance(w, WernerParam) else WernerParam(float(w))
    mat = param.w * SINGLET_PROJECTOR + (1.0 - param.w) * MAX_MIXED
    return DensityMatrix(mat)


def make_bell_diagonal(weights) -> DensityMatrix:
    """Mixture of the four Bell projectors with non-ascending weights."""
    bw = weights if isinstance(weights, BellWeights) else BellWeights(tuple(weights))
    mat = sum(l * p for l, p in zip(bw.weights, BELL_PROJECTORS))
    return DensityMatrix(mat)


def make_mems(weights) -> DensityMatrix:
    """Maximally-entangled-mixture form from its decomposition weights."""
    mw = weights if isinstance(weights, MemsWeights) else MemsWeights(tuple(weights))
    l1, l2, l3, l4 = mw.weights
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat += (l1 - l3) * SINGLET_PROJECTOR
    mat[0, 0] += l3
    mat[3, 3] += l3
    mat[1, 1] += l2
    mat[2, 2] += l4
    return DensityMatrix(mat)


def random_density_matrix(seed=None, rank: int = 4) -> DensityMatrix:
    """Random state G G^dagger / tr(G G^dagger), G complex Gaussian 4 x rank."""
    if not 1 <= rank <= 4:
        raise OutOfRangeError(f"rank must be 1..4, got {rank!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityMatrix(mat)


def min_pt_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose."""
    pt = qmat.partial_transpose(_mat_of(rho), "b")
    values, _ = qmat.hermitian_eig(pt)
    return float(values[-1])


def is_entangled(rho, tol: float = 1e-10) -> bool:
    """Partial-transpose test, exact for two qubits.

    Entangled iff the partial transpose has an eigenvalue below -tol; states
    within tol of the boundary are reported separable.
    """
    return min_pt_eigenvalue(rho) < -tol


class StateScalars(NamedTuple):
    purity: float
    entropy: float
    rank: int


def state_scalars(rho: DensityMatrix, tol: float = 1e-9) -> StateScalars:
    """Purity, von Neumann entropy (bits), and numeric rank."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(_mat_of(rho))
    return StateScalars(rho.purity(), rho.entropy(), rho.rank(tol))


def bell_weights_of(rho) -> tuple[np.ndarray, float]:
    """Bell-basis diagonal of a state and the off-diagonal residual.

    Returns (weights, residual) where weights[i] = <bell_i|rho|bell_i> in the
    fixed Bell order (not sorted) and residual is the Frobenius distance to
    the Bell-diagonal reconstruction. A residual near zero certifies the
    state is Bell-diagonal; the caller decides what tolerance to apply.
    """
    mat = _mat_of(rho)
    weights = np.array(
        [np.vdot(v, mat @ v).real for v in BELL_VECTORS], dtype=np.float64
    )
    recon = sum(l * p for l, p in zip(weights, BELL_PROJECTORS))
    return weights, qmat.frobenius_distance(mat, recon)


def _clean_weights(raw, tol: float) -> Optional[tuple]:
    vals = [float(x) for x in raw]
    for i, x in enumerate(vals):
        if x < -tol:
            return None
        vals[i] = max(x, 0.0)
    for i in range(3):
        if vals[i + 1] > vals[i] + tol:
            return None
        vals[i + 1] = min(vals[i + 1], vals[i])
    total = sum(vals)
    if abs(total - 1.0) > max(tol, 1e-12) or total <= 0.0:
        return None
    return tuple(x / total for x in vals)


def _werner_fit(mat: np.ndarray, tol: float) -> Optional[WernerParam]:
    w = (4.0 * np.vdot(SINGLET_PROJECTOR, mat).real - 1.0) / 3.0
    if w < -tol or w > 1.0 + tol:
        return None
    w = min(1.0, max(0.0, w))
    recon = w * SINGLET_PROJECTOR + (1.0 - w) * MAX_MIXED
    if qmat.frobenius_distance(mat, recon) > tol:
        return None
    return WernerParam(w)


def _bell_fit(mat: np.ndarray, tol: float) -> Optional[BellWeights]:
    raw, _ = bell_weights_of(mat)
    cleaned = _clean_weights(raw, tol)
    if cleaned is None:
        return None
    recon = sum(l * p for l, p in zip(cleaned, BELL_PROJECTORS))
    if qmat.frobenius_distance(mat, recon) > tol:
        return None
    return BellWeights(cleaned)


def _mems_fit(mat: np.ndarray, tol: float) -> Optional[MemsWeights]:
    # the form fixes every entry: corners carry l3, the central block carries
    # the singlet weight on its off-diagonal and l2/l4 plus half the singlet
    # weight on its diagonal
    l3 = 0.5 * (mat[0, 0].real + mat[3, 3].real)
    s = -2.0 * mat[1, 2]
    if abs(s.imag) > tol:
        return None
    s = s.real
    raw = (s + l3, mat[1, 1].real - 0.5 * s, l3, mat[2, 2].real - 0.5 * s)
    cleaned = _clean_weights(raw, tol)
    if cleaned is None:
        return None
    try:
        candidate = MemsWeights(cleaned)
    except OutOfRangeError:
        return None
    recon = make_mems(candidate).matrix
    if qmat.frobenius_distance(mat, recon) > tol:
        return None
    return candidate


def classify_family(rho, tol: float = 1e-8) -> FamilyTag:
    """Most specific family whose best-fit reconstruction is within tol.

    Precedence is Werner, then Bell-diagonal, then the
    maximally-entangled-mixture form, then general: the families nest and
    overlap (every Werner state is both Bell-diagonal and of the mixture
    form), so the narrowest parameterization wins.
    """
    mat = _mat_of(rho)
    werner = _werner_fit(mat, tol)
    if werner is not None:
        return FamilyTag("werner", werner)
    bell = _bell_fit(mat, tol)
    if bell is not None:
        return FamilyTag("bell_diagonal", bell)
    mems = _mems_fit(mat, tol)
    if mems is not None:
        return FamilyTag("mems", mems)
    return FamilyTag("general", None)
