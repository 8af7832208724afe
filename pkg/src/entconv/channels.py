"""Separable channels, protocol atoms, and the Bell-extremal channel catalog.

A separable channel is stored as its product Kraus pairs (A_k, B_k); the
lifted operators E_k = A_k (x) B_k must satisfy sum_k E_k^dagger E_k = I
within 1e-10. Separability of the Kraus form is a necessary condition for
the channel to be implementable with local operations and classical
communication but not a sufficient one, so channels carry an explicit
``locc_certified`` flag that is set only by constructors whose protocol is
known (local unitaries, measure-discard-prepare, and mixtures thereof).

Protocols are finite mixtures of two atom kinds:

* ``LocalUnitary(u_a, u_b)``: apply u_a (x) u_b;
* ``DiscardPrepare(target)``: discard the input and prepare a fixed
  separable state.

``renormalize_probabilistic`` turns branches that only succeed with some
probability into the conditional protocol given success, rescaling branch
weights by their success probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels, qmat
from .errors import (
    BadWeightsError,
    NotProductDiagonalError,
    NotSeparableError,
    NotTracePreservingError,
    NotUnitaryError,
)
from .states import BELL_PROJECTORS, DensityMatrix, min_pt_eigenvalue

_COMPLETENESS_TOL = 1e-10


def _as_qubit_mat(m, what: str) -> np.ndarray:
    arr = np.array(m, dtype=np.complex128)
    if arr.shape != (2, 2):
        raise ValueError(f"{what} must be 2x2, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """Product unitary u_a (x) u_b applied to both sides at once."""

    u_a: np.ndarray
    u_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_a", _as_qubit_mat(self.u_a, "u_a"))
        object.__setattr__(self, "u_b", _as_qubit_mat(self.u_b, "u_b"))
        for name, u in (("u_a", self.u_a), ("u_b", self.u_b)):
            if not qmat.is_unitary(u):
                raise NotUnitaryError(f"{name} is not unitary within 1e-9")

    def lifted(self) -> np.ndarray:
        return qmat.kron2(self.u_a, self.u_b)


@dataclass(frozen=True, eq=False)
class DiscardPrepare:
    """Discard the input and prepare a fixed separable state."""

    target: DensityMatrix

    def __post_init__(self):
        target = self.target
        if not isinstance(target, DensityMatrix):
            target = DensityMatrix(qmat.as_cmat(target, 4))
            object.__setattr__(self, "target", target)
        if min_pt_eigenvalue(target) < -1e-10:
            raise NotSeparableError(
                "prepared state fails the partial-transpose separability test"
            )


Atom = Union[LocalUnitary, DiscardPrepare]


def _apply_atom(atom: Atom, mat: np.ndarray) -> np.ndarray:
    if isinstance(atom, LocalUnitary):
        u = atom.lifted()
        return u @ mat @ u.conj().T
    return atom.target.matrix * np.trace(mat).real


@dataclass(frozen=True, eq=False)
class Protocol:
    """Convex mixture of protocol atoms: branches of (weight, atom)."""

    branches: tuple

    def __post_init__(self):
        branches = tuple((float(w), atom) for w, atom in self.branches)
        if not branches:
            raise BadWeightsError("a protocol needs at least one branch")
        weights = [w for w, _ in branches]
        if any(w < -1e-12 for w in weights):
            raise BadWeightsError(f"branch weights must be nonnegative, got {weights}")
        total = sum(weights)
        if abs(total - 1.0) > 1e-9:
            raise BadWeightsError(f"branch weights must sum to 1 within 1e-9, got {total!r}")
        for _, atom in branches:
            if not isinstance(atom, (LocalUnitary, DiscardPrepare)):
                raise TypeError(f"unsupported protocol atom {type(atom).__name__}")
        object.__setattr__(self, "branches", branches)

    def apply(self, rho) -> DensityMatrix:
        mat = rho.matrix if isinstance(rho, DensityMatrix) else qmat.as_cmat(rho, 4)
        out = np.zeros((4, 4), dtype=np.complex128)
        for w, atom in self.branches:
            if w > 0.0:
                out += w * _apply_atom(atom, mat)
        return DensityMatrix(out)


@dataclass(frozen=True, eq=False)
class ProbabilisticBranch:
    """A protocol branch that only succeeds with some probability."""

    weight: float
    success_prob: float
    atom: Atom

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0 + 1e-12:
            raise BadWeightsError(f"branch weight must lie in [0, 1], got {self.weight!r}")
        if not 0.0 <= self.success_prob <= 1.0 + 1e-12:
            raise BadWeightsError(
                f"success probability must lie in [0, 1], got {self.success_prob!r}"
            )


def renormalize_probabilistic(branches: Sequence[ProbabilisticBranch]) -> tuple:
    """Conditional protocol given success, plus the total success probability.

    Branch k is chosen with probability w_k and succeeds with probability
    s_k, so conditioned on success it contributes weight w_k s_k / sum_j w_j s_j.
    Branches that never succeed drop out.
    """
    if not branches:
        raise BadWeightsError("need at least one branch")
    total_w = sum(b.weight for b in branches)
    if abs(total_w - 1.0) > 1e-9:
        raise BadWeightsError(f"branch weights must sum to 1 within 1e-9, got {total_w!r}")
    success = sum(b.weight * b.success_prob for b in branches)
    if success <= 0.0:
        raise BadWeightsError("no branch ever succeeds; conditional protocol is undefined")
    kept = tuple(
        (b.weight * b.success_prob / success, b.atom)
        for b in branches
        if b.weight * b.success_prob > 0.0
    )
    return Protocol(kept), float(success)


class SeparableChannel:
    """Trace-preserving channel given by product Kraus pairs (A_k, B_k)."""

    __slots__ = ("_pairs", "_estack", "locc_certified", "bell_action")

    def __init__(
        self,
        pairs: Sequence[tuple],
        *,
        locc_certified: bool = False,
        bell_action: Optional[np.ndarray] = None,
        tol: float = _COMPLETENESS_TOL,
    ):
        if not pairs:
            raise ValueError("need at least one Kraus pair")
        norm_pairs = []
        lifted = []
        for k, (a, b) in enumerate(pairs):
            a = _as_qubit_mat(a, f"pair {k} A")
            b = _as_qubit_mat(b, f"pair {k} B")
            norm_pairs.append((a, b))
            lifted.append(qmat.kron2(a, b))
        estack = np.ascontiguousarray(np.stack(lifted))
        gram = kernels.kraus_gram(estack)
        dev = qmat.frobenius_distance(gram, np.eye(4))
        if dev > tol:
            raise NotTracePreservingError(
                f"Kraus completeness fails: ||sum E^dagger E - I|| = {dev:.3e} > {tol:g}"
            )
        self._pairs = tuple(norm_pairs)
        self._estack = estack
        self.locc_certified = bool(locc_certified)
        if bell_action is not None:
            bell_action = np.array(bell_action, dtype=np.float64)
            if bell_action.shape != (4, 4):
                raise ValueError("bell_action must be 4x4")
            for j, proj in enumerate(BELL_PROJECTORS):
                out = self.apply_raw(proj)
                recon = sum(bell_action[i, j] * BELL_PROJECTORS[i] for i in range(4))
                if qmat.frobenius_distance(out, recon) > 1e-10:
                    raise ValueError(f"bell_action column {j} disagrees with the channel")
            bell_action.setflags(write=False)
        self.bell_action = bell_action

    @property
    def kraus_pairs(self) -> tuple:
        return self._pairs

    @property
    def estack(self) -> np.ndarray:
        return self._estack

    @property
    def n_kraus(self) -> int:
        return self._estack.shape[0]

    def apply_raw(self, mat: np.ndarray) -> np.ndarray:
        return kernels.apply_kraus(self._estack, np.ascontiguousarray(mat, dtype=np.complex128))

    def apply(self, rho) -> DensityMatrix:
        mat = rho.matrix if isinstance(rho, DensityMatrix) else qmat.as_cmat(rho, 4)
        return DensityMatrix(self.apply_raw(mat))

    def __repr__(self):
        tag = ", locc_certified" if self.locc_certified else ""
        return f"SeparableChannel(n_kraus={self.n_kraus}{tag})"


def local_unitary_channel(u_a, u_b) -> SeparableChannel:
    """Single-pair channel applying u_a (x) u_b; always LOCC."""
    atom = LocalUnitary(u_a, u_b)
    return SeparableChannel([(atom.u_a, atom.u_b)], locc_certified=True)


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])], dtype=np.complex128)


def _product_split(v: np.ndarray, tol: float) -> Optional[tuple]:
    m = v.reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    if s[1] > tol:
        return None
    return np.ascontiguousarray(u[:, 0]), np.ascontiguousarray(s[0] * vh[0, :])


def _pencil_products(v1: np.ndarray, v2: np.ndarray, tol: float) -> Optional[list]:
    # product vectors in span{v1, v2} are the roots of det(M1 + t M2) = 0,
    # where Mi is vi reshaped to 2x2; degree drops signal roots at infinity
    m1 = v1.reshape(2, 2)
    m2 = v2.reshape(2, 2)
    c2 = np.linalg.det(m2)
    c1 = (
        m1[0, 0] * m2[1, 1]
        + m2[0, 0] * m1[1, 1]
        - m1[0, 1] * m2[1, 0]
        - m2[0, 1] * m1[1, 0]
    )
    c0 = np.linalg.det(m1)
    small = 1e-12
    if abs(c2) < small and abs(c1) < small and abs(c0) < small:
        # the whole pencil is singular: every combination is product
        return [v1, v2]
    candidates = []
    if abs(c2) < small:
        candidates.append(v2)
        if abs(c1) >= small:
            t = -c0 / c1
            candidates.append((v1 + t * v2) / np.linalg.norm(v1 + t * v2))
    else:
        for t in np.roots([c2, c1, c0]):
            w = v1 + t * v2
            candidates.append(w / np.linalg.norm(w))
    if len(candidates) != 2:
        return None
    w1, w2 = candidates
    if abs(np.vdot(w1, w2)) > 1e-8:
        return None
    return [w1, w2]


def product_diagonal_decomposition(mat, tol: float = 1e-9) -> list:
    """Decompose a state as sum_i p_i |a_i b_i><a_i b_i| with orthogonal terms.

    Works cluster by cluster over the (possibly degenerate) eigenspaces,
    searching each for an orthogonal product basis. Raises
    NotProductDiagonalError when no such decomposition exists; that happens
    for every entangled state and also for some separable ones, since
    separability does not require a product eigenbasis.
    """
    mat = qmat.as_cmat(mat, 4)
    values, vectors = qmat.hermitian_eig(mat, tol=1e-8)
    live = [i for i in range(4) if values[i] > 1e-12]
    clusters: list = []
    for i in live:
        if clusters and values[clusters[-1][-1]] - values[i] <= 1e-8:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    terms = []
    for cluster in clusters:
        mean_w = float(np.mean([values[i] for i in cluster]))
        vecs = [np.ascontiguousarray(vectors[:, i]) for i in cluster]
        if len(cluster) == 1:
            split = _product_split(vecs[0], tol)
            if split is None:
                raise NotProductDiagonalError(
                    "a nondegenerate eigenvector is not a product state"
                )
            terms.append((float(values[cluster[0]]), split[0], split[1]))
        elif len(cluster) == 2:
            found = _pencil_products(vecs[0], vecs[1], tol)
            if found is None:
                raise NotProductDiagonalError(
                    "a two-dimensional eigenspace has no orthogonal product basis"
                )
            for w in found:
                split = _product_split(w, 1e-8)
                if split is None:
                    raise NotProductDiagonalError(
                        "pencil root failed to split into a product"
                    )
                terms.append((mean_w, split[0], split[1]))
        elif len(cluster) == 3:
            # a 3-space has an orthogonal product basis exactly when its
            # orthocomplement vector is product
            rest = next(i for i in range(4) if i not in cluster)
            split = _product_split(np.ascontiguousarray(vectors[:, rest]), tol)
            if split is None:
                raise NotProductDiagonalError(
                    "the complement of a three-dimensional eigenspace is not product"
                )
            a, b = split
            for pa, pb in ((a, _perp(b)), (_perp(a), b), (_perp(a), _perp(b))):
                terms.append((mean_w, pa, pb))
        else:
            for pa in (np.array([1, 0]), np.array([0, 1])):
                for pb in (np.array([1, 0]), np.array([0, 1])):
                    terms.append((mean_w, pa.astype(np.complex128), pb.astype(np.complex128)))
    recon = np.zeros((4, 4), dtype=np.complex128)
    for p, a, b in terms:
        ab = np.kron(a, b)
        recon += p * np.outer(ab, ab.conj())
    if qmat.frobenius_distance(recon, mat) > max(tol, 1e-9):
        raise NotProductDiagonalError("product reconstruction failed verification")
    return terms


def discard_prepare_channel(target) -> SeparableChannel:
    """Trace out the input and prepare ``target``; needs a product eigenbasis.

    The Kraus pairs are (p^(1/4) |a_i><j_a|, p^(1/4) |b_i><j_b|) over all
    decomposition terms i and computational indices j_a, j_b. The prepared
    product vectors never need to be orthogonal across clusters for trace
    preservation; orthogonality within each degenerate cluster comes from the
    decomposition itself.
    """
    rho = target if isinstance(target, DensityMatrix) else DensityMatrix(qmat.as_cmat(target, 4))
    if min_pt_eigenvalue(rho) < -1e-10:
        raise NotSeparableError("cannot prepare an entangled state by discard-and-prepare")
    terms = product_diagonal_decomposition(rho.matrix)
    basis = (np.array([1.0, 0.0], dtype=np.complex128), np.array([0.0, 1.0], dtype=np.complex128))
    pairs = []
    for p, a, b in terms:
        scale = p ** 0.25
        for ja in basis:
            for jb in basis:
                pairs.append((scale * np.outer(a, ja.conj()), scale * np.outer(b, jb.conj())))
    return SeparableChannel(pairs, locc_certified=True)


def mix(channels: Sequence[SeparableChannel], weights: Sequence[float]) -> SeparableChannel:
    """Convex mixture of separable channels."""
    if len(channels) != len(weights):
        raise BadWeightsError("need one weight per channel")
    weights = [float(w) for w in weights]
    if any(w < -1e-12 for w in weights):
        raise BadWeightsError(f"mixture weights must be nonnegative, got {weights}")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise BadWeightsError(f"mixture weights must sum to 1, got {sum(weights)!r}")
    pairs = []
    for ch, w in zip(channels, weights):
        if w <= 0.0:
            continue
        scale = w ** 0.25
        for a, b in ch.kraus_pairs:
            pairs.append((scale * a, scale * b))
    action = None
    if all(ch.bell_action is not None for ch in channels):
        action = sum(w * ch.bell_action for ch, w in zip(channels, weights))
    return SeparableChannel(
        pairs,
        locc_certified=all(ch.locc_certified for ch in channels),
        bell_action=action,
    )


def compile_protocol(protocol: Protocol) -> SeparableChannel:
    """Lower a protocol to an explicit separable Kraus channel."""
    parts = []
    weights = []
    for w, atom in protocol.branches:
        if w <= 0.0:
            continue
        if isinstance(atom, LocalUnitary):
            parts.append(local_unitary_channel(atom.u_a, atom.u_b))
        else:
            parts.append(discard_prepare_channel(atom.target))
        weights.append(w)
    total = sum(weights)
    return mix(parts, [w / total for w in weights])


# ---------------------------------------------------------------------------
# the Bell-extremal catalog

_PAULI_BELL_PERMS = {
    "x": (2, 3, 0, 1),  # swaps psi- <-> phi-, phi+ <-> psi+
    "y": (1, 0, 3, 2),  # swaps psi- <-> phi+, phi- <-> psi+
    "z": (3, 2, 1, 0),  # swaps psi- <-> psi+, phi+ <-> phi-
}

_CATALOG_CACHE: Optional[tuple] = None


def _perm_matrix(perm) -> np.ndarray:
    m = np.zeros((4, 4))
    for j, i in enumerate(perm):
        m[i, j] = 1.0
    return m


def _pair_replace_action(i: int, j: int) -> np.ndarray:
    col = np.zeros(4)
    col[i] = 0.5
    col[j] = 0.5
    return np.tile(col[:, None], (1, 4))


def bell_extremal_catalog() -> tuple:
    """The 13 channels spanning Bell-diagonal transitions.

    One identity, six one-sided Pauli rotations (each permutes the Bell
    projectors), and six replace channels that discard the input and prepare
    the even mixture of one Bell pair (those mixtures are exactly the
    separable edges of the Bell-diagonal tetrahedron). Every channel carries
    its verified 4x4 ``bell_action``.
    """
    global _CATALOG_CACHE
    if _CATALOG_CACHE is not None:
        return _CATALOG_CACHE
    eye = qmat.EYE2
    paulis = {"x": qmat.SIGMA_X, "y": qmat.SIGMA_Y, "z": qmat.SIGMA_Z}
    channels = [
        SeparableChannel([(eye, eye)], locc_certified=True, bell_action=np.eye(4))
    ]
    for name, sigma in paulis.items():
        action = _perm_matrix(_PAULI_BELL_PERMS[name])
        channels.append(
            SeparableChannel([(sigma, eye)], locc_certified=True, bell_action=action)
        )
        channels.append(
            SeparableChannel([(eye, sigma)], locc_certified=True, bell_action=action)
        )
    for i in range(4):
        for j in range(i + 1, 4):
            target = DensityMatrix(0.5 * BELL_PROJECTORS[i] + 0.5 * BELL_PROJECTORS[j])
            base = discard_prepare_channel(target)
            channels.append(
                SeparableChannel(
                    base.kraus_pairs,
                    locc_certified=True,
                    bell_action=_pair_replace_action(i, j),
                )
            )
    _CATALOG_CACHE = tuple(channels)
    return _CATALOG_CACHE
