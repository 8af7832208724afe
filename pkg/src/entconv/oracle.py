"""Randomized adversarial checks and derivative-free protocol search.

Nothing here trusts the decision rules: the falsifiers sample separable
channels and states independently and hunt for counterexamples to the claims
the rest of the package relies on (rank monotonicity, the Bell-diagonal
monotones, concurrence non-increase). A healthy implementation produces
empty reports; any finding comes with the seed and trial index needed to
reproduce it.

Determinism contract: every trial derives its own generator from
(seed, trial index), so reports are reproducible bit-for-bit and trials can
be sharded across workers without changing the outcome.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import kernels, qmat
from .channels import (
    DiscardPrepare,
    LocalUnitary,
    Protocol,
    SeparableChannel,
    bell_extremal_catalog,
    mix,
)
from .convertibility import verify_protocol
from .errors import SamplingExhaustedError
from .measures import bell_monotones, concurrence
from .states import DensityMatrix, bell_weights_of, make_bell_diagonal

_ENTANGLEMENT_MARGIN = 1e-4
_NEGATIVITY_MARGIN = 1e-6
_RANK_ZERO_TOL = 1e-12
_RANK_LIVE_TOL = 1e-6


@dataclass
class SearchReport:
    """Outcome of a randomized hunt: sample count, findings, wall time."""

    trials: int
    counterexamples: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def clean(self) -> bool:
        return not self.counterexamples


def _haar_qubit(rng) -> np.ndarray:
    # a normalized complex Gaussian pair is Haar on SU(2)
    a = rng.normal() + 1j * rng.normal()
    b = rng.normal() + 1j * rng.normal()
    norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / norm, b / norm
    return np.array([[a, b], [-np.conj(b), np.conj(a)]], dtype=np.complex128)


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


_PAULI_AXES = (qmat.SIGMA_X, qmat.SIGMA_Y, qmat.SIGMA_Z)

# rank-1 eigenprojectors (plus, minus) of each Pauli axis
_PAULI_PROJ = tuple(
    (
        0.5 * (qmat.EYE2 + sigma),
        0.5 * (qmat.EYE2 - sigma),
    )
    for sigma in _PAULI_AXES
)

_PAULI_BASIS = (qmat.EYE2,) + _PAULI_AXES


def random_separable_channel(seed, n_kraus: int = 3) -> SeparableChannel:
    """Random trace-preserving separable channel with n_kraus free pairs.

    The free pairs have complex Gaussian factors. They are rescaled so the
    remainder I - sum E^dagger E stays diagonally dominant in the product
    Pauli basis, then that remainder is emitted exactly as product-projector
    pairs plus an identity slack term. A single-pair request returns the
    polar unitary parts of the Gaussian draw, since one Kraus operator can
    only be trace preserving when it is unitary.
    """
    if n_kraus < 1:
        raise ValueError(f"n_kraus must be >= 1, got {n_kraus!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n_kraus == 1:
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        return SeparableChannel([(_polar_unitary(a), _polar_unitary(b))])

    free = []
    gram = np.zeros((4, 4), dtype=np.complex128)
    for _ in range(n_kraus):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        free.append((a, b))
        gram += qmat.kron2(a.conj().T @ a, b.conj().T @ b)

    coeff = np.zeros((4, 4))
    for mu in range(4):
        for nu in range(4):
            basis = qmat.kron2(_PAULI_BASIS[mu], _PAULI_BASIS[nu])
            coeff[mu, nu] = np.vdot(basis, gram).real / 4.0
    weight_sum = coeff[0, 0] + np.sum(np.abs(coeff)) - abs(coeff[0, 0])
    u = rng.uniform(0.35, 0.9)
    c2 = u / weight_sum
    scale = c2 ** 0.25

    pairs = [(scale * a, scale * b) for a, b in free]

    def completion_pair(w: float, pa: Optional[np.ndarray], pb: Optional[np.ndarray]):
        # left unitary factors keep the gram contribution w * Pa (x) Pb while
        # randomizing where the channel sends that component
        qa = w ** 0.25 * (_haar_qubit(rng) @ (pa if pa is not None else qmat.EYE2))
        qb = w ** 0.25 * (_haar_qubit(rng) @ (pb if pb is not None else qmat.EYE2))
        pairs.append((qa, qb))

    for mu in range(4):
        for nu in range(4):
            if mu == 0 and nu == 0:
                continue
            r = -c2 * coeff[mu, nu]
            if abs(r) < 1e-15:
                continue
            if mu > 0 and nu > 0:
                plus_a, minus_a = _PAULI_PROJ[mu - 1]
                plus_b, minus_b = _PAULI_PROJ[nu - 1]
                if r > 0:
                    completion_pair(2 * r, plus_a, plus_b)
                    completion_pair(2 * r, minus_a, minus_b)
                else:
                    completion_pair(-2 * r, plus_a, minus_b)
                    completion_pair(-2 * r, minus_a, plus_b)
            elif mu == 0:
                plus_b, minus_b = _PAULI_PROJ[nu - 1]
                completion_pair(2 * abs(r), None, plus_b if r > 0 else minus_b)
            else:
                plus_a, minus_a = _PAULI_PROJ[mu - 1]
                completion_pair(2 * abs(r), plus_a if r > 0 else minus_a, None)

    slack = 1.0 - u
    completion_pair(slack, None, None)
    return SeparableChannel(pairs)


def _random_entangled(rng, rank: int, max_tries: int = 200) -> np.ndarray:
    """Gaussian state of the given rank with negativity above the margin."""
    for _ in range(max_tries):
        g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
        mat = g @ g.conj().T
        mat /= np.trace(mat).real
        mat = np.ascontiguousarray(mat)
        pt = kernels.partial_transpose(mat, 1)
        values, _ = kernels.hermitian_eigh(pt)
        if -values[-1] > _ENTANGLEMENT_MARGIN:
            return mat
    raise SamplingExhaustedError(
        f"no rank-{rank} state with negativity above {_ENTANGLEMENT_MARGIN:g} "
        f"found in {max_tries} draws"
    )


def _negativity_raw(mat: np.ndarray) -> float:
    pt = kernels.partial_transpose(mat, 1)
    values, _ = kernels.hermitian_eigh(pt)
    return float(-np.sum(np.clip(values, None, 0.0)))


def falsify_rank_monotonicity(
    trials: int,
    seed: int = 42,
    channel_factory: Optional[Callable] = None,
) -> SearchReport:
    """Hunt for a separable channel that lowers the rank of an entangled state.

    Each trial draws an entangled input of rank 3 or 4 (alternating) and a
    random separable channel with 1 to 5 free Kraus pairs. A counterexample
    must clear both margins: output negativity above 1e-6 and an output
    spectrum that is rank-deficient with a clean gap (an eigenvalue below
    1e-12 while every surviving one exceeds 1e-6). The expected outcome is an
    empty report; ``channel_factory(rng, n_kraus)`` can inject other channel
    ensembles as a control.
    """
    start = time.perf_counter()
    report = SearchReport(trials=trials)
    factory = channel_factory or (lambda rng, n: random_separable_channel(rng, n))
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        rank_in = 3 if trial % 2 else 4
        mat = _random_entangled(rng, rank_in)
        n_kraus = int(rng.integers(1, 6))
        channel = factory(rng, n_kraus)
        out = channel.apply_raw(mat)
        neg = _negativity_raw(out)
        if neg <= _NEGATIVITY_MARGIN:
            continue
        values, _ = kernels.hermitian_eigh(out)
        live = int(np.sum(values > _RANK_LIVE_TOL))
        dead = int(np.sum(values < _RANK_ZERO_TOL))
        clean_gap = live + dead == 4
        if clean_gap and dead >= 1 and live < rank_in:
            report.counterexamples.append(
                {
                    "trial": trial,
                    "seed": seed,
                    "rank_in": rank_in,
                    "rank_out": live,
                    "n_kraus": n_kraus,
                    "negativity_out": neg,
                    "spectrum_out": [float(v) for v in values],
                }
            )
    report.elapsed = time.perf_counter() - start
    return report


def monotone_audit(
    trials: int,
    seed: int = 42,
    channel_pool: Optional[Sequence[SeparableChannel]] = None,
) -> SearchReport:
    """Check the three Bell-diagonal monotones and concurrence under mixtures.

    Each trial mixes the extremal catalog with random weights, applies the
    mixture to a random entangled Bell-diagonal state, and re-reads the
    output weights numerically. For outputs that remain entangled, any
    monotone that grew by more than 1e-9 is recorded. The same mixture is
    also applied to a random rank-4 state to audit concurrence non-increase,
    which holds for every certified channel on every state.
    """
    start = time.perf_counter()
    report = SearchReport(trials=trials)
    pool = tuple(channel_pool) if channel_pool is not None else bell_extremal_catalog()
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        for _ in range(500):
            weights = np.sort(rng.dirichlet(np.ones(4)))[::-1]
            if weights[0] > 0.5 + 1e-6:
                break
        else:
            raise SamplingExhaustedError("no entangled Bell-diagonal sample found")
        rho = make_bell_diagonal(tuple(weights))
        channel = mix(pool, rng.dirichlet(np.ones(len(pool))))
        out = channel.apply_raw(rho.matrix)
        out_weights, residual = bell_weights_of(out)
        if residual > 1e-9:
            report.counterexamples.append(
                {"trial": trial, "seed": seed, "kind": "left_bell_diagonal", "residual": residual}
            )
            continue
        out_sorted = tuple(np.sort(out_weights)[::-1])
        if out_sorted[0] > 0.5:
            m_in = bell_monotones(tuple(weights))
            m_out = bell_monotones(out_sorted)
            for k, (a, b) in enumerate(zip(m_in, m_out), start=1):
                if b > a + 1e-9:
                    report.counterexamples.append(
                        {
                            "trial": trial,
                            "seed": seed,
                            "kind": f"monotone_e{k}_increase",
                            "weights_in": [float(x) for x in weights],
                            "weights_out": [float(x) for x in out_sorted],
                            "e_in": float(a),
                            "e_out": float(b),
                        }
                    )
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        general = g @ g.conj().T
        general /= np.trace(general).real
        c_in = concurrence(general)
        c_out = concurrence(channel.apply_raw(general))
        if c_out > c_in + 1e-9:
            report.counterexamples.append(
                {
                    "trial": trial,
                    "seed": seed,
                    "kind": "concurrence_increase",
                    "c_in": c_in,
                    "c_out": c_out,
                }
            )
    report.elapsed = time.perf_counter() - start
    return report


_SEARCH_ATOMS: Optional[tuple] = None


def _search_atoms() -> tuple:
    global _SEARCH_ATOMS
    if _SEARCH_ATOMS is None:
        eye = qmat.EYE2
        _SEARCH_ATOMS = (
            LocalUnitary(eye, eye),
            LocalUnitary(qmat.SIGMA_X, eye),
            LocalUnitary(eye, qmat.SIGMA_X),
            LocalUnitary(qmat.SIGMA_Y, eye),
            LocalUnitary(eye, qmat.SIGMA_Y),
            LocalUnitary(qmat.SIGMA_Z, eye),
            LocalUnitary(eye, qmat.SIGMA_Z),
        )
    return _SEARCH_ATOMS


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x))
    return e / e.sum()


def convert_search(rho, rho2, budget: int = 20000, seed: int = 42):
    """Search for a protocol sending rho to rho2; returns (distance, protocol).

    The parameterization mixes the seven one-sided Pauli rotations with one
    discard-and-prepare branch whose diagonal target is itself free, all
    through softmax weights, and minimizes the output Frobenius distance with
    Nelder-Mead restarts. Every atom is LOCC, so a protocol found below the
    1e-6 acceptance distance is a constructive certificate. Failure to find
    one proves nothing.
    """
    source = rho if isinstance(rho, DensityMatrix) else DensityMatrix(qmat.as_cmat(rho, 4))
    target = rho2 if isinstance(rho2, DensityMatrix) else DensityMatrix(qmat.as_cmat(rho2, 4))
    atoms = _search_atoms()
    rotated = np.stack([_apply_unitary(atom, source.matrix) for atom in atoms])
    target_mat = target.matrix

    def objective(x: np.ndarray) -> float:
        w = _softmax(x[:8])
        prep = _softmax(x[8:12])
        out = np.tensordot(w[:7], rotated, axes=1)
        out[np.diag_indices(4)] += w[7] * prep
        return float(np.linalg.norm(out - target_mat))

    rng = np.random.default_rng(seed)
    starts = [np.zeros(12), np.zeros(12)]
    starts[1][0] = 25.0  # start at the (near-)identity corner
    n_restarts = 10
    for _ in range(n_restarts):
        starts.append(rng.normal(0.0, 2.0, size=12))
    # a quarter of the budget is held back to polish the best point found
    explore = max(1, (3 * budget) // 4)
    per_start = max(60, explore // len(starts))
    best_val = np.inf
    best_x = starts[0]
    for x0 in starts:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": per_start, "xatol": 1e-10, "fatol": 1e-14, "adaptive": True},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = res.x
    polish = minimize(
        objective,
        best_x,
        method="Nelder-Mead",
        options={
            "maxfev": max(60, budget - explore),
            "xatol": 1e-13,
            "fatol": 1e-17,
            "adaptive": True,
        },
    )
    if polish.fun < best_val:
        best_val = float(polish.fun)
        best_x = polish.x
    if best_val >= 1e-6:
        return best_val, None
    w = _softmax(best_x[:8])
    prep = _softmax(best_x[8:12])
    branches = [(float(wi), atom) for wi, atom in zip(w[:7], atoms) if wi > 1e-9]
    if w[7] > 1e-9:
        branches.append(
            (float(w[7]), DiscardPrepare(DensityMatrix(np.diag(prep).astype(complex))))
        )
    total = sum(wi for wi, _ in branches)
    protocol = Protocol(tuple((wi / total, atom) for wi, atom in branches))
    distance = verify_protocol(protocol, source, target)
    if distance < 1e-6:
        return float(distance), protocol
    return best_val, None


def _apply_unitary(atom: LocalUnitary, mat: np.ndarray) -> np.ndarray:
    u = atom.lifted()
    return u @ mat @ u.conj().T
