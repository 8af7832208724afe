"""Convertibility decisions between two-qubit states under local operations.

Three verdict types cover every outcome:

* ``Convertible``: conversion is possible; when the family rule is
  constructive the verdict carries an explicit protocol together with the
  Frobenius residual of re-applying that protocol to the source.
* ``Forbidden``: conversion is impossible, with a machine-readable reason
  (``rank_gate``, ``monotone_e1``/``e2``/``e3``, ``eof_decrease``,
  ``weight_infeasible``) and a human-readable detail line.
* ``Inconclusive``: the engine has no rule that decides the pair. This is an
  honest "don't know", not a "no".

The family rules have different strengths and the dispatcher respects that:
the Werner and rank-2 rules are constructive both ways, the Bell-diagonal
monotone comparison is an exact iff (certificate only, no protocol), and the
general mixture-form synthesis is sufficient only, so its infeasibility
yields Inconclusive rather than Forbidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import qmat
from .channels import (
    DiscardPrepare,
    LocalUnitary,
    Protocol,
    compile_protocol,
    discard_prepare_channel,
)
from .errors import InfeasibleError, NotEntangledError, NotProductDiagonalError, OutOfRangeError
from .measures import bell_monotones
from .states import (
    BellWeights,
    DensityMatrix,
    MemsWeights,
    WernerParam,
    classify_family,
    is_entangled,
    make_mems,
    make_werner,
)


@dataclass(frozen=True, eq=False)
class Convertible:
    protocol: Optional[Protocol]
    certificate: str
    residual: Optional[float] = None

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Forbidden:
    reason: str
    detail: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Inconclusive:
    detail: str

    def __bool__(self):
        return False


Verdict = Union[Convertible, Forbidden, Inconclusive]


@dataclass(frozen=True)
class MemsProtocolParams:
    """Identity weight W and diagonal refill weights (p01, p00_11, p10)."""

    W: float
    prep_weights: tuple

    def __post_init__(self):
        if not 0.0 <= self.W <= 1.0:
            raise OutOfRangeError(f"W must lie in [0, 1], got {self.W!r}")
        p = tuple(float(x) for x in self.prep_weights)
        if len(p) != 3 or any(x < 0.0 for x in p):
            raise OutOfRangeError(f"prep weights must be 3 nonnegative values, got {p}")
        if abs(sum(p) - 1.0) > 1e-10:
            raise OutOfRangeError(f"prep weights must sum to 1 within 1e-10, got {sum(p)!r}")
        object.__setattr__(self, "prep_weights", p)

    def prepared_state(self) -> DensityMatrix:
        p01, p00_11, p10 = self.prep_weights
        return DensityMatrix(np.diag([p00_11 / 2, p01, p10, p00_11 / 2]).astype(complex))


def _coerce(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(qmat.as_cmat(rho, 4))


def verify_protocol(protocol: Protocol, rho, rho2) -> float:
    """Residual ||apply(compile(protocol), rho) - rho2||_F.

    Goes through the compiled Kraus form rather than the abstract branches,
    so it independently checks both the protocol and its lowering.
    """
    source = _coerce(rho)
    target = _coerce(rho2)
    channel = compile_protocol(protocol)
    return qmat.frobenius_distance(channel.apply(source).matrix, target.matrix)


def rank_gate(rho, rho2) -> Optional[Forbidden]:
    """Block entangled-to-entangled conversions that would lower the rank.

    Returns a Forbidden verdict when both states are entangled and the
    target's numeric rank is strictly smaller; None means pass.
    """
    source = _coerce(rho)
    target = _coerce(rho2)
    if not (is_entangled(source) and is_entangled(target)):
        return None
    r_in, r_out = source.rank(), target.rank()
    if r_out < r_in:
        return Forbidden(
            "rank_gate",
            f"no separable channel sends an entangled rank-{r_in} state to an "
            f"entangled rank-{r_out} state",
        )
    return None


_ID_ATOM_CACHE: Optional[LocalUnitary] = None


def _identity_atom() -> LocalUnitary:
    global _ID_ATOM_CACHE
    if _ID_ATOM_CACHE is None:
        _ID_ATOM_CACHE = LocalUnitary(qmat.EYE2, qmat.EYE2)
    return _ID_ATOM_CACHE


def decide_werner(w, w2) -> Verdict:
    """Convertible iff the singlet weight does not increase.

    The protocol keeps the state with probability p = w'/w and otherwise
    replaces it with the maximally mixed state.
    """
    source = w if isinstance(w, WernerParam) else WernerParam(float(w))
    target = w2 if isinstance(w2, WernerParam) else WernerParam(float(w2))
    if target.w > source.w:
        return Forbidden(
            "weight_infeasible",
            f"identity weight w'/w = {target.w}/{source.w} exceeds 1",
        )
    p = 1.0 if source.w == 0.0 else target.w / source.w
    protocol = Protocol(
        (
            (p, _identity_atom()),
            (1.0 - p, DiscardPrepare(DensityMatrix(np.eye(4, dtype=complex) / 4))),
        )
    )
    residual = verify_protocol(protocol, make_werner(source), make_werner(target))
    return Convertible(
        protocol,
        f"keep with probability {p:.12g}, refill with the maximally mixed state",
        residual,
    )


def decide_bell(l, l2) -> Verdict:
    """Exact decision for entangled Bell-diagonal pairs by monotone dominance.

    Convertible iff every monotone of the source weakly dominates the
    target's, comparing in the extended reals. The certificate is the
    comparison itself; no protocol is synthesized here.
    """
    source = l if isinstance(l, BellWeights) else BellWeights(tuple(l))
    target = l2 if isinstance(l2, BellWeights) else BellWeights(tuple(l2))
    for name, bw in (("source", source), ("target", target)):
        if bw.weights[0] <= 0.5:
            raise NotEntangledError(
                f"{name} top weight {bw.weights[0]!r} is not above 1/2; the monotone "
                "rule only covers entangled pairs"
            )
    ms = bell_monotones(source)
    mt = bell_monotones(target)
    for k, (a, b) in enumerate(zip(ms, mt), start=1):
        if a < b:
            return Forbidden(
                f"monotone_e{k}",
                f"E{k} would increase: {a!r} < {b!r}",
            )
    return Convertible(None, f"monotone triple {tuple(ms)} dominates {tuple(mt)}", None)


def synthesize_mems_protocol(l, l2) -> MemsProtocolParams:
    """Solve for the identity weight and refill state within the mixture form.

    The identity weight W is fixed by the off-diagonal entry, which only the
    kept branch can supply; the three refill weights then solve a triangular
    linear system, one per remaining matrix entry. Raises InfeasibleError
    naming the first violated bound.
    """
    source = l if isinstance(l, MemsWeights) else MemsWeights(tuple(l))
    target = l2 if isinstance(l2, MemsWeights) else MemsWeights(tuple(l2))
    s1, s2, s3, s4 = source.weights
    t1, t2, t3, t4 = target.weights
    if s1 - s3 <= 1e-12:
        raise InfeasibleError("source has no singlet excess (top weight equals corner weight)")
    w = (t1 - t3) / (s1 - s3)
    if w < -1e-12 or w > 1.0 + 1e-12:
        raise InfeasibleError(f"identity weight W = {w!r} falls outside [0, 1]")
    w = min(1.0, max(0.0, w))
    if w == 1.0:
        if max(abs(a - b) for a, b in zip(source.weights, target.weights)) <= 1e-10:
            return MemsProtocolParams(1.0, (1.0, 0.0, 0.0))
        raise InfeasibleError("identity weight W = 1 but the weight vectors differ")
    rest = 1.0 - w
    p01 = (t2 - w * s2) / rest
    p00_11 = 2.0 * (t3 - w * s3) / rest
    p10 = (t4 - w * s4) / rest
    for name, val in (("p01", p01), ("p00_11", p00_11), ("p10", p10)):
        if val < -1e-12:
            raise InfeasibleError(f"refill weight {name} = {val!r} is negative")
    p01, p00_11, p10 = (max(0.0, x) for x in (p01, p00_11, p10))
    total = p01 + p00_11 + p10
    if abs(total - 1.0) > 1e-10:
        raise InfeasibleError(f"refill weights sum to {total!r}, not 1")
    return MemsProtocolParams(w, (p01, p00_11, p10))


def _mems_protocol(params: MemsProtocolParams) -> Protocol:
    return Protocol(
        (
            (params.W, _identity_atom()),
            (1.0 - params.W, DiscardPrepare(params.prepared_state())),
        )
    )


def decide_mems(l, l2) -> Verdict:
    """Decision within the maximally-entangled-mixture form.

    Rank-2 members (both corner weights zero on both sides) are decided both
    ways: the top weight is the entanglement of formation's argument there,
    so it cannot grow. General members go through protocol synthesis, which
    is sufficient only: infeasibility yields Inconclusive.
    """
    source = l if isinstance(l, MemsWeights) else MemsWeights(tuple(l))
    target = l2 if isinstance(l2, MemsWeights) else MemsWeights(tuple(l2))
    s = source.weights
    t = target.weights
    if max(abs(a - b) for a, b in zip(s, t)) <= 1e-12:
        protocol = Protocol(((1.0, _identity_atom()),))
        residual = verify_protocol(protocol, make_mems(source), make_mems(target))
        return Convertible(protocol, "identical weights: identity protocol", residual)
    if all(x <= 1e-10 for x in (s[2], s[3], t[2], t[3])):
        if t[0] > s[0]:
            return Forbidden(
                "eof_decrease",
                f"top weight would grow from {s[0]!r} to {t[0]!r}, raising the "
                "entanglement of formation",
            )
        wid = t[0] / s[0]
        protocol = Protocol(
            (
                (wid, _identity_atom()),
                (
                    1.0 - wid,
                    DiscardPrepare(
                        DensityMatrix(np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex))
                    ),
                ),
            )
        )
        residual = verify_protocol(protocol, make_mems(source), make_mems(target))
        return Convertible(
            protocol, f"keep with probability {wid:.12g}, refill with |01><01|", residual
        )
    try:
        params = synthesize_mems_protocol(source, target)
    except InfeasibleError as err:
        return Inconclusive(f"mixture-form synthesis infeasible: {err.detail}")
    protocol = _mems_protocol(params)
    residual = verify_protocol(protocol, make_mems(source), make_mems(target))
    return Convertible(
        protocol,
        f"keep with probability {params.W:.12g}, refill with diagonal weights "
        f"{params.prep_weights}",
        residual,
    )


def _werner_as_weights(param: WernerParam) -> tuple:
    q = (1.0 - param.w) / 4.0
    return ((1.0 + 3.0 * param.w) / 4.0, q, q, q)


def _tag_bell_weights(tag) -> BellWeights:
    if tag.kind == "werner":
        return BellWeights(_werner_as_weights(tag.params))
    return tag.params


def _tag_mems_weights(tag) -> MemsWeights:
    if tag.kind == "werner":
        return MemsWeights(_werner_as_weights(tag.params))
    return tag.params


def decide(rho, rho2) -> Verdict:
    """Full decision pipeline for a pair of two-qubit states.

    Order: (1) separable targets are prepared directly when they admit an
    orthogonal product decomposition; (2) the rank gate blocks impossible
    entangled pairs; (3) both states are classified and a shared family rule
    decides; (4) anything else is Inconclusive.
    """
    source = _coerce(rho)
    target = _coerce(rho2)
    if not is_entangled(target):
        try:
            discard_prepare_channel(target)
        except NotProductDiagonalError:
            pass
        else:
            protocol = Protocol(((1.0, DiscardPrepare(target)),))
            residual = verify_protocol(protocol, source, target)
            return Convertible(
                protocol, "target is separable: discard the input and prepare it", residual
            )
    gate = rank_gate(source, target)
    if gate is not None:
        return gate
    tag_s = classify_family(source)
    tag_t = classify_family(target)
    kinds = {tag_s.kind, tag_t.kind}
    if kinds == {"werner"}:
        return decide_werner(tag_s.params, tag_t.params)
    if kinds <= {"werner", "bell_diagonal"}:
        try:
            return decide_bell(_tag_bell_weights(tag_s), _tag_bell_weights(tag_t))
        except NotEntangledError as err:
            return Inconclusive(f"Bell-diagonal rule does not apply: {err}")
    if kinds <= {"werner", "mems"}:
        return decide_mems(_tag_mems_weights(tag_s), _tag_mems_weights(tag_t))
    if "general" in kinds:
        return Inconclusive("at least one state fits no decided family")
    return Inconclusive("states fit different decided families with no shared rule")
