"""Command line front end over the decision, synthesis and audit machinery.

State and protocol arguments are paths to JSON files. A state file carries a
``kind`` tag with that family's parameters:

    {"kind": "werner", "w": 0.9}
    {"kind": "bell_diagonal", "lambda": [0.7, 0.1, 0.1, 0.1]}
    {"kind": "mems", "lambda": [0.5, 0.3, 0.1, 0.1]}
    {"kind": "dense", "re": [[...4x4...]], "im": [[...4x4...]]}

Exit codes: 0 convertible (or success), 2 forbidden, 3 inconclusive or not
found, 64 malformed input (the diagnostic names the offending field), 70
internal failure. All work is single threaded and seeded, so runs repeat
bit-for-bit. Floats serialize through repr, which round-trips doubles
exactly; infinities become the strings "inf" / "-inf" since JSON has no
literal for them.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .channels import (
    DiscardPrepare,
    LocalUnitary,
    Protocol,
    compile_protocol,
)
from .convertibility import (
    Convertible,
    Forbidden,
    Inconclusive,
    decide,
    synthesize_mems_protocol,
    verify_protocol,
)
from .errors import EntconvError, InfeasibleError
from .measures import bell_monotones, concurrence, eof, negativity
from .oracle import convert_search, falsify_rank_monotonicity, monotone_audit
from .states import (
    DensityMatrix,
    classify_family,
    make_bell_diagonal,
    make_mems,
    make_werner,
    state_scalars,
)

EX_OK = 0
EX_FORBIDDEN = 2
EX_INCONCLUSIVE = 3
EX_USAGE = 64
EX_SOFTWARE = 70


class _InputError(Exception):
    """Malformed user input; carries the offending field for the diagnostic."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field
        self.message = message


def _jsonify(value):
    """Make a payload JSON-safe: tuples to lists, non-finite floats to strings."""
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(value, np.integer):
        return int(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _num(obj: dict, field: str) -> float:
    if field.rsplit(".", 1)[-1] not in obj:
        raise _InputError(field, "missing required field")
    value = obj[field.rsplit(".", 1)[-1]]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _InputError(field, f"must be a number, got {value!r}")
    return float(value)


def _vec4(obj: dict, field: str) -> tuple:
    key = field.rsplit(".", 1)[-1]
    if key not in obj:
        raise _InputError(field, "missing required field")
    value = obj[key]
    if not isinstance(value, list) or len(value) != 4:
        raise _InputError(field, "must be a list of 4 numbers")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise _InputError(f"{field}[{i}]", f"must be a number, got {x!r}")
        out.append(float(x))
    return tuple(out)


def _grid(obj: dict, field: str, n: int) -> np.ndarray:
    key = field.rsplit(".", 1)[-1]
    if key not in obj:
        raise _InputError(field, "missing required field")
    value = obj[key]
    if (
        not isinstance(value, list)
        or len(value) != n
        or any(not isinstance(row, list) or len(row) != n for row in value)
    ):
        raise _InputError(field, f"must be a {n}x{n} grid of numbers")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise _InputError(f"{field}[{i}][{j}]", f"must be a number, got {x!r}")
    return np.array(value, dtype=float)


def parse_state_spec(obj, where: str) -> DensityMatrix:
    """Parse one tagged state object, naming the offending field on failure."""
    if not isinstance(obj, dict):
        raise _InputError(where, "must be a JSON object")
    kind = obj.get("kind")
    try:
        if kind == "werner":
            return make_werner(_num(obj, f"{where}.w"))
        if kind in ("bell_diagonal", "mems"):
            weights = _vec4(obj, f"{where}.lambda")
            maker = make_bell_diagonal if kind == "bell_diagonal" else make_mems
            return maker(weights)
        if kind == "dense":
            re = _grid(obj, f"{where}.re", 4)
            im = _grid(obj, f"{where}.im", 4)
            return DensityMatrix(re + 1j * im)
    except EntconvError as exc:
        raise _InputError(where, str(exc)) from exc
    raise _InputError(
        f"{where}.kind",
        f"must be one of werner, bell_diagonal, mems, dense; got {kind!r}",
    )


def state_to_spec(rho: DensityMatrix) -> dict:
    mat = rho.matrix
    return {
        "kind": "dense",
        "re": [[float(x) for x in row] for row in mat.real],
        "im": [[float(x) for x in row] for row in mat.imag],
    }


def _complex_grid_to_spec(mat: np.ndarray) -> dict:
    return {
        "re": [[float(x) for x in row] for row in mat.real],
        "im": [[float(x) for x in row] for row in mat.imag],
    }


def _complex_grid_from_spec(obj, where: str, n: int) -> np.ndarray:
    if not isinstance(obj, dict):
        raise _InputError(where, "must be a JSON object with re and im grids")
    return _grid(obj, f"{where}.re", n) + 1j * _grid(obj, f"{where}.im", n)


def protocol_to_spec(protocol: Protocol) -> dict:
    branches = []
    for weight, atom in protocol.branches:
        if isinstance(atom, LocalUnitary):
            spec = {
                "kind": "local_unitary",
                "u_a": _complex_grid_to_spec(atom.u_a),
                "u_b": _complex_grid_to_spec(atom.u_b),
            }
        elif isinstance(atom, DiscardPrepare):
            spec = {"kind": "discard_prepare", "target": state_to_spec(atom.target)}
        else:
            raise TypeError(f"cannot serialize atom {type(atom).__name__}")
        branches.append({"weight": float(weight), "atom": spec})
    return {"branches": branches}


def parse_protocol_spec(obj, where: str = "protocol") -> Protocol:
    if not isinstance(obj, dict) or not isinstance(obj.get("branches"), list):
        raise _InputError(f"{where}.branches", "must be a list of weighted atoms")
    branches = []
    for i, entry in enumerate(obj["branches"]):
        here = f"{where}.branches[{i}]"
        if not isinstance(entry, dict):
            raise _InputError(here, "must be a JSON object")
        weight = _num(entry, f"{here}.weight")
        atom_obj = entry.get("atom")
        if not isinstance(atom_obj, dict):
            raise _InputError(f"{here}.atom", "missing or not an object")
        kind = atom_obj.get("kind")
        try:
            if kind == "local_unitary":
                atom = LocalUnitary(
                    _complex_grid_from_spec(atom_obj.get("u_a"), f"{here}.atom.u_a", 2),
                    _complex_grid_from_spec(atom_obj.get("u_b"), f"{here}.atom.u_b", 2),
                )
            elif kind == "discard_prepare":
                atom = DiscardPrepare(
                    parse_state_spec(atom_obj.get("target"), f"{here}.atom.target")
                )
            else:
                raise _InputError(
                    f"{here}.atom.kind",
                    f"must be local_unitary or discard_prepare, got {kind!r}",
                )
        except EntconvError as exc:
            raise _InputError(f"{here}.atom", str(exc)) from exc
        branches.append((weight, atom))
    try:
        return Protocol(tuple(branches))
    except EntconvError as exc:
        raise _InputError(f"{where}.branches", str(exc)) from exc


def _load_json(path: str, where: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(where, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(where, f"invalid JSON in {path}: {exc}") from exc


def _load_state(path: str, where: str) -> DensityMatrix:
    return parse_state_spec(_load_json(path, where), where)


def _emit(args, payload: dict, lines) -> None:
    if args.json:
        print(json.dumps(_jsonify(payload), indent=2))
    else:
        for line in lines:
            print(line)


def _family_payload(tag) -> dict:
    if tag.kind == "werner":
        params = {"w": tag.params.w}
    elif tag.kind in ("bell_diagonal", "mems"):
        params = {"lambda": list(tag.params.weights)}
    else:
        params = None
    return {"kind": tag.kind, "params": params}


def cmd_check(args) -> int:
    source = _load_state(args.source, "source")
    target = _load_state(args.target, "target")
    verdict = decide(source, target)
    if isinstance(verdict, Convertible):
        residual = verdict.residual
        if verdict.protocol is not None and residual is None:
            residual = verify_protocol(verdict.protocol, source, target)
        proto_spec = protocol_to_spec(verdict.protocol) if verdict.protocol else None
        payload = {
            "verdict": "Convertible",
            "reason": None,
            "certificate": verdict.certificate,
            "protocol": proto_spec,
            "residual": residual,
        }
        lines = ["verdict: Convertible", f"certificate: {verdict.certificate}"]
        if verdict.protocol is not None:
            lines.append(f"protocol: {len(verdict.protocol.branches)} branches")
            lines.append(f"residual: {residual!r}")
        _emit(args, payload, lines)
        return EX_OK
    if isinstance(verdict, Forbidden):
        payload = {
            "verdict": "Forbidden",
            "reason": verdict.reason,
            "detail": verdict.detail,
            "protocol": None,
            "residual": None,
        }
        _emit(args, payload, ["verdict: Forbidden", f"reason: {verdict.reason}", f"detail: {verdict.detail}"])
        return EX_FORBIDDEN
    payload = {
        "verdict": "Inconclusive",
        "reason": None,
        "detail": verdict.detail,
        "protocol": None,
        "residual": None,
    }
    _emit(args, payload, ["verdict: Inconclusive", f"detail: {verdict.detail}"])
    return EX_INCONCLUSIVE


def cmd_measures(args) -> int:
    rho = _load_state(args.state, "state")
    scalars = state_scalars(rho, args.tol)
    tag = classify_family(rho)
    measures = {
        "concurrence": concurrence(rho),
        "eof": eof(rho),
        "negativity": negativity(rho),
        "purity": scalars.purity,
        "entropy": scalars.entropy,
        "rank": scalars.rank,
        "family": _family_payload(tag),
        "monotones": None,
    }
    lines = [f"{name}: {value!r}" for name, value in list(measures.items())[:5]]
    lines.append(f"rank: {scalars.rank}")
    if tag.kind == "werner":
        lines.append(f"family: werner (w={tag.params.w!r})")
        w = tag.params.w
        q = (1.0 - w) / 4.0
        triple = bell_monotones(((1.0 + 3.0 * w) / 4.0, q, q, q))
    elif tag.kind == "bell_diagonal":
        lines.append(f"family: bell_diagonal (lambda={list(tag.params.weights)!r})")
        triple = bell_monotones(tag.params.weights)
    else:
        if tag.kind == "mems":
            lines.append(f"family: mems (lambda={list(tag.params.weights)!r})")
        else:
            lines.append("family: general")
        triple = None
    if triple is not None:
        measures["monotones"] = [triple.e1, triple.e2, triple.e3]
        lines.append(f"monotones: ({triple.e1!r}, {triple.e2!r}, {triple.e3!r})")
    _emit(args, {"measures": measures}, lines)
    return EX_OK


def _mixture_weights_of(rho: DensityMatrix, where: str) -> tuple:
    tag = classify_family(rho)
    if tag.kind == "werner":
        w = tag.params.w
        q = (1.0 - w) / 4.0
        return ((1.0 + 3.0 * w) / 4.0, q, q, q)
    if tag.kind == "mems":
        return tag.params.weights
    raise _InputError(where, "state is not of the maximally-entangled-mixture form")


def cmd_synthesize(args) -> int:
    source = _load_state(args.source, "source")
    target = _load_state(args.target, "target")
    sw = _mixture_weights_of(source, "source")
    tw = _mixture_weights_of(target, "target")
    try:
        params = synthesize_mems_protocol(sw, tw)
    except InfeasibleError as exc:
        payload = {"verdict": "Infeasible", "detail": str(exc)}
        _emit(args, payload, ["verdict: Infeasible", f"detail: {exc}"])
        return EX_INCONCLUSIVE
    protocol = Protocol(
        (
            (params.W, LocalUnitary(np.eye(2, dtype=complex), np.eye(2, dtype=complex))),
            (1.0 - params.W, DiscardPrepare(params.prepared_state())),
        )
        if params.W < 1.0
        else ((1.0, LocalUnitary(np.eye(2, dtype=complex), np.eye(2, dtype=complex))),)
    )
    residual = verify_protocol(protocol, source, target)
    payload = {
        "verdict": "Synthesized",
        "W": params.W,
        "prep_weights": list(params.prep_weights),
        "protocol": protocol_to_spec(protocol),
        "residual": residual,
    }
    lines = [
        f"W: {params.W!r}",
        f"prep_weights: {list(params.prep_weights)!r}",
        f"residual: {residual!r}",
    ]
    _emit(args, payload, lines)
    return EX_OK


def cmd_apply(args) -> int:
    protocol = parse_protocol_spec(_load_json(args.protocol, "protocol"))
    rho = _load_state(args.state, "state")
    out = compile_protocol(protocol).apply(rho)
    payload = {"state": state_to_spec(out)}
    lines = []
    for row in out.matrix:
        lines.append("  ".join(f"{x.real:+.6f}{x.imag:+.6f}j" for x in row))
    _emit(args, payload, lines)
    return EX_OK


def cmd_search(args) -> int:
    source = _load_state(args.source, "source")
    target = _load_state(args.target, "target")
    distance, protocol = convert_search(source, target, budget=args.budget, seed=args.seed)
    found = protocol is not None
    payload = {
        "distance": distance,
        "protocol": protocol_to_spec(protocol) if found else None,
        "residual": distance if found else None,
    }
    lines = [f"distance: {distance!r}"]
    lines.append(
        f"protocol: found ({len(protocol.branches)} branches)" if found else "protocol: none"
    )
    _emit(args, payload, lines)
    return EX_OK if found else EX_INCONCLUSIVE


def cmd_audit(args) -> int:
    rank_report = falsify_rank_monotonicity(args.trials, args.seed)
    mono_report = monotone_audit(args.trials, args.seed)
    clean = rank_report.clean and mono_report.clean
    payload = {
        "trials": args.trials,
        "rank_monotonicity": {
            "counterexamples": rank_report.counterexamples,
            "elapsed": rank_report.elapsed,
        },
        "monotones": {
            "counterexamples": mono_report.counterexamples,
            "elapsed": mono_report.elapsed,
        },
        "clean": clean,
    }
    lines = [
        f"rank_monotonicity: {len(rank_report.counterexamples)} counterexamples "
        f"in {rank_report.trials} trials ({rank_report.elapsed:.2f}s)",
        f"monotones: {len(mono_report.counterexamples)} violations "
        f"in {mono_report.trials} trials ({mono_report.elapsed:.2f}s)",
        f"clean: {clean}",
    ]
    _emit(args, payload, lines)
    return EX_OK if clean else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser) -> None:
    parser.add_argument(
        "--tol",
        type=float,
        default=argparse.SUPPRESS,
        help="numeric tolerance for rank and family readouts (default 1e-9)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS,
        help="seed for randomized subcommands (default 42)",
    )
    parser.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="emit a JSON payload instead of plain text",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="entconv",
        description="Two-qubit convertibility: decisions, synthesis, search, audits.",
    )
    parser.set_defaults(tol=1e-9, seed=42, json=False)
    _add_common(parser)
    common = _Parser(add_help=False)
    _add_common(common)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="decide source -> target convertibility")
    p.add_argument("source", help="path to the source state JSON")
    p.add_argument("target", help="path to the target state JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("measures", parents=[common], help="entanglement measures of one state")
    p.add_argument("state", help="path to the state JSON")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser(
        "synthesize", parents=[common], help="solve for the two-branch mixture protocol"
    )
    p.add_argument("source", help="path to the source state JSON")
    p.add_argument("target", help="path to the target state JSON")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("apply", parents=[common], help="apply a protocol file to a state file")
    p.add_argument("protocol", help="path to the protocol JSON")
    p.add_argument("state", help="path to the state JSON")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("search", parents=[common], help="numeric protocol search")
    p.add_argument("source", help="path to the source state JSON")
    p.add_argument("target", help="path to the target state JSON")
    p.add_argument("--budget", type=int, default=20000, help="objective evaluation budget")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("audit", parents=[common], help="run the randomized falsifiers")
    p.add_argument("--trials", type=int, default=1000, help="trials per falsifier")
    p.set_defaults(func=cmd_audit)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        if args.json:
            print(json.dumps({"error": exc.message, "field": exc.field}), file=sys.stderr)
        else:
            print(f"entconv: error: {exc.field}: {exc.message}", file=sys.stderr)
        return EX_USAGE
    except Exception as exc:  # internal invariant failure
        print(f"entconv: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
