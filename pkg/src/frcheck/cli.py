"""Command-line front end.

Exit codes: 0 when the verdict is the expected one, 1 when it is not,
2 for usage, parse and model-file errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import halpern
from . import quantum as q
from .logic.finder import BoundExceededError, ModelSpec, find_model, frame_class
from .logic.formula import FormulaSyntaxError, agents, parse, to_text
from .logic.kripke import FrameProperty, KripkeModel, ModelError, UnknownAgentError, UnknownAtomError, check_frame_property, satisfies
from .modelio import ModelFileError, dumps, load_model, save_model, to_document
from .scenario import derivations as D
from .scenario.protocol import HAT, OutcomeWorld
from .scenario.report import CONTRADICTION, ScenarioReport, TraceStep, certificate_summary

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _machine(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _parse_formula(text: str):
    try:
        return parse(text)
    except FormulaSyntaxError as e:
        raise UsageError(f"formula: {e}") from None


# commands ------------------------------------------------------------------------------


def cmd_eval(args) -> int:
    obj = load_model(args.model)
    f = _parse_formula(args.formula)
    if isinstance(obj, KripkeModel):
        world = args.world or obj.point
        if world is None:
            raise UsageError("model has no point; pass --world")
        value = satisfies(obj, world, f)
        semantics = "kripke"
    else:
        if args.world is None:
            raise UsageError("probability structures need --world")
        world = args.world
        value = halpern.holds(obj, world, f, args.semantics, args.tolerance)
        semantics = args.semantics
    if args.format == "machine":
        _emit(_machine({"formula": to_text(f), "world": world, "semantics": semantics, "value": value}))
    else:
        _emit("true" if value else "false")
    if args.expect is None:
        return EXIT_OK
    return EXIT_OK if value == (args.expect == "true") else EXIT_UNEXPECTED


def cmd_check_frame(args) -> int:
    obj = load_model(args.model)
    m = obj if isinstance(obj, KripkeModel) else halpern.induced_kripke(obj, args.tolerance)
    props = [FrameProperty(p) for p in (args.property or [p.value for p in FrameProperty])]
    chosen = [args.agent] if args.agent else list(m.agents)
    rows = []
    for a in chosen:
        if a not in m.agents:
            raise UsageError(f"unknown agent {a!r}")
        for p in props:
            res = check_frame_property(m, p, a)
            rows.append({"agent": a, "property": p.value, "holds": res.holds, "violation": list(res.violation or ())})
    if args.format == "machine":
        _emit(_machine({"frame": rows}))
    else:
        for r in rows:
            extra = f"  violated at {','.join(r['violation'])}" if r["violation"] else ""
            _emit(f"{r['agent']} {r['property']}: {str(r['holds']).lower()}{extra}")
    if args.expect is None:
        return EXIT_OK
    return EXIT_OK if all(r["holds"] for r in rows) == (args.expect == "true") else EXIT_UNEXPECTED


def cmd_find_model(args) -> int:
    at = tuple(_parse_formula(t) for t in args.at)
    valid = tuple(_parse_formula(t) for t in args.valid)
    used = set(args.agents.split(",")) if args.agents else set()
    for f in at + valid:
        used |= agents(f)
    props: dict[str, frozenset[FrameProperty]] = {}
    for item in args.frame:
        prop, _, who = item.partition(":")
        for a in (sorted(used) if who in ("", "*") else who.split(",")):
            props[a] = props.get(a, frozenset()) | frame_class([a], prop)[a]
            used.add(a)
    if not at and not valid:
        raise UsageError("find-model needs at least one --at or --valid formula")
    spec = ModelSpec(
        agents=tuple(sorted(used)), frame_properties=props, valid=valid, at_point=at,
        world_count_max=args.max_worlds,
    )
    res = find_model(spec)
    if res.sat and args.out:
        save_model(res.model, args.out)
    if args.format == "machine":
        doc = {"verdict": res.verdict, "model": to_document(res.model) if res.sat else None}
        if not res.sat:
            doc["certificate"] = certificate_summary(res.certificate)
        _emit(_machine(doc))
    elif res.sat:
        _emit(f"SAT\n{dumps(res.model)}")
    else:
        _emit(f"UNSAT up to {args.max_worlds} worlds (refutation complete={res.certificate.is_complete()})")
    if args.expect is None:
        return EXIT_OK
    return EXIT_OK if res.verdict == args.expect.upper() else EXIT_UNEXPECTED


def quantum_report(eps: float) -> ScenarioReport:
    values = q.appendix_values(eps)
    steps = []
    for name, target in q.APPENDIX_TARGETS.items():
        ok = abs(values[name] - target) <= eps
        steps.append(TraceStep(name, None, f"{values[name]:.12g}", f"target {target:.12g}", check=f"|diff| <= {eps:g}", verified=ok))
    us = q.fr_unitaries()
    for name in ("U_t1", "U_tprime", "U_t2"):
        ok = q.is_unitary(us[name], eps) and q.is_hermitian(us[name], eps)
        steps.append(TraceStep(name, None, "unitary and self-adjoint", "matrix check", check="U U^dag = 1, U = U^dag", verified=ok))
    start = q.plus_zero()
    fail = q.projector_onto(q.fail_state(start.register))
    maps = abs(q.born(us["U_a"] @ start, fail, eps) - 1) <= eps
    steps.append(TraceStep(
        "U_a", None, "unitary, maps |+0> to |fail>", "matrix check",
        check="U U^dag = 1, |<fail|U|+0>|^2 = 1", verified=q.is_unitary(us["U_a"], eps) and maps,
    ))
    verdict = "VERIFIED" if all(s.verified for s in steps) else "MISMATCH"
    return ScenarioReport("quantum-verify", verdict, None, tuple(steps), values=values)


def cmd_quantum_verify(args) -> int:
    rep = quantum_report(args.tolerance)
    _emit(rep.to_machine() if args.format == "machine" else rep.to_text())
    return EXIT_OK if rep.all_verified else EXIT_UNEXPECTED


def _check_point(point: str) -> str:
    try:
        return OutcomeWorld.parse(point).name
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_fr_run(args) -> int:
    point = _check_point(args.point)
    rep = D.run_theorem_fr(point) if args.frame == "reflexive" else D.run_theorem_fr_star(point)
    _emit(rep.to_machine() if args.format == "machine" else rep.to_text())
    if point != HAT.name:
        # the theorem predicts nothing elsewhere; the report carries its own checks
        return EXIT_OK
    return EXIT_OK if rep.verdict == CONTRADICTION and rep.all_verified else EXIT_UNEXPECTED


def cmd_fr_ablate(args) -> int:
    rep = D.ablate(args.drop, args.frame)
    _emit(rep.to_machine() if args.format == "machine" else rep.to_text())
    expected = D.EXPECTED_ABLATION[(args.drop, args.frame)]
    return EXIT_OK if rep.verdict == expected and rep.all_verified else EXIT_UNEXPECTED


# parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=q.EPS, help="numeric tolerance (default 1e-9)")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = argparse.ArgumentParser(prog="frcheck", description="Epistemic-logic checks of the four-agent Wigner's-friend argument.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula at a world of a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--world")
    p.add_argument("--semantics", choices=(halpern.DAGGER, halpern.DAGGER_PRIME), default=halpern.DAGGER)
    p.add_argument("--expect", choices=("true", "false"))
    p.add_argument("formula")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("check-frame", parents=[common], help="check frame properties of a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--agent")
    p.add_argument("--property", action="append", choices=[x.value for x in FrameProperty])
    p.add_argument("--expect", choices=("true", "false"), help="expected conjunction of all checks")
    p.set_defaults(run=cmd_check_frame)

    p = sub.add_parser("find-model", parents=[common], help="search for a small model")
    p.add_argument("--at", action="append", default=[], help="formula required at the point")
    p.add_argument("--valid", action="append", default=[], help="formula required at every world")
    p.add_argument("--frame", action="append", default=[], help="property[:agents], e.g. reflexive:x,y")
    p.add_argument("--agents", help="comma-separated agents beyond those in the formulas")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--out", help="write a found model here")
    p.add_argument("--expect", choices=("sat", "unsat"))
    p.set_defaults(run=cmd_find_model)

    p = sub.add_parser("quantum-verify", parents=[common], help="recompute the protocol expectation values")
    p.set_defaults(run=cmd_quantum_verify)

    p = sub.add_parser("fr-run", parents=[common], help="re-derive the contradiction with checked steps")
    p.add_argument("--frame", choices=("reflexive", "serial"), default="reflexive")
    p.add_argument("--point", default=HAT.name)
    p.set_defaults(run=cmd_fr_run)

    p = sub.add_parser("fr-ablate", parents=[common], help="search with some bridge rules removed")
    p.add_argument("--drop", choices=D.DROPS, required=True)
    p.add_argument("--frame", choices=("reflexive", "serial"), default="reflexive")
    p.set_defaults(run=cmd_fr_ablate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if args.tolerance <= 0:
        parser.print_usage(sys.stderr)
        print("frcheck: --tolerance must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args)
    except (UsageError, ModelFileError, OSError, BoundExceededError, ModelError, UnknownAtomError,
            UnknownAgentError, halpern.StructureError, ValueError) as e:
        print(f"frcheck {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
