"""Command-line interface. Every subcommand prints one JSON object::

    {"status": "ok" | "error", "payload": ..., "diagnostics": [...]}

Exit codes: 0 success, 2 input or parse error, 3 domain error, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

from . import belief, encoding, logic, planning, reconcile
from .logic import KnowledgeBase, format_formula, parse_formula

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_RESOURCE = 0, 2, 3, 4


class InputError(Exception):
    pass


@dataclass
class CommandResult:
    status: str = "ok"
    payload: Any = None
    diagnostics: list = field(default_factory=list)
    code: int = EXIT_OK

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.status == "ok" else self.code

    def to_json(self) -> dict:
        return {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics}


def corpus_path(name: str) -> str:
    """Path of a bundled example file."""
    return str(resources.files("kbreconcile") / "corpus" / name)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _kb(path: str) -> KnowledgeBase:
    return logic.kb_from_json(_read(path))


def _problem(path: str) -> planning.PlanningProblem:
    return planning.parse_problem(_read(path))


def _plan(value: str) -> list[str]:
    text = _read(value) if os.path.exists(value) else value
    return planning.parse_plan(text)


def _models_json(models) -> list[list[str]]:
    return sorted(m.sorted_atoms() for m in models)


def _need(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise InputError(f"--{name} is required")


# --------------------------------------------------------------------------
# subcommands


def cmd_models(args) -> CommandResult:
    _need(args, "kb")
    return CommandResult(payload=_models_json(logic.enumerate_models(_kb(args.kb))))


def cmd_entail(args) -> CommandResult:
    _need(args, "kb", "query")
    kb = _kb(args.kb)
    return CommandResult(payload=logic.entails(kb, parse_formula(args.query), args.mode))


def cmd_encode(args) -> CommandResult:
    _need(args, "problem", "horizon")
    enc = encoding.encode_bounded(_problem(args.problem), args.horizon, with_goal_clause=not args.no_goal)
    return CommandResult(payload=enc.kb.to_json())


def cmd_plan(args) -> CommandResult:
    _need(args, "problem")
    problem = _problem(args.problem)
    if args.engine == "bfs":
        plan = planning.bfs_optimal_plan(problem)
        if plan is not None and args.horizon is not None and len(plan) > args.horizon:
            plan = None
        payload = None if plan is None else {"plan": plan, "length": len(plan)}
    else:
        horizon = 8 if args.horizon is None else args.horizon
        found = encoding.solve_with_deepening(problem, horizon)
        payload = None if found is None else {"plan": found[0], "length": found[1]}
    return CommandResult(payload=payload)


def _plan_context(args):
    _need(args, "problem", "plan")
    problem = _problem(args.problem)
    plan = _plan(args.plan)
    horizon = len(plan) if args.horizon is None else args.horizon
    enc = encoding.encode_bounded(problem, horizon, with_goal_clause=True)
    kb = _kb(args.kb) if args.kb else enc.kb
    return enc, kb, plan


def cmd_validate(args) -> CommandResult:
    enc, kb, plan = _plan_context(args)
    return CommandResult(payload={"valid": reconcile.check_plan_validity(kb, enc, plan)})


def cmd_optimal(args) -> CommandResult:
    enc, kb, plan = _plan_context(args)
    return CommandResult(payload={"optimal": reconcile.check_plan_optimality(kb, enc, plan)})


def _trace(args, kb_a: KnowledgeBase):
    if args.gamma != "trace":
        return None
    if args.problem and args.plan:
        plan = _plan(args.plan)
        horizon = len(plan) if args.horizon is None else args.horizon
        return planning.plan_trace_model(_problem(args.problem), plan, horizon)
    return reconcile.unique_model(kb_a)


def cmd_explain(args) -> CommandResult:
    _need(args, "kb-a", "kb-h", "query")
    kb_a, kb_h = _kb(args.kb_a), _kb(args.kb_h)
    phi = parse_formula(args.query)
    diagnostics = []
    if args.mode == "credulous" and args.require_support:
        diagnostics.append("credulous supports are trivial: the empty set credulously entails any satisfiable query")
    if logic.entails(kb_h, phi, args.mode):
        diagnostics.append("human KB already entails the query")
    expl = reconcile.find_explanation(
        kb_a,
        kb_h,
        phi,
        args.mode,
        args.gamma,
        trace=_trace(args, kb_a),
        require_support=args.require_support,
        max_steps=args.max_steps,
    )
    if expl is None:
        return CommandResult(payload=None, diagnostics=diagnostics + ["no explanation exists"])
    payload = expl.to_json()
    payload["cost"] = int(expl.cost) if float(expl.cost).is_integer() else expl.cost
    return CommandResult(payload=payload, diagnostics=diagnostics)


def cmd_update(args) -> CommandResult:
    _need(args, "kb", "epsilon")
    kb = _kb(args.kb)
    eps = _kb(args.epsilon)
    kb_a = _kb(args.kb_a) if args.kb_a else None
    trace = None
    if args.gamma == "trace":
        if kb_a is None:
            raise InputError("--kb-a is required with --gamma trace")
        trace = _trace(args, kb_a)
    result = reconcile.update_kb(kb, eps, args.gamma, trace=trace, kb_a=kb_a)
    return CommandResult(
        payload={
            "added": [label for label, _ in result.added],
            "removed": result.removed_labels,
            "updated_kb": result.updated_kb.to_json(),
        }
    )


def _belief_payload(kb: KnowledgeBase) -> dict:
    return {
        "models": _models_json(logic.enumerate_models(kb)),
        "formula": format_formula(kb.conjunction()),
        "kb": kb.to_json(),
    }


def cmd_revise(args) -> CommandResult:
    _need(args, "kb", "query")
    return CommandResult(payload=_belief_payload(belief.revise(_kb(args.kb), parse_formula(args.query))))


def cmd_pma_update(args) -> CommandResult:
    _need(args, "kb", "query")
    return CommandResult(payload=_belief_payload(belief.update_pma(_kb(args.kb), parse_formula(args.query))))


def _csv(value: str | None) -> list[str]:
    return [x.strip() for x in value.split(",") if x.strip()] if value else []


def cmd_abduce(args) -> CommandResult:
    _need(args, "kb", "query")
    prob = belief.AbductionProblem(_kb(args.kb), parse_formula(args.query), tuple(_csv(args.hypotheses)))
    result = belief.abduce(prob)
    return CommandResult(
        payload={"explanations": [format_formula(a) for a in result.explanations], "reason": result.reason}
    )


def cmd_diagnose(args) -> CommandResult:
    _need(args, "kb", "components")
    ab = {}
    for item in args.ab or []:
        comp, _, atom = item.partition("=")
        if not atom:
            raise InputError(f"--ab expects component=atom, got {item!r}")
        ab[comp] = atom
    prob = belief.DiagnosisProblem(
        _kb(args.kb),
        tuple(parse_formula(o) for o in args.obs or []),
        tuple(_csv(args.components)),
        ab,
    )
    return CommandResult(payload={"diagnoses": [sorted(s) for s in belief.diagnose(prob)]})


COMMANDS = {
    "models": cmd_models,
    "entail": cmd_entail,
    "encode": cmd_encode,
    "plan": cmd_plan,
    "validate": cmd_validate,
    "optimal": cmd_optimal,
    "explain": cmd_explain,
    "update": cmd_update,
    "revise": cmd_revise,
    "pma-update": cmd_pma_update,
    "abduce": cmd_abduce,
    "diagnose": cmd_diagnose,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb")
    common.add_argument("--kb-a")
    common.add_argument("--kb-h")
    common.add_argument("--problem")
    common.add_argument("--plan", help="plan JSON file or inline JSON array")
    common.add_argument("--query")
    common.add_argument("--mode", choices=reconcile.MODES, default="skeptical")
    common.add_argument("--gamma", choices=reconcile.GAMMA_POLICIES, default="none")
    common.add_argument("--horizon", type=int)
    common.add_argument("--engine", choices=("sat", "bfs"), default="sat")
    common.add_argument("--pretty", action="store_true")

    parser = argparse.ArgumentParser(prog="kbreconcile", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "encode":
            p.add_argument("--no-goal", action="store_true", help="omit the goal clause")
        if name == "explain":
            p.add_argument("--require-support", action="store_true")
            p.add_argument("--max-steps", type=int)
        if name == "update":
            p.add_argument("--epsilon", help="KB file holding the formulas to add")
        if name == "abduce":
            p.add_argument("--hypotheses", help="comma-separated abducible atoms (default: all)")
        if name == "diagnose":
            p.add_argument("--obs", action="append", help="observation formula (repeatable)")
            p.add_argument("--components", help="comma-separated component names")
            p.add_argument("--ab", action="append", help="component=abnormality atom (default ab<component>)")
    return parser


def _error_code(exc: Exception) -> int | None:
    if isinstance(exc, (logic.EnumerationCapExceeded, reconcile.SearchBudgetExceeded)):
        return EXIT_RESOURCE
    if isinstance(exc, (InputError, logic.FormulaSyntaxError, logic.KnowledgeBaseError, planning.ProblemSchemaError)):
        return EXIT_INPUT
    if isinstance(
        exc,
        (
            logic.LogicError,
            planning.PlanningError,
            encoding.EncodingError,
            reconcile.ReconcileError,
            belief.BeliefChangeError,
        ),
    ):
        return EXIT_DOMAIN
    if isinstance(exc, ValueError):
        return EXIT_INPUT
    return None


def run(argv: Sequence[str] | None = None) -> CommandResult:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:
        code = _error_code(exc)
        if code is None:
            raise
        return CommandResult(status="error", payload=None, diagnostics=[str(exc)], code=code)


def render(result: CommandResult, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(result.to_json(), sort_keys=True, indent=2)
    return json.dumps(result.to_json(), sort_keys=True, separators=(",", ":"))


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    result = run(argv)
    print(render(result, pretty="--pretty" in argv))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
