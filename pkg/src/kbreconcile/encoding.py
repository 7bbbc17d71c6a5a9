"""Bounded SAT encoding of STRIPS problems and the plan queries built on it.

Entry labels name the axiom family they come from::

    init:<f>            f_0 or !f_0
    goal:<f>            f_n                       (only with the goal clause)
    pre:<a>:<t>         a_t -> preconditions at t
    addEff:<a>:<t>      a_t -> add effects at t+1
    delEff:<a>:<t>      a_t -> !delete effects at t+1
    frameAdd:<f>:<t>    !f_t & f_t+1 -> some adder of f at t
    frameDel:<f>:<t>    f_t & !f_t+1 -> some deleter of f at t
    exclusion:<a>:<b>:<t>   !a_t | !b_t
    goalDef:<t>         goal_t <-> goal fluents at t

Identical labels across two encodings denote corresponding axioms, which is
what trace-based consistency restoration relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .logic import (
    Atom,
    Formula,
    Iff,
    Implies,
    KnowledgeBase,
    Model,
    Not,
    conj,
    disj,
    find_model,
    satisfiable,
)
from .planning import (
    GOAL_PREFIX,
    PlanningProblem,
    bounded_signature,
    goal_atom,
    timed_atom,
)

FAMILIES = ("init", "goal", "pre", "addEff", "delEff", "frameAdd", "frameDel", "exclusion", "goalDef")

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")


class EncodingError(Exception):
    pass


@dataclass(frozen=True)
class BoundedEncoding:
    problem: PlanningProblem
    kb: KnowledgeBase
    horizon: int
    includes_goal_clause: bool

    def action_atom(self, action: str, t: int) -> Atom:
        if action not in self.problem.actions:
            raise EncodingError(f"unknown action {action!r}")
        if not 0 <= t < self.horizon:
            raise EncodingError(f"no action atoms at step {t}")
        return Atom(timed_atom(action, t))

    def fluent_atom(self, fluent: str, t: int) -> Atom:
        if fluent not in self.problem.fluents or not 0 <= t <= self.horizon:
            raise EncodingError(f"no fluent atom for {fluent!r} at step {t}")
        return Atom(timed_atom(fluent, t))

    def goal_atom(self, t: int) -> Atom:
        if not 0 <= t <= self.horizon:
            raise EncodingError(f"no goal marker at step {t}")
        return Atom(goal_atom(t))

    @property
    def action_atoms(self) -> dict[tuple[str, int], str]:
        return {(a, t): timed_atom(a, t) for t in range(self.horizon) for a in self.problem.action_order}

    @property
    def fluent_atoms(self) -> dict[tuple[str, int], str]:
        return {(f, t): timed_atom(f, t) for t in range(self.horizon + 1) for f in self.problem.fluent_order}

    @property
    def goal_atoms(self) -> dict[int, str]:
        return {t: goal_atom(t) for t in range(self.horizon + 1)}

    def family(self, name: str) -> KnowledgeBase:
        """Sub-KB holding only the entries of one axiom family."""
        return self.kb.subset(label for label in self.kb.labels if label.split(":", 1)[0] == name)


def _check_names(problem: PlanningProblem):
    seen = {}
    for kind, names in (("fluent", problem.fluent_order), ("action", problem.action_order)):
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise EncodingError(f"{kind} name {name!r} cannot be used as an atom prefix")
            if name == GOAL_PREFIX:
                raise EncodingError(f"{kind} name {name!r} collides with the reserved goal prefix")
            if name in seen:
                raise EncodingError(f"name {name!r} used both as {seen[name]} and {kind}")
            seen[name] = kind


def encode_bounded(problem: PlanningProblem, horizon: int, with_goal_clause: bool = True) -> BoundedEncoding:
    """Compile ``(problem, horizon)`` into a labelled knowledge base."""
    if horizon < 0:
        raise EncodingError("horizon must be non-negative")
    _check_names(problem)
    F = problem.fluent_order
    A = problem.action_order
    acts = problem.actions

    def fl(f: str, t: int) -> Atom:
        return Atom(timed_atom(f, t))

    def ac(a: str, t: int) -> Atom:
        return Atom(timed_atom(a, t))

    entries: list[tuple[str, Formula]] = []
    for f in F:
        entries.append((f"init:{f}", fl(f, 0) if f in problem.init else Not(fl(f, 0))))
    if with_goal_clause:
        for f in sorted(problem.goal):
            entries.append((f"goal:{f}", fl(f, horizon)))

    for t in range(horizon):
        for a in A:
            act = acts[a]
            if act.pre:
                entries.append((f"pre:{a}:{t}", Implies(ac(a, t), conj(*(fl(f, t) for f in sorted(act.pre))))))
            if act.add:
                entries.append((f"addEff:{a}:{t}", Implies(ac(a, t), conj(*(fl(f, t + 1) for f in sorted(act.add))))))
            if act.delete:
                entries.append(
                    (f"delEff:{a}:{t}", Implies(ac(a, t), conj(*(Not(fl(f, t + 1)) for f in sorted(act.delete)))))
                )
        for f in F:
            adders = [ac(a, t) for a in A if f in acts[a].add]
            deleters = [ac(a, t) for a in A if f in acts[a].delete]
            # an empty disjunction is false, which forbids the change outright
            entries.append((f"frameAdd:{f}:{t}", Implies(conj(Not(fl(f, t)), fl(f, t + 1)), disj(*adders))))
            entries.append((f"frameDel:{f}:{t}", Implies(conj(fl(f, t), Not(fl(f, t + 1))), disj(*deleters))))
        for a, b in combinations(A, 2):
            entries.append((f"exclusion:{a}:{b}:{t}", disj(Not(ac(a, t)), Not(ac(b, t)))))

    for t in range(horizon + 1):
        entries.append((f"goalDef:{t}", Iff(Atom(goal_atom(t)), conj(*(fl(f, t) for f in sorted(problem.goal))))))

    kb = KnowledgeBase(tuple(entries), bounded_signature(problem, horizon))
    return BoundedEncoding(problem, kb, horizon, with_goal_clause)


def extract_plan(enc: BoundedEncoding, model: Model) -> list[str]:
    """Actions true in ``model``, in timestep order; empty steps are skipped."""
    for label, f in enc.kb.entries:
        if not model.satisfies(f):
            raise EncodingError(f"model violates {label}")
    plan = []
    for t in range(enc.horizon):
        chosen = [a for a in enc.problem.action_order if timed_atom(a, t) in model.true_atoms]
        if len(chosen) > 1:
            raise EncodingError(f"several actions at step {t}: {chosen}")
        plan.extend(chosen)
    return plan


def validity_query(enc: BoundedEncoding, plan: Sequence[str]) -> Formula:
    """Pins the plan's actions, forbids any action after it, requires the goal at n."""
    if len(plan) > enc.horizon:
        raise EncodingError(f"plan of length {len(plan)} exceeds horizon {enc.horizon}")
    parts: list[Formula] = [enc.action_atom(a, t) for t, a in enumerate(plan)]
    for t in range(len(plan), enc.horizon):
        parts.extend(Not(enc.action_atom(a, t)) for a in enc.problem.action_order)
    parts.append(enc.goal_atom(enc.horizon))
    return conj(*parts)


def optimality_query(enc: BoundedEncoding) -> Formula:
    """No goal marker holds before the horizon."""
    if enc.horizon < 1:
        raise EncodingError("optimality query needs horizon >= 1")
    return conj(*(Not(enc.goal_atom(t)) for t in range(enc.horizon)))


def solve_bounded(enc: BoundedEncoding) -> list[str] | None:
    model = find_model(enc.kb.formulas, enc.kb.signature)
    return None if model is None else extract_plan(enc, model)


def solve_with_deepening(problem: PlanningProblem, max_horizon: int) -> tuple[list[str], int] | None:
    """Smallest horizon whose encoding (with goal clause) is satisfiable, and its plan."""
    if max_horizon < 0:
        raise EncodingError("max_horizon must be non-negative")
    for n in range(max_horizon + 1):
        plan = solve_bounded(encode_bounded(problem, n, with_goal_clause=True))
        if plan is not None:
            return plan, n
    return None


def is_satisfiable(enc: BoundedEncoding) -> bool:
    return satisfiable(enc.kb.formulas, enc.kb.signature)
