"""STRIPS planning problems, plan execution and a breadth-first optimal planner."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .logic import Model

GOAL_PREFIX = "goal"


class PlanningError(Exception):
    pass


class ProblemSchemaError(PlanningError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InapplicableAction(PlanningError):
    pass


class PlanExecutionError(PlanningError):
    """Plan failed at ``step``; ``reason`` is ``unknown-action`` or ``inapplicable``."""

    def __init__(self, step: int, reason: str, detail: str = ""):
        self.step = step
        self.reason = reason
        super().__init__(f"step {step}: {reason}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class Action:
    name: str
    pre: frozenset = frozenset()
    add: frozenset = frozenset()
    delete: frozenset = frozenset()

    def __post_init__(self):
        for attr in ("pre", "add", "delete"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        both = self.add & self.delete
        if both:
            raise PlanningError(f"action {self.name}: fluents both added and deleted: {sorted(both)}")


@dataclass(frozen=True)
class PlanningProblem:
    fluents: frozenset
    actions: Mapping[str, Action]
    init: frozenset
    goal: frozenset

    def __post_init__(self):
        object.__setattr__(self, "fluents", frozenset(self.fluents))
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "goal", frozenset(self.goal))
        object.__setattr__(self, "actions", dict(sorted(self.actions.items())))
        if not self.init <= self.fluents:
            raise PlanningError(f"init uses unknown fluents {sorted(self.init - self.fluents)}")
        if not self.goal <= self.fluents:
            raise PlanningError(f"goal uses unknown fluents {sorted(self.goal - self.fluents)}")
        for a in self.actions.values():
            unknown = (a.pre | a.add | a.delete) - self.fluents
            if unknown:
                raise PlanningError(f"action {a.name} uses unknown fluents {sorted(unknown)}")

    def __hash__(self) -> int:
        return hash((self.fluents, tuple(self.actions.values()), self.init, self.goal))

    @property
    def fluent_order(self) -> list[str]:
        return sorted(self.fluents)

    @property
    def action_order(self) -> list[str]:
        return list(self.actions)

    def to_json(self) -> dict:
        return {
            "fluents": self.fluent_order,
            "actions": [
                {"name": a.name, "pre": sorted(a.pre), "add": sorted(a.add), "del": sorted(a.delete)}
                for a in self.actions.values()
            ],
            "init": sorted(self.init),
            "goal": sorted(self.goal),
        }


def make_problem(fluents, actions: Iterable[Action], init, goal) -> PlanningProblem:
    return PlanningProblem(frozenset(fluents), {a.name: a for a in actions}, frozenset(init), frozenset(goal))


def _str_list(value, path: str) -> list[str]:
    if not isinstance(value, list):
        raise ProblemSchemaError(path, "expected a list of strings")
    for i, v in enumerate(value):
        if not isinstance(v, str):
            raise ProblemSchemaError(f"{path}[{i}]", "expected a string")
    return value


def problem_from_json(data) -> PlanningProblem:
    if not isinstance(data, dict):
        raise ProblemSchemaError("$", "expected an object")
    for key in ("fluents", "actions", "init", "goal"):
        if key not in data:
            raise ProblemSchemaError(f"$.{key}", "missing")
    fluents = _str_list(data["fluents"], "$.fluents")
    if not isinstance(data["actions"], list):
        raise ProblemSchemaError("$.actions", "expected a list")
    actions: dict[str, Action] = {}
    known = set(fluents)
    for i, item in enumerate(data["actions"]):
        path = f"$.actions[{i}]"
        if not isinstance(item, dict):
            raise ProblemSchemaError(path, "expected an object")
        name = item.get("name")
        if not isinstance(name, str):
            raise ProblemSchemaError(f"{path}.name", "expected a string")
        if name in actions:
            raise ProblemSchemaError(f"{path}.name", f"duplicate action {name!r}")
        parts = {}
        for key in ("pre", "add", "del"):
            values = _str_list(item.get(key, []), f"{path}.{key}")
            for j, v in enumerate(values):
                if v not in known:
                    raise ProblemSchemaError(f"{path}.{key}[{j}]", f"unknown fluent {v!r}")
            parts[key] = frozenset(values)
        overlap = parts["add"] & parts["del"]
        if overlap:
            raise ProblemSchemaError(f"{path}", f"fluents both added and deleted: {sorted(overlap)}")
        actions[name] = Action(name, parts["pre"], parts["add"], parts["del"])
    for key in ("init", "goal"):
        for j, v in enumerate(_str_list(data[key], f"$.{key}")):
            if v not in known:
                raise ProblemSchemaError(f"$.{key}[{j}]", f"unknown fluent {v!r}")
    return PlanningProblem(frozenset(fluents), actions, frozenset(data["init"]), frozenset(data["goal"]))


def parse_problem(text: str) -> PlanningProblem:
    """Parse a problem from JSON text; schema violations name the JSON path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSchemaError("$", f"invalid JSON: {exc}") from exc
    return problem_from_json(data)


def parse_plan(text: str) -> list[str]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSchemaError("$", f"invalid JSON: {exc}") from exc
    return list(_str_list(data, "$"))


def apply_action(state: frozenset, action: Action) -> frozenset:
    if not action.pre <= state:
        raise InapplicableAction(f"{action.name}: missing preconditions {sorted(action.pre - state)}")
    return frozenset((state | action.add) - action.delete)


def execute_plan(problem: PlanningProblem, plan: Sequence[str]) -> list[frozenset]:
    """Trace of states visited by ``plan``; ``trace[0]`` is the initial state."""
    trace = [problem.init]
    for t, name in enumerate(plan):
        action = problem.actions.get(name)
        if action is None:
            raise PlanExecutionError(t, "unknown-action", name)
        try:
            trace.append(apply_action(trace[-1], action))
        except InapplicableAction as exc:
            raise PlanExecutionError(t, "inapplicable", str(exc)) from None
    return trace


def is_valid_plan(problem: PlanningProblem, plan: Sequence[str]) -> bool:
    try:
        trace = execute_plan(problem, plan)
    except PlanExecutionError:
        return False
    return problem.goal <= trace[-1]


def bfs_optimal_plan(problem: PlanningProblem) -> list[str] | None:
    """Shortest plan by breadth-first search over states, or None if unreachable.

    Successors are expanded in action-name order, so among optimal plans
    the lexicographically smallest action sequence is returned.
    """
    start = problem.init
    if problem.goal <= start:
        return []
    parent: dict[frozenset, tuple[frozenset, str] | None] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for name, action in problem.actions.items():
            if not action.pre <= state:
                continue
            nxt = apply_action(state, action)
            if nxt in parent:
                continue
            parent[nxt] = (state, name)
            if problem.goal <= nxt:
                plan = []
                cur = nxt
                while parent[cur] is not None:
                    cur, step = parent[cur]
                    plan.append(step)
                return plan[::-1]
            queue.append(nxt)
    return None


# --------------------------------------------------------------------------
# Atom naming for the bounded encoding


def timed_atom(name: str, t: int) -> str:
    return f"{name}_{t}"


def goal_atom(t: int) -> str:
    return f"{GOAL_PREFIX}_{t}"


def bounded_signature(problem: PlanningProblem, horizon: int) -> tuple[str, ...]:
    """Atom order of the bounded encoding: per step, fluents, actions, goal marker."""
    sig: list[str] = []
    for t in range(horizon + 1):
        sig.extend(timed_atom(f, t) for f in problem.fluent_order)
        if t < horizon:
            sig.extend(timed_atom(a, t) for a in problem.action_order)
        sig.append(goal_atom(t))
    return tuple(sig)


def plan_trace_model(problem: PlanningProblem, plan: Sequence[str], horizon: int) -> Model:
    """The assignment over the bounded-encoding atoms that executes ``plan``.

    States after the last plan step are held constant and no action atom is
    true there. Goal markers follow the states they describe.
    """
    if len(plan) > horizon:
        raise PlanningError(f"plan of length {len(plan)} exceeds horizon {horizon}")
    if not is_valid_plan(problem, plan):
        raise PlanningError("plan is not valid for this problem")
    trace = execute_plan(problem, plan)
    trace += [trace[-1]] * (horizon + 1 - len(trace))
    true_atoms = set()
    for t, state in enumerate(trace):
        true_atoms.update(timed_atom(f, t) for f in state)
        if problem.goal <= state:
            true_atoms.add(goal_atom(t))
    for t, name in enumerate(plan):
        true_atoms.add(timed_atom(name, t))
    return Model(frozenset(true_atoms), bounded_signature(problem, horizon))
