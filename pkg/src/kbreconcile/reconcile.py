"""Explanations that reconcile a human knowledge base with an agent's.

An explanation moves a set of formulas ``epsilon`` from the agent KB into the
human KB, possibly dropping a set ``gamma`` of human formulas so that the
result stays consistent, after which the human KB entails the target query.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .encoding import BoundedEncoding, optimality_query, validity_query
from .logic import (
    Formula,
    KnowledgeBase,
    Model,
    atoms_of,
    entails,
    entails_credulous,
    entails_skeptical,
    enumerate_models,
    satisfiable,
    subsumes,
)

GAMMA_POLICIES = ("none", "min-card", "trace")
MODES = ("skeptical", "credulous")
EXHAUSTIVE_CAP = 16

Entries = tuple  # of (label, Formula)


class ReconcileError(Exception):
    pass


class InconsistentUpdate(ReconcileError):
    pass


class NotEntailed(ReconcileError):
    """A search precondition ``kb |= phi`` does not hold."""


class SearchBudgetExceeded(ReconcileError):
    pass


class _Budget:
    def __init__(self, max_steps: int | None):
        self.left = max_steps

    def tick(self):
        if self.left is None:
            return
        self.left -= 1
        if self.left < 0:
            raise SearchBudgetExceeded("step budget exhausted")


@dataclass(frozen=True)
class UpdateResult:
    updated_kb: KnowledgeBase
    added: Entries
    removed: Entries

    @property
    def removed_labels(self) -> list[str]:
        return [label for label, _ in self.removed]


@dataclass(frozen=True)
class Explanation:
    epsilon: Entries
    gamma: Entries
    cost: float
    mode: str
    updated_kb: KnowledgeBase

    @property
    def epsilon_labels(self) -> list[str]:
        return [label for label, _ in self.epsilon]

    @property
    def gamma_labels(self) -> list[str]:
        return [label for label, _ in self.gamma]

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon_labels,
            "gamma": self.gamma_labels,
            "cost": self.cost,
            "mode": self.mode,
            "updated_kb": self.updated_kb.to_json(),
        }


def _as_entries(x: Union[KnowledgeBase, Iterable]) -> Entries:
    if isinstance(x, KnowledgeBase):
        return x.entries
    out = []
    for i, item in enumerate(x):
        if isinstance(item, tuple):
            out.append(item)
        else:
            out.append((f"e{i}", item))
    return tuple(out)


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _signature(*parts) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for p in parts:
        for a in p:
            seen.setdefault(a, None)
    return tuple(seen)


def _combine(kb: KnowledgeBase, added: Entries, removed: Entries) -> KnowledgeBase:
    """``kb`` plus ``added`` minus ``removed``, with set semantics on formulas.

    An added entry whose label is taken by a kept entry gets a primed label.
    """
    drop = {label for label, _ in removed}
    keep = [e for e in kb.entries if e[0] not in drop]
    have = {f for _, f in keep}
    used = {label for label, _ in keep}
    extra_sig: list[str] = []
    for label, f in added:
        if f in have:
            continue
        while label in used:
            label += "'"
        keep.append((label, f))
        have.add(f)
        used.add(label)
    for _, f in added:
        extra_sig.extend(sorted(atoms_of(f)))
    return KnowledgeBase(tuple(keep), _signature(kb.signature, extra_sig))


def _consistent(entries: Iterable[tuple[str, Formula]], signature: Sequence[str] = ()) -> bool:
    return satisfiable([f for _, f in entries], signature)


# --------------------------------------------------------------------------
# Knowledge base update


def update_kb(
    kb: KnowledgeBase,
    epsilon,
    policy: str = "none",
    *,
    trace: Model | None = None,
    kb_a: KnowledgeBase | None = None,
    max_steps: int | None = None,
) -> UpdateResult:
    """Add ``epsilon`` to ``kb``, removing a set ``gamma`` chosen by ``policy``.

    ``none`` removes nothing and fails if the union is inconsistent.
    ``min-card`` removes a smallest set of ``kb`` formulas outside ``epsilon``;
    ties go to the lexicographically smallest sorted label tuple.
    ``trace`` delegates to :func:`restore_consistency_by_trace`.
    """
    eps = _as_entries(epsilon)
    if not _consistent(eps):
        raise InconsistentUpdate("epsilon is inconsistent; no removal can repair it")
    if policy == "trace":
        if trace is None or kb_a is None:
            raise ReconcileError("trace policy needs a trace model and the agent KB")
        return restore_consistency_by_trace(kb, eps, trace, kb_a)
    if policy == "none":
        updated = _combine(kb, eps, ())
        if not _consistent(updated.entries, updated.signature):
            raise InconsistentUpdate("kb together with epsilon is inconsistent")
        return UpdateResult(updated, eps, ())
    if policy != "min-card":
        raise ValueError(f"unknown gamma policy {policy!r}")

    budget = _Budget(max_steps)
    eps_formulas = {f for _, f in eps}
    removable = sorted((e for e in kb.entries if e[1] not in eps_formulas), key=lambda e: e[0])
    for k in range(len(removable) + 1):
        for gamma in combinations(removable, k):
            budget.tick()
            updated = _combine(kb, eps, gamma)
            if _consistent(updated.entries, updated.signature):
                return UpdateResult(updated, eps, tuple(gamma))
    raise InconsistentUpdate("no removal restores consistency")  # unreachable for consistent epsilon


def restore_consistency_by_trace(kb_h: KnowledgeBase, epsilon, trace: Model, kb_a: KnowledgeBase) -> UpdateResult:
    """Remove every human formula the trace model falsifies and bring in the
    agent formulas carrying the same labels.

    Atoms missing from ``trace`` count as false.
    """
    eps = _as_entries(epsilon)
    for label, f in kb_a.entries:
        if not trace.satisfies(f):
            raise ReconcileError(f"trace does not satisfy agent formula {label}")
    eps_formulas = {f for _, f in eps}
    removed = tuple(e for e in kb_h.entries if e[1] not in eps_formulas and not trace.satisfies(e[1]))
    removed_labels = {label for label, _ in removed}
    counterparts = tuple(e for e in kb_a.entries if e[0] in removed_labels and e[1] not in eps_formulas)
    added = eps + counterparts
    updated = _combine(kb_h, added, removed)
    if not _consistent(updated.entries, updated.signature):
        raise InconsistentUpdate("trace-based restoration left the KB inconsistent")
    return UpdateResult(updated, added, removed)


def unique_model(kb: KnowledgeBase, cap: int | None = None) -> Model:
    """The single model of ``kb``; raises if it has none or several."""
    models = enumerate_models(kb, cap=cap)
    if len(models) != 1:
        raise ReconcileError(f"expected exactly one model, found {len(models)}")
    return next(iter(models))


# --------------------------------------------------------------------------
# Supports


def is_support(epsilon, phi: Formula, mode: str) -> bool:
    _check_mode(mode)
    eps = _as_entries(epsilon)
    return entails(KnowledgeBase(eps), phi, mode)


def _subset_kb(kb: KnowledgeBase, entries: Sequence) -> KnowledgeBase:
    return KnowledgeBase(tuple(entries), kb.signature)


def _support_order(kb: KnowledgeBase) -> list:
    return sorted(kb.entries, key=lambda e: e[0])


def _all_supports(kb: KnowledgeBase, phi: Formula, mode: str, budget: _Budget) -> Iterator[tuple]:
    entries = _support_order(kb)
    for k in range(len(entries) + 1):
        for combo in combinations(entries, k):
            budget.tick()
            if entails(_subset_kb(kb, combo), phi, mode):
                yield combo


def minimal_supports(
    kb: KnowledgeBase,
    phi: Formula,
    mode: str = "skeptical",
    *,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
    max_steps: int | None = None,
) -> list[KnowledgeBase]:
    """Subset-minimal supports of ``phi`` drawn from ``kb``.

    Up to ``exhaustive_cap`` entries every subset is examined. Larger KBs
    get one deletion-minimised support per rotation of the label order,
    which need not find all of them.
    """
    _check_mode(mode)
    if not entails(kb, phi, mode):
        raise NotEntailed(f"kb does not {mode}ly entail the query")
    budget = _Budget(max_steps)
    found: list[tuple] = []
    if len(kb) <= exhaustive_cap:
        for combo in _all_supports(kb, phi, mode, budget):
            labels = {label for label, _ in combo}
            if any({label for label, _ in f} <= labels for f in found):
                continue
            found.append(combo)
    else:
        entries = _support_order(kb)
        seen = set()
        for r in range(len(entries)):
            current = entries[r:] + entries[:r]
            for e in list(current):
                budget.tick()
                trial = [x for x in current if x is not e]
                if entails(_subset_kb(kb, trial), phi, mode):
                    current = trial
            key = tuple(sorted(label for label, _ in current))
            if key not in seen:
                seen.add(key)
                found.append(tuple(sorted(current, key=lambda e: e[0])))
    found.sort(key=lambda c: (len(c), [label for label, _ in c]))
    return [_subset_kb(kb, c) for c in found]


def general_supports(
    kb: KnowledgeBase,
    phi: Formula,
    mode: str = "skeptical",
    *,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
    max_steps: int | None = None,
) -> list[KnowledgeBase]:
    """Supports that subsume no other support (no strictly smaller model set)."""
    _check_mode(mode)
    if len(kb) > exhaustive_cap:
        raise SearchBudgetExceeded(f"kb has {len(kb)} entries, exhaustive cap is {exhaustive_cap}")
    if not entails(kb, phi, mode):
        raise NotEntailed(f"kb does not {mode}ly entail the query")
    budget = _Budget(max_steps)
    supports = [_subset_kb(kb, c) for c in _all_supports(kb, phi, mode, budget)]
    out = []
    for s in supports:
        if not any(subsumes(s, other) for other in supports if other is not s):
            out.append(s)
    return out


# --------------------------------------------------------------------------
# Explanation search


def _candidates(entries: list, weights: Mapping[str, float] | None) -> Iterator[tuple[float, tuple]]:
    if weights is None:
        for k in range(len(entries) + 1):
            for combo in combinations(entries, k):
                yield float(k), combo
        return
    if len(entries) > 20:
        raise SearchBudgetExceeded("weighted search enumerates every subset; at most 20 agent formulas")
    scored = []
    for k in range(len(entries) + 1):
        for combo in combinations(entries, k):
            cost = float(sum(weights.get(label, 1.0) for label, _ in combo))
            scored.append((cost, k, [label for label, _ in combo], combo))
    scored.sort(key=lambda s: (s[0], s[1], s[2]))
    for cost, _, _, combo in scored:
        yield cost, combo


def search_explanation(
    kb_a: KnowledgeBase,
    kb_h: KnowledgeBase,
    accept: Callable[[KnowledgeBase], bool],
    *,
    mode: str,
    policy: str = "none",
    trace: Model | None = None,
    weights: Mapping[str, float] | None = None,
    support_of: Formula | None = None,
    max_steps: int | None = None,
) -> Explanation | None:
    """Cheapest ``epsilon`` from ``kb_a`` whose update of ``kb_h`` passes ``accept``.

    Candidates run by increasing cost, then size, then sorted labels. With
    ``support_of`` set, ``epsilon`` must also entail that formula by itself.
    """
    if policy not in GAMMA_POLICIES:
        raise ValueError(f"unknown gamma policy {policy!r}")
    if policy == "trace" and trace is None:
        trace = unique_model(kb_a)
    budget = _Budget(max_steps)
    entries = _support_order(kb_a)
    for cost, eps in _candidates(entries, weights):
        budget.tick()
        if support_of is not None and not entails(KnowledgeBase(eps), support_of, mode):
            continue
        if not _consistent(eps):
            continue
        try:
            result = update_kb(kb_h, eps, policy, trace=trace, kb_a=kb_a)
        except InconsistentUpdate:
            continue
        except ReconcileError:
            if policy == "trace":
                raise
            continue
        if accept(result.updated_kb):
            return Explanation(tuple(eps), result.removed, cost, mode, result.updated_kb)
    return None


def find_explanation(
    kb_a: KnowledgeBase,
    kb_h: KnowledgeBase,
    phi: Formula,
    mode: str = "skeptical",
    policy: str = "none",
    *,
    trace: Model | None = None,
    weights: Mapping[str, float] | None = None,
    require_support: bool = False,
    max_steps: int | None = None,
) -> Explanation | None:
    """Minimum-cost explanation for ``phi`` from ``kb_a`` to ``kb_h``.

    The default cost is the number of transferred formulas. With
    ``require_support`` the transferred set must entail ``phi`` on its own;
    otherwise it only has to make the updated human KB entail ``phi``.

    >>> from kbreconcile.logic import KnowledgeBase, parse_formula
    >>> a = KnowledgeBase.from_formulas(["p", "p -> q"])
    >>> h = KnowledgeBase.from_formulas(["p"])
    >>> find_explanation(a, h, parse_formula("q")).epsilon_labels
    ['f1']
    """
    _check_mode(mode)
    if not entails(kb_a, phi, mode):
        raise NotEntailed(f"agent KB does not {mode}ly entail the query")
    return search_explanation(
        kb_a,
        kb_h,
        lambda kb: entails(kb, phi, mode),
        mode=mode,
        policy=policy,
        trace=trace,
        weights=weights,
        support_of=phi if require_support else None,
        max_steps=max_steps,
    )


# --------------------------------------------------------------------------
# Plan validity and optimality


def with_goal_definitions(kb: KnowledgeBase, enc: BoundedEncoding) -> KnowledgeBase:
    """``kb`` plus the encoding's goal-marker definitions it does not yet cover."""
    missing = [t for t, atom in enc.goal_atoms.items() if atom not in kb.signature]
    if not missing:
        return kb
    defs = enc.family("goalDef")
    wanted = {f"goalDef:{t}" for t in missing}
    return _combine(kb, tuple(e for e in defs.entries if e[0] in wanted), ())


def check_plan_validity(kb_h: KnowledgeBase, enc: BoundedEncoding, plan: Sequence[str]) -> bool:
    """Some model of ``kb_h`` executes exactly ``plan`` and reaches the goal at the horizon."""
    kb = with_goal_definitions(kb_h, enc)
    return entails_credulous(kb, validity_query(enc, plan))


def check_plan_optimality(kb_h: KnowledgeBase, enc: BoundedEncoding, plan: Sequence[str]) -> bool:
    """``plan`` is valid and every model of ``kb_h`` misses the goal before the horizon."""
    if not check_plan_validity(kb_h, enc, plan):
        return False
    if enc.horizon == 0:
        return True
    kb = with_goal_definitions(kb_h, enc)
    return entails_skeptical(kb, optimality_query(enc))


def reconcile_plan(
    kb_a: KnowledgeBase,
    kb_h: KnowledgeBase,
    enc: BoundedEncoding,
    plan: Sequence[str],
    policy: str = "min-card",
    *,
    optimality: bool = True,
    trace: Model | None = None,
    weights: Mapping[str, float] | None = None,
    max_steps: int | None = None,
) -> Explanation | None:
    """Cheapest update of ``kb_h`` from ``kb_a`` after which ``plan`` is valid
    (and, with ``optimality``, optimal) in the human KB."""
    kb_a = with_goal_definitions(kb_a, enc)
    kb_h = with_goal_definitions(kb_h, enc)
    check = check_plan_optimality if optimality else check_plan_validity
    if not check(kb_a, enc, plan):
        raise NotEntailed("plan does not pass the check in the agent KB")
    return search_explanation(
        kb_a,
        kb_h,
        lambda kb: check(kb, enc, plan),
        mode="skeptical" if optimality else "credulous",
        policy=policy,
        trace=trace,
        weights=weights,
        max_steps=max_steps,
    )
