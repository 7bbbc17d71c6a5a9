"""Classical belief change baselines: expansion, revision, update, abduction
and consistency-based diagnosis.

Revision and update are computed on model sets and materialised back as a
single formula: a disjunction of full model descriptions over the signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .logic import (
    Atom,
    Formula,
    KnowledgeBase,
    Model,
    Not,
    TRUE,
    atoms_of,
    conj,
    entails_skeptical,
    is_consistent,
    models_of,
    models_to_formula,
    satisfiable,
)


class BeliefChangeError(Exception):
    pass


class InconsistentKnowledgeBase(BeliefChangeError):
    pass


class UnsatisfiableInput(BeliefChangeError):
    pass


def diff(m1: Model, m2: Model) -> frozenset:
    """Atoms whose truth value differs between two models over one signature."""
    if set(m1.signature) != set(m2.signature):
        raise BeliefChangeError("models have different signatures")
    return m1.true_atoms ^ m2.true_atoms


def expand(kb: KnowledgeBase, phi: Formula, label: str = "expansion") -> KnowledgeBase:
    """``kb`` with ``phi`` appended; no repair if the result is inconsistent."""
    while label in kb.labels:
        label += "'"
    return kb.add(label, phi)


def _prepare(kb: KnowledgeBase, phi: Formula, cap: int | None) -> tuple[tuple, set[Model], set[Model]]:
    sig = kb.with_signature(sorted(atoms_of(phi))).signature
    kb_models = models_of(kb.formulas, sig, cap=cap)
    if not kb_models:
        raise InconsistentKnowledgeBase("knowledge base is inconsistent")
    phi_models = models_of([phi], sig, cap=cap)
    if not phi_models:
        raise UnsatisfiableInput("new information is unsatisfiable")
    return sig, kb_models, phi_models


def revision_models(kb: KnowledgeBase, phi: Formula, cap: int | None = None) -> set[Model]:
    """Models of ``phi`` at minimum Hamming (Dalal) distance from the models of ``kb``."""
    _, kb_models, phi_models = _prepare(kb, phi, cap)
    dist = {j: min(len(diff(i, j)) for i in kb_models) for j in phi_models}
    best = min(dist.values())
    return {j for j, d in dist.items() if d == best}


def pma_models(kb: KnowledgeBase, phi: Formula, cap: int | None = None) -> set[Model]:
    """Union over models I of ``kb`` of the ``phi``-models whose difference
    from I is inclusion-minimal (Winslett's possible models approach)."""
    _, kb_models, phi_models = _prepare(kb, phi, cap)
    selected: set[Model] = set()
    for i in kb_models:
        diffs = {j: diff(i, j) for j in phi_models}
        for j, d in diffs.items():
            if not any(other < d for other in diffs.values()):
                selected.add(j)
    return selected


def _materialise(models: set[Model], signature: tuple, label: str) -> KnowledgeBase:
    return KnowledgeBase(((label, models_to_formula(models)),), signature)


def revise(kb: KnowledgeBase, phi: Formula, cap: int | None = None) -> KnowledgeBase:
    """Dalal revision of ``kb`` by ``phi``.

    >>> from kbreconcile.logic import KnowledgeBase, parse_formula, enumerate_models
    >>> kb = KnowledgeBase.from_formulas(["a & !b | !a & b"])
    >>> [m.sorted_atoms() for m in enumerate_models(revise(kb, parse_formula("a")))]
    [['a']]
    """
    models = revision_models(kb, phi, cap)
    return _materialise(models, next(iter(models)).signature, "revision")


def update_pma(kb: KnowledgeBase, phi: Formula, cap: int | None = None) -> KnowledgeBase:
    models = pma_models(kb, phi, cap)
    return _materialise(models, next(iter(models)).signature, "update")


# --------------------------------------------------------------------------
# Abduction


@dataclass(frozen=True)
class AbductionProblem:
    kb: KnowledgeBase
    query: Formula
    hypotheses: tuple = ()

    def __post_init__(self):
        hyps = tuple(self.hypotheses) or self.kb.signature
        missing = set(hyps) - set(self.kb.signature)
        if missing:
            raise BeliefChangeError(f"hypotheses outside the signature: {sorted(missing)}")
        object.__setattr__(self, "hypotheses", hyps)


@dataclass(frozen=True)
class AbductionResult:
    explanations: list
    reason: str | None = None

    def __bool__(self) -> bool:
        return bool(self.explanations)


def abduce(prob: AbductionProblem) -> AbductionResult:
    """Subset-minimal conjunctions of hypothesis atoms that, added to the KB,
    keep it consistent and make it skeptically entail the query.

    Hypotheses occurring in the query are not used: assuming the observation
    itself explains nothing. An empty result carries a reason,
    ``inconsistent-kb`` or ``no-causal-rules``.
    """
    kb = prob.kb
    if not is_consistent(kb):
        return AbductionResult([], "inconsistent-kb")
    query_atoms = atoms_of(prob.query)
    usable = [h for h in prob.hypotheses if h not in query_atoms]
    found: list[frozenset] = []
    for k in range(len(usable) + 1):
        for combo in combinations(usable, k):
            chosen = frozenset(combo)
            if any(f <= chosen for f in found):
                continue
            alpha = conj(*(Atom(h) for h in combo))
            extended = kb.add("__hypothesis__", alpha)
            if entails_skeptical(extended, prob.query):
                found.append(chosen)
    if not found:
        return AbductionResult([], "no-causal-rules")
    order = {h: i for i, h in enumerate(prob.hypotheses)}
    explanations = [conj(*(Atom(h) for h in sorted(s, key=order.get))) if s else TRUE for s in found]
    return AbductionResult(explanations)


# --------------------------------------------------------------------------
# Diagnosis


@dataclass(frozen=True)
class DiagnosisProblem:
    kb: KnowledgeBase
    observations: tuple
    components: tuple
    ab_atoms: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        comps = tuple(self.components)
        ab = dict(self.ab_atoms) or {c: f"ab{c}" for c in comps}
        missing = [c for c in comps if c not in ab]
        if missing:
            raise BeliefChangeError(f"no abnormality atom for {missing}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "ab_atoms", ab)

    def assumptions(self, faulty: Iterable[str]) -> list[Formula]:
        faulty = set(faulty)
        return [Atom(self.ab_atoms[c]) if c in faulty else Not(Atom(self.ab_atoms[c])) for c in self.components]

    def assumption_kb(self, faulty: Iterable[str]) -> KnowledgeBase:
        """The KB, the observations and the health assumptions for ``faulty``."""
        kb = self.kb
        for i, o in enumerate(self.observations):
            kb = kb.add(f"obs{i}", o)
        for c, f in zip(self.components, self.assumptions(faulty)):
            kb = kb.add(f"ab:{c}", f)
        return kb


def diagnose(prob: DiagnosisProblem) -> list[frozenset]:
    """All subset-minimal sets of components whose failure restores consistency."""
    found: list[frozenset] = []
    base = prob.kb.formulas + list(prob.observations)
    for k in range(len(prob.components) + 1):
        for combo in combinations(prob.components, k):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if satisfiable(base + prob.assumptions(s), prob.kb.signature):
                found.append(s)
        if found and k == 0:
            break
    return found
