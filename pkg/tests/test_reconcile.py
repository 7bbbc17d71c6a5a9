from __future__ import annotations

import random
from itertools import combinations

import pytest

from kbreconcile.encoding import encode_bounded
from kbreconcile.logic import KnowledgeBase, entails, parse_formula
from kbreconcile.planning import plan_trace_model
from kbreconcile.reconcile import (
    InconsistentUpdate,
    NotEntailed,
    ReconcileError,
    SearchBudgetExceeded,
    check_plan_optimality,
    check_plan_validity,
    find_explanation,
    general_supports,
    is_support,
    minimal_supports,
    reconcile_plan,
    restore_consistency_by_trace,
    unique_model,
    update_kb,
)

from oracles import random_formula, tt_entails, tt_models

Q1 = parse_formula("A_0 & E_1")


def kb(*texts):
    return KnowledgeBase.from_formulas(texts)


# --------------------------------------------------------------------------
# update


def test_update_none_adds(corpus):
    r = update_kb(corpus["p1_kb_h"], corpus["p1_epsilon"], "none")
    assert r.removed == ()
    assert set(r.updated_kb.formulas) == set(corpus["p1_kb_h"].formulas) | set(corpus["p1_epsilon"].formulas)


def test_update_none_rejects_inconsistent(corpus):
    with pytest.raises(InconsistentUpdate):
        update_kb(corpus["p2_kb_h"], corpus["p2_epsilon"], "none")


def test_update_min_card_problem2(corpus):
    r = update_kb(corpus["p2_kb_h"], corpus["p2_epsilon"], "min-card")
    assert r.removed_labels == ["frameAdd:G:0"]
    assert set(r.updated_kb.formulas) == set(corpus["p2_kb_h_updated"].formulas)


def test_update_trace_problem2(corpus):
    trace = unique_model(corpus["p2_kb_a"])
    r = restore_consistency_by_trace(corpus["p2_kb_h"], corpus["p2_epsilon"], trace, corpus["p2_kb_a"])
    assert r.removed_labels == ["frameAdd:G:0"]
    assert set(r.updated_kb.formulas) == set(corpus["p2_kb_h_updated"].formulas)
    # the trace falsifies exactly one human formula
    falsified = [label for label, f in corpus["p2_kb_h"].entries if not trace.satisfies(f)]
    assert falsified == ["frameAdd:G:0"]


def test_trace_from_plan_matches_unique_model(corpus, problem2):
    m = plan_trace_model(problem2, ["A"], 1)
    assert m.project(corpus["p2_kb_a"].signature) == unique_model(corpus["p2_kb_a"])


def test_update_rejects_inconsistent_epsilon():
    with pytest.raises(InconsistentUpdate):
        update_kb(kb("q"), kb("p", "!p"), "min-card")


def test_update_requires_trace_inputs(corpus):
    with pytest.raises(ReconcileError):
        update_kb(corpus["p2_kb_h"], corpus["p2_epsilon"], "trace")


def test_update_unknown_policy():
    with pytest.raises(ValueError):
        update_kb(kb("p"), kb("q"), "bogus")


def test_min_card_is_minimal_by_brute_force():
    rng = random.Random(5)
    atoms = ["a", "b", "c"]
    for _ in range(40):
        h = KnowledgeBase.from_formulas([random_formula(rng, atoms, 2) for _ in range(4)], atoms)
        eps = [("e", random_formula(rng, atoms, 2))]
        if not tt_models([eps[0][1]], atoms):
            continue
        r = update_kb(h, eps, "min-card")
        best = None
        for k in range(len(h) + 1):
            for gamma in combinations(h.formulas, k):
                rest = [f for f in h.formulas if f not in gamma] + [eps[0][1]]
                if tt_models(rest, atoms):
                    best = k
                    break
            if best is not None:
                break
        assert len(r.removed) == best


# --------------------------------------------------------------------------
# supports


def test_is_support():
    assert is_support(kb("p", "p -> q"), parse_formula("q"), "skeptical")
    assert not is_support(kb("p"), parse_formula("q"), "skeptical")
    assert is_support([], parse_formula("q"), "credulous")


def test_minimal_supports_problem1(corpus):
    sups = minimal_supports(corpus["p1_kb_a"], Q1)
    assert [s.labels for s in sups] == [["frameAdd:E:0", "goal:E", "init:E"]]


def test_minimal_supports_by_brute_force(corpus):
    kb_a = corpus["p1_kb_a"]
    entries = kb_a.entries
    expected = []
    for k in range(len(entries) + 1):
        for combo in combinations(entries, k):
            labels = {l for l, _ in combo}
            if any(e <= labels for e in expected):
                continue
            if tt_entails([f for _, f in combo], Q1, kb_a.signature, "skeptical"):
                expected.append(labels)
    assert sorted(map(sorted, expected)) == sorted(s.labels for s in minimal_supports(kb_a, Q1))


def test_large_kb_uses_deletion():
    big = KnowledgeBase.from_formulas([f"x{i}" for i in range(20)] + ["x0 -> q"])
    sups = minimal_supports(big, parse_formula("q"), exhaustive_cap=4)
    assert sups and all(len(s) == 2 for s in sups)


def test_supports_not_entailed():
    with pytest.raises(NotEntailed):
        minimal_supports(kb("p"), parse_formula("q"))


def test_general_supports(corpus):
    gen = general_supports(corpus["p1_kb_a"], Q1)
    labels = [s.labels for s in gen]
    assert ["frameAdd:E:0", "goal:E", "init:E"] in labels
    # a support that says strictly more than another one is dropped
    sups = general_supports(kb("p", "q", "p & q -> r"), parse_formula("p | r"))
    assert all(len(s) == 1 for s in sups)


def test_general_supports_cap():
    big = KnowledgeBase.from_formulas([f"x{i}" for i in range(20)])
    with pytest.raises(SearchBudgetExceeded):
        general_supports(big, parse_formula("x0"))


def test_budget():
    big = KnowledgeBase.from_formulas([f"x{i}" for i in range(12)] + ["x0 & x1 & x2 & x3 -> q"])
    with pytest.raises(SearchBudgetExceeded):
        minimal_supports(big, parse_formula("q"), max_steps=10)


# --------------------------------------------------------------------------
# explanations


def test_problem1_explanation(corpus):
    e = find_explanation(corpus["p1_kb_a"], corpus["p1_kb_h"], Q1)
    assert e.epsilon_labels == ["frameAdd:E:0"] and e.cost == 1 and e.gamma == ()
    assert entails(e.updated_kb, Q1, "skeptical")


def test_problem1_explanation_with_support(corpus):
    e = find_explanation(corpus["p1_kb_a"], corpus["p1_kb_h"], Q1, require_support=True)
    assert e.cost == 3
    assert e.epsilon_labels == ["frameAdd:E:0", "goal:E", "init:E"]


def test_weights_change_choice():
    a = kb("p -> q", "q")
    h = kb("p")
    assert find_explanation(a, h, parse_formula("q")).epsilon_labels == ["f0"]
    assert find_explanation(a, h, parse_formula("q"), weights={"f0": 5}).epsilon_labels == ["f1"]


def test_identical_kbs_cost_zero(corpus):
    e = find_explanation(corpus["p1_kb_a"], corpus["p1_kb_a"], Q1)
    assert e.cost == 0 and e.epsilon == ()


def test_not_entailed_by_agent(corpus):
    with pytest.raises(NotEntailed):
        find_explanation(corpus["p1_kb_h"], corpus["p1_kb_a"], parse_formula("!A_0"))


def test_problem2_min_card(corpus):
    q = parse_formula("A_0 & G_1")
    e = find_explanation(corpus["p2_kb_a"], corpus["p2_kb_h"], q, policy="min-card")
    assert e.gamma_labels == ["frameAdd:G:0"]
    assert entails(e.updated_kb, q, "skeptical")
    # none cannot work: the human frame axiom clashes with every agent subset containing the goal
    assert find_explanation(corpus["p2_kb_a"], corpus["p2_kb_h"], q, policy="none") is None


def test_explanation_cost_minimal_by_brute_force():
    rng = random.Random(9)
    atoms = ["a", "b", "c"]
    checked = 0
    for _ in range(60):
        a = KnowledgeBase.from_formulas([random_formula(rng, atoms, 2) for _ in range(4)], atoms)
        h = KnowledgeBase.from_formulas([random_formula(rng, atoms, 1) for _ in range(2)], atoms)
        q = random_formula(rng, atoms, 1)
        if not tt_entails(a.formulas, q, atoms, "skeptical"):
            continue
        e = find_explanation(a, h, q)
        best = None
        for k in range(len(a) + 1):
            for eps in combinations(a.formulas, k):
                union = list(h.formulas) + list(eps)
                if tt_models(union, atoms) and tt_entails(union, q, atoms, "skeptical"):
                    best = k
                    break
            if best is not None:
                break
        assert (e is None) == (best is None)
        if e is not None:
            assert e.cost == best
            checked += 1
    assert checked >= 10


# --------------------------------------------------------------------------
# plan checks


def test_plan_checks_problem1(corpus, problem1):
    enc = encode_bounded(problem1, 1)
    assert check_plan_validity(corpus["p1_kb_a"], enc, ["A"])
    assert check_plan_optimality(corpus["p1_kb_a"], enc, ["A"])
    assert check_plan_validity(corpus["p1_kb_h"], enc, ["A"])
    assert check_plan_validity(enc.kb, enc, ["A"])
    assert not check_plan_validity(enc.kb, enc, [])


def test_plan_checks_problem2(corpus, problem2):
    enc = encode_bounded(problem2, 1)
    assert check_plan_optimality(corpus["p2_kb_a"], enc, ["A"])
    # the human KB is inconsistent, so nothing is valid in it
    assert not check_plan_validity(corpus["p2_kb_h"], enc, ["A"])
    assert not check_plan_validity(enc.kb, enc, ["B"])


def test_optimality_fails_for_longer_plan(problem1):
    enc = encode_bounded(problem1, 2)
    assert check_plan_validity(enc.kb, enc, ["A", "A"])
    assert not check_plan_optimality(enc.kb, enc, ["A", "A"])


def test_reconcile_plan_problem2(corpus, problem2):
    enc = encode_bounded(problem2, 1)
    for policy in ("min-card", "trace"):
        e = reconcile_plan(corpus["p2_kb_a"], corpus["p2_kb_h"], enc, ["A"], policy)
        assert e.gamma_labels == ["frameAdd:G:0"]
        assert check_plan_optimality(e.updated_kb, enc, ["A"])
    assert reconcile_plan(corpus["p2_kb_a"], corpus["p2_kb_h"], enc, ["A"], "none") is None


def test_reconcile_plan_problem1(corpus, problem1):
    enc = encode_bounded(problem1, 1)
    e = reconcile_plan(corpus["p1_kb_a"], corpus["p1_kb_h"], enc, ["A"], "none")
    assert e is not None and check_plan_optimality(e.updated_kb, enc, ["A"])
    assert check_plan_optimality(corpus["p1_kb_h"], enc, ["A"]) == (e.cost == 0)


def test_reconcile_plan_rejects_bad_plan(corpus, problem2):
    enc = encode_bounded(problem2, 1)
    with pytest.raises(NotEntailed):
        reconcile_plan(corpus["p2_kb_a"], corpus["p2_kb_h"], enc, ["B"])
