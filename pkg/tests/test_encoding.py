from __future__ import annotations

import pytest

from kbreconcile.encoding import (
    EncodingError,
    encode_bounded,
    extract_plan,
    optimality_query,
    solve_bounded,
    solve_with_deepening,
    validity_query,
)
from kbreconcile.logic import Atom, Model, entails_credulous, enumerate_models, format_formula
from kbreconcile.planning import Action, bfs_optimal_plan, make_problem, plan_trace_model

from oracles import holds, random_family, shortest_plan_length, tt_models, valid


def projected(kb, atoms):
    return {m.true_atoms & frozenset(atoms) for m in enumerate_models(kb)}


def test_problem1_labels(problem1):
    enc = encode_bounded(problem1, 1)
    assert enc.kb.labels == [
        "init:E",
        "init:P",
        "goal:E",
        "pre:A:0",
        "addEff:A:0",
        "frameAdd:E:0",
        "frameDel:E:0",
        "frameAdd:P:0",
        "frameDel:P:0",
        "goalDef:0",
        "goalDef:1",
    ]
    assert format_formula(enc.kb.get("frameAdd:E:0")) == "!E_0 & E_1 -> A_0"
    assert format_formula(enc.kb.get("frameAdd:P:0")) == "!P_0 & P_1 -> false"


@pytest.mark.parametrize("name, prob", [("p1_kb_a", "problem1"), ("p2_kb_a", "problem2")])
def test_encoding_projects_onto_corpus_kb(corpus, request, name, prob):
    enc = encode_bounded(request.getfixturevalue(prob), 1)
    ref = corpus[name]
    # the corpus KB covers only its own atoms; the others are free
    assert projected(enc.kb, ref.signature) == tt_models(ref.formulas, ref.signature)


def test_problem1_single_plan(problem1):
    enc = encode_bounded(problem1, 1)
    models = enumerate_models(enc.kb)
    assert len(models) == 1
    assert extract_plan(enc, next(iter(models))) == ["A"]


def test_horizon_zero(problem1):
    enc = encode_bounded(problem1, 0)
    assert not enc.action_atoms
    assert solve_bounded(enc) is None
    done = make_problem(["p"], [], ["p"], ["p"])
    assert solve_bounded(encode_bounded(done, 0)) == []
    assert entails_credulous(encode_bounded(done, 0).kb, validity_query(encode_bounded(done, 0), []))


def test_no_goal_clause_keeps_markers(problem1):
    enc = encode_bounded(problem1, 1, with_goal_clause=False)
    assert not enc.family("goal").entries
    assert len(enc.family("goalDef").entries) == 2
    assert len(enumerate_models(enc.kb)) == 2


def test_queries(problem1):
    enc = encode_bounded(problem1, 2)
    assert format_formula(validity_query(enc, ["A"])) == "A_0 & !A_1 & goal_2"
    assert format_formula(optimality_query(enc)) == "!goal_0 & !goal_1"
    with pytest.raises(EncodingError):
        optimality_query(encode_bounded(problem1, 0))
    with pytest.raises(EncodingError):
        validity_query(enc, ["A", "A", "A"])
    with pytest.raises(EncodingError):
        validity_query(enc, ["Z"])


def test_noop_steps_are_allowed(problem1):
    enc = encode_bounded(problem1, 3)
    plans = {tuple(extract_plan(enc, m)) for m in enumerate_models(enc.kb)}
    # A may fire at any non-empty set of steps; idle steps are no-ops
    assert plans == {("A",), ("A", "A"), ("A", "A", "A")}
    assert len(enumerate_models(enc.kb)) == 7


def test_extract_rejects_non_model(problem1):
    enc = encode_bounded(problem1, 1)
    bad = Model(frozenset({"P_0"}), enc.kb.signature)
    with pytest.raises(EncodingError):
        extract_plan(enc, bad)


@pytest.mark.parametrize(
    "fluents, actions",
    [
        (["goal"], []),
        (["p", "q"], [Action("p")]),
        (["p_q"], []),
    ],
)
def test_name_checks(fluents, actions):
    with pytest.raises(EncodingError):
        encode_bounded(make_problem(fluents, actions, [], []), 1)


def test_negative_horizon(problem1):
    with pytest.raises(EncodingError):
        encode_bounded(problem1, -1)


def test_deepening(problem1, problem2):
    assert solve_with_deepening(problem1, 4) == (["A"], 1)
    assert solve_with_deepening(problem2, 4) == (["A"], 1)
    chain = make_problem(
        ["p", "q", "r"], [Action("a", (), {"p"}), Action("b", {"p"}, {"q"}), Action("c", {"q"}, {"r"})], [], ["r"]
    )
    plan, n = solve_with_deepening(chain, 5)
    assert n == 3 and valid(chain, plan)
    assert solve_with_deepening(chain, 2) is None


def test_trace_model_satisfies_encoding(problem2):
    enc = encode_bounded(problem2, 2)
    m = plan_trace_model(problem2, ["A"], 2)
    assert all(m.satisfies(f) for f in enc.kb.formulas)
    assert m.satisfies(validity_query(enc, ["A"]))


def test_against_bfs_on_random_problems():
    for p in random_family(count=40, seed=11):
        shortest = shortest_plan_length(p, 3)
        found = solve_with_deepening(p, 3)
        if shortest is None:
            assert found is None
        else:
            plan, n = found
            assert n == shortest and valid(p, plan)
            bfs = bfs_optimal_plan(p)
            assert len(bfs) == n


def test_encoding_models_are_executions():
    # brute-force: every encoding model's actions form a valid plan
    p = make_problem(["p", "q"], [Action("a", (), {"p"}), Action("b", {"p"}, {"q"}, {"p"})], [], ["q"])
    enc = encode_bounded(p, 2)
    sig = enc.kb.signature
    worlds = tt_models(enc.kb.formulas, sig)
    assert worlds == {m.true_atoms for m in enumerate_models(enc.kb)}
    for w in worlds:
        plan = [a for t in range(2) for a in ("a", "b") if f"{a}_{t}" in w]
        assert valid(p, plan)
        assert holds(Atom("goal_2"), w)
