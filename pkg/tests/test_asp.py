import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from larsengine.asp import (
    AspRule,
    GroundProgram,
    NonStratified,
    SolverBudgetExceeded,
    answer_sets,
    answer_sets_bruteforce,
    compare,
    is_answer_set,
    least_model,
    stratify,
)
from larsengine.grounding import Grounder, ground_program
from larsengine.model import Arith, Comparison, Var, atom

p, q, r, s = (atom(x) for x in "pqrs")
X, Y = Var("X"), Var("Y")


def rule(h, pos=(), neg=()):
    return AspRule(h, tuple(pos), tuple(neg))


def test_least_model_of_definite_program():
    prog = [rule(p), rule(q, [p]), rule(r, [s])]
    assert least_model(prog) == {p, q}


def test_stratified_unique_model():
    prog = GroundProgram([rule(p), rule(q, [p], [r]), rule(s, [], [q])])
    assert isinstance(stratify(prog), dict)
    assert answer_sets(prog) == [frozenset({p, q})]


def test_even_loop_two_models():
    prog = GroundProgram([rule(p, [], [q]), rule(q, [], [p])])
    assert isinstance(stratify(prog), NonStratified)
    assert sorted(answer_sets(prog), key=sorted) == [frozenset({p}), frozenset({q})]


def test_odd_loop_no_model():
    assert answer_sets(GroundProgram([rule(p, [], [p])])) == []


def test_positive_loop_unfounded():
    prog = GroundProgram([rule(p, [q]), rule(q, [p]), rule(r, [], [p])])
    assert answer_sets(prog) == [frozenset({r})]


def test_is_answer_set_rejects_unsupported():
    prog = GroundProgram([rule(p, [q]), rule(q, [p])])
    assert is_answer_set(prog, frozenset())
    assert not is_answer_set(prog, frozenset({p, q}))


def test_ground_program_rejects_guards():
    with pytest.raises(ValueError):
        GroundProgram([AspRule(atom("p", X), (atom("a", X),), (), (Comparison("<", X, 3),))])


def test_budget():
    atoms = [atom("x", i) for i in range(12)]
    prog = []
    for i in range(0, 12, 2):
        prog += [rule(atoms[i], [], [atoms[i + 1]]), rule(atoms[i + 1], [], [atoms[i]])]
    with pytest.raises(SolverBudgetExceeded):
        answer_sets(GroundProgram(prog), budget=5)
    assert len(answer_sets(GroundProgram(prog))) == 64


def test_compare_orders_ints_before_strings():
    assert compare("<", 3, "a")
    assert compare("!=", "a", "b")
    assert not compare("<", "b", "a")


def test_grounding_with_arithmetic():
    rules = [
        AspRule(atom("n", 0)),
        AspRule(atom("n", 1)),
        AspRule(atom("n", 2)),
        AspRule(atom("m", Y), (atom("n", X),), (), (Comparison("=", Y, Arith(X, 1)),)),
        AspRule(atom("big", X), (atom("m", X),), (), (Comparison(">=", X, 2),)),
    ]
    model = answer_sets(GroundProgram(ground_program(rules)))[0]
    assert {str(a) for a in model if a.pred == "big"} == {"big(2)", "big(3)"}


def test_grounder_remove_retracts_instances():
    g = Grounder()
    base = AspRule(atom("q", X), (atom("a", X),))
    fa = AspRule(atom("a", 1))
    g.add_rules([base, fa])
    inst = AspRule(atom("q", 1), (atom("a", 1),))
    assert inst in set(g.ground_rules())
    # instances live until their own source rule goes; a lost body fact only blocks them
    g.remove_rules([fa])
    assert inst in set(g.ground_rules())
    assert answer_sets(GroundProgram(g.ground_rules())) == [frozenset()]
    assert g.remove_rules([base]) == [inst]
    assert g.ground_rules() == []


ATOMS = [atom(x) for x in "abcde"]
lits = st.lists(st.sampled_from(ATOMS), max_size=2, unique=True)
rules = st.builds(lambda h, pos, neg: rule(h, pos, neg), st.sampled_from(ATOMS), lits, lits)


@settings(max_examples=300, deadline=None)
@given(st.lists(rules, max_size=7))
def test_search_matches_bruteforce(rs):
    prog = GroundProgram(rs)
    got = set(answer_sets(prog))
    assert got == set(answer_sets_bruteforce(prog))
    for m in got:
        assert is_answer_set(prog, m)
