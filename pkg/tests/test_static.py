import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_program, random_stream
from larsengine.asp import answer_sets, is_answer_set
from larsengine.grounding import ground_program
from larsengine.model import atom, tick_stream_from_signals
from larsengine.parser import parse_program
from larsengine.semantics import OracleInfeasible, answer_streams_bruteforce
from larsengine.static import (
    at_pred,
    check_names,
    encode_stream,
    is_auxiliary,
    lars_to_asp,
    readback_stream,
    strip_model,
    tick_pred,
)


def models(p, d, t=None):
    t = int(d.last.time) if t is None else t
    prog = ground_program(lars_to_asp(p, t) + encode_stream(d, p.extensional))
    return answer_sets(prog)


def test_aux_names():
    assert at_pred("a") == "a_at" and tick_pred("a") == "a_tick"
    assert is_auxiliary("w_0_0_t2_dia_a") and is_auxiliary("now") and not is_auxiliary("b")


def test_reserved_names_rejected():
    with pytest.raises(ValueError):
        check_names(parse_program("now :- a."))
    with pytest.raises(ValueError):
        check_names(parse_program("my_p :- a."))


def test_stream_encoding_facts():
    d = tick_stream_from_signals([(1, atom("a", "y"))], until=2)
    facts = {str(r) for r in encode_stream(d, {"a"})}
    assert facts == {"tick(0,0).", "tick(1,0).", "tick(1,1).", "tick(2,1).", "a_at(y,1).", "a_tick(y,1,1).", "cnt(1)."}


def test_time_box():
    p = parse_program("#ext a/0.\nq :- [2 t] [] a.")
    full = tick_stream_from_signals([(1, atom("a")), (2, atom("a")), (3, atom("a"))])
    gap = tick_stream_from_signals([(1, atom("a")), (3, atom("a"))])
    assert strip_model(models(p, full)[0], p) == {atom("a"), atom("q")}
    assert strip_model(models(p, gap)[0], p) == {atom("a")}


def test_at_head_pins_time():
    p = parse_program("#ext a/0.\n@T q :- [3 t] @T a.")
    d = tick_stream_from_signals([(1, atom("a"))], until=3)
    (m,) = models(p, d)
    s = readback_stream(m, p, 3)
    assert s.at(1) == {atom("a"), atom("q")}


def test_tuple_box_respects_count_cut_off():
    # a(y) is the first of two signals at time 0: a one-tuple window sees only b
    p = parse_program("#ext a/1, b/0.\nq :- [1 #] [] a(y).")
    d = tick_stream_from_signals([(0, atom("a", "y")), (0, atom("b"))])
    assert atom("q") not in models(p, d)[0]
    d2 = tick_stream_from_signals([(0, atom("b")), (0, atom("a", "y"))])
    assert atom("q") in models(p, d2)[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_static_matches_oracle(seed):
    rng = random.Random(seed)
    p, d = random_program(rng), random_stream(rng)
    t = int(d.last.time)
    ms = models(p, d)
    prog = ground_program(lars_to_asp(p, t) + encode_stream(d, p.extensional))
    assert all(is_answer_set(prog, m) for m in ms)
    try:
        oracle = answer_streams_bruteforce(p, d)
    except OracleInfeasible:
        return
    assert {readback_stream(m, p, t) for m in ms} == oracle
