import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_program, random_stream
from larsengine.model import (
    BOX,
    DIAMOND,
    AtTime,
    LarsProgram,
    LarsRule,
    Plain,
    Stream,
    Window,
    WindowSpec,
    atom,
    tick_stream_from_signals,
    underlying_stream,
)
from larsengine.parser import parse_program
from larsengine.semantics import (
    Interpretation,
    OracleInfeasible,
    answer_streams_bruteforce,
    is_model,
    satisfies,
    tick_time_window,
    time_window,
    tuple_window,
    window_stream,
)

a, b = atom("a"), atom("b")


def test_time_window_clips_at_timeline_start():
    s = Stream(2, 6, {2: {a}, 5: {b}})
    assert time_window(s, 3, 5) == Stream(2, 3, {2: {a}})
    assert time_window(s, 6, 0) == Stream(6, 6)
    with pytest.raises(ValueError):
        time_window(s, 9, 1)


def test_tuple_window_requires_positive_size():
    ts = tick_stream_from_signals([(0, a)])
    with pytest.raises(ValueError):
        tuple_window(ts, ts.last, 0)
    with pytest.raises(ValueError):
        tuple_window(ts, (5, 5), 1)


def test_box_needs_every_time_point():
    s = Stream(0, 2, {0: {a}, 1: {a}, 2: {a}})
    m = Interpretation(s)
    box = Window(WindowSpec("time", 2), BOX, a)
    assert satisfies(m, 2, box)
    m2 = Interpretation(Stream(0, 2, {0: {a}, 2: {a}}))
    assert not satisfies(m2, 2, box)


def test_at_outside_window_is_false():
    m = Interpretation(Stream(0, 5, {1: {a}}))
    assert satisfies(m, 5, Window(WindowSpec("time", 4), AtTime(1), a))
    assert not satisfies(m, 5, Window(WindowSpec("time", 3), AtTime(1), a))


def test_background_holds_everywhere():
    m = Interpretation(Stream(0, 3), frozenset({atom("v", 1)}))
    assert satisfies(m, 2, Plain(atom("v", 1)))


def test_is_model_checks_fired_heads():
    r = LarsRule(Plain(b), (Window(WindowSpec("time", 1), DIAMOND, a),))
    assert not is_model([r], Interpretation(Stream(0, 1, {0: {a}})), 1)
    assert is_model([r], Interpretation(Stream(0, 1, {0: {a}, 1: {b}})), 1)


def test_oracle_even_loop_has_two_streams():
    p = parse_program("#ext a/0.\np :- a, not q.\nq :- a, not p.")
    d = tick_stream_from_signals([(0, a)])
    assert len(answer_streams_bruteforce(p, d)) == 2


def test_oracle_odd_loop_has_none():
    p = parse_program("#ext a/0.\np :- a, not p.")
    d = tick_stream_from_signals([(0, a)])
    assert answer_streams_bruteforce(p, d) == set()


def test_oracle_minimality_modes_agree():
    rng = random.Random(11)
    for _ in range(40):
        p, d = random_program(rng), random_stream(rng)
        try:
            fix = answer_streams_bruteforce(p, d)
            sub = answer_streams_bruteforce(p, d, minimality="subsets")
        except OracleInfeasible:
            continue
        assert fix == sub


def test_oracle_cap():
    p = parse_program("#ext a/1.\np(X) :- [3 t] <> a(X).\nq(X) :- p(X), not r(X).\nr(X) :- p(X), not q(X).")
    sig = [(t, atom("a", f"c{t}")) for t in range(6)]
    with pytest.raises(OracleInfeasible):
        answer_streams_bruteforce(p, tick_stream_from_signals(sig), cap=4)


signals = st.lists(
    st.tuples(st.integers(0, 8), st.sampled_from([a, b, atom("a", "y")])), max_size=10
).map(lambda xs: sorted(xs, key=lambda x: x[0]))


@settings(max_examples=200, deadline=None)
@given(signals, st.integers(0, 5), st.data())
def test_time_window_shape(sig, n, data):
    ts = tick_stream_from_signals(sig, until=8)
    k = data.draw(st.sampled_from(ts.ticks))
    w = tick_time_window(ts, k, n)
    assert w.ticks[-1].time - w.ticks[0].time <= n
    # the time window of a tick stream has the time window of its stream underneath
    s = underlying_stream(ts)
    assert window_stream(tick_time_window(ts, (k.time, max(x.count for x in ts.ticks if x.time == k.time)), n)) == time_window(s, int(k.time), n)


@settings(max_examples=200, deadline=None)
@given(signals, st.integers(1, 5), st.data())
def test_tuple_window_shape(sig, n, data):
    ts = tick_stream_from_signals(sig, until=8)
    k = data.draw(st.sampled_from(ts.ticks))
    w = tuple_window(ts, k, n)
    assert len(w.eval) <= n
    assert all(x.count <= k.count for x in w.ticks)
    assert len(w.eval) == min(n, k.count)
