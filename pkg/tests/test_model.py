import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from larsengine.model import (
    BOX,
    DIAMOND,
    INF,
    At,
    Atom,
    LarsProgram,
    LarsRule,
    Plain,
    Stream,
    Tick,
    TickStream,
    Var,
    Window,
    WindowSpec,
    atom,
    ordering_of,
    tick_stream_from_signals,
    underlying_stream,
    validate_program,
)

X = Var("X")


def test_tick_increments():
    k = Tick(3, 2)
    assert k.time_increment() == Tick(4, 2)
    assert k.count_increment() == Tick(3, 3)


def test_tick_addition_absorbs_infinity():
    assert Tick(7, 1) + Tick(3, INF) == Tick(10, INF)
    assert Tick(7, 1) + Tick(INF, INF) == Tick(INF, INF)


def test_var_must_be_capitalised():
    with pytest.raises(ValueError):
        Var("x")


def test_atom_str_and_ground():
    a = atom("p", "y", 3)
    assert str(a) == "p(y,3)"
    assert a.is_ground()
    assert not Atom("p", (X,)).is_ground()
    assert str(atom("q")) == "q"


def test_stream_rejects_atoms_outside_timeline():
    with pytest.raises(ValueError):
        Stream(0, 3, {5: {atom("a")}})
    with pytest.raises(ValueError):
        Stream(4, 3)


def test_tick_stream_requires_adjacent_ticks():
    with pytest.raises(ValueError):
        TickStream(((0, 0), (2, 0)))
    with pytest.raises(ValueError):
        TickStream(((0, 0), (0, 1)))  # count step without atom
    with pytest.raises(ValueError):
        TickStream(((0, 0), (1, 0)), {(1, 0): atom("a")})


def test_from_signals_skips_duplicates_and_pads():
    s = tick_stream_from_signals([(1, atom("a")), (1, atom("a")), (1, atom("b"))], until=3)
    assert s.ticks == (Tick(0, 0), Tick(1, 0), Tick(1, 1), Tick(1, 2), Tick(2, 2), Tick(3, 2))
    assert [a for _, a in s.signals()] == [atom("a"), atom("b")]
    with pytest.raises(ValueError):
        tick_stream_from_signals([(2, atom("a")), (1, atom("b"))])


def test_ordering_must_list_each_atom_once():
    s = Stream(0, 1, {1: {atom("a"), atom("b")}})
    with pytest.raises(ValueError):
        ordering_of(s, {1: [atom("a")]})


def test_validate_flags_tuple_window_on_intensional():
    r = LarsRule(Plain(atom("q")), (Window(WindowSpec("tuple", 2), DIAMOND, atom("p")),))
    r2 = LarsRule(Plain(atom("p")), (Plain(atom("a")),))
    p = LarsProgram((r, r2), frozenset(), frozenset({"a"}))
    assert validate_program(p)


def test_validate_flags_positive_cycle_through_time_box():
    r = LarsRule(Plain(atom("p")), (Window(WindowSpec("time", 2), BOX, atom("p")),))
    p = LarsProgram((r,), frozenset(), frozenset())
    assert validate_program(p)


def test_window_sizes():
    plain = LarsRule(Plain(atom("p")), (Plain(atom("a")),))
    assert LarsProgram((plain,), frozenset(), frozenset({"a"})).window_sizes() == (0, 0)
    # a body @-atom may look arbitrarily far back
    at = LarsRule(Plain(atom("p")), (At(2, atom("a")),))
    assert LarsProgram((at,), frozenset(), frozenset({"a"})).window_sizes()[0] == INF


signal_lists = st.lists(
    st.tuples(st.integers(0, 6), st.sampled_from([atom("a"), atom("b"), atom("a", "y")])), max_size=8
).map(lambda xs: sorted(xs, key=lambda x: x[0]))


@settings(max_examples=150, deadline=None)
@given(signal_lists)
def test_underlying_of_ordering_roundtrip(signals):
    ts = tick_stream_from_signals(signals, until=6)
    s = underlying_stream(ts)
    assert underlying_stream(ordering_of(s)) == s
    assert len(ordering_of(s).ticks) == len(ts.ticks)


@settings(max_examples=150, deadline=None)
@given(signal_lists)
def test_tick_stream_counts_match_signals(signals):
    ts = tick_stream_from_signals(signals, until=6)
    assert ts.last.count == len(ts.signals()) == len(set(signals))
    assert ts.last.time == 6
    for k in range(1, len(ts.ticks) + 1):
        assert ts.prefix(k).last == ts.ticks[k - 1]
