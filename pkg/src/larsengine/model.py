"""Atoms, rules, programs and (tick) streams shared by every other module.

Constants are plain Python ``str`` or ``int`` values; variables are
``Var`` instances whose names start with an uppercase letter.  Ground
atoms are cheap named tuples so they can be hashed in hot loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import networkx as nx

INF = math.inf


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name or not (self.name[0].isupper() or self.name[0] == "_"):
            raise ValueError(f"variable name must start uppercase: {self.name!r}")

    def __str__(self):
        return self.name


Const = Union[str, int]
Term = Union[Const, Var]


def is_var(term) -> bool:
    return isinstance(term, Var)


def term_str(term) -> str:
    return str(term)


class Atom(NamedTuple):
    """``pred(args...)``; ground iff no argument is a ``Var``."""

    pred: str
    args: tuple = ()

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def variables(self) -> set:
        return {a for a in self.args if isinstance(a, Var)}

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"

    __repr__ = __str__


def atom(pred: str, *args) -> Atom:
    return Atom(pred, tuple(args))


class Tick(NamedTuple):
    """A stream position; components may be ``INF`` in durations."""

    time: float
    count: float

    def time_increment(self) -> "Tick":
        return Tick(self.time + 1, self.count)

    def count_increment(self) -> "Tick":
        return Tick(self.time, self.count + 1)

    def __add__(self, other):  # componentwise, INF absorbs
        return Tick(self.time + other[0], self.count + other[1])

    def __str__(self):
        def f(x):
            return "inf" if x == INF else str(int(x))

        return f"({f(self.time)},{f(self.count)})"


# --- extended atoms -------------------------------------------------------


@dataclass(frozen=True)
class WindowSpec:
    kind: str  # "time" or "tuple"
    size: float  # INF only for the @-shortcut

    def __post_init__(self):
        if self.kind not in ("time", "tuple"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.kind == "tuple" and self.size < 1:
            raise ValueError("tuple window size must be >= 1")
        if self.size < 0:
            raise ValueError("window size must be >= 0")

    def __str__(self):
        n = "inf" if self.size == INF else str(int(self.size))
        return f"[{n} {'t' if self.kind == 'time' else '#'}]"


@dataclass(frozen=True)
class Diamond:
    def __str__(self):
        return "<>"


@dataclass(frozen=True)
class Box:
    def __str__(self):
        return "[]"


@dataclass(frozen=True)
class AtTime:
    time: Term

    def __str__(self):
        return f"@{self.time}"


DIAMOND = Diamond()
BOX = Box()
Modality = Union[Diamond, Box, AtTime]


@dataclass(frozen=True)
class Plain:
    atom: Atom

    def __str__(self):
        return str(self.atom)


@dataclass(frozen=True)
class At:
    time: Term
    atom: Atom

    def __str__(self):
        return f"@{self.time} {self.atom}"


@dataclass(frozen=True)
class Window:
    spec: WindowSpec
    mod: Modality
    atom: Atom

    def __str__(self):
        return f"{self.spec} {self.mod} {self.atom}"


ExtendedAtom = Union[Plain, At, Window]


def ext_variables(e) -> set:
    out = set(e.atom.variables())
    if isinstance(e, At) and isinstance(e.time, Var):
        out.add(e.time)
    if isinstance(e, Window) and isinstance(e.mod, AtTime) and isinstance(e.mod.time, Var):
        out.add(e.mod.time)
    return out


# --- comparison guards ----------------------------------------------------


class Arith(NamedTuple):
    """``base + offset``; only produced by the encoders (e.g. ``N - 2``)."""

    base: Term
    offset: int

    def __str__(self):
        if self.offset > 0:
            return f"{self.base}+{self.offset}"
        return f"{self.base}-{-self.offset}"


COMPARISON_OPS = ("<", "<=", ">", ">=", "=", "!=")


class Comparison(NamedTuple):
    op: str
    left: object  # Term or Arith
    right: object

    def variables(self) -> set:
        out = set()
        for side in (self.left, self.right):
            base = side.base if isinstance(side, Arith) else side
            if isinstance(base, Var):
                out.add(base)
        return out

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


# --- rules and programs ---------------------------------------------------


@dataclass(frozen=True)
class LarsRule:
    head: Union[Plain, At]
    pos: tuple = ()
    neg: tuple = ()
    guards: tuple = ()

    def __post_init__(self):
        if not isinstance(self.head, (Plain, At)):
            raise ValueError("rule head must be an atom or an @-atom")

    def body(self) -> tuple:
        return self.pos + self.neg

    def variables(self) -> set:
        out = ext_variables(self.head)
        for e in self.body():
            out |= ext_variables(e)
        for g in self.guards:
            out |= g.variables()
        return out

    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self):
        parts = [str(e) for e in self.pos]
        parts += [f"not {e}" for e in self.neg]
        parts += [str(g) for g in self.guards]
        if not parts:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(parts)}."


@dataclass(frozen=True)
class LarsProgram:
    rules: tuple = ()
    background: frozenset = frozenset()
    extensional: frozenset = frozenset()

    def __post_init__(self):
        for a in self.background:
            if not a.is_ground():
                raise ValueError(f"background atom {a} is not ground")

    def head_predicates(self) -> set:
        return {r.head.atom.pred for r in self.rules}

    def predicates(self) -> list:
        """Predicates occurring in rules, in first-occurrence order."""
        seen = {}
        for r in self.rules:
            for e in (r.head,) + r.body():
                seen.setdefault(e.atom.pred, None)
        return list(seen)

    def background_predicates(self) -> set:
        return {a.pred for a in self.background}

    def is_extensional(self, pred: str) -> bool:
        return pred in self.extensional

    def window_sizes(self) -> tuple:
        """Largest (time, tuple) window size, 0 when absent.

        Body @-atoms count as infinite time windows.
        """
        nt, nc = 0, 0
        for r in self.rules:
            for e in r.body():
                if isinstance(e, At):
                    nt = INF
                elif isinstance(e, Window):
                    if e.spec.kind == "time":
                        nt = max(nt, e.spec.size)
                    else:
                        nc = max(nc, e.spec.size)
        return nt, nc


# --- validation -----------------------------------------------------------


class Violation(NamedTuple):
    kind: str  # "tuple-intensional" | "extensional-head" | "box-cycle"
    rule: int
    message: str


def validate_program(p: LarsProgram) -> list:
    """Report restriction violations; pure and order-independent."""
    out = []
    for i, r in enumerate(p.rules):
        hp = r.head.atom.pred
        if hp in p.extensional:
            out.append(Violation("extensional-head", i, f"head predicate {hp} is extensional"))
        for e in r.body():
            if isinstance(e, Window) and e.spec.kind == "tuple" and e.atom.pred not in p.extensional:
                out.append(
                    Violation("tuple-intensional", i, f"tuple window over non-extensional {e.atom.pred}")
                )
    g = nx.DiGraph()
    for r in p.rules:
        for e in r.pos:
            g.add_edge(r.head.atom.pred, e.atom.pred)
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(g)):
        for v in scc:
            comp[v] = k
    for i, r in enumerate(p.rules):
        h = r.head.atom.pred
        for e in r.pos:
            if _is_time_box(e) and comp[h] == comp[e.atom.pred]:
                out.append(
                    Violation("box-cycle", i, f"positive cycle through time-box window on {e.atom.pred}")
                )
    out.sort(key=lambda v: (v.rule, v.kind, v.message))
    return list(dict.fromkeys(out))


def _is_time_box(e) -> bool:
    return isinstance(e, Window) and e.spec.kind == "time" and isinstance(e.mod, Box)


# --- streams --------------------------------------------------------------


@dataclass(frozen=True)
class Stream:
    """Timeline ``[t1, tm]`` and a mapping from time to atom sets."""

    t1: int
    tm: int
    eval: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.tm < self.t1:
            raise ValueError("timeline must be nonempty")
        clean = {}
        for t, atoms in self.eval.items():
            if atoms:
                if not self.t1 <= t <= self.tm:
                    raise ValueError(f"atoms at {t} outside timeline [{self.t1},{self.tm}]")
                clean[t] = frozenset(atoms)
        object.__setattr__(self, "eval", clean)

    def at(self, t: int) -> frozenset:
        return self.eval.get(t, frozenset())

    def times(self) -> range:
        return range(self.t1, self.tm + 1)

    def contains(self, other: "Stream") -> bool:
        return (
            self.t1 <= other.t1
            and other.tm <= self.tm
            and all(a <= self.at(t) for t, a in other.eval.items())
        )

    def __hash__(self):
        return hash((self.t1, self.tm, frozenset(self.eval.items())))

    def __str__(self):
        inner = ", ".join(
            f"{t}: {{{', '.join(sorted(map(str, a)))}}}" for t, a in sorted(self.eval.items())
        )
        return f"([{self.t1},{self.tm}], {{{inner}}})"


@dataclass(frozen=True)
class TickStream:
    """Tick pattern plus one atom per count increment."""

    ticks: tuple
    eval: Mapping = field(default_factory=dict)

    def __post_init__(self):
        ticks = tuple(Tick(*k) for k in self.ticks)
        if not ticks:
            raise ValueError("tick stream must be nonempty")
        ev = {Tick(*k): a for k, a in self.eval.items()}
        for prev, cur in zip(ticks, ticks[1:]):
            if cur == prev.count_increment():
                if cur not in ev:
                    raise ValueError(f"count increment {cur} carries no atom")
            elif cur == prev.time_increment():
                if cur in ev:
                    raise ValueError(f"time increment {cur} carries an atom")
            else:
                raise ValueError(f"{cur} does not follow {prev}")
        if ticks[0] in ev:
            raise ValueError("first tick carries no atom")
        object.__setattr__(self, "ticks", ticks)
        object.__setattr__(self, "eval", ev)

    @property
    def last(self) -> Tick:
        return self.ticks[-1]

    def signals(self) -> list:
        """(tick, atom) for every count increment, in order."""
        return [(k, self.eval[k]) for k in self.ticks if k in self.eval]

    def prefix(self, k: int) -> "TickStream":
        ks = self.ticks[:k]
        return TickStream(ks, {t: a for t, a in self.eval.items() if t in set(ks)})

    def suffix_from(self, k: int) -> "TickStream":
        """Substream starting at the k-th tick (used for cut-off checks)."""
        ks = self.ticks[k:]
        return _raw_tick_stream(ks, {t: a for t, a in self.eval.items() if t in set(ks)})

    def __hash__(self):
        return hash((self.ticks, frozenset(self.eval.items())))


def _raw_tick_stream(ticks, ev) -> TickStream:
    ts = object.__new__(TickStream)
    object.__setattr__(ts, "ticks", tuple(ticks))
    object.__setattr__(ts, "eval", dict(ev))
    return ts


def tick_stream_from_signals(signals: Iterable, until: int | None = None, t1: int = 0) -> TickStream:
    """Build the canonical tick stream from ``(time, atom)`` pairs.

    Pairs must have nondecreasing times; their order fixes the counts.
    A repeated atom at the same time point is ignored.
    """
    ticks = [Tick(t1, 0)]
    ev = {}
    seen = set()
    t, c = t1, 0
    for time, a in signals:
        if time < t:
            raise ValueError(f"signal time {time} precedes {t}")
        while t < time:
            t += 1
            ticks.append(Tick(t, c))
        if (time, a) in seen:
            continue
        seen.add((time, a))
        c += 1
        k = Tick(t, c)
        ticks.append(k)
        ev[k] = a
    if until is not None:
        if until < t:
            raise ValueError(f"until={until} precedes last signal time {t}")
        while t < until:
            t += 1
            ticks.append(Tick(t, c))
    return TickStream(tuple(ticks), ev)


def underlying_stream(s: TickStream) -> Stream:
    ev = {}
    for k, a in s.eval.items():
        ev.setdefault(int(k.time), set()).add(a)
    return Stream(int(s.ticks[0].time), int(s.last.time), ev)


def ordering_of(s: Stream, order: Mapping | None = None) -> TickStream:
    """Canonical tick stream of ``s``; ``order[t]`` lists eval(t) in arrival order.

    Time points missing from ``order`` take their atoms in sorted text order.
    """
    signals = []
    for t in s.times():
        atoms = s.at(t)
        if order is not None and t in order:
            seq = list(order.get(t, ()))
            if len(seq) != len(set(seq)) or set(seq) != set(atoms):
                raise ValueError(f"order at {t} does not list eval({t}) exactly once")
        else:
            seq = sorted(atoms, key=str)
        signals.extend((t, a) for a in seq)
    return tick_stream_from_signals(signals, until=s.tm, t1=s.t1)


def data_tick_stream_at(s: TickStream, t: int) -> TickStream:
    """Prefix of ``s`` up to the last tick with time ``t``."""
    idx = max(i for i, k in enumerate(s.ticks) if k.time <= t)
    return s.prefix(idx + 1)
