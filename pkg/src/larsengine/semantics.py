"""Reference semantics: window functions, satisfaction, reduct and a
brute-force answer-stream enumerator used as a test oracle.

Nothing here depends on the encoders; the oracle grounds rules naively
over the active domain and evaluates extended atoms directly on streams.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .asp import compare, term_value
from .model import (
    INF,
    At,
    AtTime,
    Atom,
    Box,
    Diamond,
    LarsProgram,
    LarsRule,
    Plain,
    Stream,
    Tick,
    TickStream,
    Var,
    Window,
    _raw_tick_stream,
    ordering_of,
    underlying_stream,
)


class OracleInfeasible(RuntimeError):
    """Raised when enumeration would exceed the configured cap."""


# --- window functions ---------------------------------------------------------


def time_window(s: Stream, t: int, n) -> Stream:
    if not s.t1 <= t <= s.tm:
        raise ValueError(f"time {t} outside timeline [{s.t1},{s.tm}]")
    lo = s.t1 if n == INF else max(s.t1, t - int(n))
    return Stream(lo, t, {u: a for u, a in s.eval.items() if lo <= u <= t})


def _check_tick(s: TickStream, k) -> Tick:
    k = Tick(*k)
    if k not in set(s.ticks):
        raise ValueError(f"tick {k} not in stream")
    return k


def tick_time_window(s: TickStream, k, n) -> TickStream:
    k = _check_tick(s, k)
    t1 = s.ticks[0].time
    lo = t1 if n == INF else max(t1, k.time - n)
    ks = [x for x in s.ticks if lo <= x.time <= k.time]
    return _raw_tick_stream(ks, {x: a for x, a in s.eval.items() if x in set(ks)})


def tuple_window(s: TickStream, k, n) -> TickStream:
    if n < 1:
        raise ValueError("tuple window size must be >= 1")
    k = _check_tick(s, k)
    c1 = s.ticks[0].count
    lo = max(c1, k.count - n + 1)
    # later ticks with the same count are not part of a window ending at k
    upto = s.ticks[: s.ticks.index(k) + 1]
    ks = [x for x in upto if lo <= x.count]
    return _raw_tick_stream(ks, {x: a for x, a in s.eval.items() if x in set(ks)})


def window_stream(ts: TickStream) -> Stream:
    """Underlying stream of a (possibly non-initial) tick substream."""
    ev = {}
    for k, a in ts.eval.items():
        ev.setdefault(int(k.time), set()).add(a)
    return Stream(int(ts.ticks[0].time), int(ts.ticks[-1].time), ev)


# --- interpretations and satisfaction ----------------------------------------------


@dataclass
class Interpretation:
    """An interpretation stream plus background data.

    ``ticks`` fixes the arrival order of data atoms; tuple windows count
    those ticks only (``tuple_scope="data"``).  With ``tuple_scope="all"``
    inferred atoms are counted too, placed after the data atoms of their
    time point in text order.
    """

    stream: Stream
    background: frozenset = frozenset()
    ticks: TickStream | None = None
    tuple_scope: str = "data"
    _tick_cache: dict = field(default_factory=dict, repr=False)

    def counting_ticks(self) -> TickStream:
        ts = self._tick_cache.get("ticks")
        if ts is not None:
            return ts
        if self.ticks is None:
            ts = ordering_of(self.stream)
        elif self.tuple_scope == "data":
            ts = self.ticks
        else:
            data = {}
            for k, a in self.ticks.signals():
                data.setdefault(int(k.time), []).append(a)
            order = {}
            for t in self.stream.times():
                extra = sorted(self.stream.at(t) - set(data.get(t, ())), key=str)
                order[t] = data.get(t, []) + extra
            ts = ordering_of(self.stream, order)
        self._tick_cache["ticks"] = ts
        return ts


def _holds_at(m: Interpretation, a: Atom, t: int) -> bool:
    return a in m.stream.at(t) or a in m.background


def _window_substream(m: Interpretation, t: int, spec) -> Stream:
    if spec.kind == "time":
        return time_window(m.stream, t, spec.size)
    ts = m.counting_ticks()
    ref = max((k for k in ts.ticks if k.time == t), key=lambda k: k.count)
    return window_stream(tuple_window(ts, ref, spec.size))


def satisfies(m: Interpretation, t: int, e) -> bool:
    """Truth of extended atom ``e`` (ground) at time ``t``."""
    if isinstance(e, Plain):
        return _holds_at(m, e.atom, t)
    if isinstance(e, At):
        u = e.time
        return isinstance(u, int) and m.stream.t1 <= u <= m.stream.tm and _holds_at(m, e.atom, u)
    if isinstance(e, Window):
        w = _window_substream(m, t, e.spec)
        if isinstance(e.mod, Diamond):
            return any(e.atom in w.at(u) for u in w.times())
        if isinstance(e.mod, Box):
            return all(e.atom in w.at(u) for u in w.times())
        if isinstance(e.mod, AtTime):
            u = e.mod.time
            return isinstance(u, int) and w.t1 <= u <= w.tm and e.atom in w.at(u)
    raise TypeError(f"not an extended atom: {e!r}")


def body_holds(m: Interpretation, t: int, r: LarsRule) -> bool:
    return all(satisfies(m, t, e) for e in r.pos) and not any(satisfies(m, t, e) for e in r.neg)


def reduct(p, m: Interpretation, t: int) -> list:
    rules = p.rules if isinstance(p, LarsProgram) else p
    return [r for r in rules if body_holds(m, t, r)]


def is_model(rules, m: Interpretation, t: int) -> bool:
    return all(satisfies(m, t, r.head) for r in rules if body_holds(m, t, r))


# --- naive grounding ------------------------------------------------------------------


def _subst_term(x, b):
    return b.get(x, x) if isinstance(x, Var) else x


def _subst_atom(a: Atom, b) -> Atom:
    return Atom(a.pred, tuple(_subst_term(x, b) for x in a.args))


def _subst_ext(e, b):
    if isinstance(e, Plain):
        return Plain(_subst_atom(e.atom, b))
    if isinstance(e, At):
        return At(_subst_term(e.time, b), _subst_atom(e.atom, b))
    mod = AtTime(_subst_term(e.mod.time, b)) if isinstance(e.mod, AtTime) else e.mod
    return Window(e.spec, mod, _subst_atom(e.atom, b))


def active_domain(p: LarsProgram, d: TickStream, t: int) -> list:
    dom = set(range(int(d.ticks[0].time), t + 1))
    for r in p.rules:
        for e in (r.head,) + r.body():
            dom.update(x for x in e.atom.args if not isinstance(x, Var))
            for x in (getattr(e, "time", None), getattr(getattr(e, "mod", None), "time", None)):
                if x is not None and not isinstance(x, Var):
                    dom.add(x)
        for g in r.guards:
            for side in (g.left, g.right):
                if not isinstance(side, Var):
                    dom.add(side)
    for a in p.background:
        dom.update(a.args)
    for _, a in d.signals():
        dom.update(a.args)
    return sorted(dom, key=lambda v: (isinstance(v, str), v if isinstance(v, int) else 0, str(v)))


def ground_naive(p: LarsProgram, domain) -> list:
    out = []
    for r in p.rules:
        vs = sorted(r.variables(), key=lambda v: v.name)
        for values in itertools.product(domain, repeat=len(vs)):
            b = dict(zip(vs, values))
            ok = True
            for g in r.guards:
                x, y = term_value(g.left, b), term_value(g.right, b)
                if not compare(g.op, x, y):
                    ok = False
                    break
            if not ok:
                continue
            out.append(
                LarsRule(
                    _subst_ext(r.head, b),
                    tuple(_subst_ext(e, b) for e in r.pos),
                    tuple(_subst_ext(e, b) for e in r.neg),
                )
            )
    return list(dict.fromkeys(out))


# --- brute-force answer streams ----------------------------------------------------------


def _head_slot(r: LarsRule, t: int):
    if isinstance(r.head, Plain):
        return (r.head.atom, t)
    return (r.head.atom, r.head.time)


def _stream_with(base: Stream, slots) -> Stream:
    ev = {u: set(a) for u, a in base.eval.items()}
    for a, u in slots:
        ev.setdefault(u, set()).add(a)
    return Stream(base.t1, base.tm, ev)


def answer_streams_bruteforce(
    p: LarsProgram,
    d: TickStream,
    t: int | None = None,
    cap: int = 24,
    tuple_scope: str = "data",
    minimality: str = "fixpoint",
) -> set:
    """All answer streams of ``p`` for data ``d`` at ``t`` (default: last time).

    Candidates are (atom, time) slots for heads of ground rules whose
    positive body can possibly hold.  ``minimality="fixpoint"`` compares a
    candidate against the least fixpoint of its reduct (positive extended
    atoms are monotone); ``minimality="subsets"`` checks every smaller
    interpretation against the reduct literally.
    """
    if t is None:
        t = int(d.last.time)
    keep = [k for k in d.ticks if k.time <= t]
    d = _raw_tick_stream(keep, {k: a for k, a in d.eval.items() if k.time <= t})
    data = underlying_stream(d) if d.ticks[0] == (0, 0) else window_stream(d)
    data = Stream(data.t1, t, data.eval)
    bg = frozenset(p.background)

    def interp(stream):
        return Interpretation(stream, bg, d, tuple_scope)

    rules = ground_naive(p, active_domain(p, d, t))
    timeline = range(data.t1, t + 1)

    # over-approximate derivable slots, ignoring negation
    reach = set()
    while True:
        m = interp(_stream_with(data, reach))
        new = {
            _head_slot(r, t)
            for r in rules
            if all(satisfies(m, t, e) for e in r.pos)
        }
        new = {(a, u) for a, u in new if isinstance(u, int) and u in timeline and a not in data.at(u)}
        if new <= reach:
            break
        reach |= new
    cands = sorted(reach, key=lambda s: (s[1], str(s[0])))
    negs = sorted({e for r in rules for e in r.neg}, key=str)

    if minimality == "subsets" or tuple_scope == "all":
        # counting inferred atoms makes tuple windows non-monotone
        if len(cands) > min(cap, 14):
            raise OracleInfeasible(f"{len(cands)} candidate slots exceed cap")
        return _by_subsets(rules, data, cands, interp, t)

    if min(len(cands), len(negs)) > cap:
        raise OracleInfeasible(f"{min(len(cands), len(negs))} choices exceed cap {cap}")

    def lfp(neg_true):
        j = set()
        fired = [r for r in rules if not any(neg_true(e) for e in r.neg)]
        while True:
            m = interp(_stream_with(data, j))
            add = set()
            for r in fired:
                if all(satisfies(m, t, e) for e in r.pos):
                    slot = _head_slot(r, t)
                    if not (isinstance(slot[1], int) and slot[1] in timeline):
                        return None  # head cannot hold: not a model
                    if slot[0] not in data.at(slot[1]):
                        add.add(slot)
            if add <= j:
                return j
            j |= add

    found = set()
    if len(negs) <= len(cands):
        for bits in itertools.product((False, True), repeat=len(negs)):
            guess = dict(zip(negs, bits))
            j = lfp(lambda e: guess[e])
            if j is None:
                continue
            m = interp(_stream_with(data, j))
            if all(satisfies(m, t, e) == guess[e] for e in negs):
                found.add(m.stream)
    else:
        for bits in itertools.product((False, True), repeat=len(cands)):
            chosen = {s for s, b in zip(cands, bits) if b}
            m = interp(_stream_with(data, chosen))
            j = lfp(lambda e: satisfies(m, t, e))
            if j is not None and j == chosen:
                found.add(m.stream)
    return found


def _by_subsets(rules, data, cands, interp, t) -> set:
    found = set()
    for bits in itertools.product((False, True), repeat=len(cands)):
        chosen = [s for s, b in zip(cands, bits) if b]
        m = interp(_stream_with(data, chosen))
        if not is_model(rules, m, t):
            continue
        red = reduct(rules, m, t)
        minimal = True
        for sub in itertools.product((False, True), repeat=len(chosen)):
            smaller = [s for s, b in zip(chosen, sub) if b]
            if len(smaller) == len(chosen):
                continue
            if is_model(red, interp(_stream_with(data, smaller)), t):
                minimal = False
                break
        if minimal:
            found.add(m.stream)
    return found
