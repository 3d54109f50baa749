"""Incremental encoding: rules annotated with durations, tick-by-tick
maintenance of the live rule set and its grounding.

Each tick contributes rules pinned to that tick (``incremental_rules``).
``IncrementalState`` turns durations into expiration ticks, drops expired
rules and keeps the grounding of the remaining ones up to date, reporting
which ground rules appeared (G+) and disappeared (G-).
"""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .asp import AspRule, GroundProgram, compare, term_value
from .grounding import Grounder, substitute
from .model import (
    INF,
    At,
    AtTime,
    Atom,
    Box,
    Comparison,
    LarsProgram,
    LarsRule,
    Plain,
    Tick,
    TickStream,
    Var,
    Window,
)
from .semantics import _subst_ext
from .static import (
    TICK,
    VD,
    base_rule,
    bridge_vars,
    check_names,
    covers_count,
    covers_time,
    omega,
    pinned,
    predicate_arities,
    spoil,
    tick_pinned,
    window_occurrences,
)

FOREVER = Tick(INF, INF)


class AnnotatedRule(NamedTuple):
    """A rule with a tick: a duration when generated, an expiration once stored."""

    tick: Tick
    rule: AspRule

    def __str__(self):
        return f"[{self.tick.time if self.tick.time != INF else 'inf'},{self.tick.count if self.tick.count != INF else 'inf'}] {self.rule}"


class UnguardedVariable(ValueError):
    def __init__(self, rule_index: int, rule: LarsRule, var: Var):
        self.rule_index, self.rule, self.var = rule_index, rule, var
        super().__init__(f"rule {rule_index} ({rule}): variable {var} in a window atom has no guard atom")


# --- pre-grounding -------------------------------------------------------------------


def guard_predicates(p: LarsProgram) -> set:
    """Predicates given only by background data."""
    return p.background_predicates() - p.head_predicates() - set(p.extensional)


def _window_variables(r: LarsRule) -> set:
    out = set()
    for e in r.body():
        if isinstance(e, (Window, At)):
            out |= e.atom.variables()
    return out


@dataclass
class PreGrounded:
    """Rule instances with guard variables fixed; ``index`` maps back to the rule."""

    program: LarsProgram
    instances: list = field(default_factory=list)  # (rule index, LarsRule)

    def count(self, ri: int) -> int:
        return sum(1 for i, _ in self.instances if i == ri)


def _guard_bindings(guards, by_pred):
    bindings = [{}]
    for g in guards:
        nxt = []
        for b in bindings:
            for fact in by_pred.get(g.pred, ()):
                if len(fact.args) != len(g.args):
                    continue
                nb = dict(b)
                ok = True
                for x, v in zip(g.args, fact.args):
                    if isinstance(x, Var):
                        if nb.setdefault(x, v) != v:
                            ok = False
                            break
                    elif x != v:
                        ok = False
                        break
                if ok:
                    nxt.append(nb)
        bindings = nxt
    return bindings


def _resolve_guards(guards, b):
    """Remaining comparisons, or None when one is violated."""
    out = []
    for g in guards:
        x, y = term_value(g.left, b), term_value(g.right, b)
        if x is None or y is None:
            out.append(Comparison(g.op, _subst_side(g.left, b), _subst_side(g.right, b)))
        elif not compare(g.op, x, y):
            return None
    return tuple(out)


def _subst_side(side, b):
    if isinstance(side, Var):
        return b.get(side, side)
    if hasattr(side, "base") and isinstance(side.base, Var) and side.base in b:
        return b[side.base] + side.offset
    return side


def pre_ground(p: LarsProgram, strict: bool = True) -> PreGrounded:
    """Instantiate guard variables of every rule from the background data.

    A guard atom is a positive plain body atom over a predicate given only
    by background facts.  With ``strict``, a window variable that no guard
    covers is an error; otherwise it is left for grounding at run time.
    """
    gp = guard_predicates(p)
    by_pred = {}
    for a in sorted(p.background, key=str):
        by_pred.setdefault(a.pred, []).append(a)
    out = PreGrounded(p)
    for ri, r in enumerate(p.rules):
        guards = [e.atom for e in r.pos if isinstance(e, Plain) and e.atom.pred in gp]
        gvars = set().union(*(g.variables() for g in guards)) if guards else set()
        if strict:
            for v in sorted(_window_variables(r) - gvars, key=lambda v: v.name):
                raise UnguardedVariable(ri, r, v)
        seen = {}
        for b in _guard_bindings(guards, by_pred):
            rest = _resolve_guards(r.guards, b)
            if rest is None:
                continue
            inst = LarsRule(
                _subst_ext(r.head, b),
                tuple(_subst_ext(e, b) for e in r.pos),
                tuple(_subst_ext(e, b) for e in r.neg),
                rest,
            )
            seen.setdefault(inst, None)
        out.instances.extend((ri, inst) for inst in seen)
    return out


# --- incremental rules ---------------------------------------------------------------------


def _window_tick_rules(e: Window, ri: int, bi: int, t: int, c: int) -> list:
    a, n = e.atom, e.spec.size
    w = omega(ri, bi, e)
    if isinstance(e.mod, AtTime) and isinstance(e.mod.time, Var):
        a = substitute(a, {e.mod.time: t})
    xs = a.args
    out = []
    if e.spec.kind == "time":
        n = int(n)
        if isinstance(e.mod, AtTime):
            return [AnnotatedRule(Tick(n + 1, INF), AspRule(Atom(w, xs + (t,)), (pinned(a, t),)))]
        if not isinstance(e.mod, Box):
            return [AnnotatedRule(Tick(n + 1, INF), AspRule(Atom(w, xs), (pinned(a, t),)))]
        sp = spoil(ri, bi, e)
        out.append(AnnotatedRule(FOREVER, AspRule(Atom(w, xs), (a,), (Atom(sp, xs),))))
        if n >= 1 and t >= 1:
            out.append(AnnotatedRule(Tick(n, INF), AspRule(Atom(sp, xs), (a,), (pinned(a, t - 1),))))
        return out
    n = int(n)
    dur = Tick(INF, n)
    if isinstance(e.mod, AtTime):
        return [AnnotatedRule(dur, AspRule(Atom(w, xs + (t,)), (tick_pinned(a, t, c),)))]
    if not isinstance(e.mod, Box):
        return [AnnotatedRule(dur, AspRule(Atom(w, xs), (tick_pinned(a, t, c),)))]
    sp, ct, cc = spoil(ri, bi, e), covers_time(ri, bi, e), covers_count(ri, bi, e)
    out.append(AnnotatedRule(FOREVER, AspRule(Atom(w, xs), (a,), (Atom(sp, xs),))))
    out.append(
        AnnotatedRule(dur, AspRule(Atom(sp, xs), (a, Atom(TICK, (t, c)), Atom(ct, (t,))), (pinned(a, t),)))
    )
    # the count is left open: an occurrence at t that has dropped out of
    # the window must spoil while t itself is still covered
    out.append(AnnotatedRule(dur, AspRule(Atom(sp, xs), (tick_pinned(a, t, VD), Atom(ct, (t,))), (Atom(cc, (VD,)),))))
    out.append(AnnotatedRule(dur, AspRule(Atom(ct, (t,)), (Atom(TICK, (t, c)),))))
    out.append(AnnotatedRule(dur, AspRule(Atom(cc, (c,)), (Atom(TICK, (t, c)),))))
    return out


class IncrementalEncoder:
    """Precomputed pieces of the incremental encoding of one program."""

    def __init__(self, p: LarsProgram, strict_guards: bool = True):
        check_names(p)
        self.program = p
        self.pre = pre_ground(p, strict=strict_guards)
        self.arities = predicate_arities(p)
        self.base = list(dict.fromkeys(base_rule(r, ri) for ri, r in self.pre.instances))
        self.windows = [
            (ri, bi, e) for ri, r in self.pre.instances for bi, e in window_occurrences(r)
        ]
        self.extensional = set(p.extensional)

    def stream_facts(self, t: int, c: int, sig) -> list:
        out = [AnnotatedRule(FOREVER, AspRule(Atom(TICK, (t, c))))]
        for a in sig:
            out.append(AnnotatedRule(FOREVER, AspRule(pinned(a, t))))
            if not self.extensional or a.pred in self.extensional:
                out.append(AnnotatedRule(FOREVER, AspRule(tick_pinned(a, t, c))))
        return out

    def bridges(self, t: int) -> list:
        out = []
        dur = Tick(1, INF)
        for pred, k in self.arities.items():
            a = Atom(pred, bridge_vars(k))
            out.append(AnnotatedRule(dur, AspRule(a, (pinned(a, t),))))
            out.append(AnnotatedRule(dur, AspRule(pinned(a, t), (a,))))
        return out

    def window_rules(self, t: int, c: int) -> list:
        out = []
        for ri, bi, e in self.windows:
            out.extend(_window_tick_rules(e, ri, bi, t, c))
        return list(dict.fromkeys(out))

    def rules(self, t: int, c: int, sig=(), include_base: bool = True) -> list:
        out = self.stream_facts(t, c, sig) + self.bridges(t)
        if include_base:
            out.extend(AnnotatedRule(FOREVER, r) for r in self.base)
        out.extend(self.window_rules(t, c))
        return out


def incremental_rules(p: LarsProgram, t: int, c: int, sig=(), strict_guards: bool = False) -> list:
    """Rules contributed by tick ``(t, c)``, annotated with their durations."""
    return IncrementalEncoder(p, strict_guards).rules(t, c, tuple(sig))


# --- tick increments -------------------------------------------------------------------------


class TickDelta(NamedTuple):
    tick: Tick
    e_plus: list  # AnnotatedRule with expiration
    e_minus: list
    g_plus: list  # ground AspRule
    g_minus: list


def window_extent(p: LarsProgram) -> tuple:
    """Largest time and tuple window sizes; None when there is none."""
    nt = nc = None
    for r in p.rules:
        for e in r.body():
            if isinstance(e, At):
                nt = INF
            elif isinstance(e, Window):
                if e.spec.kind == "time":
                    nt = e.spec.size if nt is None else max(nt, e.spec.size)
                else:
                    nc = e.spec.size if nc is None else max(nc, e.spec.size)
    return nt, nc


def cutoff_sizes(p: LarsProgram) -> tuple:
    """Window lengths for the cut-off bound, infinite when there is none."""
    nt, nc = window_extent(p)
    return (INF if nt is None else nt), (INF if nc is None else nc)


class IncrementalState:
    """Live annotated rules and their grounding, advanced one tick at a time."""

    def __init__(self, p: LarsProgram, strict_guards: bool = False, gc_cutoff: bool = False, encoder=None):
        self.encoder = encoder or IncrementalEncoder(p, strict_guards)
        self.program = p
        self.grounder = Grounder()
        self.pi = {}  # rule -> {expiration: None}
        self._by_time = []
        self._by_count = []
        self._seq = itertools.count()
        self.current = None
        self.gc_cutoff = gc_cutoff
        self._sizes = window_extent(p)
        self._history = deque()  # (tick, stream fact rules) for the cut-off
        init = [AspRule(b) for b in sorted(p.background, key=str)] + self.encoder.base
        for r in init:
            self.pi[r] = {FOREVER: None}
        self.initial_ground = self.grounder.add_rules(init)

    # -- queries -----------------------------------------------------------------

    def ground_rules(self) -> list:
        return self.grounder.ground_rules()

    def program_now(self) -> GroundProgram:
        return GroundProgram(self.grounder.ground_rules())

    def annotated(self) -> list:
        return [AnnotatedRule(x, r) for r, exps in self.pi.items() for x in exps]

    def dump(self) -> str:
        lines = [str(a) for a in self.annotated()]
        return "\n".join(sorted(lines))

    # -- update --------------------------------------------------------------------

    def _check_tick(self, k: Tick, sig) -> None:
        if self.current is None:
            if sig:
                raise ValueError("the first tick carries no signal")
            return
        if k == self.current.time_increment():
            if sig:
                raise ValueError(f"time increment {k} carries a signal")
        elif k == self.current.count_increment():
            if len(sig) != 1:
                raise ValueError(f"count increment {k} needs exactly one signal")
        else:
            raise ValueError(f"{k} is not adjacent to {self.current}")

    def increment(self, t: int, c: int, sig=(), first_signal: bool = False) -> TickDelta:
        """Advance to tick ``(t, c)``.

        ``first_signal`` allows a signal on the very first tick, for
        streams that start in the middle (cut-off checks).
        """
        sig = tuple(sig)
        k = Tick(t, c)
        if not (first_signal and self.current is None):
            self._check_tick(k, sig)
        self.current = k

        new = self.encoder.stream_facts(t, c, sig) + self.encoder.bridges(t) + self.encoder.window_rules(t, c)
        e_plus = [AnnotatedRule(k + a.tick, a.rule) for a in new]
        fresh = []
        for x, r in e_plus:
            exps = self.pi.get(r)
            if exps is None:
                self.pi[r] = {x: None}
                fresh.append(r)
            elif x not in exps:
                exps[x] = None
            else:
                continue
            if x.time != INF:
                heapq.heappush(self._by_time, (x.time, next(self._seq), r, x))
            if x.count != INF:
                heapq.heappush(self._by_count, (x.count, next(self._seq), r, x))

        e_minus = []
        gone = []
        for heap, bound in ((self._by_time, t), (self._by_count, c)):
            while heap and heap[0][0] <= bound:
                _, _, r, x = heapq.heappop(heap)
                exps = self.pi.get(r)
                if exps is None or x not in exps:
                    continue
                del exps[x]
                e_minus.append(AnnotatedRule(x, r))
                if not exps:
                    del self.pi[r]
                    gone.append(r)

        if self.gc_cutoff:
            facts = [a.rule for a in new if a.tick == FOREVER and not a.rule.pos]
            self._history.append((k, facts))
            gone.extend(self._collect(k, e_minus))

        g_minus = self.grounder.remove_rules(gone)
        g_plus = self.grounder.add_rules(fresh)
        if g_minus and g_plus:
            both = set(g_minus) & set(g_plus)
            if both:
                g_minus = [g for g in g_minus if g not in both]
                g_plus = [g for g in g_plus if g not in both]
        return TickDelta(k, e_plus, e_minus, g_plus, g_minus)

    def _collect(self, k: Tick, e_minus) -> list:
        """Drop stream facts at time points no window can reach any more."""
        nt, nc = self._sizes
        if nt == INF:
            return []
        bound = k.time - (0 if nt is None else nt)
        if nc is not None:
            lo = k.count - nc + 1
            start = next((kk.time for kk, _ in self._history if kk.count >= lo), None)
            if start is None or self._history[0][0].count >= lo:
                return []
            bound = min(bound, start)
        gone = []
        while self._history and self._history[0][0].time < bound:
            _, facts = self._history.popleft()
            for r in facts:
                exps = self.pi.pop(r, None)
                if exps is not None:
                    e_minus.extend(AnnotatedRule(x, r) for x in exps)
                    gone.append(r)
        return gone


def incremental_program(p: LarsProgram, d: TickStream, strict_guards: bool = False, gc_cutoff: bool = False) -> GroundProgram:
    """Ground program live after folding all ticks of ``d``."""
    st = run_stream(p, d, strict_guards=strict_guards, gc_cutoff=gc_cutoff)
    return st.program_now()


def run_stream(p: LarsProgram, d: TickStream, strict_guards: bool = False, gc_cutoff: bool = False, encoder=None) -> IncrementalState:
    st = IncrementalState(p, strict_guards=strict_guards, gc_cutoff=gc_cutoff, encoder=encoder)
    for i, k in enumerate(d.ticks):
        a = d.eval.get(k)
        st.increment(int(k.time), int(k.count), (a,) if a is not None else (), first_signal=(i == 0))
    return st
