"""Translation of a LARS program into a normal logic program for one time point.

``lars_to_asp(p, t)`` plus ``encode_stream(d)`` is a ground-able program
whose answer sets correspond to the answer streams of ``p`` for ``d`` at
``t``.  Auxiliary predicate names all contain an underscore or are one
of ``now``, ``cnt`` and ``tick``; user predicates may use neither.
"""
from __future__ import annotations

from .asp import AspRule
from .model import (
    INF,
    Arith,
    At,
    AtTime,
    Atom,
    Box,
    Comparison,
    Diamond,
    LarsProgram,
    LarsRule,
    Plain,
    Stream,
    TickStream,
    Var,
    Window,
)

NOW, CNT, TICK = "now", "cnt", "tick"
RESERVED = frozenset({NOW, CNT, TICK})

# tick variables of the encoding; the leading underscore keeps them apart
# from user variables
VN, VC, VT, VD, VE = Var("_N"), Var("_C"), Var("_T"), Var("_D"), Var("_E")


def at_pred(p: str) -> str:
    return f"{p}_at"


def tick_pred(p: str) -> str:
    return f"{p}_tick"


def pinned(a: Atom, t) -> Atom:
    return Atom(at_pred(a.pred), a.args + (t,))


def tick_pinned(a: Atom, t, c) -> Atom:
    return Atom(tick_pred(a.pred), a.args + (t, c))


_MOD_NAME = {Diamond: "dia", Box: "box", AtTime: "at"}


def window_key(ri: int, bi: int, e: Window) -> str:
    size = "inf" if e.spec.size == INF else str(int(e.spec.size))
    kind = "t" if e.spec.kind == "time" else "c"
    return f"{ri}_{bi}_{kind}{size}_{_MOD_NAME[type(e.mod)]}_{e.atom.pred}"


def omega(ri, bi, e) -> str:
    return "w_" + window_key(ri, bi, e)


def spoil(ri, bi, e) -> str:
    return "spoil_" + window_key(ri, bi, e)


def covers_time(ri, bi, e) -> str:
    return "covt_" + window_key(ri, bi, e)


def covers_count(ri, bi, e) -> str:
    return "covc_" + window_key(ri, bi, e)


def is_auxiliary(pred: str) -> bool:
    return "_" in pred or pred in RESERVED


def check_names(p: LarsProgram) -> None:
    preds = set(p.predicates()) | p.background_predicates() | set(p.extensional)
    for q in sorted(preds):
        if is_auxiliary(q):
            raise ValueError(f"predicate name {q!r} is reserved for the encoding")


# --- body atoms and base rules -----------------------------------------------------


def atm(ri: int, bi: int, e) -> Atom:
    if isinstance(e, Plain):
        return e.atom
    if isinstance(e, At):
        return pinned(e.atom, e.time)
    if isinstance(e.mod, AtTime):
        return Atom(omega(ri, bi, e), e.atom.args + (e.mod.time,))
    return Atom(omega(ri, bi, e), e.atom.args)


def head_atom(r: LarsRule) -> Atom:
    if isinstance(r.head, At):
        return pinned(r.head.atom, r.head.time)
    return r.head.atom


def base_rule(r: LarsRule, ri: int = 0) -> AspRule:
    npos = len(r.pos)
    return AspRule(
        head_atom(r),
        tuple(atm(ri, bi, e) for bi, e in enumerate(r.pos)),
        tuple(atm(ri, npos + bi, e) for bi, e in enumerate(r.neg)),
        tuple(r.guards),
    )


def window_occurrences(r: LarsRule):
    """(body position, window atom) pairs; positions count pos then neg."""
    for bi, e in enumerate(r.body()):
        if isinstance(e, Window):
            yield bi, e


# --- window rules ------------------------------------------------------------------


def window_rules(e, ri: int = 0, bi: int = 0) -> list:
    if not isinstance(e, Window):
        return []
    a, xs, n = e.atom, e.atom.args, e.spec.size
    w = omega(ri, bi, e)
    out = []
    if e.spec.kind == "time":
        if n == INF:
            raise ValueError("unbounded time windows only arise from body @-atoms")
        n = int(n)
        if isinstance(e.mod, (AtTime, Diamond)):
            tv = e.mod.time if isinstance(e.mod, AtTime) else VT
            head = Atom(w, xs + (tv,)) if isinstance(e.mod, AtTime) else Atom(w, xs)
            for i in range(n + 1):
                out.append(
                    AspRule(head, (Atom(NOW, (VN,)), pinned(a, tv)), (), (Comparison("=", tv, Arith(VN, -i)),))
                )
        else:
            sp = spoil(ri, bi, e)
            out.append(AspRule(Atom(w, xs), (a,), (Atom(sp, xs),)))
            for i in range(1, n + 1):
                out.append(
                    AspRule(
                        Atom(sp, xs),
                        (a, Atom(NOW, (VN,))),
                        (pinned(a, VT),),
                        (Comparison("=", VT, Arith(VN, -i)), Comparison(">=", VT, 0)),
                    )
                )
        return out
    n = int(n)
    if isinstance(e.mod, (AtTime, Diamond)):
        tv = e.mod.time if isinstance(e.mod, AtTime) else VT
        head = Atom(w, xs + (tv,)) if isinstance(e.mod, AtTime) else Atom(w, xs)
        for j in range(n):
            out.append(
                AspRule(head, (Atom(CNT, (VC,)), tick_pinned(a, tv, VD)), (), (Comparison("=", VD, Arith(VC, -j)),))
            )
        return out
    sp = spoil(ri, bi, e)
    out.append(AspRule(Atom(w, xs), (a,), (Atom(sp, xs),)))
    out.append(
        AspRule(
            Atom(sp, xs),
            (a, Atom(CNT, (VC,)), Atom(TICK, (VT, VD))),
            (pinned(a, VT),),
            (Comparison(">=", VD, Arith(VC, -(n - 1))), Comparison("<=", VD, VC)),
        )
    )
    out.append(
        AspRule(
            Atom(sp, xs),
            (a, Atom(CNT, (VC,)), Atom(TICK, (VT, VD)), tick_pinned(a, VT, VE)),
            (),
            (Comparison("=", VD, Arith(VC, -(n - 1))), Comparison("<", VE, VD)),
        )
    )
    return out


def lars_to_asp_rules(r: LarsRule, ri: int = 0) -> list:
    out = [base_rule(r, ri)]
    for bi, e in window_occurrences(r):
        out.extend(window_rules(e, ri, bi))
    return out


def predicate_arities(p: LarsProgram) -> dict:
    out = {}
    for r in p.rules:
        for e in (r.head,) + r.body():
            k = len(e.atom.args)
            if out.setdefault(e.atom.pred, k) != k:
                raise ValueError(f"predicate {e.atom.pred} used with arities {out[e.atom.pred]} and {k}")
    return out


def bridge_vars(k: int) -> tuple:
    return tuple(Var(f"X{i}") for i in range(1, k + 1))


def lars_to_asp(p: LarsProgram, t: int) -> list:
    """Encoding of ``p`` for evaluation at time ``t``; background as facts."""
    check_names(p)
    out = []
    for pred, k in predicate_arities(p).items():
        xs = bridge_vars(k)
        a = Atom(pred, xs)
        out.append(AspRule(a, (Atom(NOW, (VN,)), pinned(a, VN))))
        out.append(AspRule(pinned(a, VN), (Atom(NOW, (VN,)), a)))
    for ri, r in enumerate(p.rules):
        out.extend(lars_to_asp_rules(r, ri))
    out.append(AspRule(Atom(NOW, (t,))))
    out.extend(AspRule(b) for b in sorted(p.background, key=str))
    return out


def encode_stream(d: TickStream, extensional=None) -> list:
    """Facts for a tick stream: pinned atoms, tick atoms and the count."""
    out = []
    for k in d.ticks:
        t, c = int(k.time), int(k.count)
        out.append(AspRule(Atom(TICK, (t, c))))
        a = d.eval.get(k)
        if a is not None:
            out.append(AspRule(pinned(a, t)))
            if extensional is None or a.pred in extensional:
                out.append(AspRule(tick_pinned(a, t, c)))
    out.append(AspRule(Atom(CNT, (int(d.last.count),))))
    return out


# --- reading answer sets back ----------------------------------------------------------


def user_predicates(p: LarsProgram) -> set:
    return p.head_predicates() | set(p.extensional)


def readback_stream(model, p: LarsProgram, t: int, t1: int = 0) -> Stream:
    """Interpretation stream encoded by an answer set (auxiliary atoms dropped)."""
    users = user_predicates(p)
    at_names = {at_pred(q): q for q in users}
    ev = {}
    for a in model:
        if a.pred in users:
            ev.setdefault(t, set()).add(a)
        elif a.pred in at_names:
            u = a.args[-1]
            ev.setdefault(u, set()).add(Atom(at_names[a.pred], a.args[:-1]))
    return Stream(t1, t, ev)


def strip_model(model, p: LarsProgram) -> frozenset:
    """Non-auxiliary atoms holding now, background facts excluded."""
    users = user_predicates(p)
    return frozenset(a for a in model if a.pred in users)


def project_user(model, p: LarsProgram) -> frozenset:
    """Model restricted to user atoms and their time-pinned forms."""
    users = user_predicates(p)
    keep = users | {at_pred(q) for q in users} | {tick_pred(q) for q in p.extensional}
    return frozenset(a for a in model if a.pred in keep)
