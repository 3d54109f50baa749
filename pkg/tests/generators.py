"""Random small programs and tick streams for property and acceptance tests."""
from __future__ import annotations

import random

from larsengine.model import (
    BOX,
    DIAMOND,
    At,
    AtTime,
    Atom,
    Comparison,
    LarsProgram,
    LarsRule,
    Plain,
    Var,
    Window,
    WindowSpec,
    tick_stream_from_signals,
    validate_program,
)

X, T = Var("X"), Var("T")
EXT = {"a": 1, "b": 0}
INT = {"p": 1, "q": 0, "r": 1}
CONSTS = ("y", "z", 1)


def _atom(rng, pred, arity, allow_var=True):
    if arity == 0:
        return Atom(pred, ())
    if allow_var and rng.random() < 0.7:
        return Atom(pred, (X,))
    return Atom(pred, (rng.choice(CONSTS[:2]),))


def _window(rng, pred, arity, allow_var, allow_t):
    ext = pred in EXT
    kind = "tuple" if ext and rng.random() < 0.4 else "time"
    n = rng.randint(1, 3) if kind == "tuple" else rng.randint(0, 3)
    m = rng.random()
    if m < 0.45:
        mod = DIAMOND
    elif m < 0.8:
        mod = BOX
    else:
        mod = AtTime(T if allow_t else rng.randint(0, 3))
    return Window(WindowSpec(kind, n), mod, _atom(rng, pred, arity, allow_var))


def random_rule(rng) -> LarsRule:
    preds = list(EXT.items()) + list(INT.items())
    pos = []
    for _ in range(rng.randint(1, 2)):
        pred, ar = rng.choice(preds)
        k = rng.random()
        if k < 0.35:
            pos.append(Plain(_atom(rng, pred, ar)))
        elif k < 0.9:
            pos.append(_window(rng, pred, ar, True, True))
        else:
            pos.append(At(rng.randint(0, 3), _atom(rng, pred, ar)))
    bound = set()
    for e in pos:
        bound |= e.atom.variables()
        if isinstance(e, Window) and isinstance(e.mod, AtTime) and isinstance(e.mod.time, Var):
            bound.add(e.mod.time)
    neg = []
    for _ in range(rng.choice((0, 0, 1, 1, 2))):
        pred, ar = rng.choice(preds)
        allow_var = X in bound
        if rng.random() < 0.4:
            neg.append(Plain(_atom(rng, pred, ar, allow_var)))
        else:
            neg.append(_window(rng, pred, ar, allow_var, T in bound))
    hp, har = rng.choice(list(INT.items()))
    ha = _atom(rng, hp, har, X in bound)
    if T in bound and rng.random() < 0.4:
        head = At(T, ha)
    else:
        head = Plain(ha)
    guards = ()
    if X in bound and rng.random() < 0.15:
        guards = (Comparison("!=", X, "z"),)
    return LarsRule(head, tuple(pos), tuple(neg), guards)


def random_program(rng, max_rules: int = 4) -> LarsProgram:
    while True:
        rules = tuple(random_rule(rng) for _ in range(rng.randint(1, max_rules)))
        p = LarsProgram(rules, frozenset(), frozenset(EXT))
        if not validate_program(p) and _arities_ok(p):
            return p


def _arities_ok(p) -> bool:
    ar = {}
    for r in p.rules:
        for e in (r.head,) + r.body():
            if ar.setdefault(e.atom.pred, len(e.atom.args)) != len(e.atom.args):
                return False
    return True


def random_stream(rng, max_ticks: int = 8):
    """Canonical tick stream with at most ``max_ticks`` ticks."""
    budget = rng.randint(2, max_ticks)
    signals, t, used = [], 0, 1
    while used < budget:
        if rng.random() < 0.5:
            t += 1
        else:
            pred = rng.choice(list(EXT))
            a = Atom(pred, (rng.choice(CONSTS[:2]),) if EXT[pred] else ())
            if (t, a) in {(u, b) for u, b in signals}:
                continue
            signals.append((t, a))
        used += 1
    return tick_stream_from_signals(signals, until=t)
