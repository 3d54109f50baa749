"""Benchmark workloads: a cache-policy selector and a content retrieval
network, each with a seeded signal generator.

A schedule is a list indexed by time point; entry ``t`` holds the signal
atoms arriving at ``t`` in arrival order.
"""
from __future__ import annotations

import random

from .model import Atom, LarsProgram
from .parser import parse_program

_A_RULES = """
@T high :- value(V), [{n} {w}] @T alpha(V), 18 <= V.
@T mid :- value(V), [{n} {w}] @T alpha(V), 12 <= V, V < 18.
@T low :- value(V), [{n} {w}] @T alpha(V), V < 12.
lfu :- [{n} t] [] high.
lru :- [{n} t] [] mid.
fifo :- [{n} t] [] low.
done :- lfu.
done :- lru.
done :- fifo.
random :- not done.
"""

_B_RULES = """
need(I,N) :- item(I), node(N), [{n} t] <> req(I,N).
avail(I,N) :- item(I), node(N), [{n} t] <> cache(I,N).
get(I,N,M) :- source(I,N,M), not nGet(I,N,M).
nGet(I,N,M) :- node(M), get(I,N,M2), M != M2.
nGet(I,N,M) :- source(I,N,M), source(I,N,M2), M != M2, qual(M,L), qual(M2,L2), L < L2.
source(I,N,M) :- need(I,N), not avail(I,N), avail(I,M), reach(N,M).
reach(N,M) :- conn(N,M).
reach(N,M) :- reach(N,M2), conn(M2,M), M2 != M, N != M.
conn(N,M) :- edge(N,M), not [{n} t] [] down(M).
qual(N,L) :- node(N), lev(L), lev(L2), L2 < L, [{n} t] <> qLev(N,L), not [{n} t] <> qLev(N,L2).
"""

ABILENE = [(i, i + 1) for i in range(10)] + [(0, 10), (1, 10), (2, 8), (3, 7)]
NODES = list(range(11))
ITEMS = ["i1", "i2"]
LEVELS = [0, 1, 2]

# value bands per mode, read off the thresholds of the first three rules
BANDS = {"high": (18, 30), "mid": (12, 17), "low": (0, 11)}


def scenario_a_program(setup: str, n: int) -> LarsProgram:
    if setup not in ("A1", "A2"):
        raise ValueError("setup must be A1 or A2")
    text = "#ext alpha/1.\n#background value(0..30).\n" + _A_RULES.format(n=n, w="t" if setup == "A1" else "#")
    return parse_program(text)


def scenario_b_program(n: int) -> LarsProgram:
    facts = ["node(0..10)", "item(i1)", "item(i2)", "lev(0..2)"]
    for x, y in ABILENE:
        facts += [f"edge({x},{y})", f"edge({y},{x})"]
    text = "#ext req/2, cache/2, down/1, qLev/2.\n"
    text += "".join(f"#background {f}.\n" for f in facts)
    return parse_program(text + _B_RULES.format(n=n))


def generate_scenario_a(setup: str, n: int, tp: int, seed: int):
    """Program and schedule: one ``alpha(V)`` per time point, modes held 2n points."""
    if n < 1 or tp < 1:
        raise ValueError("n and tp must be positive")
    p = scenario_a_program(setup, n)
    rng = random.Random(seed)
    schedule = []
    mode, left = None, 0
    for _ in range(tp):
        if left == 0:
            mode, left = rng.choice(sorted(BANDS)), 2 * n
        lo, hi = BANDS[mode]
        schedule.append([Atom("alpha", (rng.randint(lo, hi),))])
        left -= 1
    return p, schedule


def generate_scenario_b(setup: str, n: int, tp: int, seed: int):
    if setup not in ("B1", "B2"):
        raise ValueError("setup must be B1 or B2")
    if n < 1 or tp < 1:
        raise ValueError("n and tp must be positive")
    p = scenario_b_program(n)
    rng = random.Random(seed)
    level = {v: rng.choice(LEVELS) for v in NODES}
    schedule = []
    down_node, down_left = None, 0
    for t in range(tp):
        sig = []
        if setup == "B1":
            for i in ITEMS:
                if rng.random() < 0.1:
                    sig.append(Atom("req", (i, rng.choice(NODES))))
            if rng.random() < 0.1:
                sig.append(Atom("cache", (rng.choice(ITEMS), rng.choice(NODES))))
            if rng.random() < 0.1:
                sig.append(Atom("down", (rng.choice(NODES),)))
            for v in NODES:
                # levels are reported initially and whenever they change
                if t == 0:
                    sig.append(Atom("qLev", (v, level[v])))
                elif rng.random() < min(1.0, 3 / n):
                    level[v] = rng.choice(LEVELS)
                    sig.append(Atom("qLev", (v, level[v])))
        else:
            for i in ITEMS:
                if rng.random() < 0.5:
                    for v in rng.sample(NODES, rng.randint(1, 3)):
                        sig.append(Atom("req", (i, v)))
            for _ in range(rng.randint(1, 3)):
                sig.append(Atom("cache", (rng.choice(ITEMS), rng.choice(NODES))))
            for v in NODES:
                if rng.random() < 0.25:
                    if rng.random() >= 0.9:
                        level[v] = rng.choice(LEVELS)
                    sig.append(Atom("qLev", (v, level[v])))
            if down_left == 0 and rng.random() < 1 / n:
                down_node, down_left = rng.choice(NODES), int(1.5 * n)
            if down_left > 0:
                sig.append(Atom("down", (down_node,)))
                down_left -= 1
        schedule.append(list(dict.fromkeys(sig)))
    return p, schedule


def generate(scenario: str, setup: str, n: int, tp: int, seed: int):
    if scenario == "A" or setup in ("A1", "A2"):
        return generate_scenario_a(setup, n, tp, seed)
    if scenario == "B" or setup in ("B1", "B2"):
        return generate_scenario_b(setup, n, tp, seed)
    raise ValueError(f"unknown scenario {scenario!r}")
