"""Normal logic programs: rules, stratification, least models and answer sets.

The solver is deliberately small.  Stratified programs take a
per-stratum fixpoint; everything else goes through a deterministic
backtracking search with forward, backward and unfounded-set
propagation, and every model it returns is re-checked against the
reduct.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, NamedTuple

import networkx as nx

from .model import Arith, Atom, Comparison, Var


class AspRule(NamedTuple):
    head: Atom
    pos: tuple = ()
    neg: tuple = ()
    guards: tuple = ()

    def is_ground(self) -> bool:
        return (
            self.head.is_ground()
            and all(a.is_ground() for a in self.pos)
            and all(a.is_ground() for a in self.neg)
            and not self.guards
        )

    def variables(self) -> set:
        out = set(self.head.variables())
        for a in self.pos + self.neg:
            out |= a.variables()
        for g in self.guards:
            out |= g.variables()
        return out

    def is_safe(self) -> bool:
        """Every variable is bound by the positive body or an ``=`` guard chain."""
        bound = set()
        for a in self.pos:
            bound |= a.variables()
        changed = True
        while changed:
            changed = False
            for g in self.guards:
                if g.op != "=":
                    continue
                lv, rv = _side_vars(g.left), _side_vars(g.right)
                if lv <= bound and not rv <= bound and isinstance(g.right, Var):
                    bound |= rv
                    changed = True
                elif rv <= bound and not lv <= bound and isinstance(g.left, Var):
                    bound |= lv
                    changed = True
        return self.variables() <= bound

    def __str__(self):
        body = [str(a) for a in self.pos]
        body += [f"not {a}" for a in self.neg]
        body += [str(g) for g in self.guards]
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(body)}."

    __repr__ = __str__


def _side_vars(side) -> set:
    base = side.base if isinstance(side, Arith) else side
    return {base} if isinstance(base, Var) else set()


def fact(a: Atom) -> AspRule:
    return AspRule(a)


def dump(rules: Iterable[AspRule]) -> str:
    """One rule per line, in the given order."""
    return "\n".join(str(r) for r in rules)


class SolverBudgetExceeded(RuntimeError):
    pass


# --- guards -----------------------------------------------------------------


def _order_key(v):
    # numbers sort before symbols, as in common ASP systems
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


def term_value(side, binding):
    """Value of a guard side under ``binding``; None if unbound."""
    if isinstance(side, Arith):
        base = binding.get(side.base) if isinstance(side.base, Var) else side.base
        if base is None or not isinstance(base, int):
            return None
        return base + side.offset
    if isinstance(side, Var):
        return binding.get(side)
    return side


def compare(op: str, x, y) -> bool:
    if op == "=":
        return x == y
    if op == "!=":
        return x != y
    kx, ky = _order_key(x), _order_key(y)
    if op == "<":
        return kx < ky
    if op == "<=":
        return kx <= ky
    if op == ">":
        return kx > ky
    if op == ">=":
        return kx >= ky
    raise ValueError(f"unknown comparison {op!r}")


def eval_guard(g: Comparison, binding: dict):
    """True/False when decidable, or a ``(var, value)`` assignment for ``=``.

    Returns None when the guard cannot be evaluated yet.
    """
    x, y = term_value(g.left, binding), term_value(g.right, binding)
    if x is not None and y is not None:
        return compare(g.op, x, y)
    if g.op == "=":
        if x is None and y is not None and isinstance(g.left, Var):
            return (g.left, y)
        if y is None and x is not None and isinstance(g.right, Var):
            return (g.right, x)
        if x is None and y is not None and isinstance(g.left, Arith) and isinstance(g.left.base, Var):
            if isinstance(y, int):
                return (g.left.base, y - g.left.offset)
            return False
        if y is None and x is not None and isinstance(g.right, Arith) and isinstance(g.right.base, Var):
            if isinstance(x, int):
                return (g.right.base, x - g.right.offset)
            return False
    return None


# --- ground programs ----------------------------------------------------------


class GroundProgram:
    """Ground rules without guards, deduplicated, in first-seen order."""

    def __init__(self, rules: Iterable[AspRule] = ()):
        seen = dict.fromkeys(rules)
        for r in seen:
            if r.guards:
                raise ValueError(f"guards must be resolved before solving: {r}")
        self.rules = tuple(seen)

    def universe(self) -> set:
        out = set()
        for r in self.rules:
            out.add(r.head)
            out.update(r.pos)
            out.update(r.neg)
        return out

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def _as_program(p) -> GroundProgram:
    return p if isinstance(p, GroundProgram) else GroundProgram(p)


class NonStratified(NamedTuple):
    cycle: frozenset  # predicates on a cycle through negation


def stratify(p) -> dict | NonStratified:
    """Predicate-level strata, or the offending component.

    Only predicates matter, so non-ground rules are accepted too.
    """
    rules = p.rules if isinstance(p, GroundProgram) else list(p)
    g = nx.DiGraph()
    neg_edges = set()
    for r in rules:
        h = r.head.pred
        g.add_node(h)
        for a in r.pos:
            g.add_edge(a.pred, h)
        for a in r.neg:
            g.add_edge(a.pred, h)
            neg_edges.add((a.pred, h))
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    for u, v in neg_edges:
        if members[u] == members[v]:
            comp = members[u]
            return NonStratified(frozenset(cond.nodes[comp]["members"]))
    level = {}
    for c in nx.topological_sort(cond):
        s = 0
        for pc in cond.predecessors(c):
            s = max(s, level[pc])
        # a negative edge into the component lifts it strictly
        for pred in cond.nodes[c]["members"]:
            for q in g.predecessors(pred):
                if (q, pred) in neg_edges:
                    s = max(s, level[members[q]] + 1)
        level[c] = s
    return {pred: level[members[pred]] for pred in g.nodes}


def least_model_stratified(p, strata: dict) -> frozenset:
    """Iterated fixpoint, one stratum after another."""
    p = _as_program(p)
    by_level = defaultdict(list)
    for r in p.rules:
        by_level[strata[r.head.pred]].append(r)
    model = set()
    for lvl in sorted(by_level):
        _fixpoint(by_level[lvl], model)
    return frozenset(model)


def _fixpoint(rules, model: set) -> None:
    """Dowling-Gallier style closure; negative atoms are already decided."""
    waiting = defaultdict(list)
    missing = {}
    queue = []
    for i, r in enumerate(rules):
        if any(a in model for a in r.neg):
            continue
        need = [a for a in r.pos if a not in model]
        if not need:
            queue.append(r.head)
            continue
        missing[i] = len(set(need))
        for a in set(need):
            waiting[a].append(i)
    while queue:
        a = queue.pop()
        if a in model:
            continue
        model.add(a)
        for i in waiting.pop(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(rules[i].head)


def least_model(rules) -> frozenset:
    """Least model of a positive program (negative bodies ignored)."""
    model = set()
    _fixpoint([r._replace(neg=()) for r in rules], model)
    return frozenset(model)


def reduct(p, m) -> list:
    m = set(m)
    return [AspRule(r.head, r.pos) for r in _as_program(p).rules if not any(a in m for a in r.neg)]


def is_answer_set(p, m) -> bool:
    m = frozenset(m)
    return least_model(reduct(p, m)) == m


# --- search -------------------------------------------------------------------


class _Compiled:
    """Integer view of a ground program for the search."""

    def __init__(self, p: GroundProgram, order=None):
        atoms = sorted(p.universe(), key=str) if order is None else list(order)
        self.atoms = atoms
        self.id = {a: i for i, a in enumerate(atoms)}
        self.head = []
        self.pos = []
        self.neg = []
        self.rules_of = [[] for _ in atoms]
        self.occ = [[] for _ in atoms]
        for j, r in enumerate(p.rules):
            h = self.id[r.head]
            ps = tuple(self.id[a] for a in r.pos)
            ns = tuple(self.id[a] for a in r.neg)
            self.head.append(h)
            self.pos.append(ps)
            self.neg.append(ns)
            self.rules_of[h].append(j)
            for a in set(ps + ns):
                self.occ[a].append(j)


class Search:
    """Backtracking answer-set search over a compiled program.

    ``fixed`` pins atoms to truth values up front (used by the truth
    maintenance network for atoms outside the region being relabelled).
    ``prefer`` gives the value tried first for each atom (default True).
    """

    def __init__(self, compiled: _Compiled, budget: int = 10**6, prefer=None):
        self.c = compiled
        self.budget = budget
        self.steps = 0
        self.prefer = prefer or {}

    def _tick(self, n=1):
        self.steps += n
        if self.steps > self.budget:
            raise SolverBudgetExceeded(f"search budget of {self.budget} steps exceeded")

    def _blocked(self, val, j) -> bool:
        return any(val[a] is False for a in self.c.pos[j]) or any(val[a] is True for a in self.c.neg[j])

    def _applicable(self, val, j) -> bool:
        return all(val[a] is True for a in self.c.pos[j]) and all(val[a] is False for a in self.c.neg[j])

    def propagate(self, val, queue) -> bool:
        """Extend ``val`` in place; False on conflict."""
        c = self.c
        while True:
            while queue:
                a = queue.pop()
                self._tick()
                todo = set(c.occ[a])
                todo.update(c.rules_of[a])
                todo.add(-1 - a)  # marker: re-check head a itself
                for j in c.occ[a]:
                    todo.add(-1 - c.head[j])
                for j in todo:
                    if j >= 0:
                        if self._applicable(val, j):
                            h = c.head[j]
                            if val[h] is False:
                                return False
                            if val[h] is None:
                                val[h] = True
                                queue.append(h)
                        continue
                    h = -1 - j
                    if not self._check_head(val, h, queue):
                        return False
            if not self._unfounded(val, queue):
                return False
            if not queue:
                return True

    def _check_head(self, val, h, queue) -> bool:
        c = self.c
        live = []
        for j in c.rules_of[h]:
            if not self._blocked(val, j):
                live.append(j)
                if len(live) > 1:
                    break
        if not live:
            if val[h] is True:
                return False
            if val[h] is None:
                val[h] = False
                queue.append(h)
            return True
        if val[h] is True and len(live) == 1:
            j = live[0]
            for a in c.pos[j]:
                if val[a] is None:
                    val[a] = True
                    queue.append(a)
            for a in c.neg[j]:
                if val[a] is None:
                    val[a] = False
                    queue.append(a)
        return True

    def _unfounded(self, val, queue) -> bool:
        """Falsify atoms that cannot be derived from non-blocked rules."""
        c = self.c
        n = len(c.atoms)
        support = [False] * n
        missing = [0] * len(c.head)
        waiting = defaultdict(list)
        stack = []
        for j in range(len(c.head)):
            if self._blocked(val, j):
                missing[j] = -1
                continue
            ps = set(c.pos[j])
            missing[j] = len(ps)
            if not ps:
                stack.append(c.head[j])
            for a in ps:
                waiting[a].append(j)
        self._tick(len(c.head) // 64 + 1)
        while stack:
            a = stack.pop()
            if support[a]:
                continue
            support[a] = True
            for j in waiting.get(a, ()):
                missing[j] -= 1
                if missing[j] == 0:
                    stack.append(c.head[j])
        for a in range(n):
            if not support[a]:
                if val[a] is True:
                    return False
                if val[a] is None:
                    val[a] = False
                    queue.append(a)
        return True

    def solve(self, val, limit=None):
        """Yield total assignments that are answer sets, in deterministic order."""
        queue = [a for a in range(len(val)) if val[a] is not None]
        queue += [a for a in range(len(val)) if val[a] is None]
        if not self.propagate(val, queue):
            return
        yield from self._branch(val)

    def _branch(self, val):
        free = next((a for a in range(len(val)) if val[a] is None), None)
        if free is None:
            if self._verify(val):
                yield val
            return
        first = self.prefer.get(free, True)
        for choice in (first, not first):
            trial = list(val)
            trial[free] = choice
            if self.propagate(trial, [free]):
                yield from self._branch(trial)

    def _verify(self, val) -> bool:
        c = self.c
        model = {a for a in range(len(val)) if val[a]}
        derived = set()
        changed = True
        while changed:
            changed = False
            for j, h in enumerate(c.head):
                if h in derived:
                    continue
                if all(a in derived for a in c.pos[j]) and not any(a in model for a in c.neg[j]):
                    derived.add(h)
                    changed = True
        return derived == model


def answer_sets(p, limit: int | None = None, budget: int = 10**6) -> list:
    """All answer sets (up to ``limit``) in a fixed deterministic order."""
    p = _as_program(p)
    strata = stratify(p)
    if not isinstance(strata, NonStratified):
        return [least_model_stratified(p, strata)]
    c = _Compiled(p)
    search = Search(c, budget=budget)
    out = []
    for val in search.solve([None] * len(c.atoms)):
        out.append(frozenset(c.atoms[a] for a in range(len(val)) if val[a]))
        if limit is not None and len(out) >= limit:
            break
    return out


def first_answer_set(p, budget: int = 10**6):
    models = answer_sets(p, limit=1, budget=budget)
    return models[0] if models else None


def answer_sets_bruteforce(p) -> list:
    """Reference enumeration over all subsets of the atom universe."""
    from itertools import combinations

    p = _as_program(p)
    universe = sorted(p.universe(), key=str)
    out = []
    for k in range(len(universe) + 1):
        for subset in combinations(universe, k):
            if is_answer_set(p, subset):
                out.append(frozenset(subset))
    return out
