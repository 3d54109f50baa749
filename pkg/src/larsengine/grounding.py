"""Bottom-up grounding against the set of possibly derivable atoms.

``Grounder`` keeps an index of atoms that occur as heads of live ground
rules and instantiates non-ground rules by joining their positive bodies
against it.  Rules can be added and removed; each newly derivable atom
triggers a semi-naive re-match of the rules watching its predicate, so
the maintained grounding always equals a fresh grounding of the live
rules.
"""
from __future__ import annotations

from collections import Counter, defaultdict

from .asp import AspRule, eval_guard
from .model import Atom, Var


class AtomIndex:
    def __init__(self):
        # dicts rather than sets: iteration order must not depend on hashing
        self.by_pred = defaultdict(dict)
        self.by_arg = defaultdict(dict)

    def add(self, a: Atom) -> None:
        self.by_pred[a.pred][a] = None
        for i, v in enumerate(a.args):
            self.by_arg[(a.pred, i, v)][a] = None

    def remove(self, a: Atom) -> None:
        self.by_pred[a.pred].pop(a, None)
        for i, v in enumerate(a.args):
            key = (a.pred, i, v)
            s = self.by_arg.get(key)
            if s is not None:
                s.pop(a, None)
                if not s:
                    del self.by_arg[key]

    def __contains__(self, a: Atom) -> bool:
        return a in self.by_pred.get(a.pred, ())

    def candidates(self, pattern: Atom, binding: dict):
        best = None
        for i, t in enumerate(pattern.args):
            v = binding.get(t, t) if isinstance(t, Var) else t
            if isinstance(v, Var):
                continue
            s = self.by_arg.get((pattern.pred, i, v))
            if s is None:
                return ()
            if best is None or len(s) < len(best):
                best = s
        if best is None:
            best = self.by_pred.get(pattern.pred, ())
        return tuple(best)


def unify(pattern: Atom, a: Atom, binding: dict):
    if len(pattern.args) != len(a.args):
        return None
    out = binding
    copied = False
    for t, v in zip(pattern.args, a.args):
        if isinstance(t, Var):
            cur = out.get(t)
            if cur is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[t] = v
            elif cur != v:
                return None
        elif t != v:
            return None
    return out


def substitute(a: Atom, binding: dict) -> Atom:
    if not a.args:
        return a
    return Atom(a.pred, tuple(binding.get(t, t) if isinstance(t, Var) else t for t in a.args))


class _Plan:
    """Join order for a rule, optionally starting from a fixed literal."""

    def __init__(self, rule: AspRule, first: int | None):
        steps = []
        bound = set()
        lits = list(range(len(rule.pos)))
        guards = list(range(len(rule.guards)))
        if first is not None:
            steps.append(("atom", first))
            bound |= rule.pos[first].variables()
            lits.remove(first)
        while lits or guards:
            progressed = True
            while progressed:
                progressed = False
                for gi in list(guards):
                    gv = rule.guards[gi].variables()
                    unbound = gv - bound
                    g = rule.guards[gi]
                    if not unbound or (len(unbound) == 1 and g.op == "=" and _assignable(g, bound)):
                        steps.append(("guard", gi))
                        bound |= gv
                        guards.remove(gi)
                        progressed = True
            if not lits:
                if guards:
                    # unsafe guard; evaluate anyway so it fails rather than loops
                    steps.extend(("guard", gi) for gi in guards)
                    guards = []
                break
            best = max(
                lits,
                key=lambda i: (
                    len(rule.pos[i].variables() & bound) - len(rule.pos[i].variables() - bound),
                    -i,
                ),
            )
            steps.append(("atom", best))
            bound |= rule.pos[best].variables()
            lits.remove(best)
        self.steps = steps


def _assignable(g, bound) -> bool:
    from .model import Arith

    for side, other in ((g.left, g.right), (g.right, g.left)):
        base = side.base if isinstance(side, Arith) else side
        if isinstance(base, Var) and base not in bound:
            obase = other.base if isinstance(other, Arith) else other
            if not isinstance(obase, Var) or obase in bound:
                return True
    return False


def _watch_key(pattern: Atom):
    """Bucket for a watched body literal: its last constant argument, if any."""
    for i in range(len(pattern.args) - 1, -1, -1):
        if not isinstance(pattern.args[i], Var):
            return (pattern.pred, i, pattern.args[i])
    return (pattern.pred,)


def _lookup_keys(a: Atom):
    yield (a.pred,)
    for i, v in enumerate(a.args):
        yield (a.pred, i, v)


class _Entry:
    __slots__ = ("rule", "instances", "plans")

    def __init__(self, rule: AspRule):
        self.rule = rule
        self.instances = {}
        self.plans = {}

    def plan(self, first):
        p = self.plans.get(first)
        if p is None:
            p = self.plans[first] = _Plan(self.rule, first)
        return p


class Grounder:
    """Maintains the grounding of a changing set of (non-ground) rules."""

    def __init__(self):
        self.index = AtomIndex()
        self.head_count = Counter()
        self.entries = {}
        self.watch = defaultdict(dict)
        self.live = Counter()  # ground rule -> number of source rules producing it

    # -- public API ------------------------------------------------------------

    def add_rules(self, rules) -> list:
        """Register rules; returns ground rules that became live."""
        added = []
        delta = []
        for r in rules:
            if r in self.entries:
                continue
            e = _Entry(r)
            self.entries[r] = e
            for i, a in enumerate(r.pos):
                self.watch[_watch_key(a)][(e, i)] = None
            for inst in self._match(e, None, None):
                self._add_instance(e, inst, added, delta)
        self._propagate(delta, added)
        return added

    def remove_rules(self, rules) -> list:
        """Unregister rules; returns ground rules that are no longer live."""
        removed = []
        for r in rules:
            e = self.entries.pop(r, None)
            if e is None:
                continue
            for i, a in enumerate(r.pos):
                key = _watch_key(a)
                bucket = self.watch[key]
                bucket.pop((e, i), None)
                if not bucket:
                    del self.watch[key]
            for inst in e.instances:
                self.live[inst] -= 1
                if self.live[inst] == 0:
                    del self.live[inst]
                    removed.append(inst)
                    h = inst.head
                    self.head_count[h] -= 1
                    if self.head_count[h] == 0:
                        del self.head_count[h]
                        self.index.remove(h)
        return removed

    def ground_rules(self) -> list:
        return list(self.live)

    def instances_of(self, rule: AspRule) -> set:
        e = self.entries.get(rule)
        return set(e.instances) if e else set()

    def possible(self, a: Atom) -> bool:
        return a in self.index

    # -- internals ---------------------------------------------------------------

    def _add_instance(self, e: _Entry, inst: AspRule, added, delta) -> None:
        if inst in e.instances:
            return
        e.instances[inst] = None
        self.live[inst] += 1
        if self.live[inst] == 1:
            added.append(inst)
            h = inst.head
            self.head_count[h] += 1
            if self.head_count[h] == 1:
                self.index.add(h)
                delta.append(h)

    def _propagate(self, delta, added) -> None:
        while delta:
            a = delta.pop()
            if a not in self.index:
                continue
            for key in _lookup_keys(a):
                for e, i in list(self.watch.get(key, ())):
                    if e.rule not in self.entries:
                        continue
                    for inst in self._match(e, i, a):
                        self._add_instance(e, inst, added, delta)

    def _match(self, e: _Entry, first, first_atom):
        r = e.rule
        plan = e.plan(first)
        out = []
        binding = {}
        if first is not None:
            binding = unify(r.pos[first], first_atom, {})
            if binding is None:
                return out
        self._join(r, plan.steps, 1 if first is not None else 0, binding, out)
        return out

    def _join(self, r: AspRule, steps, k, binding, out) -> None:
        if k == len(steps):
            inst = AspRule(
                substitute(r.head, binding),
                tuple(substitute(a, binding) for a in r.pos),
                tuple(substitute(a, binding) for a in r.neg),
            )
            if inst.head.is_ground() and all(a.is_ground() for a in inst.neg):
                out.append(inst)
            return
        kind, i = steps[k]
        if kind == "guard":
            res = eval_guard(r.guards[i], binding)
            if res is True:
                self._join(r, steps, k + 1, binding, out)
            elif isinstance(res, tuple):
                b = dict(binding)
                b[res[0]] = res[1]
                self._join(r, steps, k + 1, b, out)
            return
        pat = r.pos[i]
        for a in self.index.candidates(pat, binding):
            b = unify(pat, a, binding)
            if b is not None:
                self._join(r, steps, k + 1, b, out)


def ground_program(rules) -> list:
    """One-off grounding of ``rules`` (facts included), in derivation order."""
    g = Grounder()
    return g.add_rules(rules)
