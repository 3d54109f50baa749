"""Justification-based truth maintenance over ground normal rules.

Nodes are ground atoms labelled in or out; justifications are the ground
rules with the node as head, and every in node records the justification
that supports it.  After rules are added or removed, only nodes whose
label may change are relabelled: nodes that lost their support, out
nodes that gained a justification, and, transitively, out nodes with a
justification mentioning such a node and in nodes whose support does.
All other nodes keep a valid, well-founded support.  Within the region
the search prefers each node's previous label, so models are kept by
inertia where possible.

If the region cannot be relabelled consistently, the whole network is
searched once more; if that fails too there is no model.  A step budget
guards against odd loops that would otherwise keep the search busy.
"""
from __future__ import annotations

from collections import defaultdict

from .asp import GroundProgram, SolverBudgetExceeded, Search, _Compiled
from .model import Atom


class TmsError(RuntimeError):
    def __init__(self, message: str, nodes=()):
        super().__init__(message)
        self.nodes = frozenset(nodes)


class NoModel(TmsError):
    """No admissible model exists for the current rules."""


class Unknown(TmsError):
    """The step budget ran out before a model was found."""


class TmsNetwork:
    def __init__(self, budget: int | None = None, min_budget: int = 1000):
        self.rules = {}  # ground rule -> None, insertion ordered
        self.justifications = defaultdict(dict)  # head -> {rule: None}
        self.consumers = defaultdict(dict)  # body atom -> {rule: None}
        self.label = {}  # atom -> bool
        self.support = {}  # in-atom -> supporting rule
        self.budget = budget
        self.min_budget = min_budget
        self.dirty = False
        self.last_steps = 0

    # -- queries ---------------------------------------------------------------------

    def nodes(self) -> list:
        return list(self.label)

    def current_model(self) -> frozenset:
        return frozenset(a for a, v in self.label.items() if v)

    def holds(self, a: Atom) -> bool:
        return self.label.get(a, False)

    def program(self) -> GroundProgram:
        return GroundProgram(self.rules)

    def dump(self) -> str:
        lines = []
        for a in sorted(self.label, key=str):
            if self.label[a]:
                lines.append(f"{a} in  <- {self.support.get(a)}")
            else:
                lines.append(f"{a} out")
        return "\n".join(lines)

    # -- updates ---------------------------------------------------------------------

    def add_rule(self, r) -> frozenset:
        return self.update(add=(r,))

    def remove_rule(self, r) -> frozenset:
        return self.update(remove=(r,))

    def update(self, add=(), remove=()) -> frozenset:
        """Apply rule changes and relabel; returns the new model.

        Raises ``NoModel`` or ``Unknown``; the rules stay applied and the
        next update re-solves the whole network.
        """
        changed = {}
        touched = []
        for r in remove:
            if r in self.rules:
                del self.rules[r]
                self.justifications[r.head].pop(r, None)
                if not self.justifications[r.head]:
                    del self.justifications[r.head]
                for a in r.pos + r.neg:
                    cs = self.consumers.get(a)
                    if cs is not None:
                        cs.pop(r, None)
                        if not cs:
                            del self.consumers[a]
                if self.support.get(r.head) == r:
                    # lost its support; the label must be reconsidered
                    changed[r.head] = None
                touched.append(r.head)
                touched.extend(r.pos + r.neg)
        for r in add:
            if getattr(r, "guards", ()):
                raise ValueError(f"rule {r} still has guards")
            if r in self.rules:
                continue
            self.rules[r] = None
            self.justifications[r.head][r] = None
            for a in r.pos + r.neg:
                self.consumers[a][r] = None
                self.label.setdefault(a, False)
            self.label.setdefault(r.head, False)
            if not self.label[r.head]:
                # an out node may come in; in nodes keep their support
                changed[r.head] = None
        if self.dirty:
            self._solve_global()
        elif changed:
            region = self._affected(changed)
            if not self._solve_region(region):
                self._solve_global()
        self._gc_nodes(touched)
        return self.current_model()

    # -- internals --------------------------------------------------------------------

    def _budget(self, size: int) -> int:
        if self.budget is not None:
            return self.budget
        return max(self.min_budget, 10 * max(size, len(self.label)))

    def _affected(self, changed) -> list:
        """Nodes whose label may change.

        A node depends on a changed node if it is out and one of its
        justifications mentions it, or if it is in and its support does.
        Other nodes keep a valid, well-founded support.
        """
        seen = dict(changed)
        stack = list(changed)
        while stack:
            a = stack.pop()
            for r in self.consumers.get(a, ()):
                h = r.head
                if h in seen:
                    continue
                if not self.label.get(h, False) or self.support.get(h) == r:
                    seen[h] = None
                    stack.append(h)
        return list(seen)

    def _local_program(self, region: set):
        """Rules for region heads with outside literals evaluated away."""
        out = []
        for h in region:
            for r in self.justifications.get(h, ()):
                pos, neg, ok = [], [], True
                for a in r.pos:
                    if a in region:
                        pos.append(a)
                    elif not self.label.get(a, False):
                        ok = False
                        break
                if not ok:
                    continue
                for a in r.neg:
                    if a in region:
                        neg.append(a)
                    elif self.label.get(a, False):
                        ok = False
                        break
                if ok:
                    out.append((r, tuple(pos), tuple(neg)))
        return out

    def _search(self, region: list, local) -> dict | None:
        from .asp import AspRule

        order = sorted(region, key=str)
        prog = GroundProgram(AspRule(r.head, p, n) for r, p, n in local)
        c = _Compiled(prog, order=order)
        prefer = {i: self.label.get(a, False) for i, a in enumerate(order)}
        s = Search(c, budget=self._budget(len(order)), prefer=prefer)
        val = [None] * len(order)
        try:
            for sol in s.solve(val):
                self.last_steps = s.steps
                return {a: bool(sol[i]) for i, a in enumerate(order)}
        except SolverBudgetExceeded as exc:
            self.last_steps = s.steps
            self.dirty = True
            raise Unknown(str(exc), region) from None
        self.last_steps = s.steps
        return None

    def _apply(self, labels: dict, local) -> None:
        self.label.update(labels)
        # well-founded supports, derived bottom-up inside the region
        for a in labels:
            self.support.pop(a, None)
        pending = [(r, p) for r, p, n in local if labels[r.head] and not any(labels[x] for x in n)]
        done = set()
        while pending:
            rest = []
            for r, p in pending:
                if r.head in done:
                    continue
                if all(x in done for x in p):
                    self.support[r.head] = r
                    done.add(r.head)
                else:
                    rest.append((r, p))
            if len(rest) == len(pending):
                break
            pending = rest

    def _solve_region(self, region: list) -> bool:
        rs = set(region)
        local = self._local_program(rs)
        labels = self._search(region, local)
        if labels is None:
            return False
        self._apply(labels, local)
        return True

    def _solve_global(self) -> None:
        region = list(self.label)
        rs = set(region)
        local = self._local_program(rs)
        labels = self._search(region, local)
        if labels is None:
            self.dirty = True
            raise NoModel("no admissible model for the current rules", region)
        self._apply(labels, local)
        self.dirty = False

    def _gc_nodes(self, touched) -> None:
        # nodes no rule mentions any more are dropped (they are out)
        for a in touched:
            if a in self.label and a not in self.justifications and a not in self.consumers:
                del self.label[a]
                self.support.pop(a, None)
