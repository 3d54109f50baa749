"""Stream reasoning engine: append signals, evaluate models.

Two strategies share one interface.  ``oneshot`` keeps the stream and
grounds and solves the static encoding whenever a model is needed.
``incremental`` advances the incremental encoding tick by tick and hands
the changed ground rules to a truth maintenance network.

In ``push`` mode a model is prepared after every ``append``; in ``pull``
mode work is deferred until ``evaluate``.
"""
from __future__ import annotations

import time as _time
from dataclasses import dataclass

from .asp import SolverBudgetExceeded, answer_sets, is_answer_set
from .grounding import ground_program
from .incremental import IncrementalState
from .jtms import NoModel, TmsNetwork, Unknown
from .model import LarsProgram, Tick, _raw_tick_stream, validate_program
from .parser import format_model
from .static import check_names, encode_stream, lars_to_asp, strip_model

STRATEGIES = ("oneshot", "incremental")
MODES = ("push", "pull")


class ProgramError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"rule {v.rule}: {v.message}" for v in self.violations))


@dataclass
class EngineConfig:
    program: LarsProgram
    strategy: str = "incremental"
    mode: str = "push"
    budget: int | None = None
    gc_cutoff: bool = False
    strict_guards: bool = False
    verify: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class EngineResult:
    time: int
    status: str  # "model" | "no-model" | "unknown"
    atoms: frozenset = frozenset()
    reason: str = ""

    @property
    def is_model(self) -> bool:
        return self.status == "model"

    def line(self) -> str:
        if self.status == "model":
            return format_model(self.time, self.atoms)
        return format_model(self.time, None, unknown=self.status == "unknown")

    def __str__(self):
        return self.line()


class Engine:
    def __init__(self, config: EngineConfig):
        start = _time.perf_counter()
        p = config.program
        violations = validate_program(p)
        if violations:
            raise ProgramError(violations)
        check_names(p)
        self.config = config
        self.program = p
        self.tick = Tick(0, 0)
        self.ticks = [self.tick]
        self.eval = {}
        self.result = None
        self._stale = True
        if config.strategy == "incremental":
            self.state = IncrementalState(p, strict_guards=config.strict_guards, gc_cutoff=config.gc_cutoff)
            self.tms = TmsNetwork(budget=config.budget)
            self._pending_add = dict.fromkeys(self.state.initial_ground)
            self._pending_remove = {}
            self._queue(self.state.increment(0, 0))
            if config.mode == "push":
                self._prepare()
        else:
            self._prepared_at = None
            if config.mode == "push":
                self._prepare()
        self.t_init = _time.perf_counter() - start

    # -- public API ------------------------------------------------------------------

    @property
    def time(self) -> int:
        return int(self.tick.time)

    def append(self, time: int, atoms=()) -> None:
        """Advance to ``time`` and add ``atoms`` there, in arrival order."""
        if time < self.time:
            raise ValueError(f"time {time} precedes current time {self.time}")
        ext = self.program.extensional
        for a in atoms:
            if not a.is_ground():
                raise ValueError(f"signal {a} is not ground")
            if ext and a.pred not in ext:
                raise ValueError(f"signal predicate {a.pred} is not extensional")
        moved = self._advance(time)
        seen = {a for k, a in self.eval.items() if k.time == time}
        for a in atoms:
            if a in seen:
                continue
            seen.add(a)
            self._step(self.tick.count_increment(), a)
            moved = True
        if moved and self.config.mode == "push":
            self._prepare()

    def evaluate(self, time: int | None = None) -> EngineResult:
        if time is None:
            time = self.time
        if time < self.time:
            raise ValueError(f"time {time} precedes current time {self.time}")
        self._advance(time)
        if self._stale or self.result is None:
            self._prepare()
        return self.result

    def stream(self):
        return _raw_tick_stream(self.ticks, self.eval)

    # -- internals ------------------------------------------------------------------------

    def _advance(self, time: int) -> bool:
        moved = False
        while self.time < time:
            self._step(self.tick.time_increment(), None)
            moved = True
        return moved

    def _step(self, k: Tick, a) -> None:
        self.tick = k
        self.ticks.append(k)
        if a is not None:
            self.eval[k] = a
        self._stale = True
        if self.config.strategy == "incremental":
            self._queue(self.state.increment(int(k.time), int(k.count), (a,) if a is not None else ()))

    def _queue(self, delta) -> None:
        add, rem = self._pending_add, self._pending_remove
        for r in delta.g_minus:
            if r in add:
                del add[r]
            else:
                rem[r] = None
        for r in delta.g_plus:
            if r in rem:
                del rem[r]
            else:
                add[r] = None
        if self.config.mode == "push":
            # keep the network in step with every tick
            self._apply_pending()

    def _apply_pending(self) -> None:
        add, rem = list(self._pending_add), list(self._pending_remove)
        self._pending_add, self._pending_remove = {}, {}
        try:
            self.tms.update(add=add, remove=rem)
            self._tms_status = ("model", "")
        except NoModel as exc:
            self._tms_status = ("no-model", str(exc))
        except Unknown as exc:
            self._tms_status = ("unknown", str(exc))

    def _prepare(self) -> None:
        t = self.time
        if self.config.strategy == "incremental":
            self._apply_pending()
            status, reason = self._tms_status
            if status == "model":
                m = self.tms.current_model()
                if self.config.verify:
                    assert is_answer_set(self.tms.program(), m), f"network model at {t} is not an answer set"
                self.result = EngineResult(t, "model", strip_model(m, self.program))
            else:
                self.result = EngineResult(t, status, frozenset(), reason)
        else:
            self.result = self._solve_oneshot(t)
        self._stale = False

    def _oneshot_stream(self):
        ticks, ev = self.ticks, self.eval
        if self.config.gc_cutoff:
            ticks = _cut(self.program, ticks)
            ev = {k: a for k, a in ev.items() if k in set(ticks)}
        return _raw_tick_stream(ticks, ev)

    def _solve_oneshot(self, t: int) -> EngineResult:
        rules = lars_to_asp(self.program, t) + encode_stream(self._oneshot_stream(), self.program.extensional or None)
        ground = ground_program(rules)
        budget = self.config.budget or 10**6
        try:
            models = answer_sets(ground, limit=1, budget=budget)
        except SolverBudgetExceeded as exc:
            return EngineResult(t, "unknown", frozenset(), str(exc))
        if not models:
            return EngineResult(t, "no-model")
        if self.config.verify:
            assert is_answer_set(ground, models[0]), f"solver model at {t} is not an answer set"
        return EngineResult(t, "model", strip_model(models[0], self.program))


def _cut(p: LarsProgram, ticks) -> list:
    """Drop leading ticks at time points that no window reaches."""
    from .incremental import window_extent
    from .model import INF

    nt, nc = window_extent(p)
    if nt == INF:
        return list(ticks)
    last = ticks[-1]
    bound = last.time - (nt or 0)
    if nc is not None:
        lo = last.count - nc + 1
        start = next((k.time for k in ticks if k.count >= lo), None)
        if start is None or ticks[0].count >= lo:
            return list(ticks)
        bound = min(bound, start)
    return [k for k in ticks if k.time >= bound]


def create(config: EngineConfig) -> Engine:
    return Engine(config)
