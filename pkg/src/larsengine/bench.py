"""Timing harness: initialisation time, mean time per tick, total time."""
from __future__ import annotations

import csv
import time
from dataclasses import asdict, dataclass

from .asp import NonStratified, stratify
from .engine import Engine, EngineConfig
from .scenarios import generate
from .static import lars_to_asp

CSV_FIELDS = ("setup", "strategy", "n", "tp", "t_init", "t_tick", "t_total")


@dataclass(frozen=True)
class BenchReport:
    setup: str
    strategy: str
    n: int
    tp: int
    seed: int
    t_init: float
    t_tick: float
    t_total: float
    ticks: int
    runs: int
    flagged: bool = False  # some evaluation ended without a model decision

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in CSV_FIELDS}


def run_schedule(program, schedule, strategy: str, mode: str = "push", budget=None):
    """One timed run; returns (t_init, t_total, ticks, results)."""
    start = time.perf_counter()
    eng = Engine(EngineConfig(program, strategy, mode, budget=budget))
    t_init = eng.t_init
    results = []
    for t, atoms in enumerate(schedule):
        eng.append(t, atoms)
        results.append(eng.evaluate(t))
    total = time.perf_counter() - start
    ticks = len(eng.ticks) - 1
    return t_init, total, ticks, results


def check_stratified(program) -> None:
    s = stratify(lars_to_asp(program, 0))
    if isinstance(s, NonStratified):
        raise ValueError(f"encoding is not stratified: cycle through {sorted(s.cycle)}")


def benchmark(setup: str, strategy: str, n: int, tp: int, seed: int = 1, runs: int = 5, warmup: int = 2, budget=None) -> BenchReport:
    """Average of ``runs`` recorded runs after ``warmup`` unrecorded ones, push mode."""
    if runs < 1:
        raise ValueError("at least one recorded run is required")
    if warmup < 0:
        raise ValueError("warmup must be nonnegative")
    program, schedule = generate(setup[0], setup, n, tp, seed)
    if setup.startswith("A"):
        check_stratified(program)
    for _ in range(warmup):
        run_schedule(program, schedule, strategy, budget=budget)
    inits, totals, flagged, ticks = [], [], False, 0
    for _ in range(runs):
        t_init, total, ticks, results = run_schedule(program, schedule, strategy, budget=budget)
        inits.append(t_init)
        totals.append(total)
        flagged = flagged or any(r.status == "unknown" for r in results)
    t_init = sum(inits) / runs
    t_total = sum(totals) / runs
    t_tick = (t_total - t_init) / max(ticks, 1)
    return BenchReport(setup, strategy, n, tp, seed, t_init, t_tick, t_total, ticks, runs, flagged)


def write_csv(reports, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    w.writeheader()
    for r in reports:
        row = r.row()
        for k in ("t_init", "t_tick", "t_total"):
            row[k] = f"{row[k]:.6f}"
        w.writerow(row)
