"""Scheduler benchmark: counter-based comparison across problems and seeds.

Rows carry counters only (plus wall time, which is informational). The
ordering checks compare counters of runs that share problem, seed and
rule set, so every comparison is over the same search tree shape.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .core import CSP
from .formats import load_problem, load_table, table_csp
from .search import Propagator, SplitStrategy, compile_propagator, solve

COLUMNS = ("problem", "scheduler", "rules", "seed", "evaluations", "reenqueues", "nodes", "solutions", "ms")
RANDOM_SPLIT = SplitStrategy("random", "bisect", "random")


@dataclass(frozen=True)
class BenchRow:
    problem: str
    scheduler: str
    rules: str
    seed: int
    evaluations: int
    reenqueues: int
    nodes: int
    solutions: int
    ms: float

    @property
    def key(self):
        return (self.problem, self.scheduler, self.rules, self.seed)


@dataclass
class BenchReport:
    rows: list

    def lookup(self) -> dict:
        return {r.key: r for r in self.rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([getattr(r, f.name) if f.name != "ms" else f"{r.ms:.1f}" for f in fields(r)])
        return buf.getvalue()

    def violations(self) -> list:
        """Broken counter orderings, as readable strings."""
        by_key = self.lookup()
        out = []
        chains = [("finetuned", "compound"), ("compound", "generic"), ("improved", "compound")]
        for r in self.rows:
            for lo, hi in chains:
                if r.scheduler != lo:
                    continue
                other = by_key.get((r.problem, hi, r.rules, r.seed))
                if other and r.evaluations > other.evaluations:
                    out.append(
                        f"{lo} <= {hi} evaluations violated on {r.problem} rules={r.rules} seed={r.seed}: "
                        f"{r.evaluations} > {other.evaluations}"
                    )
            if r.rules == "minimized":
                other = by_key.get((r.problem, r.scheduler, "all", r.seed))
                if other and r.evaluations > other.evaluations:
                    out.append(
                        f"minimized <= all evaluations violated on {r.problem} scheduler={r.scheduler} "
                        f"seed={r.seed}: {r.evaluations} > {other.evaluations}"
                    )
        return out

    def ratios(self) -> list:
        """(problem, label, ratio) for the headline comparisons, summed over seeds."""
        totals = {}
        for r in self.rows:
            k = (r.problem, r.scheduler, r.rules)
            totals[k] = totals.get(k, 0) + r.evaluations
        out = []
        for problem in sorted({r.problem for r in self.rows}):
            def ratio(a, b):
                return totals[b] / totals[a] if totals.get(a) and b in totals else None

            for sched in ("finetuned", "compound", "improved", "generic"):
                v = ratio((problem, sched, "minimized"), (problem, sched, "all"))
                if v is not None:
                    out.append((problem, f"all/minimized ({sched})", v))
            for rules in ("all", "minimized"):
                v = ratio((problem, "finetuned", rules), (problem, "generic", rules))
                if v is not None:
                    out.append((problem, f"generic/finetuned ({rules})", v))
        return out


def load_bench_problem(path) -> tuple:
    """(name, CSP) from a problem JSON or a table file."""
    path = Path(path)
    if path.suffix == ".table":
        names, tuples = load_table(path)
        return path.stem, table_csp(names, tuples)
    return path.stem, load_problem(path)


def run_bench(
    problems: Sequence,
    schedulers: Iterable[str] = ("generic", "compound", "improved", "finetuned"),
    seeds: Iterable[int] = (0,),
    rule_modes: Iterable[str] = ("all",),
    kind: str = "membership",
    strategy: SplitStrategy = RANDOM_SPLIT,
    choose: str = "fifo",
    mode: str = "all",
) -> BenchReport:
    """``problems`` holds (name, CSP) pairs."""
    rows = []
    schedulers, seeds, rule_modes = list(schedulers), list(seeds), list(rule_modes)
    for name, p in problems:
        for rules in rule_modes:
            for sched in schedulers:
                compiled = compile_propagator(p, Propagator(kind, sched, choose, rules))
                for seed in seeds:
                    t0 = time.perf_counter()
                    res = solve(p, compiled, strategy, mode=mode, seed=seed)
                    ms = (time.perf_counter() - t0) * 1000
                    s = res.stats
                    rows.append(BenchRow(name, sched, rules, seed, s.evaluations, s.reenqueues, s.nodes, s.solutions, ms))
    rows.sort(key=lambda r: r.key)
    return BenchReport(rows)


def bundled_corpus(names: Optional[Sequence[str]] = None) -> list:
    """The problems shipped under ``rulecp/data``."""
    base = Path(__file__).parent / "data"
    paths = sorted(base.glob("*.json"))
    if names is not None:
        paths = [q for q in paths if q.stem in names]
    return [load_bench_problem(q) for q in paths]


def data_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


__all__ = ["BenchReport", "BenchRow", "COLUMNS", "bundled_corpus", "data_path", "load_bench_problem", "run_bench", "CSP"]
