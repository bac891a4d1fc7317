"""Propagate-then-split search.

Each node of the search tree is first closed under the propagator's rules
(the even levels of the tree), then, unless it is failed or manifestly
solved, split on one variable (the odd levels). Traversal is depth-first,
left to right, with chronological backtracking.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .arc import declare_commutativity, rules_for_constraint
from .core import CSP, Disjunctive, Table, constraint_is_empty, sorted_values
from .disjunction import CDRule
from .membership import table_rules
from .rules import DerivationTrace
from .scheduler import SCHEDULERS, CommutativityDeclaration, IterationResult, run_scheduler

KINDS = ("ac", "membership", "cd", "none")
SELECTIONS = ("first", "smallest", "random")
SPLITS = ("bisect", "enum")


@dataclass(frozen=True)
class Propagator:
    """Which rules to build and how to schedule them.

    * ``ac``: arc/node rules for unary and binary constraints only.
    * ``membership``: membership rules for every table, arc rules for
      builtins, constructive disjunction for disjunctions.
    * ``cd``: arc rules for unary/binary constraints, membership rules for
      wider tables, constructive disjunction for disjunctions.
    * ``none``: no propagation at all.

    ``rules`` selects the full minimal membership rule set or the one left
    after redundancy removal.
    """

    kind: str = "ac"
    scheduler: str = "compound"
    choose: str = "fifo"
    rules: str = "all"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown propagator {self.kind!r}")
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {self.scheduler!r}")
        if self.rules not in ("all", "minimized"):
            raise ValueError(f"unknown rule set {self.rules!r}")


def build_rules(p: CSP, kind: str, rule_set: str = "all") -> list:
    if kind == "none":
        return []
    rules = []
    for k, c in enumerate(p.constraints):
        if isinstance(c, Disjunctive):
            if kind != "ac":
                rules.append(CDRule(c, k, p.domains))
            continue
        if isinstance(c, Table) and (kind == "membership" or (kind == "cd" and c.arity > 2)):
            rules.extend(table_rules(c, k, p.domains, rule_set))
            continue
        rules.extend(rules_for_constraint(c, k))
    return rules


@dataclass
class CompiledPropagator:
    config: Propagator
    rules: list
    comm: CommutativityDeclaration

    def run(self, d, removed=frozenset(), seed=None, trace=None, stop_on_empty=True) -> IterationResult:
        return run_scheduler(
            self.config.scheduler,
            self.rules,
            d,
            comm=self.comm,
            choose=self.config.choose,
            seed=seed,
            removed=removed,
            trace=trace,
            stop_on_empty=stop_on_empty,
        )


def compile_propagator(p: CSP, config: Optional[Propagator] = None) -> CompiledPropagator:
    config = config or Propagator()
    rules = build_rules(p, config.kind, config.rules)
    return CompiledPropagator(config, rules, declare_commutativity(rules))


def propagate(p: CSP, propagator=None) -> CSP:
    compiled = propagator if isinstance(propagator, CompiledPropagator) else compile_propagator(p, propagator)
    return p.with_domains(compiled.run(p.domains, stop_on_empty=False).domains)


@dataclass(frozen=True)
class SplitStrategy:
    select: str = "first"
    split: str = "enum"
    order: str = "ascending"

    def __post_init__(self):
        if self.select not in SELECTIONS:
            raise ValueError(f"unknown variable selection {self.select!r}")
        if self.split not in SPLITS:
            raise ValueError(f"unknown domain split {self.split!r}")
        if self.order not in ("ascending", "random"):
            raise ValueError(f"unknown value order {self.order!r}")

    def choose_variable(self, d, rng: random.Random) -> Optional[int]:
        open_vars = [i for i, dom in enumerate(d) if len(dom) >= 2]
        if not open_vars:
            return None
        if self.select == "first":
            return open_vars[0]
        if self.select == "smallest":
            return min(open_vars, key=lambda i: (len(d[i]), i))
        return rng.choice(open_vars)

    def children(self, d, var: int, rng: random.Random) -> list:
        vals = sorted_values(d[var])
        if self.split == "enum":
            parts = [[v] for v in vals]
            if self.order == "random":
                rng.shuffle(parts)
        else:
            half = len(vals) // 2
            parts = [vals[:half], vals[half:]]
            if self.order == "random" and rng.random() < 0.5:
                parts.reverse()
        out = []
        for part in parts:
            child = list(d)
            child[var] = frozenset(part)
            out.append(tuple(child))
        return out


@dataclass
class SearchStats:
    nodes: int = 0
    evaluations: int = 0
    reenqueues: int = 0
    solutions: int = 0
    removed_reused: int = 0
    failed_leaves: int = 0
    solved_leaves: int = 0

    def record(self) -> str:
        return f"nodes={self.nodes} evals={self.evaluations} solutions={self.solutions}"


@dataclass
class SolveResult:
    solutions: list
    stats: SearchStats
    trace: Optional[DerivationTrace] = None
    leaves: list = field(default_factory=list)


def _failed(p: CSP, d) -> bool:
    if any(not x for x in d):
        return True
    return any(constraint_is_empty(c, d) for c in p.constraints)


def _solved(p: CSP, d) -> bool:
    if any(len(x) != 1 for x in d):
        return False
    a = [next(iter(x)) for x in d]
    return all(c.check(a) for c in p.constraints)


def solve(
    p: CSP,
    propagator=None,
    strategy: Optional[SplitStrategy] = None,
    mode: str = "all",
    seed: Optional[int] = None,
    trace: bool = False,
    keep_leaves: bool = False,
) -> SolveResult:
    if mode not in ("all", "first"):
        raise ValueError(f"mode must be 'all' or 'first', not {mode!r}")
    compiled = propagator if isinstance(propagator, CompiledPropagator) else compile_propagator(p, propagator)
    strategy = strategy or SplitStrategy()
    search_rng = random.Random(seed)
    sched_rng = random.Random(f"scheduler:{seed}")
    stats = SearchStats()
    solutions, leaves = [], []
    root_trace = DerivationTrace(p.names) if trace else None

    stack = [(p.domains, frozenset(), True)]
    while stack:
        d, removed, is_root = stack.pop()
        stats.nodes += 1
        stats.removed_reused += len(removed)
        res = compiled.run(d, removed, sched_rng.randrange(2**31), root_trace if is_root else None)
        stats.evaluations += res.stats.evaluations
        stats.reenqueues += res.stats.reenqueues
        d2 = res.domains
        if is_root and root_trace is not None:
            root_trace.finalize(p, closed=not any(not x for x in d2))
        if _failed(p, d2):
            stats.failed_leaves += 1
            if keep_leaves:
                leaves.append(("failed", d2))
            continue
        if _solved(p, d2):
            stats.solved_leaves += 1
            if keep_leaves:
                leaves.append(("solved", d2))
            solutions.append(tuple(next(iter(x)) for x in d2))
            stats.solutions += 1
            if mode == "first":
                break
            continue
        var = strategy.choose_variable(d2, search_rng)
        kids = strategy.children(d2, var, search_rng)
        for child in reversed(kids):
            stack.append((child, res.removed, False))
    return SolveResult(solutions, stats, root_trace, leaves)
