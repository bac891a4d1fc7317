"""Fixpoint schedulers for domain reduction rules.

All four schedulers compute the least common fixpoint above the starting
domain tuple when the rules are inflationary and monotonic. They differ in
how much work they do to get there:

* ``generic_iteration`` follows the textbook worklist loop with a pluggable
  update policy. The exhaustive policy re-evaluates every inactive function
  on the old and new tuple, and those evaluations are counted.
* ``compound_iteration`` wakes every function whose scheme touches a
  modified component.
* ``improved_iteration`` additionally skips functions known to commute
  with the one just applied, and the applied function itself when it is
  idempotent.
* ``stability_scheduler`` wakes rules on their inputs only and drops stable
  rules for good once they have fired.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter, OrderedDict, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .core import format_domain
from .errors import StabilityViolation
from .rules import DerivationTrace, DomainReductionRule, apply_reduction

CHOOSE_POLICIES = ("fifo", "lifo", "random")


class Worklist:
    """The active set G: a set with a deterministic choice order."""

    def __init__(self, policy: str = "fifo", rng: Optional[random.Random] = None):
        if policy not in CHOOSE_POLICIES:
            raise ValueError(f"unknown choose policy {policy!r}")
        self.policy = policy
        self.rng = rng or random.Random(0)
        self._od: OrderedDict = OrderedDict()
        self._items: list = []
        self._pos: dict = {}

    def __len__(self):
        return len(self._pos) if self.policy == "random" else len(self._od)

    def __bool__(self):
        return len(self) > 0

    def __contains__(self, item):
        return item in (self._pos if self.policy == "random" else self._od)

    def add(self, item) -> bool:
        if item in self:
            return False
        if self.policy == "random":
            self._pos[item] = len(self._items)
            self._items.append(item)
        else:
            self._od[item] = None
        return True

    def discard(self, item) -> None:
        if self.policy != "random":
            self._od.pop(item, None)
            return
        k = self._pos.pop(item, None)
        if k is None:
            return
        last = self._items.pop()
        if k < len(self._items):
            self._items[k] = last
            self._pos[last] = k

    def choose(self):
        if self.policy == "fifo":
            return next(iter(self._od))
        if self.policy == "lifo":
            return next(reversed(self._od))
        return self._items[self.rng.randrange(len(self._items))]


def fixpoint_hash(d: Sequence[frozenset]) -> str:
    text = "|".join(format_domain(x) for x in d)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class SchedulerStats:
    scheduler: str
    evaluations: int = 0
    update_evaluations: int = 0
    reenqueues: int = 0
    removals: int = 0
    removed_permanently: int = 0
    wakeups: Counter = field(default_factory=Counter)

    def record(self, d: Sequence[frozenset]) -> str:
        return (
            f"scheduler={self.scheduler} evaluations={self.evaluations} "
            f"reenqueues={self.reenqueues} removed={self.removed_permanently} "
            f"fixpoint_hash={fixpoint_hash(d)}"
        )


@dataclass
class IterationResult:
    domains: tuple
    stats: SchedulerStats
    removed: frozenset = frozenset()

    def record(self) -> str:
        return self.stats.record(self.domains)


@dataclass(frozen=True)
class CommutativityDeclaration:
    comm: dict = field(default_factory=dict)
    idempotent: frozenset = frozenset()

    def commuting(self, rule_id) -> frozenset:
        return self.comm.get(rule_id, frozenset())

    def pairs(self):
        seen = set()
        for f, gs in self.comm.items():
            for g in gs:
                key = tuple(sorted((f, g)))
                if f != g and key not in seen:
                    seen.add(key)
                    yield key


@dataclass(frozen=True)
class StabilityDeclaration:
    stable: frozenset = frozenset()

    @classmethod
    def from_rules(cls, rules: Iterable[DomainReductionRule]) -> "StabilityDeclaration":
        return cls(frozenset(r.id for r in rules if r.stable))


def _changed(before: tuple, after: tuple, scheme: Sequence[int]) -> list:
    return [i for i in scheme if before[i] != after[i]]


def _any_empty(d: tuple, idx: Iterable[int]) -> bool:
    return any(not d[i] for i in idx)


def _make_worklist(rules, choose, seed):
    wl = Worklist(choose, random.Random(seed))
    for r in rules:
        wl.add(r)
    return wl


def exhaustive_update(rules: Sequence[DomainReductionRule]):
    """The update policy ``{f in F - G | f(d) = d and f(g(d)) != g(d)}``.

    Expensive by construction; used as a reference policy. Each evaluation
    of ``f`` is charged to ``stats.update_evaluations``.
    """

    def update(G: Worklist, g, d, gd, stats: SchedulerStats):
        out = []
        for f in rules:
            if f in G:
                continue
            stats.update_evaluations += 1
            if apply_reduction(f, d) is not d:
                continue
            stats.update_evaluations += 1
            if apply_reduction(f, gd) is not gd:
                out.append(f)
        return out

    return update


def generic_iteration(
    rules: Sequence[DomainReductionRule],
    start: tuple,
    update: str | Callable = "exhaustive",
    choose: str = "fifo",
    seed=None,
    trace: Optional[DerivationTrace] = None,
    stop_on_empty: bool = False,
) -> IterationResult:
    rules = list(rules)
    if update == "exhaustive":
        update = exhaustive_update(rules)
    stats = SchedulerStats("generic")
    G = _make_worklist(rules, choose, seed)
    d = tuple(start)
    while G:
        g = G.choose()
        stats.evaluations += 1
        gd = apply_reduction(g, d)
        if gd is not d:
            for f in update(G, g, d, gd, stats):
                if G.add(f):
                    stats.reenqueues += 1
            if trace is not None:
                trace.record(g, d, gd)
            d = gd
            if stop_on_empty and _any_empty(d, g.scheme):
                break
        else:
            G.discard(g)
            stats.removals += 1
    stats.evaluations += stats.update_evaluations
    return IterationResult(d, stats)


def _index_by(rules, attr):
    index = defaultdict(list)
    for r in rules:
        for i in getattr(r, attr):
            index[i].append(r)
    return index


def compound_iteration(
    rules: Sequence[DomainReductionRule],
    start: tuple,
    choose: str = "fifo",
    seed=None,
    trace: Optional[DerivationTrace] = None,
    stop_on_empty: bool = False,
) -> IterationResult:
    return _scheme_iteration(rules, start, None, choose, seed, trace, stop_on_empty, "compound")


def improved_iteration(
    rules: Sequence[DomainReductionRule],
    start: tuple,
    comm: Optional[CommutativityDeclaration] = None,
    choose: str = "fifo",
    seed=None,
    trace: Optional[DerivationTrace] = None,
    stop_on_empty: bool = False,
) -> IterationResult:
    comm = comm if comm is not None else CommutativityDeclaration()
    return _scheme_iteration(rules, start, comm, choose, seed, trace, stop_on_empty, "improved")


def _scheme_iteration(rules, start, comm, choose, seed, trace, stop_on_empty, name):
    rules = list(rules)
    by_var = _index_by(rules, "scheme")
    stats = SchedulerStats(name)
    G = _make_worklist(rules, choose, seed)
    d = tuple(start)
    while G:
        g = G.choose()
        stats.evaluations += 1
        gd = apply_reduction(g, d)
        if gd is d:
            G.discard(g)
            stats.removals += 1
            continue
        changed = _changed(d, gd, g.scheme)
        if comm is not None:
            skip = comm.commuting(g.id)
            drop_self = g.id in comm.idempotent
            if drop_self:
                G.discard(g)
        else:
            skip, drop_self = frozenset(), False
        for i in changed:
            stats.wakeups[i] += 1
            for f in by_var[i]:
                if f.id in skip or (drop_self and f is g):
                    continue
                if G.add(f):
                    stats.reenqueues += 1
        if trace is not None:
            trace.record(g, d, gd)
        d = gd
        if stop_on_empty and _any_empty(d, changed):
            break
    return IterationResult(d, stats)


def stability_scheduler(
    rules: Sequence[DomainReductionRule],
    start: tuple,
    stable: Optional[StabilityDeclaration] = None,
    choose: str = "fifo",
    seed=None,
    removed: Iterable[str] = (),
    trace: Optional[DerivationTrace] = None,
    stop_on_empty: bool = False,
    validate: bool = False,
) -> IterationResult:
    """Fine-tuned scheduler.

    Rules whose ids are in ``removed`` were retired at an ancestor state and
    are never evaluated. A stable rule whose premise holds is applied once
    and retired; the returned ``removed`` set includes it so callers can
    pass it on to descendant states.
    """
    stable_ids = (stable or StabilityDeclaration.from_rules(rules)).stable
    gone = set(removed)
    live = [r for r in rules if r.id not in gone]
    by_input = _index_by(live, "inputs")
    stats = SchedulerStats("finetuned")
    G = _make_worklist(live, choose, seed)
    d = tuple(start)
    retired_here = []
    while G:
        g = G.choose()
        stats.evaluations += 1
        gd = apply_reduction(g, d)
        if g.id in stable_ids and g.applies(g.project(d)):
            G.discard(g)
            gone.add(g.id)
            retired_here.append(g)
            stats.removed_permanently += 1
        elif gd is d:
            G.discard(g)
            stats.removals += 1
            continue
        if gd is d:
            continue
        if g.idempotent:
            G.discard(g)
        changed = _changed(d, gd, g.scheme)
        for i in changed:
            stats.wakeups[i] += 1
            for f in by_input[i]:
                if f is g and g.idempotent or f.id in gone:
                    continue
                if G.add(f):
                    stats.reenqueues += 1
        if trace is not None:
            trace.record(g, d, gd)
        d = gd
        if stop_on_empty and _any_empty(d, changed):
            break
    if validate:
        for r in retired_here:
            if apply_reduction(r, d) is not d:
                raise StabilityViolation(f"retired rule {r.id} still changes the fixpoint")
    return IterationResult(d, stats, frozenset(gone))


SCHEDULERS = ("generic", "compound", "improved", "finetuned")


def run_scheduler(
    name: str,
    rules: Sequence[DomainReductionRule],
    start: tuple,
    comm: Optional[CommutativityDeclaration] = None,
    choose: str = "fifo",
    seed=None,
    removed: Iterable[str] = (),
    trace: Optional[DerivationTrace] = None,
    stop_on_empty: bool = False,
) -> IterationResult:
    if name == "generic":
        return generic_iteration(rules, start, "exhaustive", choose, seed, trace, stop_on_empty)
    if name == "compound":
        return compound_iteration(rules, start, choose, seed, trace, stop_on_empty)
    if name == "improved":
        return improved_iteration(rules, start, comm, choose, seed, trace, stop_on_empty)
    if name == "finetuned":
        return stability_scheduler(
            rules, start, None, choose, seed, removed, trace, stop_on_empty
        )
    raise ValueError(f"unknown scheduler {name!r}; expected one of {SCHEDULERS}")
