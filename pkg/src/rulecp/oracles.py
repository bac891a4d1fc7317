"""Brute-force reference implementations.

These are definitional transcriptions used to check the real propagators.
They are deliberately naive and refuse to run past a budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Sequence

from .core import CSP, Constraint, Disjunctive, Table, sorted_values
from .errors import BudgetExceeded
from .rules import apply_reduction


@dataclass(frozen=True)
class OracleBudget:
    max_assignments: int = 10**6
    max_subdomain_tuples: int = 10**6


DEFAULT_BUDGET = OracleBudget()


def enumerate_solutions(p: CSP, budget: OracleBudget = DEFAULT_BUDGET) -> set:
    size = prod(len(d) for d in p.domains)
    if size > budget.max_assignments:
        raise BudgetExceeded(f"{size} assignments exceed the budget of {budget.max_assignments}")
    out = set()
    for a in itertools.product(*(sorted_values(d) for d in p.domains)):
        if all(c.check(a) for c in p.constraints):
            out.add(a)
    return out


def hyper_arc_closure(c: Constraint, d: Sequence[frozenset], budget: OracleBudget = DEFAULT_BUDGET) -> tuple:
    """Keep exactly the values that occur in some satisfying scope tuple."""
    d = tuple(d)
    scope = c.scope
    while True:
        size = prod(len(d[i]) for i in scope)
        if size > budget.max_assignments:
            raise BudgetExceeded(f"{size} scope tuples exceed the budget")
        seen = {i: set() for i in scope}
        buf = [None] * len(d)
        for combo in itertools.product(*(sorted_values(d[i]) for i in scope)):
            for i, v in zip(scope, combo):
                buf[i] = v
            if c.check(buf):
                for i, v in zip(scope, combo):
                    seen[i].add(v)
        out = list(d)
        for i in scope:
            out[i] = frozenset(seen[i])
        out = tuple(out)
        if out == d:
            return d
        d = out


def ac_closure(p: CSP) -> tuple:
    """Iterated support filtering over every unary and binary constraint."""
    d = list(p.domains)
    changed = True
    while changed:
        changed = False
        for c in p.constraints:
            if isinstance(c, Disjunctive) or len(set(c.scope)) > 2:
                continue
            buf = [None] * len(d)
            for i in set(c.scope):
                others = [j for j in set(c.scope) if j != i]
                kept = set()
                for a in d[i]:
                    buf[i] = a
                    if not others:
                        if c.check(buf):
                            kept.add(a)
                        continue
                    (j,) = others
                    for b in d[j]:
                        buf[j] = b
                        if c.check(buf):
                            kept.add(a)
                            break
                if kept != d[i]:
                    d[i] = frozenset(kept)
                    changed = True
    return tuple(d)


def naive_rule_closure(rules: Sequence, d: Sequence[frozenset]) -> tuple:
    """Round-robin: apply every rule in turn until a full pass changes nothing."""
    d = tuple(d)
    while True:
        start = d
        for r in rules:
            d = apply_reduction(r, d)
        if d == start:
            return d


def subdomain_tuples(
    universe: Sequence[frozenset],
    positions: Sequence[int],
    nonempty: bool = True,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> Iterator[tuple]:
    """All tuples whose ``positions`` range over subsets of the universe."""
    per = []
    for i in positions:
        vals = sorted_values(universe[i])
        subs = [
            frozenset(c)
            for k in range(0 if not nonempty else 1, len(vals) + 1)
            for c in itertools.combinations(vals, k)
        ]
        per.append(subs)
    total = prod(len(s) for s in per)
    if total > budget.max_subdomain_tuples:
        raise BudgetExceeded(f"{total} sub-domain tuples exceed the budget")
    for combo in itertools.product(*per):
        out = list(universe)
        for i, s in zip(positions, combo):
            out[i] = s
        yield tuple(out)


def enumerate_all_minimal_rules(c: Table, universe=None) -> list:
    """Filter every syntactically possible rule by validity and minimality."""
    from .membership import MembershipRule, _universe, is_minimal, merge_by_premise

    if c.arity > 3 or any(len(u) > 3 for u in _universe(c, universe).values()):
        raise BudgetExceeded("exhaustive rule enumeration is limited to arity <= 3 and 3 values")
    U = _universe(c, universe)
    singles = []
    for z in c.vars:
        others = [y for y in c.vars if y != z]
        options = []
        for y in others:
            vals = sorted_values(U[y])
            proper = [frozenset(s) for k in range(1, len(vals)) for s in itertools.combinations(vals, k)]
            options.append([None] + proper)
        for a in sorted_values(U[z]):
            for choice in itertools.product(*options):
                premise = tuple((y, s) for y, s in zip(others, choice) if s is not None)
                r = MembershipRule(premise, ((z, a),))
                if is_minimal(r, c, U):
                    singles.append((r.premise, (z, a)))
    return merge_by_premise(singles)


def normalize_failure(d: Sequence[frozenset]) -> tuple:
    """Identify all failed domain tuples with the all-empty tuple."""
    if any(not x for x in d):
        return tuple(frozenset() for _ in d)
    return tuple(d)
