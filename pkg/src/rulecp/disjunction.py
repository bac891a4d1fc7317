"""Constructive disjunction and the disjunction splitting rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .core import CSP, Disjunctive
from .rules import DomainReductionRule, SplittingRule
from .scheduler import run_scheduler


@dataclass(frozen=True)
class DisjunctReduction:
    branch: int
    domains: tuple
    failed: bool


def default_inner_rules(constraints: Sequence, tag: str, universe: Sequence[frozenset]) -> list:
    """AC rules for unary/binary members, membership rules for n-ary tables,
    nested CD rules for nested disjunctions."""
    from .arc import rules_for_constraint
    from .membership import table_rules

    rules = []
    for k, c in enumerate(constraints):
        cid = f"{tag}.{k}"
        found = rules_for_constraint(c, cid)
        if not found and isinstance(c, Disjunctive):
            found = [cd_rule(c, cid, universe)]
        elif not found:
            found = table_rules(c, cid, universe)
        rules.extend(found)
    return rules


def _branch_rules(c, universe, inner_rules, tag):
    make = inner_rules or default_inner_rules
    return [make(branch, f"{tag}.b{k}", universe) for k, branch in enumerate(c.branches)]


def _derive(c, d, rule_sets, scheduler):
    out = []
    for k, rules in enumerate(rule_sets):
        reduced = run_scheduler(scheduler, rules, d).domains
        failed = any(not reduced[i] for i in c.scope)
        out.append(DisjunctReduction(k, reduced, failed))
    return out


def _union(c, d, results):
    out = list(d)
    for i in c.scope:
        union = frozenset()
        for r in results:
            if not r.failed:
                union |= r.domains[i]
        out[i] = union
    return tuple(out)


def branch_derivations(
    c: Disjunctive,
    d: tuple,
    inner_rules: Optional[Callable] = None,
    scheduler: str = "compound",
    universe: Optional[Sequence[frozenset]] = None,
) -> list:
    """Run one stabilizing derivation per disjunct, starting from ``d``."""
    rule_sets = _branch_rules(c, universe or d, inner_rules, "cd")
    return _derive(c, d, rule_sets, scheduler)


def cd_reduce(
    c: Disjunctive,
    d: tuple,
    inner_rules: Optional[Callable] = None,
    scheduler: str = "compound",
    universe: Optional[Sequence[frozenset]] = None,
) -> tuple:
    """Reduce the scope of ``c`` to the union of the per-branch closures.

    A failed branch contributes nothing; if both fail every scope variable
    ends up empty.
    """
    return _union(c, d, branch_derivations(c, d, inner_rules, scheduler, universe))


class CDRule(DomainReductionRule):
    """CONSTRUCTIVE DISJUNCTION as a schedulable reduction.

    ``universe`` bounds the domains this rule will ever see; it is needed to
    build membership rules for table members up front.
    """

    def __init__(self, c: Disjunctive, cid, universe, inner_rules=None, scheduler="compound"):
        scheme = c.scope
        size = len(universe)
        tag = f"cd:{cid}"
        rule_sets = _branch_rules(c, universe, inner_rules, tag)

        def reduce(sub):
            full = [frozenset()] * size
            for i, dom in zip(scheme, sub):
                full[i] = dom
            full = tuple(full)
            out = _union(c, full, _derive(c, full, rule_sets, scheduler))
            return tuple(out[i] for i in scheme)

        super().__init__(tag, scheme, reduce, monotonic=True, idempotent=True)
        self.constraint = c
        self.branch_rules = rule_sets


def cd_rule(c: Disjunctive, cid, universe, inner_rules=None, scheduler="compound") -> CDRule:
    return CDRule(c, cid, universe, inner_rules, scheduler)


def apply_constructive_disjunction(p: CSP, c: Disjunctive, **kw) -> CSP:
    """CSP-level rule: new domains, with the branch relations restricted to them."""
    return p.with_domains(cd_reduce(c, p.domains, **kw))


def split_disjunction(c: Disjunctive, p: CSP) -> list:
    if c not in p.constraints:
        raise ValueError("disjunction is not a constraint of this CSP")
    rest = [q for q in p.constraints if q != c]
    return [p.with_constraints(rest + list(branch)) for branch in c.branches]


def disjunction_splitting_rule(c: Disjunctive) -> SplittingRule:
    return SplittingRule("split-disjunction", lambda p: split_disjunction(c, p))
