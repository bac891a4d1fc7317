"""Arc consistency as two domain reduction rules per binary constraint.

For a binary constraint ``C`` on ``(x, y)`` rule 1 keeps the values of
``x`` that have a support in ``D_y`` and rule 2 keeps the values of ``y``
with a support in ``D_x``. Scheduling these with the commutativity-aware
iteration gives AC-3.
"""

from __future__ import annotations

from collections import defaultdict

from .core import CSP, Constraint, Disjunctive, Table
from .rules import DomainReductionRule, apply_reduction
from .scheduler import CommutativityDeclaration, IterationResult, improved_iteration

FIRST, SECOND = "first", "second"


def _support_test(c: Constraint, direction: str):
    """Return ``has_support(a, other_domain)`` for the reduced variable."""
    x, y = c.scope
    if isinstance(c, Table):
        index = defaultdict(set)
        for a, b in c.tuples:
            if direction == FIRST:
                index[a].add(b)
            else:
                index[b].add(a)
        return lambda a, other: not index.get(a, set()).isdisjoint(other)

    buf = [None] * (max(x, y) + 1)
    target, source = (x, y) if direction == FIRST else (y, x)

    def has_support(a, other):
        buf[target] = a
        for b in other:
            buf[source] = b
            if c.check(buf):
                return True
        return False

    return has_support


class ArcRule(DomainReductionRule):
    """ARC CONSISTENCY rule 1 (``direction=first``) or 2 (``second``)."""

    def __init__(self, constraint: Constraint, direction: str, cid):
        if len(set(constraint.scope)) != 2:
            raise ValueError("arc rules need a binary constraint over two distinct variables")
        x, y = constraint.scope
        target, source = (x, y) if direction == FIRST else (y, x)
        has_support = _support_test(constraint, direction)
        scheme = tuple(sorted((x, y)))
        ti, si = scheme.index(target), scheme.index(source)

        def reduce(sub):
            dt, ds = sub[ti], sub[si]
            kept = frozenset(a for a in dt if has_support(a, ds))
            out = list(sub)
            out[ti] = kept
            return tuple(out)

        rule_no = 1 if direction == FIRST else 2
        super().__init__(
            f"ac{rule_no}:{cid}",
            scheme,
            reduce,
            monotonic=True,
            idempotent=True,
            inputs=(source,),
        )
        self.constraint = constraint
        self.direction = direction
        self.target = target
        self.source = source


class NodeRule(DomainReductionRule):
    """Filter the single variable of a unary constraint."""

    def __init__(self, constraint: Constraint, cid):
        (x,) = set(constraint.scope)
        buf = [None] * (x + 1)

        def reduce(sub):
            kept = []
            for a in sub[0]:
                buf[x] = a
                if constraint.check(buf):
                    kept.append(a)
            return (frozenset(kept),)

        super().__init__(f"node:{cid}", (x,), reduce, idempotent=True, inputs=())
        self.constraint = constraint


def revise(rule: ArcRule, d: tuple) -> tuple:
    return apply_reduction(rule, d)


def rules_for_constraint(c: Constraint, cid) -> list:
    """Arc or node rules for a unary/binary non-disjunctive constraint, else []."""
    if isinstance(c, Disjunctive):
        return []
    distinct = set(c.scope)
    if len(distinct) == 1:
        return [NodeRule(c, cid)]
    if len(distinct) == 2 and len(c.scope) == 2:
        return [ArcRule(c, FIRST, cid), ArcRule(c, SECOND, cid)]
    return []


def declare_commutativity(rules) -> CommutativityDeclaration:
    """Commutation facts for arc rules.

    The two rules of one constraint commute; rules of the same direction
    whose constraints share the corresponding variable commute. All arc and
    node rules are idempotent.
    """
    arcs = [r for r in rules if isinstance(r, ArcRule)]
    comm = defaultdict(set)
    by_constraint = defaultdict(list)
    by_target = defaultdict(list)
    for r in arcs:
        by_constraint[r.id.split(":", 1)[1]].append(r)
        by_target[(r.direction, r.target)].append(r)
    for group in list(by_constraint.values()) + list(by_target.values()):
        for f in group:
            for g in group:
                if f is not g:
                    comm[f.id].add(g.id)
    idem = frozenset(r.id for r in rules if r.idempotent)
    return CommutativityDeclaration({k: frozenset(v) for k, v in comm.items()}, idem)


def ac_rules(p: CSP):
    rules = []
    for k, c in enumerate(p.constraints):
        rules.extend(rules_for_constraint(c, k))
    return rules, declare_commutativity(rules)


def is_arc_consistent(p: CSP) -> bool:
    for c in p.constraints:
        if isinstance(c, Disjunctive) or len(c.scope) != 2 or len(set(c.scope)) != 2:
            continue
        x, y = c.scope
        buf = [None] * len(p.domains)

        def supported(target, source):
            for a in p.domains[target]:
                buf[target] = a
                found = False
                for b in p.domains[source]:
                    buf[source] = b
                    if c.check(buf):
                        found = True
                        break
                if not found:
                    return False
            return True

        if not (supported(x, y) and supported(y, x)):
            return False
    return True


def ac3_run(p: CSP, choose: str = "fifo", seed=None, trace=None) -> IterationResult:
    rules, comm = ac_rules(p)
    return improved_iteration(rules, p.domains, comm, choose, seed, trace)


def ac3(p: CSP, choose: str = "fifo", seed=None) -> CSP:
    return p.with_domains(ac3_run(p, choose, seed).domains)
