"""Membership rules for extensionally given constraints.

A membership rule ``y1 in S1, ..., yk in Sk -> z1 != a1, ..., zm != am``
removes each ``aj`` from ``D_zj`` once every ``D_yi`` is inside ``Si``.
Rules are stored with CSP variable positions; a table's scope maps its
columns to those positions.

Minimal rules are generated per conclusion atom ``z != a``. A premise is
valid for that atom iff it excludes every table tuple with ``t[z] = a``.
Writing a premise as the set ``X`` of values it excludes, validity says
``X`` hits every such tuple, so the weakest valid premises are exactly the
minimal hitting sets (transversals) of those tuples, subject to no range
becoming empty. Non-empty premises that no tuple satisfies are dropped: they
can only fire on states where the remaining rules already wipe out a domain.
"""

from __future__ import annotations

import functools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Mapping, Optional, Sequence, Union

from .core import CSP, Constraint, Lt, Table, format_domain, sorted_values, value_key
from .errors import BoundsExceeded, ContractViolation, StructuralError
from .rules import DomainReductionRule

MAX_ARITY = 4
MAX_UNIVERSE = 12


def _range_key(s: frozenset) -> tuple:
    return tuple(value_key(v) for v in sorted_values(s))


@dataclass(frozen=True)
class MembershipRule:
    premise: tuple
    conclusion: tuple

    def __post_init__(self):
        premise = tuple(
            sorted(((int(y), frozenset(s)) for y, s in self.premise), key=lambda a: (a[0], _range_key(a[1])))
        )
        conclusion = tuple(sorted(((int(z), a) for z, a in self.conclusion), key=lambda c: (c[0], value_key(c[1]))))
        ys = [y for y, _ in premise]
        if len(set(ys)) != len(ys):
            raise StructuralError(f"premise repeats a variable: {ys}")
        if any(not s for _, s in premise):
            raise StructuralError("premise ranges must be non-empty")
        if len(set(conclusion)) != len(conclusion):
            raise StructuralError("conclusion repeats an atom")
        object.__setattr__(self, "premise", premise)
        object.__setattr__(self, "conclusion", conclusion)

    @property
    def premise_vars(self) -> tuple:
        return tuple(y for y, _ in self.premise)

    @property
    def variables(self) -> tuple:
        return tuple(sorted(set(self.premise_vars) | {z for z, _ in self.conclusion}))

    def sort_key(self):
        return (
            tuple((y, _range_key(s)) for y, s in self.premise),
            tuple((z, value_key(a)) for z, a in self.conclusion),
        )

    def specificity_key(self):
        """Removal order for redundancy elimination: most specific first."""
        return (-len(self.premise), sum(len(s) for _, s in self.premise), self.sort_key())

    def render(self, names: Sequence[str]) -> str:
        lhs = ", ".join(
            f"{names[y]} in {{{','.join(str(v) for v in sorted_values(s))}}}" for y, s in self.premise
        )
        rhs = ", ".join(f"{names[z]} != {a}" for z, a in self.conclusion)
        return f"{lhs} -> {rhs}" if lhs else f"-> {rhs}"

    def render_chr(self, names: Sequence[str], constraint_name: str, scope: Sequence[int]) -> str:
        head = f"{constraint_name}({','.join(names[i].upper() for i in scope)})"
        guards = [f"{names[y].upper()} in [{','.join(str(v) for v in sorted_values(s))}]" for y, s in self.premise]
        body = ", ".join(f"{names[z].upper()} ne {a}" for z, a in self.conclusion)
        return f"{', '.join([head] + guards)} ==> {body}."


def rule_applies(r: MembershipRule, d: Sequence[frozenset]) -> bool:
    # An empty domain counts as inside any range; this keeps rules monotonic.
    return all(d[y] <= s for y, s in r.premise)


def apply_membership(r: MembershipRule, d: tuple) -> tuple:
    out = list(d)
    for z, a in r.conclusion:
        if a in out[z]:
            out[z] = out[z] - {a}
    return tuple(out)


class LiftedMembershipRule(DomainReductionRule):
    """A membership rule as a stable, idempotent domain reduction rule."""

    def __init__(self, rule: MembershipRule, rid: str):
        scheme = rule.variables
        pos = {v: k for k, v in enumerate(scheme)}
        prem = [(pos[y], s) for y, s in rule.premise]
        concl = defaultdict(set)
        for z, a in rule.conclusion:
            concl[pos[z]].add(a)
        concl = [(k, frozenset(v)) for k, v in concl.items()]

        def applies(sub):
            return all(sub[k] <= s for k, s in prem)

        def reduce(sub):
            if not applies(sub):
                return sub
            out = list(sub)
            for k, vals in concl:
                out[k] = out[k] - vals
            return tuple(out)

        super().__init__(
            rid,
            scheme,
            reduce,
            monotonic=True,
            idempotent=True,
            stable=True,
            inputs=rule.premise_vars,
            applies=applies,
        )
        self.rule = rule


def lift(rules: Iterable[MembershipRule], tag: str = "m") -> list:
    return [LiftedMembershipRule(r, f"{tag}#{k}") for k, r in enumerate(rules)]


def _universe(c: Table, universe) -> dict:
    if universe is None:
        values = frozenset(v for t in c.tuples for v in t)
        return {v: values for v in c.vars}
    if isinstance(universe, Mapping):
        return {v: frozenset(universe[v]) for v in c.vars}
    return {v: frozenset(universe[v]) for v in c.vars}


def _relation(c: Table, U: dict) -> list:
    return [t for t in c.tuples if all(t[k] in U[v] for k, v in enumerate(c.vars))]


def _check_vars(r: MembershipRule, c: Table):
    extra = set(r.variables) - set(c.vars)
    if extra:
        raise ContractViolation(f"rule mentions variables {sorted(extra)} outside the table scope")


def _premise_holds(t, pos, premise) -> bool:
    return all(t[pos[y]] in s for y, s in premise)


def is_valid(r: MembershipRule, c: Table, universe=None) -> bool:
    _check_vars(r, c)
    pos = {v: k for k, v in enumerate(c.vars)}
    rel = _relation(c, _universe(c, universe))
    for t in rel:
        if _premise_holds(t, pos, r.premise) and any(t[pos[z]] == a for z, a in r.conclusion):
            return False
    return True


def is_feasible(r: MembershipRule, c: Table, universe=None) -> bool:
    """Some tuple of the table satisfies the premise."""
    _check_vars(r, c)
    pos = {v: k for k, v in enumerate(c.vars)}
    return any(_premise_holds(t, pos, r.premise) for t in _relation(c, _universe(c, universe)))


def is_minimal(r: MembershipRule, c: Table, universe=None) -> bool:
    """Valid, and no premise atom can be dropped or widened by one value.

    A non-empty premise must also be feasible.
    """
    U = _universe(c, universe)
    if not is_valid(r, c, U) or (r.premise and not is_feasible(r, c, U)):
        return False
    for k, (y, s) in enumerate(r.premise):
        dropped = r.premise[:k] + r.premise[k + 1:]
        if is_valid(MembershipRule(dropped, r.conclusion), c, U):
            return False
        for v in U[y] - s:
            widened = dropped + ((y, s | {v}),)
            if is_valid(MembershipRule(widened, r.conclusion), c, U):
                return False
    return True


def _minimal_transversals(edges: list, caps: dict) -> list:
    """Minimal hitting sets of ``edges`` using at most ``caps[v] - 1`` values per variable."""
    edges = sorted(set(edges), key=len)
    kept_edges = []
    for e in edges:
        if not any(f <= e for f in kept_edges):
            kept_edges.append(e)
    family = [frozenset()]
    for e in kept_edges:
        hit = [t for t in family if not t.isdisjoint(e)]
        grown = set()
        for t in family:
            if not t.isdisjoint(e):
                continue
            for atom in e:
                var = atom[0]
                if sum(1 for a in t if a[0] == var) + 1 >= caps[var]:
                    continue
                cand = t | {atom}
                if not any(h <= cand for h in hit):
                    grown.add(cand)
        grown = sorted(grown, key=len)
        minimal = []
        for g in grown:
            if not any(m <= g for m in minimal):
                minimal.append(g)
        family = hit + minimal
        if not family:
            break
    return family


def _single_rules(c: Table, U: dict) -> list:
    """All minimal feasible single-conclusion rules, as (premise, (z, a))."""
    rel = _relation(c, U)
    out = []
    for zk, z in enumerate(c.vars):
        for a in sorted_values(U[z]):
            edges = [
                frozenset((c.vars[k], t[k]) for k in range(len(c.vars)) if k != zk)
                for t in rel
                if t[zk] == a
            ]
            caps = {v: len(U[v]) for v in c.vars}
            for x in _minimal_transversals(edges, caps):
                excluded = defaultdict(set)
                for var, val in x:
                    excluded[var].add(val)
                premise = tuple((var, U[var] - frozenset(vals)) for var, vals in excluded.items())
                pos = {v: k for k, v in enumerate(c.vars)}
                if not premise or any(_premise_holds(t, pos, premise) for t in rel):
                    out.append((MembershipRule(premise, ()).premise, (z, a)))
    return out


def merge_by_premise(singles: Iterable) -> list:
    grouped = defaultdict(list)
    for premise, atom in singles:
        grouped[premise].append(atom)
    rules = [MembershipRule(p, tuple(atoms)) for p, atoms in grouped.items()]
    return sorted(rules, key=MembershipRule.sort_key)


@functools.lru_cache(maxsize=256)
def _generate_cached(c: Table, universe_items: tuple) -> tuple:
    U = dict(universe_items)
    return tuple(merge_by_premise(_single_rules(c, U)))


def generate_minimal_rules(
    c: Table,
    universe=None,
    max_arity: int = MAX_ARITY,
    max_universe: int = MAX_UNIVERSE,
) -> list:
    """All minimal membership rules of ``c``, merged per premise, in canonical order."""
    if not isinstance(c, Table):
        raise StructuralError("membership rules are generated for table constraints only")
    U = _universe(c, universe)
    widest = max((len(u) for u in U.values()), default=0)
    if c.arity > max_arity or widest > max_universe:
        raise BoundsExceeded(
            f"table of arity {c.arity} with {widest} values exceeds bounds "
            f"(arity <= {max_arity}, values <= {max_universe}); raise max_arity/max_universe"
        )
    return list(_generate_cached(c, tuple(sorted(U.items()))))


def count_single_conclusions(rules: Iterable[MembershipRule]) -> int:
    return sum(len(r.conclusion) for r in rules)


class _FastClosure:
    """Closure of a membership rule set on bitmask domains.

    Each rule keeps a count of premise atoms not yet satisfied; a domain
    shrink decrements the counts of the atoms it newly satisfies, and a rule
    is queued when its count reaches zero.
    """

    def __init__(self, rules: Sequence[MembershipRule], U: dict):
        self.bit = {v: {val: 1 << k for k, val in enumerate(sorted_values(U[v]))} for v in U}
        self.full = {v: (1 << len(U[v])) - 1 for v in U}
        self.concl = []
        self.unsat0 = []
        # var -> range mask -> rules with that premise atom
        self.by_var = defaultdict(lambda: defaultdict(list))
        for k, r in enumerate(rules):
            prem = [(y, self._mask(y, s)) for y, s in r.premise]
            self.concl.append([(z, self.bit[z][a]) for z, a in r.conclusion])
            open_atoms = [(y, m) for y, m in prem if m != self.full[y]]
            self.unsat0.append(len(open_atoms))
            for y, m in open_atoms:
                self.by_var[y][m].append(k)
        self.ready0 = [k for k, n in enumerate(self.unsat0) if n == 0]

    def _mask(self, v, values) -> int:
        m = 0
        for val in values:
            m |= self.bit[v].get(val, 0)
        return m

    def close(self, doms: dict, disabled: Collection[int] = ()) -> dict:
        cur = dict(self.full)
        unsat = list(self.unsat0)
        fired = set(disabled)
        queue = [k for k in self.ready0 if k not in fired]

        def satisfied(group):
            for j in group:
                unsat[j] -= 1
                if not unsat[j]:
                    queue.append(j)

        def shrink(z, new):
            old = cur[z]
            cur[z] = new
            groups = self.by_var[z]
            free = self.full[z] & ~new
            gone = old & ~new
            if 1 << bin(free).count("1") < len(groups):
                # newly satisfied ranges are the supersets of new missing a bit of gone
                sub = free
                while True:
                    if sub & gone != gone:
                        group = groups.get(new | sub)
                        if group:
                            satisfied(group)
                    if not sub:
                        break
                    sub = (sub - 1) & free
                return
            for mask, group in groups.items():
                if not new & ~mask and old & ~mask:
                    satisfied(group)

        for v, m in doms.items():
            if m != cur[v]:
                shrink(v, m & cur[v])
        while queue:
            k = queue.pop()
            if k in fired:
                continue
            fired.add(k)
            for z, b in self.concl[k]:
                if cur[z] & b:
                    shrink(z, cur[z] & ~b)
        return cur


def is_redundant(r: MembershipRule, R: Sequence[MembershipRule], c: Table, universe=None) -> bool:
    """Premise-seeded redundancy test.

    Close ``R`` without (one copy of) ``r`` from the tuple where ``r``'s
    premise variables take their ranges and everything else is full. ``r``
    is redundant iff that closure already removes all of its conclusions.
    """
    rules = list(R)
    try:
        idx = rules.index(r)
    except ValueError:
        idx = None
    U = _universe(c, universe)
    fc = _FastClosure(rules, U)
    return _seeded_redundant(fc, r, () if idx is None else (idx,))


def _seeded_redundant(fc: _FastClosure, r: MembershipRule, disabled: Collection[int]) -> bool:
    seed = dict(fc.full)
    for y, s in r.premise:
        seed[y] = fc._mask(y, s)
    closed = fc.close(seed, disabled)
    return all(not (closed[z] & fc.bit[z][a]) for z, a in r.conclusion)


def remove_redundant(R: Sequence[MembershipRule], c: Table, universe=None) -> list:
    """Greedily drop redundant rules, most specific premise first."""
    U = _universe(c, universe)
    current = list(R)
    order = sorted(range(len(current)), key=lambda k: current[k].specificity_key())
    fc = _FastClosure(current, U)
    dropped = set()
    for k in order:
        if _seeded_redundant(fc, current[k], dropped | {k}):
            dropped.add(k)
    return sorted((r for j, r in enumerate(current) if j not in dropped), key=MembershipRule.sort_key)


@dataclass
class RuleSetReport:
    constraint: str
    generated: int
    minimal: int
    after_redundancy: int
    single_conclusions: int


def rule_pipeline(c: Table, universe=None, name: str = "table"):
    """Generate, minimize and report; returns (minimal, reduced, report)."""
    minimal = generate_minimal_rules(c, universe)
    reduced = remove_redundant(minimal, c, universe)
    report = RuleSetReport(name, len(minimal), len(minimal), len(reduced), count_single_conclusions(minimal))
    return minimal, reduced, report


def table_rules(c: Constraint, cid, universe=None, rule_set: str = "all") -> list:
    """Lifted membership rules for a table constraint, else []."""
    if not isinstance(c, Table):
        return []
    rules = generate_minimal_rules(c, universe)
    if rule_set == "minimized":
        rules = _reduced_cached(c, tuple(sorted(_universe(c, universe).items())))
    return lift(rules, f"m:{cid}")


@functools.lru_cache(maxsize=256)
def _reduced_cached(c: Table, universe_items: tuple) -> tuple:
    U = dict(universe_items)
    return tuple(remove_redundant(generate_minimal_rules(c, U), c, U))


@dataclass(frozen=True)
class PropagationRule:
    """``B -> C``: in presence of all constraints in B, add those in C."""

    body: tuple
    head: tuple

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "head", tuple(self.head))


Allowed = Union[Callable[[Constraint], bool], Collection[Constraint]]


def _allowed(allowed: Allowed, c: Constraint) -> bool:
    if callable(allowed):
        return allowed(c)
    return c in allowed


def apply_propagation_rule(pr: PropagationRule, p: CSP, allowed: Allowed) -> CSP:
    present = set(p.constraints)
    missing = [c for c in pr.body if c not in present]
    if missing:
        raise ContractViolation(f"propagation rule body not present: {missing}")
    for c in pr.head:
        if not _allowed(allowed, c):
            raise ContractViolation(f"head constraint {c!r} is outside the allowed set")
    new = [c for c in pr.head if c not in present]
    if not new:
        return p
    return p.with_constraints(p.constraints + tuple(new))


def transitivity_rules(p: CSP) -> list:
    """Ground instances of ``x<y, y<z -> x<z`` matching the constraints of ``p``."""
    lts = [c for c in p.constraints if isinstance(c, Lt)]
    out = []
    for a in lts:
        for b in lts:
            if a.y == b.x:
                out.append(PropagationRule((a, b), (Lt(a.x, b.y),)))
    return out


def propagation_closure(p: CSP, instantiate: Callable[[CSP], list], allowed: Allowed) -> CSP:
    while True:
        q = p
        for pr in instantiate(p):
            q = apply_propagation_rule(pr, q, allowed)
        if q is p or q.constraints == p.constraints:
            return q
        p = q
