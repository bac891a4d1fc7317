from __future__ import annotations

import itertools
import random

import pytest

from rulecp.bench import data_path
from rulecp.core import CSP, AbsDiffEq, Disjunctive, EqOffset, InSet, Lt, NotEqualValue, Table, domain
from rulecp.formats import load_table

T, F, U = "t", "f", "u"


def and3_table() -> Table:
    _, tuples = load_table(data_path("and3.table"))
    return Table((0, 1, 2), tuples)


def and3_csp(dx=(T, F, U), dy=(T, F, U), dz=(T, F, U)) -> CSP:
    return CSP(("x", "y", "z"), (domain(dx), domain(dy), domain(dz)), (and3_table(),))


@pytest.fixture
def and3():
    return and3_table()


def random_table(rng: random.Random, arity: int, size: int, density: float = None, vars=None) -> Table:
    vals = range(size)
    rows = list(itertools.product(vals, repeat=arity))
    density = rng.random() if density is None else density
    kept = [t for t in rows if rng.random() < density]
    return Table(tuple(vars or range(arity)), kept)


def random_subdomains(rng: random.Random, universe, nonempty=False):
    out = []
    for dom in universe:
        vals = sorted(dom)
        k = rng.randint(0 if not nonempty else 1, len(vals))
        out.append(frozenset(rng.sample(vals, k)))
    return tuple(out)


def random_binary_csp(rng: random.Random, max_vars=6, max_dom=5) -> CSP:
    n = rng.randint(2, max_vars)
    doms = [frozenset(rng.sample(range(max_dom), rng.randint(1, max_dom))) for _ in range(n)]
    cons = []
    for _ in range(rng.randint(1, 2 * n)):
        x, y = rng.sample(range(n), 2)
        kind = rng.randrange(5)
        if kind == 0:
            cons.append(Lt(x, y))
        elif kind == 1:
            cons.append(EqOffset(x, y, rng.randint(-2, 2)))
        elif kind == 2:
            cons.append(AbsDiffEq(x, y, rng.randint(0, 2)))
        else:
            pairs = [(a, b) for a in range(max_dom) for b in range(max_dom) if rng.random() < 0.5]
            cons.append(Table((x, y), pairs))
    if rng.random() < 0.3:
        cons.append(NotEqualValue(rng.randrange(n), rng.randrange(max_dom)))
    if rng.random() < 0.3:
        cons.append(InSet(rng.randrange(n), frozenset(rng.sample(range(max_dom), 2))))
    return CSP(tuple(f"v{i}" for i in range(n)), tuple(doms), tuple(cons))


def random_mixed_csp(rng: random.Random, max_vars=5, max_dom=4) -> CSP:
    """Binary builtins and tables, a ternary table and a disjunction."""
    p = random_binary_csp(rng, max_vars, max_dom)
    n = len(p.names)
    cons = list(p.constraints)
    if n >= 3 and rng.random() < 0.7:
        scope = tuple(rng.sample(range(n), 3))
        cons.append(random_table(rng, 3, max_dom, rng.uniform(0.3, 0.8), scope))
    if rng.random() < 0.6:
        x, y = rng.sample(range(n), 2)
        left = (EqOffset(x, y, 1),)
        right = (EqOffset(y, x, 1),) if rng.random() < 0.5 else (Lt(y, x), NotEqualValue(x, 0))
        cons.append(Disjunctive(left, right))
    return p.with_constraints(cons)


def random_monotonic_rules(rng: random.Random, n: int, size: int, count: int) -> list:
    """Support filters on random binary relations plus random membership rules.

    Both kinds are monotonic by construction. Support filters are idempotent;
    membership rules are stable.
    """
    from rulecp.arc import ArcRule
    from rulecp.membership import LiftedMembershipRule, MembershipRule

    rules = []
    for k in range(count):
        if rng.random() < 0.5:
            x, y = rng.sample(range(n), 2)
            pairs = [(a, b) for a in range(size) for b in range(size) if rng.random() < 0.6]
            rules.append(ArcRule(Table((x, y), pairs), rng.choice(("first", "second")), f"r{k}"))
        else:
            vars_ = rng.sample(range(n), rng.randint(1, min(3, n)))
            z, prem = vars_[0], vars_[1:]
            premise = tuple((y, frozenset(rng.sample(range(size), rng.randint(1, size)))) for y in prem)
            rule = MembershipRule(premise, ((z, rng.randrange(size)),))
            rules.append(LiftedMembershipRule(rule, f"m{k}"))
    return rules
