import pytest

from conftest import F, T, U, and3_csp
from rulecp.arc import ac_rules
from rulecp.core import CSP, AbsDiffEq, EqOffset, Table, domain, interval
from rulecp.errors import BudgetExceeded
from rulecp.oracles import (
    OracleBudget,
    ac_closure,
    enumerate_all_minimal_rules,
    enumerate_solutions,
    hyper_arc_closure,
    naive_rule_closure,
    normalize_failure,
    subdomain_tuples,
)
from rulecp.scheduler import generic_iteration

FULL = domain([T, F, U])


def test_enumerate_solutions():
    assert len(enumerate_solutions(and3_csp())) == 9
    assert enumerate_solutions(CSP(("x",), (frozenset(),))) == set()
    p = CSP(("x", "y"), (interval(4, 8), interval(3, 7)), (AbsDiffEq(0, 1, 1),))
    # x=4,5,6 have two partners each, x=7,8 one each
    assert len(enumerate_solutions(p)) == 8


def test_budget_refusal():
    p = CSP(("x", "y", "z"), (interval(1, 10),) * 3)
    with pytest.raises(BudgetExceeded):
        enumerate_solutions(p, OracleBudget(max_assignments=100))
    with pytest.raises(BudgetExceeded):
        list(subdomain_tuples(p.domains, (0, 1, 2), budget=OracleBudget(max_subdomain_tuples=10)))


def test_hyper_arc_closure():
    c = and3_csp().constraints[0]
    assert hyper_arc_closure(c, (FULL, domain([U, F]), FULL)) == (FULL, domain([U, F]), domain([F, U]))
    b = Table((0, 1), [(1, 2), (2, 3), (3, 3)])
    p = CSP(("x", "y"), (interval(1, 3), interval(1, 3)), (b,))
    assert hyper_arc_closure(b, p.domains) == ac_closure(p)


def test_naive_closure():
    p = CSP(("x", "y"), (interval(4, 10), interval(2, 7)), (EqOffset(0, 1, 1),))
    rules, _ = ac_rules(p)
    assert naive_rule_closure(rules, p.domains) == (interval(4, 8), interval(3, 7))
    assert naive_rule_closure(rules, p.domains) == generic_iteration(rules, p.domains).domains
    assert naive_rule_closure([], p.domains) == p.domains


def test_exhaustive_rule_enumeration_scale_limit():
    assert len(enumerate_all_minimal_rules(and3_csp().constraints[0])) == 18
    with pytest.raises(BudgetExceeded):
        enumerate_all_minimal_rules(Table((0, 1), [(v, v) for v in range(4)]))


def test_subdomain_tuples_counts():
    assert len(list(subdomain_tuples((FULL,) * 2, (0, 1)))) == 49
    assert len(list(subdomain_tuples((FULL,) * 2, (0,), nonempty=False))) == 8


def test_normalize_failure():
    assert normalize_failure((FULL, frozenset())) == (frozenset(), frozenset())
    assert normalize_failure((FULL, FULL)) == (FULL, FULL)
