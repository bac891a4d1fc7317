import random

from conftest import random_binary_csp
from rulecp.arc import ArcRule, ac3, ac3_run, ac_rules, is_arc_consistent, revise, rules_for_constraint
from rulecp.core import CSP, EqOffset, InSet, Lt, Table, domain, interval
from rulecp.oracles import ac_closure, enumerate_solutions
from rulecp.rules import is_closed_under


def test_revise_offset_first():
    d = (interval(4, 10), interval(2, 7))
    assert revise(ArcRule(EqOffset(0, 1, 1), "first", 0), d) == (interval(4, 8), interval(2, 7))


def test_revise_fixpoint_and_table():
    d = (interval(4, 8), interval(3, 7))
    assert revise(ArcRule(EqOffset(0, 1, 1), "first", 0), d) is d
    out = revise(ArcRule(Table((0, 1), [(1, 2)]), "first", 0), (domain([1, 3]), domain([1, 2])))
    assert out[0] == domain([1])


def test_arc_consistency_predicate():
    assert is_arc_consistent(CSP(("x", "y"), (interval(4, 8), interval(3, 7)), (EqOffset(0, 1, 1),)))
    assert is_arc_consistent(CSP(("x",), (interval(1, 3),), (InSet(0, frozenset([1])),)))
    assert not is_arc_consistent(CSP(("x", "y"), (interval(1, 5),) * 2, (Lt(0, 1),)))


def test_ac3_chain():
    p = CSP(("x", "y", "z"), (interval(1, 5),) * 3, (Lt(0, 1), Lt(1, 2)))
    assert ac3(p).domains == (interval(1, 3), interval(2, 4), interval(3, 5))


def test_ac3_already_consistent_and_failure():
    p = CSP(("x", "y"), (interval(1, 4), interval(2, 5)), (Lt(0, 1),))
    assert ac3(p) == p
    q = ac3(CSP(("x", "y"), (domain([5]), domain([1])), (Lt(0, 1),)))
    assert any(not x for x in q.domains)


def test_node_rules_for_unary():
    (r,) = rules_for_constraint(InSet(0, frozenset([2, 3])), 0)
    assert r.id == "node:0"
    assert r.reduce((interval(1, 4),)) == (domain([2, 3]),)


def test_ac3_closure_soundness_random():
    rng = random.Random(21)
    for _ in range(60):
        p = random_binary_csp(rng)
        q = ac3(p)
        rules, _ = ac_rules(p)
        assert q.domains == ac_closure(p)
        assert is_closed_under(q.domains, rules)
        if all(q.domains):
            assert is_arc_consistent(q)
        assert enumerate_solutions(q) == enumerate_solutions(p)


def test_ac3_choose_policies():
    rng = random.Random(22)
    for _ in range(20):
        p = random_binary_csp(rng)
        ref = ac3(p).domains
        for choose in ("lifo", "random"):
            assert ac3_run(p, choose, seed=3).domains == ref
