import random

import pytest

from conftest import F, T, U, and3_csp
from rulecp.arc import ArcRule, ac_rules, ac3
from rulecp.core import CSP, Disjunctive, EqOffset, Lt, Table, domain, interval
from rulecp.disjunction import disjunction_splitting_rule
from rulecp.errors import RuleContractError, StructuralError
from rulecp.membership import LiftedMembershipRule, MembershipRule
from rulecp.rules import (
    DerivationTrace,
    DomainReductionRule,
    SplittingRule,
    apply_reduction,
    check_equivalence_preserving,
    check_idempotent,
    check_inflationary,
    check_monotonic,
    exhaustive_nested_pairs,
    is_closed_under,
    random_nested_pairs,
)


def lt_csp(n=5):
    return CSP(("x", "y"), (interval(1, n), interval(1, n)), (Lt(0, 1),))


def test_arc_rule_one_on_lt():
    p = lt_csp()
    out = apply_reduction(ArcRule(Lt(0, 1), "first", 0), p.domains)
    assert out == (interval(1, 4), interval(1, 5))


def test_fixpoint_application_returns_same_object():
    d = (interval(1, 4), interval(2, 5))
    r = ArcRule(Lt(0, 1), "first", 0)
    assert apply_reduction(r, d) is d


def test_membership_rule_removes_t():
    r = LiftedMembershipRule(MembershipRule(((1, domain([U, F])),), ((2, T),)), "m")
    d = (domain([T, F, U]), domain([U, F]), domain([T, F, U]))
    assert apply_reduction(r, d)[2] == domain([F, U])


def test_non_subset_result_names_the_rule():
    bad = DomainReductionRule("grow", (0,), lambda sub: (sub[0] | {99},))
    with pytest.raises(RuleContractError, match="grow"):
        apply_reduction(bad, (domain([1]),))


def test_scheme_validation():
    with pytest.raises(StructuralError):
        DomainReductionRule("r", (), lambda s: s)
    with pytest.raises(StructuralError):
        DomainReductionRule("r", (1, 0), lambda s: s)
    with pytest.raises(StructuralError):
        DomainReductionRule("r", (0,), lambda s: s, stable=True)


def test_check_monotonic_arc_rule():
    r = ArcRule(Lt(0, 1), "first", 0)
    ok, witness = check_monotonic(r, random_nested_pairs(lt_csp().domains, 300, random.Random(1)))
    assert ok and witness is None


def test_check_monotonic_identity():
    r = DomainReductionRule("id", (0,), lambda s: s)
    ok, _ = check_monotonic(r, exhaustive_nested_pairs((interval(1, 4),), (0,)))
    assert ok


def test_check_monotonic_finds_witness():
    def odd(sub):
        (dom,) = sub
        return (frozenset([max(dom)]),) if len(dom) > 2 else sub

    r = DomainReductionRule("odd", (0,), odd)
    ok, witness = check_monotonic(r, exhaustive_nested_pairs((interval(1, 4),), (0,)))
    assert not ok
    small, large = witness
    assert not apply_reduction(r, small)[0] <= apply_reduction(r, large)[0]


def test_idempotence_and_inflation_checks():
    r = ArcRule(Lt(0, 1), "second", 0)
    samples = [d for d, _ in exhaustive_nested_pairs(lt_csp(3).domains, (0, 1))]
    assert check_idempotent(r, samples)[0]
    assert check_inflationary(r, samples)[0]

    def shave(sub):
        (dom,) = sub
        return (frozenset(sorted(dom)[1:]),)

    twice = DomainReductionRule("shave", (0,), shave)
    assert not check_idempotent(twice, [(interval(1, 3),)])[0]
    grow = DomainReductionRule("grow", (0,), lambda s: (s[0] | {7},))
    assert not check_inflationary(grow, [(interval(1, 3),)])[0]


def test_equivalence_preservation():
    p = CSP(("x", "y"), (interval(1, 4), interval(1, 4)), (Table((0, 1), [(1, 2), (3, 3), (4, 1)]),))
    for r in ac_rules(p)[0]:
        assert check_equivalence_preserving(r, p)
    c = Disjunctive((EqOffset(0, 1, 1),), (EqOffset(1, 0, 1),))
    q = CSP(("x", "y"), (interval(4, 10), interval(2, 7)), (c,))
    assert check_equivalence_preserving(disjunction_splitting_rule(c), q)
    drop = DomainReductionRule("drop", (0,), lambda s: (s[0] - {1},))
    assert not check_equivalence_preserving(drop, p)


def test_splitting_rule_needs_two_children():
    r = SplittingRule("one", lambda p: [p])
    with pytest.raises(RuleContractError):
        r(lt_csp())


def test_closed_under():
    p = lt_csp()
    rules, _ = ac_rules(p)
    assert not is_closed_under(p.domains, rules)
    assert is_closed_under(ac3(p).domains, rules)
    assert is_closed_under(p.domains, [])


def test_trace_text_and_statuses():
    p = lt_csp()
    trace = DerivationTrace(p.names)
    r = ArcRule(Lt(0, 1), "first", 0)
    d1 = apply_reduction(r, p.domains)
    trace.record(r, p.domains, d1)
    trace.finalize(p, closed=True)
    assert trace.to_text().splitlines() == ["step 1: ac1:0 [x,y] x:[1..5]->[1..4]", "status: stabilizing"]

    q = and3_csp([T], [F])
    tr = DerivationTrace(q.names)
    tr.record_label("m", (2,), q.domains, (q.domains[0], q.domains[1], domain([F])))
    tr.record_label("later", (0,), q.domains, q.domains)
    tr.finalize(q, closed=True)
    assert tr.status == "successful"
    assert len(tr.steps) == 1

    bad = CSP(("x", "y"), ({1}, {1}), (Lt(0, 1),))
    tf = DerivationTrace(bad.names).finalize(bad, closed=False)
    assert tf.status == "failed" and not tf.steps
