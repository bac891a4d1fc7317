import random

import pytest

from conftest import F, T, U, and3_csp, random_mixed_csp
from rulecp.core import CSP, Disjunctive, EqOffset, Lt, domain, interval, is_failed, is_manifestly_solved
from rulecp.oracles import ac_closure, enumerate_solutions
from rulecp.search import KINDS, Propagator, SplitStrategy, compile_propagator, propagate, solve

ABS1 = CSP(("x", "y"), (interval(4, 10), interval(2, 7)), (Disjunctive((EqOffset(0, 1, 1),), (EqOffset(1, 0, 1),)),))


def test_and3_nine_triples():
    res = solve(and3_csp(), Propagator("membership"), SplitStrategy("first", "enum"))
    assert set(res.solutions) == enumerate_solutions(and3_csp())
    assert len(res.solutions) == 9


def test_manifestly_solved_root():
    p = and3_csp([T], [F], [F])
    res = solve(p, Propagator("membership"))
    assert res.solutions == [(T, F, F)]
    assert res.stats.nodes == 1


def test_disjunction_with_cd_and_bisection():
    res = solve(ABS1, Propagator("cd"), SplitStrategy("first", "bisect"))
    assert set(res.solutions) == enumerate_solutions(ABS1)


def test_first_mode():
    res = solve(and3_csp(), Propagator("membership"), mode="first")
    assert len(res.solutions) == 1
    unsat = CSP(("x", "y"), (interval(1, 3),) * 2, (Lt(0, 1), Lt(1, 0)))
    assert solve(unsat, mode="first").solutions == []
    with pytest.raises(ValueError):
        solve(unsat, mode="some")


def test_propagate():
    chain = CSP(("x", "y", "z"), (interval(1, 4),) * 3, (Lt(0, 1), Lt(1, 2)))
    q = propagate(chain, Propagator("ac"))
    assert q.domains == ac_closure(chain)
    assert propagate(q, Propagator("ac")) == q
    p = and3_csp(dy=[U, F])
    assert propagate(p, Propagator("membership")).domains[2] == domain([F, U])


def test_leaves_are_classified():
    rng = random.Random(51)
    for _ in range(20):
        p = random_mixed_csp(rng)
        res = solve(p, Propagator("membership", "finetuned"), SplitStrategy("random", "bisect", "random"), seed=3, keep_leaves=True)
        for kind, d in res.leaves:
            q = p.with_domains(d)
            assert is_failed(q) != is_manifestly_solved(q)
            assert (kind == "failed") == is_failed(q)


def test_strategy_independence_and_propagation_dominance():
    rng = random.Random(52)
    for _ in range(15):
        p = random_mixed_csp(rng)
        expected = enumerate_solutions(p)
        bare = solve(p, Propagator("none"), SplitStrategy("first", "enum")).stats.nodes
        for kind in KINDS:
            for select in ("first", "smallest", "random"):
                for split in ("enum", "bisect"):
                    res = solve(p, Propagator(kind), SplitStrategy(select, split, "random"), seed=7)
                    assert set(res.solutions) == expected
                    assert len(res.solutions) == len(expected)
            if kind != "none":
                assert solve(p, Propagator(kind), SplitStrategy("first", "enum")).stats.nodes <= bare


def test_removed_rules_are_reused_below():
    res = solve(and3_csp(), Propagator("membership", "finetuned"), SplitStrategy("first", "enum"))
    assert res.stats.removed_reused > 0


def test_root_trace():
    res = solve(ABS1, Propagator("cd"), trace=True)
    text = res.trace.to_text()
    assert "x:[4..10]->[4..8] y:[2..7]->[3..7]" in text
    assert text.endswith("status: stabilizing")


def test_config_validation():
    with pytest.raises(ValueError):
        Propagator("gac")
    with pytest.raises(ValueError):
        Propagator(scheduler="chr")
    with pytest.raises(ValueError):
        SplitStrategy(select="largest")
    compiled = compile_propagator(and3_csp(), Propagator("membership", rules="minimized"))
    assert len(compiled.rules) == 13
