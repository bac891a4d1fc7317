import json
import random

import pytest

from conftest import and3_table, random_mixed_csp
from rulecp.bench import data_path
from rulecp.errors import ParseError
from rulecp.formats import (
    dump_problem,
    format_rules,
    format_rules_chr,
    format_table,
    load_problem,
    parse_problem,
    parse_rules,
    parse_table,
)
from rulecp.membership import generate_minimal_rules


def test_table_round_trip():
    names, tuples = parse_table(data_path("and3.table").read_text())
    assert names == ["x", "y", "z"] and len(tuples) == 9
    again = parse_table(format_table(names, tuples))
    assert again[0] == names and set(again[1]) == set(tuples)


def test_table_errors_carry_line():
    with pytest.raises(ParseError, match=":3"):
        parse_table("x y\n1 2\n1 2 3\n", "t")
    with pytest.raises(ParseError):
        parse_table("# only a comment\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_table("x x\n1 1\n")


def test_rule_file_round_trip_is_bit_exact():
    text = format_rules(generate_minimal_rules(and3_table()), ["x", "y", "z"])
    rules = parse_rules(text, ["x", "y", "z"])
    assert format_rules(rules, ["x", "y", "z"]) == text
    assert "y in {f,u} -> z != t\n" in text


def test_rule_parse_errors_carry_line():
    with pytest.raises(ParseError, match="r:2"):
        parse_rules("y in {u,f} -> z != t\nq in {t} -> z != t\n", ["x", "y", "z"], "r")
    with pytest.raises(ParseError, match="r:1"):
        parse_rules("y in {u,f} => z != t\n", ["x", "y", "z"], "r")


def test_rule_file_tolerates_comments_and_order():
    rules = parse_rules("# and3\n\n  y in {f,u} -> z != t  \n", ["x", "y", "z"])
    assert len(rules) == 1


def test_chr_rendering():
    text = format_rules_chr(generate_minimal_rules(and3_table())[:1], ["x", "y", "z"], "and3")
    assert text.startswith("and3(X,Y,Z), X in [") and "==>" in text


def test_bundled_problems_round_trip():
    for path in sorted(data_path("").glob("*.json")):
        p = load_problem(path)
        assert parse_problem(dump_problem(p)) == p


def test_random_problems_round_trip():
    rng = random.Random(61)
    for _ in range(50):
        p = random_mixed_csp(rng)
        assert parse_problem(dump_problem(p)) == p


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"variables": [{"name": "x", "domain": [1]}], "constraints": [{"kind": "magic", "scope": ["x"]}]}, "constraints[0].kind"),
        ({"variables": [{"name": "x", "domain": [1]}], "constraints": [{"kind": "builtin", "scope": ["y"], "payload": {"name": "ne_value", "value": 1}}]}, "scope[0]"),
        ({"variables": [{"name": "x", "domain": [1, "a"]}]}, "$"),
        ({"variables": [{"name": "x", "domain": [1]}, {"name": "y", "domain": [1]}], "constraints": [{"kind": "builtin", "scope": ["x"], "payload": {"name": "lt"}}]}, "constraints[0].scope"),
        ({"variables": [{"name": "x", "domain": [True]}]}, "variables[0].domain"),
        ({"variables": [{"name": "x", "domain": [1]}], "constraints": [{"kind": "disjunction", "scope": ["x"], "payload": {"branches": [[]]}}]}, "branches"),
    ],
)
def test_problem_errors_have_positions(doc, where):
    with pytest.raises(ParseError) as info:
        parse_problem(json.dumps(doc))
    assert where in str(info.value)


def test_n_ary_disjunction_nests_right():
    doc = {
        "variables": [{"name": "x", "domain": [1, 2, 3]}],
        "constraints": [
            {
                "kind": "disjunction",
                "scope": ["x"],
                "payload": {"branches": [[{"kind": "builtin", "scope": ["x"], "payload": {"name": "in_set", "values": [v]}}] for v in (1, 2, 3)]},
            }
        ],
    }
    (c,) = parse_problem(json.dumps(doc)).constraints
    assert len(c.left) == 1 and len(c.right) == 1
    assert c.check([2]) and c.check([3]) and c.check([1])
