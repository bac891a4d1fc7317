"""Problem (JSON), constraint table and rule file formats.

Problem file::

    {"variables": [{"name": "x", "domain": [4, 5, 6]}, ...],
     "constraints": [
        {"kind": "table", "scope": ["x", "y", "z"], "payload": {"tuples": [[...], ...]}},
        {"kind": "builtin", "scope": ["x", "y"], "payload": {"name": "eq_offset", "c": 1}},
        {"kind": "disjunction", "scope": ["x", "y"],
         "payload": {"branches": [[<constraint>, ...], [<constraint>, ...]]}}]}

Builtin names: ``lt``, ``eq_offset`` (x - y = c), ``abs_diff_eq`` (|x - y| = c),
``ne_value`` (x != value), ``in_set`` (x in values). A table payload may
name a table file (``{"file": "and3.table"}``) relative to the problem
file instead of listing tuples. Disjunctions with more than two branches
are nested to the right.

Table file: a header line of variable names, then one whitespace-separated
tuple per line. Rule file: one rule per line,
``y1 in {v,...}, y2 in {v,...} -> z1 != v, z2 != v``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Optional, Sequence

from .core import (
    CSP,
    AbsDiffEq,
    Constraint,
    Disjunctive,
    EqOffset,
    InSet,
    Lt,
    NotEqualValue,
    Table,
    domain,
    intern_symbol,
    sorted_values,
)
from .errors import ParseError, RulecpError
from .membership import MembershipRule

_INT = re.compile(r"-?\d+\Z")


def parse_value(token: str):
    token = token.strip()
    if _INT.match(token):
        return int(token)
    if not token or any(ch in token for ch in "{},") or token in ("in", "->", "!="):
        raise ParseError(f"bad value {token!r}")
    return intern_symbol(token)


def _json_value(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ParseError(f"values must be integers or strings, got {v!r}", where)
    return intern_symbol(v) if isinstance(v, str) else v


# --- tables -----------------------------------------------------------------


def parse_table(text: str, source: str = "<table>"):
    """Return ``(names, tuples)`` from table-file text."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise ParseError("empty table file", f"{source}:1")
    names = rows[0][1]
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable in header", f"{source}:{rows[0][0]}")
    tuples = []
    for lineno, toks in rows[1:]:
        if len(toks) != len(names):
            raise ParseError(f"expected {len(names)} values, got {len(toks)}", f"{source}:{lineno}")
        try:
            tuples.append(tuple(parse_value(t) for t in toks))
        except ParseError as e:
            raise ParseError(str(e), f"{source}:{lineno}") from None
    return names, tuples


def load_table(path) -> tuple:
    path = Path(path)
    return parse_table(path.read_text(encoding="utf-8"), str(path))


def table_csp(names: Sequence[str], tuples) -> CSP:
    """CSP of one table constraint; every variable ranges over all table values."""
    values = domain(v for t in tuples for v in t)
    return CSP(tuple(names), tuple(values for _ in names), (Table(tuple(range(len(names))), tuples),))


def format_table(names: Sequence[str], tuples) -> str:
    lines = [" ".join(names)]
    lines += [" ".join(str(v) for v in t) for t in sorted(tuples, key=lambda t: [str(x) for x in t])]
    return "\n".join(lines) + "\n"


# --- rules ------------------------------------------------------------------

_ATOM_IN = re.compile(r"\s*(\S+)\s+in\s+\{([^}]*)\}\s*")
_ATOM_NE = re.compile(r"\s*(\S+)\s*!=\s*(\S+)\s*")


def _split_atoms(text: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts


def parse_rule(line: str, names: Sequence[str]) -> MembershipRule:
    if "->" not in line:
        raise ParseError("missing '->'")
    lhs, rhs = line.split("->", 1)
    index = {n: k for k, n in enumerate(names)}

    def var(name):
        if name not in index:
            raise ParseError(f"unknown variable {name!r}")
        return index[name]

    premise = []
    for atom in _split_atoms(lhs):
        m = _ATOM_IN.fullmatch(atom)
        if not m:
            raise ParseError(f"bad premise atom {atom.strip()!r}")
        vals = [parse_value(v) for v in m.group(2).split(",") if v.strip()]
        if not vals:
            raise ParseError(f"empty range in {atom.strip()!r}")
        premise.append((var(m.group(1)), frozenset(vals)))
    conclusion = []
    for atom in _split_atoms(rhs):
        m = _ATOM_NE.fullmatch(atom)
        if not m:
            raise ParseError(f"bad conclusion atom {atom.strip()!r}")
        conclusion.append((var(m.group(1)), parse_value(m.group(2))))
    if not conclusion:
        raise ParseError("rule has no conclusion")
    try:
        return MembershipRule(tuple(premise), tuple(conclusion))
    except RulecpError as e:
        raise ParseError(str(e)) from None


def parse_rules(text: str, names: Sequence[str], source: str = "<rules>") -> list:
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            rules.append(parse_rule(stripped, names))
        except ParseError as e:
            raise ParseError(str(e), f"{source}:{lineno}") from None
    return rules


def format_rules(rules, names: Sequence[str]) -> str:
    ordered = sorted(rules, key=MembershipRule.sort_key)
    return "".join(r.render(names) + "\n" for r in ordered)


def format_rules_chr(rules, names: Sequence[str], constraint_name: str = "c") -> str:
    ordered = sorted(rules, key=MembershipRule.sort_key)
    scope = range(len(names))
    return "".join(r.render_chr(names, constraint_name, scope) + "\n" for r in ordered)


# --- problems ---------------------------------------------------------------

_BUILTINS = {"lt": 2, "eq_offset": 2, "abs_diff_eq": 2, "ne_value": 1, "in_set": 1}


def _need(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def _constraint_from_json(obj, index, where, base: Optional[Path]) -> Constraint:
    kind = _need(obj, "kind", where)
    scope_names = _need(obj, "scope", where)
    if not isinstance(scope_names, list):
        raise ParseError("scope must be a list of variable names", f"{where}.scope")
    scope = []
    for k, name in enumerate(scope_names):
        if name not in index:
            raise ParseError(f"unknown variable {name!r}", f"{where}.scope[{k}]")
        scope.append(index[name])
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise ParseError("payload must be an object", f"{where}.payload")
    try:
        if kind == "table":
            if "file" in payload:
                if base is None:
                    raise ParseError("table files need a problem file location", f"{where}.payload.file")
                header, tuples = load_table(base / payload["file"])
                if len(header) != len(scope):
                    raise ParseError("table file arity differs from scope", f"{where}.payload.file")
            else:
                raw = _need(payload, "tuples", f"{where}.payload")
                tuples = [
                    tuple(_json_value(v, f"{where}.payload.tuples[{k}]") for v in t) for k, t in enumerate(raw)
                ]
            return Table(tuple(scope), tuples)
        if kind == "builtin":
            name = _need(payload, "name", f"{where}.payload")
            if name not in _BUILTINS:
                raise ParseError(f"unknown builtin {name!r}", f"{where}.payload.name")
            if len(scope) != _BUILTINS[name]:
                raise ParseError(f"builtin {name} takes {_BUILTINS[name]} variables", f"{where}.scope")
            if name == "lt":
                return Lt(*scope)
            if name == "eq_offset":
                return EqOffset(*scope, int(_need(payload, "c", f"{where}.payload")))
            if name == "abs_diff_eq":
                return AbsDiffEq(*scope, int(_need(payload, "c", f"{where}.payload")))
            if name == "ne_value":
                return NotEqualValue(scope[0], _json_value(_need(payload, "value", f"{where}.payload"), where))
            values = _need(payload, "values", f"{where}.payload")
            return InSet(scope[0], frozenset(_json_value(v, where) for v in values))
        if kind == "disjunction":
            branches = _need(payload, "branches", f"{where}.payload")
            if not isinstance(branches, list) or len(branches) < 2:
                raise ParseError("a disjunction needs at least two branches", f"{where}.payload.branches")
            parsed = [
                tuple(
                    _constraint_from_json(c, index, f"{where}.payload.branches[{b}][{k}]", base)
                    for k, c in enumerate(branch)
                )
                for b, branch in enumerate(branches)
            ]
            node = Disjunctive(parsed[-2], parsed[-1])
            for branch in reversed(parsed[:-2]):
                node = Disjunctive(branch, (node,))
            return node
    except ParseError:
        raise
    except (RulecpError, TypeError, ValueError) as e:
        raise ParseError(str(e), where) from None
    raise ParseError(f"unknown constraint kind {kind!r}", f"{where}.kind")


def problem_from_json(data, base: Optional[Path] = None) -> CSP:
    variables = _need(data, "variables", "$")
    if not isinstance(variables, list):
        raise ParseError("variables must be a list", "$.variables")
    names, domains = [], []
    for k, v in enumerate(variables):
        where = f"$.variables[{k}]"
        names.append(_need(v, "name", where))
        vals = _need(v, "domain", where)
        if not isinstance(vals, list):
            raise ParseError("domain must be a list", f"{where}.domain")
        domains.append(domain(_json_value(x, f"{where}.domain") for x in vals))
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable names", "$.variables")
    index = {n: k for k, n in enumerate(names)}
    constraints = [
        _constraint_from_json(c, index, f"$.constraints[{k}]", base)
        for k, c in enumerate(data.get("constraints", []))
    ]
    try:
        return CSP(tuple(names), tuple(domains), tuple(constraints))
    except RulecpError as e:
        raise ParseError(str(e), "$") from None


def parse_problem(text: str, base: Optional[Path] = None, source: str = "<problem>") -> CSP:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"{source}:{e.lineno}:{e.colno}") from None
    return problem_from_json(data, base)


def load_problem(path) -> CSP:
    path = Path(path)
    return parse_problem(path.read_text(encoding="utf-8"), path.parent, str(path))


def _constraint_to_json(c: Constraint, names) -> dict:
    scope = [names[i] for i in c.scope]
    if isinstance(c, Table):
        tuples = sorted((list(t) for t in c.tuples), key=lambda t: [str(v) for v in t])
        return {"kind": "table", "scope": scope, "payload": {"tuples": tuples}}
    if isinstance(c, Disjunctive):
        return {
            "kind": "disjunction",
            "scope": scope,
            "payload": {"branches": [[_constraint_to_json(m, names) for m in b] for b in c.branches]},
        }
    if isinstance(c, Lt):
        payload = {"name": "lt"}
    elif isinstance(c, EqOffset):
        payload = {"name": "eq_offset", "c": c.c}
    elif isinstance(c, AbsDiffEq):
        payload = {"name": "abs_diff_eq", "c": c.c}
    elif isinstance(c, NotEqualValue):
        payload = {"name": "ne_value", "value": c.value}
    elif isinstance(c, InSet):
        payload = {"name": "in_set", "values": sorted_values(c.values)}
    else:
        raise RulecpError(f"cannot serialize {c!r}")
    return {"kind": "builtin", "scope": scope, "payload": payload}


def problem_to_json(p: CSP) -> dict:
    return {
        "variables": [{"name": n, "domain": sorted_values(d)} for n, d in zip(p.names, p.domains)],
        "constraints": [_constraint_to_json(c, p.names) for c in p.constraints],
    }


def dump_problem(p: CSP) -> str:
    return json.dumps(problem_to_json(p), indent=1) + "\n"
