"""Values, domains, constraints and CSPs, plus the status predicates.

A CSP is an immutable value: a sequence of named variables with finite
domains and a tuple of constraints over them. Constraint scopes refer to
variables by their 0-based position. Every transformation in the package
(rule application, propagation, splitting) returns a new CSP or a new
domain tuple; nothing is mutated in place.

Values are either Python ints or symbol strings. Within one CSP all values
share a tag. Symbols are ordered by the order in which they were first
interned, so ``t, f, u`` read from the Kleene table keep that order.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .errors import ContractViolation, StructuralError

Value = Union[int, str]
Domain = frozenset
DomainTuple = tuple

_SYMBOL_ORDER: dict[str, int] = {}


def intern_symbol(name: str) -> str:
    if name not in _SYMBOL_ORDER:
        _SYMBOL_ORDER[name] = len(_SYMBOL_ORDER)
    return name


def value_key(v: Value):
    if isinstance(v, str):
        return (1, _SYMBOL_ORDER.get(v, len(_SYMBOL_ORDER)), v)
    return (0, v, "")


def sorted_values(values: Iterable[Value]) -> list:
    return sorted(values, key=value_key)


def domain(values: Iterable[Value]) -> frozenset:
    values = list(values)
    for v in values:
        if isinstance(v, str):
            intern_symbol(v)
    return frozenset(values)


def interval(lo: int, hi: int) -> frozenset:
    """The integer domain ``[lo..hi]`` (inclusive)."""
    return frozenset(range(lo, hi + 1))


def format_domain(d: Iterable[Value]) -> str:
    vals = sorted_values(d)
    if len(vals) >= 3 and all(isinstance(v, int) for v in vals) and vals[-1] - vals[0] == len(vals) - 1:
        return f"[{vals[0]}..{vals[-1]}]"
    return "{" + ",".join(str(v) for v in vals) + "}"


@dataclass(frozen=True)
class VariableId:
    index: int
    name: str


class Constraint(ABC):
    """A relation over a scope of variable positions.

    ``check`` receives a full assignment indexed by variable position, so
    the same code serves plain and disjunctive constraints.
    """

    @property
    @abstractmethod
    def scope(self) -> tuple: ...

    @abstractmethod
    def check(self, assignment: Sequence[Value]) -> bool: ...

    def restrict(self, domains: Sequence[frozenset]) -> "Constraint":
        return self

    def describe(self, names: Sequence[str]) -> str:
        return repr(self)

    @property
    def arity(self) -> int:
        return len(self.scope)


def _check_len(c: Constraint, assignment: Sequence[Value]) -> None:
    if c.scope and max(c.scope) >= len(assignment):
        raise StructuralError(
            f"assignment of length {len(assignment)} does not cover scope {c.scope}"
        )


@dataclass(frozen=True)
class Table(Constraint):
    """Extensionally given constraint: the explicit set of allowed tuples."""

    vars: tuple
    tuples: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))
        if len(set(self.vars)) != len(self.vars):
            raise StructuralError(f"table scope repeats a variable: {self.vars}")
        for t in self.tuples:
            if len(t) != len(self.vars):
                raise StructuralError(
                    f"tuple {t} has length {len(t)}, scope has {len(self.vars)}"
                )

    @property
    def scope(self):
        return self.vars

    def check(self, assignment):
        _check_len(self, assignment)
        return tuple(assignment[i] for i in self.vars) in self.tuples

    def restrict(self, domains):
        kept = frozenset(
            t for t in self.tuples if all(v in domains[i] for i, v in zip(self.vars, t))
        )
        if kept == self.tuples:
            return self
        return Table(self.vars, kept)

    def describe(self, names):
        return f"table({','.join(names[i] for i in self.vars)}; {len(self.tuples)} tuples)"


@dataclass(frozen=True)
class Lt(Constraint):
    x: int
    y: int

    @property
    def scope(self):
        return (self.x, self.y)

    def check(self, a):
        _check_len(self, a)
        return a[self.x] < a[self.y]

    def describe(self, names):
        return f"{names[self.x]} < {names[self.y]}"


@dataclass(frozen=True)
class EqOffset(Constraint):
    """``x - y = c``"""

    x: int
    y: int
    c: int

    @property
    def scope(self):
        return (self.x, self.y)

    def check(self, a):
        _check_len(self, a)
        return a[self.x] - a[self.y] == self.c

    def describe(self, names):
        return f"{names[self.x]} - {names[self.y]} = {self.c}"


@dataclass(frozen=True)
class AbsDiffEq(Constraint):
    """``|x - y| = c``"""

    x: int
    y: int
    c: int

    @property
    def scope(self):
        return (self.x, self.y)

    def check(self, a):
        _check_len(self, a)
        return abs(a[self.x] - a[self.y]) == self.c

    def describe(self, names):
        return f"|{names[self.x]} - {names[self.y]}| = {self.c}"


@dataclass(frozen=True)
class NotEqualValue(Constraint):
    x: int
    value: Value

    @property
    def scope(self):
        return (self.x,)

    def check(self, a):
        _check_len(self, a)
        return a[self.x] != self.value

    def describe(self, names):
        return f"{names[self.x]} != {self.value}"


@dataclass(frozen=True)
class InSet(Constraint):
    x: int
    values: frozenset

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))

    @property
    def scope(self):
        return (self.x,)

    def check(self, a):
        _check_len(self, a)
        return a[self.x] in self.values

    def describe(self, names):
        return f"{names[self.x]} in {format_domain(self.values)}"


@dataclass(frozen=True)
class Disjunctive(Constraint):
    """``C_1 or C_2`` where each branch is a conjunction of constraints."""

    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        for c in self.left + self.right:
            if not isinstance(c, Constraint):
                raise StructuralError(f"disjunct member {c!r} is not a constraint")

    @property
    def branches(self) -> tuple:
        return (self.left, self.right)

    @property
    def scope(self):
        return tuple(sorted({i for c in self.left + self.right for i in c.scope}))

    def check(self, a):
        return all(c.check(a) for c in self.left) or all(c.check(a) for c in self.right)

    def restrict(self, domains):
        left = tuple(c.restrict(domains) for c in self.left)
        right = tuple(c.restrict(domains) for c in self.right)
        if left == self.left and right == self.right:
            return self
        return Disjunctive(left, right)

    def describe(self, names):
        def side(cs):
            return " & ".join(c.describe(names) for c in cs) or "true"

        return f"({side(self.left)}) | ({side(self.right)})"


@dataclass(frozen=True)
class CSP:
    names: tuple
    domains: tuple
    constraints: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "domains", tuple(frozenset(d) for d in self.domains))
        object.__setattr__(self, "constraints", tuple(dict.fromkeys(self.constraints)))
        if len(self.names) != len(self.domains):
            raise StructuralError("one domain per variable required")
        if len(set(self.names)) != len(self.names):
            raise StructuralError(f"duplicate variable names in {self.names}")
        n = len(self.names)
        for c in self.constraints:
            if any(i < 0 or i >= n for i in c.scope):
                raise StructuralError(f"constraint {c!r} refers to an undeclared variable")
        tags = {isinstance(v, str) for d in self.domains for v in d}
        if len(tags) > 1:
            raise StructuralError("CSP mixes integer and symbol values")

    @property
    def variables(self) -> tuple:
        return tuple(
            (VariableId(i, name), d) for i, (name, d) in enumerate(zip(self.names, self.domains))
        )

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def with_domains(self, domains: Sequence[frozenset]) -> "CSP":
        return restrict_constraints(self, domains)

    def with_constraints(self, constraints: Iterable[Constraint]) -> "CSP":
        return CSP(self.names, self.domains, tuple(constraints))

    def describe(self) -> str:
        cs = "; ".join(c.describe(self.names) for c in self.constraints)
        ds = ", ".join(f"{n} in {format_domain(d)}" for n, d in zip(self.names, self.domains))
        return f"<{cs} ; {ds}>"


def satisfies(a: Sequence[Value], c: Constraint) -> bool:
    return c.check(a)


def is_solution(a: Sequence[Value], p: CSP) -> bool:
    if len(a) != len(p.names):
        raise StructuralError(f"assignment length {len(a)} != {len(p.names)} variables")
    return all(v in d for v, d in zip(a, p.domains)) and all(c.check(a) for c in p.constraints)


def scope_assignments(c: Constraint, domains: Sequence[frozenset]) -> Iterator[list]:
    """Yield full-length partial assignments covering ``c``'s scope.

    Positions outside the scope hold None. The same list object is reused
    between yields.
    """
    scope = c.scope
    buf = [None] * len(domains)
    for combo in itertools.product(*(sorted_values(domains[i]) for i in scope)):
        for i, v in zip(scope, combo):
            buf[i] = v
        yield buf


def constraint_is_empty(c: Constraint, domains: Sequence[frozenset]) -> bool:
    if isinstance(c, Table):
        return not any(
            all(v in domains[i] for i, v in zip(c.vars, t)) for t in c.tuples
        )
    return not any(c.check(a) for a in scope_assignments(c, domains))


def is_failed(p: CSP) -> bool:
    if any(not d for d in p.domains):
        return True
    return any(constraint_is_empty(c, p.domains) for c in p.constraints)


def is_manifestly_solved(p: CSP) -> bool:
    if any(len(d) != 1 for d in p.domains):
        return False
    a = [next(iter(d)) for d in p.domains]
    return all(c.check(a) for c in p.constraints)


def is_subdomain_tuple(d: Sequence[frozenset], e: Sequence[frozenset]) -> bool:
    """True when ``d`` is componentwise contained in ``e``."""
    return len(d) == len(e) and all(x <= y for x, y in zip(d, e))


def restrict_constraints(p: CSP, new_domains: Sequence[frozenset]) -> CSP:
    new_domains = tuple(frozenset(d) for d in new_domains)
    if not is_subdomain_tuple(new_domains, p.domains):
        raise ContractViolation("restrict_constraints: new domains are not subsets of the current ones")
    constraints = tuple(c.restrict(new_domains) for c in p.constraints)
    return CSP(p.names, new_domains, constraints)
