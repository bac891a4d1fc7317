"""Deterministic and splitting proof rules.

A :class:`DomainReductionRule` is a function on domain tuples that only
looks at, and only shrinks, the components listed in its scheme. Rules are
instantiated per constraint occurrence when a propagator is built, so
application never needs to match or rename anything at run time.

Domain tuples are ordered by reverse componentwise inclusion: ``d`` is below
``e`` when every ``d[i]`` contains ``e[i]``. The initial domains are the
least element, and rule application only ever moves upwards.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .core import CSP, format_domain, is_failed, is_manifestly_solved, is_subdomain_tuple
from .errors import RuleContractError, StructuralError


class DomainReductionRule:
    """A domain reduction rule with its declared capability flags.

    ``reduce`` maps the scheme-projected sub-tuple of domains to a reduced
    sub-tuple of the same length. ``inputs`` lists the variables whose
    shrinking can turn a fixpoint of this rule into a non-fixpoint; it
    defaults to the scheme. ``applies`` is only used for stable rules: once
    it holds, one application makes the rule permanently inert.
    """

    def __init__(
        self,
        id: str,
        scheme: Sequence[int],
        reduce: Callable[[tuple], tuple],
        *,
        monotonic: bool = True,
        idempotent: bool = False,
        stable: bool = False,
        inputs: Optional[Sequence[int]] = None,
        applies: Optional[Callable[[tuple], bool]] = None,
    ):
        scheme = tuple(scheme)
        if not scheme:
            raise StructuralError(f"rule {id}: empty scheme")
        if any(b <= a for a, b in zip(scheme, scheme[1:])) or scheme[0] < 0:
            raise StructuralError(f"rule {id}: scheme {scheme} is not strictly increasing")
        if stable and applies is None:
            raise StructuralError(f"rule {id}: stable rules need an applies test")
        self.id = id
        self.scheme = scheme
        self.reduce = reduce
        self.monotonic = monotonic
        self.idempotent = idempotent
        self.stable = stable
        self.inputs = tuple(scheme if inputs is None else inputs)
        self.applies = applies

    def __repr__(self):
        return f"<{type(self).__name__} {self.id} {list(self.scheme)}>"

    def project(self, d: Sequence[frozenset]) -> tuple:
        return tuple(d[i] for i in self.scheme)


def apply_reduction(r: DomainReductionRule, d: tuple) -> tuple:
    """Apply ``r`` to the domain tuple ``d``.

    Returns ``d`` itself (same object) when nothing changes, which lets
    schedulers test for change with ``is``.
    """
    if r.scheme[-1] >= len(d):
        raise StructuralError(f"rule {r.id}: scheme {r.scheme} out of range for {len(d)} variables")
    before = r.project(d)
    after = tuple(r.reduce(before))
    if len(after) != len(before):
        raise RuleContractError(r.id, "reduce returned a tuple of the wrong length")
    changed = False
    for b, a in zip(before, after):
        if not a <= b:
            raise RuleContractError(r.id, f"reduced domain {format_domain(a)} is not a subset of {format_domain(b)}")
        if a != b:
            changed = True
    if not changed:
        return d
    out = list(d)
    for i, a in zip(r.scheme, after):
        out[i] = frozenset(a)
    return tuple(out)


def is_closed_under(d: tuple, rules: Iterable[DomainReductionRule]) -> bool:
    return all(apply_reduction(r, d) is d for r in rules)


def _subsets(s: frozenset) -> list:
    items = sorted(s, key=repr)
    return [
        frozenset(c)
        for k in range(len(items) + 1)
        for c in itertools.combinations(items, k)
    ]


def exhaustive_nested_pairs(universe: Sequence[frozenset], scheme: Sequence[int]) -> Iterator[tuple]:
    """Every pair ``(D, E)`` with ``D <= E <= universe`` on the scheme.

    Components outside the scheme are fixed to the universe.
    """
    per_var = []
    for i in scheme:
        per_var.append([(a, b) for b in _subsets(universe[i]) for a in _subsets(b)])
    for combo in itertools.product(*per_var):
        small, large = list(universe), list(universe)
        for i, (a, b) in zip(scheme, combo):
            small[i], large[i] = a, b
        yield tuple(small), tuple(large)


def random_nested_pairs(universe: Sequence[frozenset], count: int, rng: random.Random) -> Iterator[tuple]:
    for _ in range(count):
        large = tuple(frozenset(v for v in u if rng.random() < 0.7) for u in universe)
        small = tuple(frozenset(v for v in e if rng.random() < 0.7) for e in large)
        yield small, large


def check_monotonic(r: DomainReductionRule, samples: Iterable[tuple]):
    """Check ``D <= E`` implies ``r(D) <= r(E)`` on the given samples.

    Returns ``(True, None)`` or ``(False, (D, E))`` with a falsifying pair.
    """
    for small, large in samples:
        if not is_subdomain_tuple(small, large):
            continue
        if not is_subdomain_tuple(apply_reduction(r, small), apply_reduction(r, large)):
            return False, (small, large)
    return True, None


def check_idempotent(r: DomainReductionRule, samples: Iterable[tuple]):
    for d in samples:
        once = apply_reduction(r, d)
        if apply_reduction(r, once) != once:
            return False, d
    return True, None


def check_inflationary(r: DomainReductionRule, samples: Iterable[tuple]):
    """``apply_reduction`` already raises on a non-subset result; this
    turns that into a boolean with a witness."""
    for d in samples:
        try:
            out = apply_reduction(r, d)
        except RuleContractError:
            return False, d
        if not is_subdomain_tuple(out, d):
            return False, d
    return True, None


@dataclass(frozen=True)
class SplittingRule:
    id: str
    split: Callable[[CSP], Sequence[CSP]]

    def __call__(self, p: CSP) -> list:
        children = list(self.split(p))
        if len(children) < 2:
            raise RuleContractError(self.id, f"split produced {len(children)} CSPs, need at least 2")
        return children


def check_equivalence_preserving(r, p: CSP) -> bool:
    """Decide equivalence preservation of ``r`` on ``p`` by enumeration."""
    from .oracles import enumerate_solutions

    before = enumerate_solutions(p)
    if isinstance(r, SplittingRule):
        after = set()
        for child in r(p):
            after |= enumerate_solutions(child)
        return after == before
    return enumerate_solutions(p.with_domains(apply_reduction(r, p.domains))) == before


@dataclass
class Step:
    rule_id: str
    scheme: tuple
    before: tuple
    after: tuple


@dataclass
class DerivationTrace:
    """Ordered log of rule applications that changed the domains."""

    names: tuple
    steps: list = field(default_factory=list)
    status: str = "ongoing"

    def record(self, r: DomainReductionRule, before: tuple, after: tuple) -> None:
        self.steps.append(Step(r.id, r.scheme, r.project(before), r.project(after)))

    def record_label(self, label: str, scheme: tuple, before: tuple, after: tuple) -> None:
        self.steps.append(
            Step(label, scheme, tuple(before[i] for i in scheme), tuple(after[i] for i in scheme))
        )

    def finalize(self, p: CSP, closed: bool) -> "DerivationTrace":
        """Assign the terminal status at the first qualifying CSP.

        ``p`` is the CSP the derivation started from. Steps after the first
        failed or manifestly solved CSP are dropped, since the derivation
        ends there.
        """
        d = list(p.domains)

        def status_of():
            q = p.with_domains(d)
            if is_failed(q):
                return "failed"
            if is_manifestly_solved(q):
                return "successful"
            return None

        status = status_of()
        if status is not None:
            self.steps = []
            self.status = status
            return self
        for k, step in enumerate(self.steps):
            for i, a in zip(step.scheme, step.after):
                d[i] = a
            status = status_of()
            if status is not None:
                del self.steps[k + 1:]
                self.status = status
                return self
        self.status = "stabilizing" if closed else "ongoing"
        return self

    def to_text(self) -> str:
        lines = []
        for k, s in enumerate(self.steps, 1):
            scheme = ",".join(self.names[i] for i in s.scheme)
            moves = " ".join(
                f"{self.names[i]}:{format_domain(b)}->{format_domain(a)}"
                for i, b, a in zip(s.scheme, s.before, s.after)
                if a != b
            )
            lines.append(f"step {k}: {s.rule_id} [{scheme}] {moves}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines)
