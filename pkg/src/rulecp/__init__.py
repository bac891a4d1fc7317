"""Rule-based constraint propagation: domain reduction rules, chaotic
iteration schedulers, arc consistency, constructive disjunction and
generated membership rules, with a propagate-and-split solver."""

from .arc import ac3, ac_rules, is_arc_consistent
from .core import (
    CSP,
    AbsDiffEq,
    Disjunctive,
    EqOffset,
    InSet,
    Lt,
    NotEqualValue,
    Table,
    domain,
    interval,
)
from .disjunction import CDRule, cd_reduce
from .errors import (
    BoundsExceeded,
    BudgetExceeded,
    ContractViolation,
    ParseError,
    RuleContractError,
    RulecpError,
    StabilityViolation,
    StructuralError,
)
from .formats import load_problem, load_table, parse_rules, format_rules
from .membership import MembershipRule, generate_minimal_rules, remove_redundant
from .rules import DomainReductionRule, apply_reduction
from .scheduler import (
    compound_iteration,
    generic_iteration,
    improved_iteration,
    run_scheduler,
    stability_scheduler,
)
from .search import Propagator, SplitStrategy, propagate, solve

__version__ = "0.1.0"
