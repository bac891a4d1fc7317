"""Exception hierarchy shared by every rulecp module."""


class RulecpError(Exception):
    pass


class StructuralError(RulecpError):
    """A constraint, assignment or CSP is malformed (arity, scope, types)."""


class ContractViolation(RulecpError):
    """A documented precondition or rule contract does not hold."""


class RuleContractError(ContractViolation):
    def __init__(self, rule_id, message):
        super().__init__(f"rule {rule_id}: {message}")
        self.rule_id = rule_id


class StabilityViolation(ContractViolation):
    pass


class BudgetExceeded(RulecpError):
    """An oracle refused to run because the instance is over its budget."""


class BoundsExceeded(RulecpError):
    """Rule generation refused: the table is larger than the configured bounds."""


class ParseError(RulecpError):
    def __init__(self, message, position=None):
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position
