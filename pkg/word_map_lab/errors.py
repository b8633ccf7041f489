"""Exception hierarchy shared by every module; each class knows the CLI exit code it maps to."""

from typing import Optional

EXIT_OK = 0
EXIT_CONJECTURE_FAILURE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_ORACLE = 4


class WordLabError(Exception):
    exit_code = EXIT_USAGE


class ConfigurationError(WordLabError):
    pass


class WordError(WordLabError):
    pass


class WordSyntaxError(WordError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class GroupValidationError(WordLabError):
    pass


class CatalogError(WordLabError):
    pass


class PreconditionError(WordLabError):
    pass


class BudgetExceededError(WordLabError):
    exit_code = EXIT_BUDGET

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {required} evaluations, budget is {budget}")
        self.required = required
        self.budget = budget


class CharacterTableError(WordLabError):
    exit_code = EXIT_ORACLE


class FourierResidualError(WordLabError):
    exit_code = EXIT_ORACLE


class OracleDisagreementError(WordLabError):
    exit_code = EXIT_ORACLE


class TheoremViolationError(WordLabError):
    """A proven statement failed on inputs that satisfy its hypotheses."""

    exit_code = EXIT_ORACLE

    def __init__(self, message: str, report: Optional[object] = None):
        super().__init__(message)
        self.report = report
