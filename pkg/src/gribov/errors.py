"""Exception types raised by the numerical modules.

Every error carries a short machine-readable ``code`` used by the CLI
when it reports failures as JSON on standard error.
"""


class GribovError(Exception):
    code = "error"

    def __init__(self, detail="", **info):
        super().__init__(detail)
        self.detail = detail
        self.info = info


class DomainError(GribovError, ValueError):
    """Argument outside the mathematical domain of the function."""

    code = "domain_error"


class NonConvergence(GribovError, ArithmeticError):
    """An iteration hit its cap before reaching the requested tolerance."""

    code = "non_convergence"

    def __init__(self, detail="", index=None, **info):
        super().__init__(detail, index=index, **info)
        self.index = index


class IdentityViolation(GribovError, AssertionError):
    """An exact identity failed; always an implementation bug."""

    code = "identity_violation"


class NonPositiveTerm(GribovError, ValueError):
    code = "non_positive_term"


class BoundViolation(GribovError, AssertionError):
    code = "bound_violation"


class RecurrenceOverflow(GribovError, OverflowError):
    """A recurrence produced values beyond 1e300."""

    code = "overflow"
