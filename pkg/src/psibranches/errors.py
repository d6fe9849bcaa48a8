"""Exception and warning types shared across the package."""


class PsiError(Exception):
    """Base class for all errors raised by psibranches."""


class DomainError(PsiError, ValueError):
    """Argument lies outside the domain of the requested operation or branch."""


class UnsupportedCategoryError(DomainError):
    """The parameter category does not support the requested branch or operation."""


class RangeError(PsiError, OverflowError):
    """Evaluation would overflow binary64."""


class ConvergenceError(PsiError, ArithmeticError):
    """An iterative solver did not reach its tolerance within its budget."""


class SingularityError(PsiError, ArithmeticError):
    """Evaluation hit a critical point where the derivative vanishes."""


class NearBranchPointWarning(UserWarning):
    """The argument is numerically close to a branch point."""
