"""Exception hierarchy shared by all modules."""


class InclusionError(Exception):
    """Base class for every error raised by inclusionlab."""


class InputError(InclusionError, ValueError):
    """Malformed input: non-finite entries, wrong shapes, bad symbols."""


class DomainError(InclusionError, ValueError):
    """Input is well-formed but outside the operation's domain."""


class SingularMatrixError(DomainError):
    def __init__(self, index: int, sigma_min: float, tol: float):
        self.index = index
        self.sigma_min = sigma_min
        self.tol = tol
        super().__init__(
            f"matrix {index} is singular within tolerance: "
            f"smallest singular value {sigma_min:.3g} <= {tol:.3g}"
        )


class NumericError(InclusionError, ArithmeticError):
    """Floating-point breakdown (non-convergence, overflow, zero state)."""


class HorizonError(InclusionError, IndexError):
    """A finite switching law was queried beyond its defined length."""


class PreconditionError(InclusionError, ValueError):
    """An operation's mathematical precondition does not hold."""


class CapExceededError(InclusionError, RuntimeError):
    """A synthesis search hit its configured cap; carries partial results."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
