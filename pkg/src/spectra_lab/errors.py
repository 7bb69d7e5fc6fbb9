"""Exception hierarchy. Each family maps onto one CLI exit code."""


class SpectraError(Exception):
    exit_code = 4


class InvalidInput(SpectraError, ValueError):
    exit_code = 2


class DegreeTooSmall(InvalidInput):
    pass


class DegeneratePair(InvalidInput):
    pass


class BadReduction(InvalidInput):
    pass


class NoNonPreperiodicCritical(InvalidInput):
    pass


class BudgetExceeded(SpectraError):
    exit_code = 3


class InternalAssertion(SpectraError):
    """Something that must hold mathematically did not; signals a bug."""

    exit_code = 4


class HenselCrossCheckFailed(InternalAssertion):
    pass


class NonConvergence(SpectraError):
    """Root finder gave up; carries the best residual it reached."""

    exit_code = 4

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual
