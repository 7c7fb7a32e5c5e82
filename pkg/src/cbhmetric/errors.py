"""Exception and warning types raised across the package."""


class CBHError(Exception):
    """Base class for all errors raised by cbhmetric."""


class NumericalError(CBHError):
    """A numerical kernel failed; the CLI maps these to exit code 3."""


class NonHermitianInput(CBHError, ValueError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class AmbiguousRank(NumericalError):
    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class InvalidDimension(CBHError, ValueError):
    pass


class InvalidParams(CBHError, ValueError):
    pass


class RecurrenceBreakdown(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class UnknownFamily(CBHError, ValueError):
    pass


class NonPositiveMetric(CBHError, ValueError):
    pass


class NoSignChange(CBHError):
    """The metric family stayed positive definite over the whole search range.

    Not a failure for families that are positive up to the exceptional
    point; ``last_gamma`` and ``min_eigenvalue`` describe the last probe.
    """

    def __init__(self, message, last_gamma=None, min_eigenvalue=None):
        super().__init__(message)
        self.last_gamma = last_gamma
        self.min_eigenvalue = min_eigenvalue


class BranchCrossing(NumericalError):
    pass


class OutOfValidityRange(UserWarning):
    pass


class Unsupported(UserWarning):
    pass


class IllConditioned(UserWarning):
    """Emitted by the metric solvers when |gamma| approaches the exceptional point."""
