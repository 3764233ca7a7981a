"""Exception types shared by all cqedwb modules.

Every error carries a ``name`` attribute so the CLI can report it in JSON.
"""


class CqedError(Exception):
    """Base class for computation errors."""

    @property
    def name(self):
        return type(self).__name__


class InvalidInput(CqedError, ValueError):
    pass


class NotHermitian(CqedError, ValueError):
    pass


class DimMismatch(CqedError, ValueError):
    pass


class InvalidProbability(CqedError, ValueError):
    pass


class TruncationNotConverged(CqedError, RuntimeError):
    pass


class OutOfRegime(CqedError, ValueError):
    pass


class Divergent(CqedError, ZeroDivisionError):
    pass


class LabelAmbiguous(CqedError, RuntimeError):
    pass


class DimTooLarge(CqedError, ValueError):
    pass


class NotPhaseGate(CqedError, ValueError):
    def __init__(self, message, leaked=0.0):
        super().__init__(message)
        self.leaked = leaked


class DomainError(CqedError, ValueError):
    pass


class NoConvergence(CqedError, RuntimeError):
    pass


class OnWire(CqedError, ValueError):
    pass


class InfiniteLifetime(CqedError, ValueError):
    pass


class SingularNetwork(CqedError, ArithmeticError):
    pass


class DegenerateBasis(CqedError, ValueError):
    pass


class SingularDesign(CqedError, ValueError):
    pass


class Unsupported(CqedError, ValueError):
    pass


class IllConditioned(CqedError, ValueError):
    pass


class RankDeficientPreps(CqedError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Emitted when a truncated Fock space is too small for the request."""
