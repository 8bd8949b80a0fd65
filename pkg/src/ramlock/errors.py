"""Exception hierarchy shared by all modules.

Errors split into two families so the command line can map them to exit
codes: :class:`InputError` (bad user input, exit 2) and
:class:`ComputationError` (a well-formed request that could not be
completed, exit 1).
"""

from __future__ import annotations


class RamlockError(Exception):
    """Base class for every error raised by this package."""


class InputError(RamlockError):
    """The request itself is malformed or outside the supported range."""


class ComputationError(RamlockError):
    """A valid request failed during computation."""


# localfield
class NotEisenstein(InputError):
    pass


class PrecisionTooLow(InputError):
    pass


class PrecisionLoss(ComputationError):
    pass


class NotInTower(InputError):
    pass


class Reducible(ComputationError):
    pass


class UnsupportedPresentation(ComputationError):
    pass


class NotDivisible(ComputationError):
    pass


# witt
class ContextMismatch(InputError):
    pass


class MissingRoots(InputError):
    pass


# ramification
class RangeError(InputError):
    pass


class TooLarge(ComputationError):
    pass


# phimodule
class BadExponent(InputError):
    pass


class BadShape(InputError):
    pass


class BudgetExceeded(ComputationError):
    def __init__(self, message: str, partial_count: int | None = None):
        super().__init__(message)
        self.partial_count = partial_count


class PrecisionInsufficient(ComputationError):
    pass


class NotFound(ComputationError):
    def __init__(self, message: str, best_count: int | None = None):
        super().__init__(message)
        self.best_count = best_count


class NotAnAutomorphism(InputError):
    pass


class SchemaError(InputError):
    pass
