"""Exception hierarchy shared by every riskcone module."""


class RiskconeError(Exception):
    """Base class for all library errors."""


class InputError(RiskconeError):
    """Malformed or inconsistent input data."""


class RefinementError(InputError):
    """A partition does not refine the partition of the previous level."""


class EmptyAtomError(InputError):
    """A partition contains an empty atom or does not cover the sample set."""


class ShapeError(InputError):
    """Vector lengths or dimensions do not match the ambient space."""


class MeasureError(InputError):
    """Masses are negative or do not sum to one."""


class DivisionByZero(RiskconeError, ZeroDivisionError):
    """A density was requested against a measure with a null point."""


class LevelOutOfRange(InputError):
    """A time index lies outside the admissible range."""


class NotANumeraire(InputError):
    """A proposed unit of account is not strictly positive."""


class BudgetError(RiskconeError):
    """A computation exceeded its configured size budget."""


class RepresentationUnavailable(BudgetError):
    """A cone conversion was refused because it exceeded the budget."""


class BudgetExhausted(BudgetError):
    """The pasting search ran out of budget before finishing."""


class BidAskError(InputError):
    """A bid-ask matrix violates the unit diagonal or the chain inequality."""


class RangeError(InputError):
    """A normalised price lies outside its bid-ask interval."""


class NoCPPError(RiskconeError):
    """No strictly positive consistent price process exists."""


class SchemaError(InputError):
    """A scenario document does not match the schema."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message
