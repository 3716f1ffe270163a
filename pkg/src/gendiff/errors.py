"""Exception hierarchy shared by all gendiff modules."""


class GendiffError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GendiffError, ValueError):
    pass


class BadParam(GendiffError, ValueError):
    pass


class UnknownModel(GendiffError, KeyError):
    pass


class VolVanishes(GendiffError, ValueError):
    def __init__(self, x):
        super().__init__(f"volatility vanishes at x={x!r}")
        self.x = x


class QuadratureDiverged(GendiffError, ArithmeticError):
    pass


class NotConverged(GendiffError, ArithmeticError):
    pass


class NotDc(GendiffError, ValueError):
    pass


class AtomAtBlowUp(GendiffError, ValueError):
    pass


class NeedsDeclaration(GendiffError, ValueError):
    pass


class BadStart(GendiffError, ValueError):
    pass


class EmptyTruncation(GendiffError, ValueError):
    pass


class NoExits(GendiffError, ValueError):
    pass


class ParseError(GendiffError, ValueError):
    """Model-spec document could not be parsed; ``field`` names the offender."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class ValidationError(GendiffError, ValueError):
    """A model violates one or more of its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AtomOutsideTruncation(UserWarning):
    """A speed-measure atom lies outside a chain truncation and is dropped."""
