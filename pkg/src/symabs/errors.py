"""Exception taxonomy shared across the package."""


class SymabsError(Exception):
    """Base class for all errors raised by this package."""


class NonSquare(SymabsError):
    pass


class NotSymmetric(SymabsError):
    pass


class NotPositiveDefinite(SymabsError):
    pass


class NonFinite(SymabsError):
    pass


class DimensionMismatch(SymabsError):
    pass


class Overflow(SymabsError):
    pass


class NegativeInput(SymabsError):
    pass


class BadRange(SymabsError):
    pass


class Infeasible(SymabsError):
    pass


class EmptyResult(SymabsError):
    pass


class OutOfDomain(SymabsError):
    pass


class MisalignedSignal(SymabsError):
    pass


class Diverged(SymabsError):
    pass


class InputViolation(SymabsError):
    pass


class GridMismatch(SymabsError):
    pass


class GridTooCoarse(SymabsError):
    pass


class ParseError(SymabsError):
    pass


class SchemaError(SymabsError):
    """Configuration rejected; ``problems`` lists field paths with reasons."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
