"""Exception types shared across the package."""


class StableWalkError(Exception):
    """Base class for all package-specific errors."""


class ModulusTooSmall(StableWalkError, ValueError):
    pass


class NonPrimeModulus(StableWalkError, ValueError):
    pass


class InsufficientRegularElements(StableWalkError, ValueError):
    pass


class DimensionMismatch(StableWalkError, ValueError):
    pass


class DimensionTooSmall(StableWalkError, ValueError):
    pass


class SingularMatrix(StableWalkError, ValueError):
    pass


class NotAField(StableWalkError, ValueError):
    pass


class NotRegularColour(StableWalkError, ValueError):
    pass


class TooLarge(StableWalkError, ValueError):
    pass


class DegreeOverflow(StableWalkError, ValueError):
    pass


class StabilityViolation(StableWalkError, RuntimeError):
    """A symbolic power exceeded the guaranteed cubic degree after collection.

    Signals an implementation bug or a broken hypothesis; never swallowed.
    """


class CollisionMismatch(StableWalkError, RuntimeError):
    """The two exchange routes produced formally different collision maps."""


class MapParseError(StableWalkError, ValueError):
    """Malformed serialized map; carries the 1-based offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
