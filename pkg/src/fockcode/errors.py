"""Exception hierarchy shared by every module."""


class FockcodeError(Exception):
    """Base class for all library errors."""


class DimensionError(FockcodeError, ValueError):
    """Operands disagree on mode count or vector dimension."""


class DomainError(FockcodeError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(FockcodeError, ValueError):
    """Input data violates a type invariant (normalization, hermiticity, ...)."""


class ResourceError(FockcodeError):
    """Exhaustive enumeration would exceed the configured cap."""


class CapacityError(FockcodeError, ValueError):
    """Not enough Fock modes to hold the longest codeword."""


class CorruptionError(FockcodeError):
    """A Fock ket that is not a codeword of the book was found while decoding."""

    def __init__(self, message: str, ket: str | None = None):
        super().__init__(message)
        self.ket = ket


class SideInfoMismatchError(FockcodeError):
    """The classical total-length side information does not match the codebook."""


class PreconditionError(FockcodeError):
    """A circuit stage was applied to a state it is not defined on."""
