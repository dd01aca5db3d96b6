"""Exception hierarchy shared by every PrimeBound module."""


class PrimeBoundError(Exception):
    """Base class for operational errors. The cli turns these into exit status 1."""


class DomainError(PrimeBoundError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParseError(PrimeBoundError, ValueError):
    """Text could not be parsed into a constant."""


class TableRangeError(PrimeBoundError, IndexError):
    """A prime table is too small for the requested index or value.

    ``required_limit`` carries a sieve bound that would have been large enough,
    when the caller can know it.
    """

    def __init__(self, message: str, required_limit: int | None = None):
        super().__init__(message)
        self.required_limit = required_limit


class ResourceError(PrimeBoundError):
    """A request would exceed the configured memory budget."""


class BracketError(PrimeBoundError):
    """No sign change was found below the configured bracket cap."""


class ContractViolation(PrimeBoundError):
    """A claim the computation relies on was contradicted by evaluation."""


class ConfigError(ValueError):
    """Command-line arguments are missing or inconsistent. The cli exits with status 2."""
