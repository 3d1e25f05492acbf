"""Exception types shared across the package."""


class DynDiscError(Exception):
    """Base class for all package errors."""


class InvalidArgument(DynDiscError, ValueError):
    """An argument violates a documented precondition."""


class ResourceLimit(DynDiscError):
    """A computation would exceed a configured resource cap."""


class UnsupportedDomain(DynDiscError):
    """The symbolic engine only handles two-element probe domains."""


class ClosedFormInvalid(DynDiscError):
    """A closed-form sub-fidelity left its valid range.

    Carries the oracle (brute-force) value so callers can recover.
    """

    def __init__(self, message: str, oracle_value: float):
        super().__init__(message)
        self.oracle_value = oracle_value


class NoThreshold(DynDiscError):
    """No finite probe-copy threshold guarantees quantum advantage."""
