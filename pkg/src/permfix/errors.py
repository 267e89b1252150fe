"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class PermfixError(Exception):
    exit_code = 1
    kind = "error"


class CapExceededError(PermfixError):
    """A configured enumeration or memory cap would be exceeded."""

    exit_code = 3
    kind = "cap_exceeded"


class DomainError(PermfixError, ValueError):
    """Arguments outside the domain of an operation."""

    exit_code = 4
    kind = "domain"


class InconsistencyError(DomainError):
    kind = "inconsistent"


class DivisibilityError(DomainError):
    """Some d_i does not divide k_i, so the event is impossible by construction."""

    kind = "divisibility"
