"""Exception types shared across the package."""


class ImpreschedError(Exception):
    """Base class for all package errors."""


class InputError(ImpreschedError, ValueError):
    """Malformed file, config, or CLI input."""


class DomainError(ImpreschedError, ValueError):
    """An operation was called outside its stated domain."""


class StateError(ImpreschedError, RuntimeError):
    """An operation that is a logic error in the current state,
    e.g. promoting a depleted task."""
