"""Exception hierarchy shared by every layer."""


class SheafMorseError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(SheafMorseError, ValueError):
    """An input violates a structural invariant (d^2 != 0, not up-closed, ...)."""


class ResourceLimitError(SheafMorseError, RuntimeError):
    """A construction would exceed the configured generator ceiling."""


class ParseError(SheafMorseError, ValueError):
    """A file or argument could not be parsed."""
