"""Exception types shared across the package."""


class MDCError(Exception):
    """Base class for all errors raised by mdc."""


class StructureError(MDCError, ValueError):
    """A graph or complex violates a structural invariant (e.g. disconnected)."""


class DomainError(MDCError, ValueError):
    """An operation was called outside its domain of definition."""


class BudgetExceeded(MDCError, RuntimeError):
    """An enumeration request exceeded the configured resource budget."""
