"""Exception hierarchy shared by every module."""


class ElasticCommitError(Exception):
    """Base class for all package errors."""


class DomainError(ElasticCommitError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ElasticCommitError, ValueError):
    """Protocol parameters violate one of their structural constraints."""


class RightsViolationError(ElasticCommitError, PermissionError):
    """A party tried to alter a channel it has no elasticity rights on."""


class BudgetError(ElasticCommitError, RuntimeError):
    """An exhaustive computation would exceed its enumeration budget."""


class PhaseError(ElasticCommitError, RuntimeError):
    """A protocol step was invoked out of order."""
