"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numerical input lies outside the domain of an operation."""


class InsufficientDataError(ValueError):
    """A fit was asked to work with too few samples or too short a record."""


class ConfigError(ValueError):
    """A run configuration failed validation."""
