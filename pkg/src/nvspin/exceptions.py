"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when a config, sequence, or data file violates its schema.

    The message names the offending key (dotted path for nested documents).
    """


class DegenerateSteadyStateError(RuntimeError):
    """Raised when a rate generator has more than one stationary distribution."""


class UndefinedPolarizationError(ValueError):
    """Raised when spin polarization is requested for an empty ground manifold."""


class FitDomainError(ValueError):
    """Raised when the data handed to a fit cannot support the model."""


class RankDeficiencyError(ValueError):
    """Raised when a linear least-squares system is rank deficient."""
