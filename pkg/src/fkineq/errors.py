"""Exception types shared across the package."""


class HermiticityError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class DomainError(ValueError):
    """A spectrum point falls outside a scalar function's domain."""

    def __init__(self, message: str, eigenvalue: float | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class RegularityError(ValueError):
    """A matrix required to be positive-definite / invertible is not."""


class SpecificationError(ValueError):
    """A map, partition or sampler description is inconsistent."""


class IllConditionedError(ValueError):
    """Condition number exceeds the hard cap; the trial is rejected."""


class NumericalFailureError(RuntimeError):
    """An underlying numerical routine failed or lost too much accuracy."""
