"""Exception hierarchy.

The CLI maps these onto exit codes: validation/domain problems exit 1,
numerical failures exit 2.
"""


class ValidationError(ValueError):
    """A parameter violates a model invariant."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(ValueError):
    """Evaluation point lies outside the interior of the well."""


class WindowError(DomainError):
    """A time or position lies outside the validity window of a formula."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to produce a trustworthy value."""


class DegeneracyError(NumericalError):
    """Negative radicand, non-monotone trajectory or similar degeneracy."""


class ConvergenceError(NumericalError):
    """An iterative solver or quadrature did not reach its tolerance."""
