"""Exception types shared across the package.

The CLI maps each class to a distinct exit code, so library code should
raise these rather than bare ValueError/RuntimeError wherever the failure
is one a caller may want to dispatch on.
"""

from __future__ import annotations


class SpinidError(Exception):
    """Base class for all package-specific errors."""


class SpecFileError(SpinidError):
    """A model spec file could not be parsed or validated."""


class DimensionError(SpinidError):
    """Operands have inconsistent or unsupported dimensions."""


class ConditioningError(SpinidError):
    """A matrix factorization or solve is too ill-conditioned to trust.

    Carries the offending condition-number estimate in ``cond``.
    """

    def __init__(self, message: str, cond: float = float("inf")):
        super().__init__(message)
        self.cond = float(cond)


class AtypicalInstanceError(SpinidError):
    """The input sits on a measure-zero degeneracy the method excludes.

    Raised for instances that violate a genericity assumption, e.g. a
    probed entry that is numerically zero or an eigenvector row with too
    few nonzero entries to build a sign-flip counterexample.
    """


class ResourceLimitError(SpinidError):
    """The request exceeds a deliberate resource cap (e.g. qubit count)."""
