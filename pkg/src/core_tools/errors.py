"""
Error types raised across the lab.
Each failure mode a caller may want to react to has its own class; all derive
from LabError so runners can catch the family at step boundaries.
"""


class LabError(Exception):
    """Base class for lab failures."""


class ParameterRangeError(LabError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class GridOverflowError(LabError, ValueError):
    """An operation would need frequencies outside the stored grid."""


class ResolutionError(LabError, ValueError):
    """A physical-space grid is too coarse for the requested quantity."""


class InsufficientDataError(LabError, ValueError):
    """Too few samples or dyadic blocks to fit or estimate reliably."""


class UnsupportedOrderError(LabError, ValueError):
    """A chaos or contraction order outside the implemented set."""


class GridMismatchError(LabError, ValueError):
    """Two objects live on incompatible lattice grids or time grids."""


class PaddingError(LabError, ValueError):
    """Zero-padding factor too small for the temporal transform."""


class AsymmetricKernelError(LabError, ValueError):
    """A chaos kernel fails the reality symmetry required by the operation."""


class UsageError(LabError, ValueError):
    """Invalid command-line or configuration input."""


class BudgetExceededError(LabError):
    """An enumeration would exceed the configured tuple budget."""

    def __init__(self, requested: int, budget: int, what: str = "enumeration"):
        self.requested = int(requested)
        self.budget = int(budget)
        super().__init__(f"{what} needs {self.requested} tuples, budget is {self.budget}")


class VerificationFailure(LabError):
    """A numerical check finished but did not meet its acceptance criterion."""
