"""Exception and warning types shared across the package."""

from __future__ import annotations


class SelectionError(Exception):
    """Base class for every error this package raises deliberately."""


class TooFewRows(SelectionError):
    """Raised when a dataset has too few rows for the requested operation."""


class ConstantColumn(SelectionError):
    """Raised when a column has (numerically) zero variance.

    Parameters
    ----------
    name : str
        Label of the offending column.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"column {name!r} is constant (sd < 1e-12); cannot standardize")


class RankDeficient(SelectionError):
    """Raised when a least-squares design matrix is numerically rank deficient."""


class Underdetermined(SelectionError):
    """Raised when a fit is requested with more parameters than rows."""


class DegenerateGic(SelectionError):
    """Raised when the information criterion is undefined (needs n >= 3)."""


class ZeroLengthInterval(SelectionError):
    """Raised when an interval p-value is requested for a zero-length interval."""


class EmptyCandidateSet(SelectionError):
    """Raised when a null bound is requested for an empty candidate fit."""


class CandidateTooLarge(SelectionError):
    """Raised when the stage-one candidate set is too large to refit and truncation is off."""


class OutcomeMissing(SelectionError):
    """Raised when the requested outcome column is absent from a data file."""


class NonNumericColumn(SelectionError):
    """Raised when a data file column contains values that are not numbers.

    Parameters
    ----------
    name : str
        Label of the offending column.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"column {name!r} contains non-numeric values")


class NoConvergenceWarning(UserWarning):
    """Emitted when coordinate descent hits its iteration cap at some grid points.

    Not fatal: the affected path entries carry ``converged=False`` flags.
    """
