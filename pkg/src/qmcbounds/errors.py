"""Exception types shared across the toolkit."""


class QmcBoundsError(Exception):
    """Base class for every toolkit-specific error."""


class WeightSumError(QmcBoundsError):
    """Atom weights of a finite space do not sum to 1 within tolerance."""


class NonPositiveWeightError(QmcBoundsError):
    """An atom weight is zero or negative."""


class OverlapError(QmcBoundsError):
    """Two cells overlap with positive measure."""


class CoverError(QmcBoundsError):
    """Cells do not cover the required set up to measure zero."""


class EmptyCellError(QmcBoundsError):
    """A cell is empty or carries measure zero."""


class OutOfDomainError(QmcBoundsError):
    """A point or cell does not belong to the space."""


class NonIntegerAllocationError(QmcBoundsError):
    """No uniform point set of the requested size exists.

    Raised when n_points * measure(cell) is not an integer within
    tolerance for some cell.  Carries the offending cell and, when one
    could be computed, the smallest feasible size at or above the
    request.
    """

    def __init__(self, message, cell_index=None, product=None, suggested_n=None):
        super().__init__(message)
        self.cell_index = cell_index
        self.product = product
        self.suggested_n = suggested_n


class EnumerationTooLargeError(QmcBoundsError):
    """The configuration count exceeds the enumeration cap."""


class NotUniformError(QmcBoundsError):
    """A point set does not hit every cell exactly n_points * measure times."""


class BoundViolationError(QmcBoundsError):
    """A realized error exceeded a certified bound; indicates an internal bug."""


class InstanceFormatError(QmcBoundsError):
    """An instance description does not match the documented schema."""
