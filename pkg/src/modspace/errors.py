"""Error and warning types shared across the package."""

__all__ = [
    "NumericalSetupError",
    "TruncationWarning",
    "BoundaryDecayWarning",
]


class NumericalSetupError(RuntimeError):
    """A discretization cannot resolve the requested computation.

    Raised when a grid is too coarse, too small, or otherwise inconsistent
    with the function or transform it is asked to carry (as opposed to a
    plain domain error in the arguments, which raises ValueError).
    """


class TruncationWarning(UserWarning):
    """A series truncation falls short of the requested tail tolerance."""


class BoundaryDecayWarning(UserWarning):
    """Signal mass at the box boundary exceeds the decay threshold."""
