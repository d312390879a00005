"""Failure taxonomy shared by the library and the CLI.

The CLI maps classes to exit codes: 2 for malformed input, 3 for solver
refusals (a stated hypothesis does not hold, so no answer is claimed),
4 for numerical failures detected mid-computation.
"""


class ChronoscaleError(Exception):
    exit_code = 1


class SchemaError(ChronoscaleError):
    """Malformed descriptor, argument, or precondition violation."""

    exit_code = 2


class NotInScaleError(SchemaError):
    """A query point does not belong to the time scale."""


class NotOnGridError(SchemaError):
    """A query point is not a sample point of the grid."""


class StencilError(SchemaError):
    """No admissible finite-difference stencil at the requested point."""


class RefusalError(ChronoscaleError):
    """A solver hypothesis fails; the requested object is not certified to exist."""

    exit_code = 3


class NotRegressiveError(RefusalError):
    """1 + mu*p vanished (or E + mu*A singular) where invertibility is required."""


class NonSyndeticError(RefusalError):
    """Operation requires uniformly bounded gaps."""


class NoSplittingError(RefusalError):
    """No hyperbolic spectral splitting within the gap tolerance."""


class ContractionError(RefusalError):
    """Contraction constant lambda >= 1; fixed-point iteration refused."""


class NumericalError(ChronoscaleError):
    exit_code = 4


class DivergenceError(NumericalError):
    """Partial sums or iterates exceeded the overflow guard."""


class TailNotNegligibleError(NumericalError):
    """Truncated-window tail could not be certified below tolerance."""


class BallEscapeError(NumericalError):
    """Iterates left the invariant ball predicted by the a-priori constants."""


class IndeterminateError(NumericalError):
    """Finite-window evidence is insufficient to decide a limit."""
