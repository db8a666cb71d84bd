"""Error taxonomy shared across the verifier.

Every failure mode is a reported exception; nothing degrades to a silent
wrong value.
"""


class VerifierError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(VerifierError):
    """Invalid arguments or an out-of-contract call."""


class SamplingError(VerifierError):
    """Rejection sampling exhausted its retry budget."""


class DegenerateInputError(VerifierError):
    """Sampled parameters violate a nondegeneracy precondition."""


class PoleOrderError(DegenerateInputError):
    """A residue step did not see exactly one simple pole.

    Carries the step index and the offending factor count in the message.
    """


class ConsistencyError(VerifierError):
    """An internal cross-check failed (e.g. the x- and y-side residue sums
    of a scalar product disagree, flagging an inadmissible integrand)."""


class NonInvertibleError(DegenerateInputError):
    """An inverse was requested of a non-invertible element (zero scalar,
    series with vanishing constant term, or a matrix without a usable pivot).
    """


class DepthOverflowError(VerifierError):
    """A tensor vector exceeded its depth cap.

    The caps are chosen so that in-contract computations never hit them;
    overflow indicates a bug, never a modeling limit, and is never silently
    truncated.
    """
