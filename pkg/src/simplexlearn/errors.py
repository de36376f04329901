"""Exception hierarchy.

Every domain failure derives from :class:`SimplexLearnError` so the CLI can map
them to exit status 1. Parameter problems additionally subclass ``ValueError``.
"""


class SimplexLearnError(Exception):
    """Base class for all domain errors raised by this package."""


class ParameterError(SimplexLearnError, ValueError):
    """An argument is outside its documented range."""


class DegenerateSimplexError(SimplexLearnError, ValueError):
    """Vertex set is (numerically) affinely dependent."""


class InfeasibleParamsError(SimplexLearnError):
    """No simplex satisfying the requested constraints was found."""


class InsufficientDataError(SimplexLearnError):
    """Not enough samples for the requested operation."""


class PairingError(SimplexLearnError):
    """Pair statistic requested on an odd number of points."""


class DegenerateDataError(SimplexLearnError):
    """Dataset carries no spread (e.g. all points identical)."""


class SnrTooLowError(SimplexLearnError):
    """Bounding-radius denominator is not positive at this SNR."""

    def __init__(self, message, critical_snr=None):
        super().__init__(message)
        self.critical_snr = critical_snr


class FamilyTooLargeError(SimplexLearnError):
    """A covering set or candidate family would exceed its configured cap."""

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap


class EmptyFamilyError(SimplexLearnError):
    """Every candidate was removed by the filters."""


class InvalidPairError(SimplexLearnError, ValueError):
    """A Scheffe contest was requested between a candidate and itself."""


class UnsupportedExactError(SimplexLearnError):
    """Exact computation is only available for K <= 2."""


class OutOfRegimeError(SimplexLearnError, ValueError):
    """A bound was evaluated outside the range where it is defined."""


class StageError(SimplexLearnError):
    """Pipeline failure annotated with the stage that raised and a remediation hint."""

    def __init__(self, stage, cause, hint=""):
        msg = f"[{stage}] {cause}"
        if hint:
            msg += f" (hint: {hint})"
        super().__init__(msg)
        self.stage = stage
        self.cause = cause
        self.hint = hint
