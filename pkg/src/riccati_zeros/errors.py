"""Exception hierarchy shared by every module."""


class ZeroFinderError(Exception):
    """Base class for all package errors."""


class StepError(ZeroFinderError):
    """A single iteration step could not be formed."""


class ZeroDenominator(StepError):
    pass


class NonPositiveA(StepError):
    pass


class InsufficientHistory(ZeroFinderError):
    pass


class NonFiniteSample(ZeroFinderError):
    pass


class Unsupported(ZeroFinderError):
    """No certified regime covers the requested parameters or interval."""


class UnsupportedParameter(Unsupported):
    pass


class GuessOutOfBounds(ZeroFinderError):
    """The next guess left the sweep bounds (normal sweep completion)."""


class EvaluatorError(ZeroFinderError):
    """A special-function backend could not deliver a trustworthy value."""


class NoConvergence(EvaluatorError):
    pass


class CancellationLoss(EvaluatorError):
    pass


class TruncationNotMet(EvaluatorError):
    pass


class GridTooCoarse(ZeroFinderError):
    pass


class ZeroReference(ZeroFinderError):
    pass
