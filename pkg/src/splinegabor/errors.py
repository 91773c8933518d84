"""Exception hierarchy shared by all modules."""


class SplineGaborError(Exception):
    """Base class for every error raised by this package."""


class InvalidOrderError(SplineGaborError, ValueError):
    pass


class InvalidParameterError(SplineGaborError, ValueError):
    pass


class DegenerateRatesError(SplineGaborError, ValueError):
    pass


class NotAFrameError(SplineGaborError):
    pass


class HypothesisError(SplineGaborError):
    """A construction was asked for outside the hypotheses that make it valid."""


class SingularDualError(SplineGaborError):
    pass


class InvalidBError(SplineGaborError, ValueError):
    pass


class InvalidCoefficientsError(SplineGaborError, ValueError):
    pass


class NotADualError(SplineGaborError):
    pass


class TruncationError(SplineGaborError):
    pass


class GridTooSmallError(SplineGaborError):
    pass


class PointwiseFormError(SplineGaborError):
    pass


class UnsupportedLatticeError(SplineGaborError):
    pass


class GridMismatchError(SplineGaborError, ValueError):
    pass


class ConfigError(SplineGaborError, ValueError):
    pass
