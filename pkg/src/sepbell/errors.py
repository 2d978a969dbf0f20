"""Exception types raised by sepbell."""


class SepBellError(Exception):
    """Base class for all sepbell errors."""


class InvalidDimensionError(SepBellError, ValueError):
    pass


class InvalidPhaseError(SepBellError, ValueError):
    pass


class DimensionMismatchError(SepBellError, ValueError):
    pass


class SizeLimitError(SepBellError, ValueError):
    """Raised when a Hilbert-space dimension exceeds a configured cap."""


class EnsembleError(SepBellError, ValueError):
    pass


class CoefficientError(SepBellError, ValueError):
    pass


class ParameterError(SepBellError, ValueError):
    pass


class StrategyError(SepBellError, ValueError):
    pass


class NotHermitianError(SepBellError, ValueError):
    pass
