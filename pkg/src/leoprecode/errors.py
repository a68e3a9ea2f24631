"""Exception types raised across the package."""


class LeoPrecodeError(Exception):
    """Base class for all package errors."""


class ConfigError(LeoPrecodeError, ValueError):
    pass


class SingularSystem(LeoPrecodeError):
    """The regularized Gram matrix could not be factorized."""


class NormalizationOfZero(LeoPrecodeError):
    """A precoder with zero total power cannot be rescaled."""


class EigenFailure(LeoPrecodeError):
    """Power iteration did not converge within its iteration budget."""


class BatchTooSmall(LeoPrecodeError):
    pass


class CallOrder(LeoPrecodeError):
    """backward() was called without a matching forward()."""


class NonFiniteGradient(LeoPrecodeError):
    pass


class NotCalibrated(LeoPrecodeError):
    pass


class ZeroAction(LeoPrecodeError):
    pass


class BufferUnderfull(LeoPrecodeError):
    pass


class CheckpointMismatch(LeoPrecodeError):
    pass
