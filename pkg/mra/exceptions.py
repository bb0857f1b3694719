class MRAError(Exception):
    """Base class for toolkit errors."""


class InvalidSignalError(MRAError, ValueError):
    """Shape, length or finiteness violation of a signal, sample set or profile."""


class ConfigurationError(MRAError, ValueError):
    """Invalid solver or experiment settings."""


class ZeroReferenceError(InvalidSignalError):
    def __init__(self, message='zero reference signal'):
        super().__init__(message)


class InsufficientSignalError(MRAError):
    def __init__(self, message='insufficient signal'):
        super().__init__(message)


class DegenerateDiscriminantError(MRAError):
    def __init__(self, message='degenerate discriminant'):
        super().__init__(message)


class TorusDimensionError(MRAError):
    def __init__(self, message='grid requires 2-torus'):
        super().__init__(message)
