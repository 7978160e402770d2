import numpy as np


class BellnoiseError(Exception):
    """Mixin shared by every error raised on purpose by this package."""


class DomainError(BellnoiseError, ValueError):
    pass


class BracketError(DomainError):
    pass


class TetrahedronError(DomainError):
    pass


class NotEntangledError(DomainError):
    pass


class DensityMatrixError(DomainError):
    pass


class ParseError(BellnoiseError, ValueError):
    pass


class ConvergenceError(BellnoiseError, RuntimeError):
    pass


class UnsupportedProcessError(BellnoiseError, NotImplementedError):
    pass


class CovarianceError(BellnoiseError, np.linalg.LinAlgError):
    pass
