"""Exception types raised by :mod:`hardy_np`."""


class DomainError(ValueError):
    """Operands live over different algebras, correspondences or spaces."""


class UnsupportedError(ValueError):
    """The input is well formed but outside the supported class of problems."""


class NumericalError(ArithmeticError):
    """A computation broke down numerically (singular system, bad residual).

    ``certificate`` carries whatever diagnostic numbers were available when
    the failure was detected.
    """

    def __init__(self, msg, certificate=None):
        super().__init__(msg)
        self.certificate = certificate if certificate is not None else {}
