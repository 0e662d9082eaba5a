"""Exception hierarchy.

Every error raised by the library derives from :class:`PovmError`, which is a
``ValueError`` so that callers validating user input can catch either.
"""


class PovmError(ValueError):
    """Base class for all povmkit errors."""


class NotHermitian(PovmError):
    pass


class NotPSD(PovmError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimMismatch(PovmError):
    pass


class CompletenessViolation(PovmError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ZeroEffect(PovmError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotAState(PovmError):
    pass


class ZeroProbabilityOutcome(PovmError):
    pass


class NotOrthonormal(PovmError):
    pass


class NotOrthogonal(PovmError):
    pass


class UnsupportedDimension(PovmError):
    pass


class NotAFiducial(PovmError):
    pass


class NotASIC(PovmError):
    pass


class InvalidRange(PovmError):
    pass


class SingularTotal(PovmError):
    pass


class LengthMismatch(PovmError):
    pass


class ZeroOperator(PovmError):
    pass


class SpanTooSmall(PovmError):
    pass


class ParseError(PovmError):
    pass
