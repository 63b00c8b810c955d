"""Exception hierarchy shared by every module of the package."""


class PhiGammaError(Exception):
    """Base class; the CLI maps any subclass to exit code 1."""


class DivisionByZero(PhiGammaError, ZeroDivisionError):
    pass


class PrecisionExhausted(PhiGammaError):
    pass


class IndeterminateZero(PhiGammaError):
    pass


class LevelMismatch(PhiGammaError):
    pass


class LevelOutOfWindow(PhiGammaError):
    pass


class NotInvertible(PhiGammaError):
    pass


class ProfileMismatch(PhiGammaError):
    pass


class WindowOverflow(PhiGammaError):
    pass


class WindowTooSmall(PhiGammaError):
    pass


class NotAUnit(PhiGammaError):
    """Raised by ``invert_unit``; ``witness`` names the offending zero."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedShape(PhiGammaError):
    pass


class HNJoinFailure(PhiGammaError):
    pass


class CertificateFailure(PhiGammaError):
    pass


class NotLocallyTrivial(PhiGammaError):
    pass


class Unsupported(PhiGammaError):
    pass


class ParseError(PhiGammaError):
    pass


class ValidationError(PhiGammaError):
    pass
