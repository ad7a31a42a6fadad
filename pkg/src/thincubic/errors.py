"""Exception types raised by thincubic."""


class ThinCubicError(Exception):
    """Base class for computation errors (CLI exit code 1)."""


class Imprimitive(ThinCubicError, ValueError):
    pass


class DegenerateForm(ThinCubicError, ValueError):
    pass


class NotMaximal(ThinCubicError, ValueError):
    pass


class UnlistedCase(ThinCubicError, ValueError):
    pass


class OracleBound(ThinCubicError, ValueError):
    pass


class UnsupportedReduction(ThinCubicError, ValueError):
    pass


class UnsupportedFamily(ThinCubicError, ValueError):
    pass


class TypeMismatch(ThinCubicError, ValueError):
    pass


class EmptyRegion(ThinCubicError, ValueError):
    pass


class RangeTooLarge(ThinCubicError, ValueError):
    pass


class NotNormalized(ThinCubicError, ValueError):
    pass


class PrecisionExhausted(ThinCubicError, ArithmeticError):
    pass
