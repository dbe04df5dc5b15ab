"""Exception types shared across polyquery."""


class PolyQueryError(Exception):
    """Base class for all library errors."""


class NonPrime(PolyQueryError, ValueError):
    pass


class ReducibleModulus(PolyQueryError, ValueError):
    pass


class UnsupportedDegree(PolyQueryError, ValueError):
    pass


class ParamsMismatch(PolyQueryError, ValueError):
    pass


class DivideByZero(PolyQueryError, ZeroDivisionError):
    pass


class Overflow(PolyQueryError, OverflowError):
    pass


class WorkCapExceeded(PolyQueryError, RuntimeError):
    """Raised instead of truncating an enumeration.

    ``estimate`` is the projected number of scalar operations and ``cap`` the
    configured limit.
    """

    def __init__(self, estimate, cap, what="enumeration"):
        self.estimate = int(estimate)
        self.cap = int(cap)
        super().__init__(
            f"{what} needs ~{self.estimate} scalar ops, above work cap {self.cap}"
        )


class SizeCap(PolyQueryError, RuntimeError):
    pass


class DimensionMismatch(PolyQueryError, ValueError):
    pass


class SingularSystem(PolyQueryError, ArithmeticError):
    pass


class Exhausted(PolyQueryError, RuntimeError):
    pass


class ZeroPoint(PolyQueryError, ValueError):
    pass
