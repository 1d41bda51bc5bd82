"""Exception types raised by the library."""


class ParamError(ValueError):
    """Invalid family parameters or set parameters."""


class OrbitLeftS(ArithmeticError):
    """An orbit needed for a series left the sector union ``S``.

    ``step`` is the index of the first iterate found outside ``S``.
    """

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"orbit left S at iterate {step}")


class DisagreementError(ArithmeticError):
    """Two independent routes to the same limit value disagree."""
