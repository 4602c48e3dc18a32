"""Exception hierarchy shared by all padicq modules."""


class PadicError(Exception):
    """Base class for every error raised by padicq."""


class ContextMismatch(PadicError):
    pass


class NonUnit(PadicError):
    """Raised when an inverse (or negative power) of a non-unit is requested."""


class NonUnitDenominator(NonUnit):
    pass


class PrecisionLoss(PadicError):
    pass


class BudgetExceeded(PadicError):
    """A Riemann sum would need more terms than the configured budget."""


class NoStabilization(PadicError):
    pass


class BadLevel(PadicError):
    """Level/scale/coset arguments are inconsistent (e.g. m < n or a >= p**n)."""


class InvalidSpec(PadicError):
    """Invalid parameters or configuration (bad literal, bad registry id, ...)."""


class IoFailure(PadicError):
    pass
