"""Exception and warning types raised by :mod:`kitaev_mpe`."""


class KitaevError(Exception):
    """Base class for all package errors."""


class ParameterError(KitaevError, ValueError):
    """Invalid model parameters or inputs (bad L, out-of-range l, ...)."""


class NumericalError(KitaevError, ArithmeticError):
    """A numerical result failed an internal consistency check."""


class UnresolvedWindingError(NumericalError):
    """Accumulated winding is not close to a half-integer."""


class VarianceBoundError(NumericalError):
    """Fisher density outside ``[0, L]``; signals a convention bug."""


class ConvergenceWarning(RuntimeWarning):
    """A truncated series is evaluated where it converges slowly."""
