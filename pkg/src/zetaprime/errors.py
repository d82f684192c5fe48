"""Exception hierarchy."""


class ZetaPrimeError(Exception):
    pass


class DomainError(ZetaPrimeError, ValueError):
    """Argument outside the domain where the operation is defined."""


class PrecisionError(ZetaPrimeError):
    """Working precision cannot deliver the requested phase digits."""


class ConvergenceError(ZetaPrimeError):
    pass


class RangeError(ZetaPrimeError, ValueError):
    pass


class BracketError(ZetaPrimeError, ValueError):
    """Endpoints of a root bracket do not straddle a sign change."""


class MissingZeroError(ZetaPrimeError):
    """Sign-change count stayed below the zero count after subdivision."""

    def __init__(self, message, t_lo, t_hi, found, expected):
        super().__init__(f"{message} on [{t_lo!r}, {t_hi!r}]: found {found}, expected {expected}")
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.found = found
        self.expected = expected


class PoleError(DomainError):
    pass


class UnsupportedExponentError(DomainError):
    pass


class ConfigError(ZetaPrimeError, ValueError):
    pass


class EmptyInputError(ZetaPrimeError, ValueError):
    pass


class DegenerateError(EmptyInputError):
    """Input has zero spread, so it cannot be standardized."""


class ZeroDerivativeError(ZetaPrimeError, ArithmeticError):
    pass


class NonConsecutiveError(ZetaPrimeError, ValueError):
    pass


class SmallDerivativeWarning(UserWarning):
    """|Z'| is within ten error estimates of zero; the value is kept but flagged."""
