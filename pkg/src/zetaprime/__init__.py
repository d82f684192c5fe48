"""zeta'(1/2 + i gamma) at zeros of the Riemann zeta function, and its statistics."""

from .derivative import DerivativeRecord, DerivativeTable, StepPolicy, derivative_table, zeta_prime_at_zero
from .kernels import BACKEND
from .rscore import PrecisionPolicy, rs_z, theta, zeta_critical
from .zeros import ZeroRecord, ZeroTable, expected_count, first_zeros, gram_point, refine_zero, scan_zeros

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DerivativeRecord",
    "DerivativeTable",
    "PrecisionPolicy",
    "StepPolicy",
    "ZeroRecord",
    "ZeroTable",
    "derivative_table",
    "expected_count",
    "first_zeros",
    "gram_point",
    "refine_zero",
    "rs_z",
    "scan_zeros",
    "theta",
    "zeta_critical",
    "zeta_prime_at_zero",
]
