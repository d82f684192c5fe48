"""Closed-form predictions for moments and sums of zeta' at zeros."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import ConfigError, DomainError, PoleError, UnsupportedExponentError

TWO_PI = 2.0 * math.pi
DEFAULT_PRIME_BOUND = 10**6
_INNER_CUTOFF = 1e-18


def barnes_g_int(n):
    """Barnes G at a positive integer: G(n) = 1! 2! ... (n-2)!."""
    if int(n) != n or n < 1:
        raise DomainError("barnes_g_int needs an integer n >= 1")
    out = 1
    fact = 1
    for k in range(1, int(n) - 1):
        fact *= k
        out *= fact
    return out


def g_ratio(lam):
    """G(lam+2)^2 / G(2 lam+3) as an exact fraction (integer lam >= -1)."""
    if int(lam) != lam or lam < -1:
        raise UnsupportedExponentError("G ratio implemented for integer lambda >= -1 only")
    lam = int(lam)
    return Fraction(barnes_g_int(lam + 2) ** 2, barnes_g_int(2 * lam + 3))


@lru_cache(maxsize=4)
def _primes(bound):
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(bound**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def _local_log_factors(lam, primes):
    # log[(1 - 1/p)^(lam^2) * sum_m d_lam(p^m)^2 p^-m], d_lam(p^m) = (lam)_m / m!
    x = 1.0 / primes.astype(np.float64)
    excess = np.zeros_like(x)  # sum over m >= 1
    d = 1.0
    power = np.ones_like(x)
    m = 0
    while True:
        m += 1
        d *= (lam + m - 1) / m
        power *= x
        if d == 0.0:
            break
        term = d * d * power
        excess += term
        if term[0] < _INNER_CUTOFF and m > 2 * abs(lam) + 2:
            break
    return lam * lam * np.log1p(-x) + np.log1p(excess)


def _tail_prime_sum(bound):
    # sum_{p > B} 1/p^2 ~ integral_B^inf dt / (t^2 log t) ~ 1 / (B log B)
    return 1.0 / (bound * math.log(bound))


@lru_cache(maxsize=64)
def _arithmetic(lam, prime_bound):
    primes = _primes(prime_bound)
    logs = _local_log_factors(lam, primes)
    head = math.fsum(logs.tolist())
    # local factor is 1 - lam^2 (lam-1)^2 / (4 p^2) + O(p^-3)
    tail = -lam * lam * (lam - 1) ** 2 / 4.0 * _tail_prime_sum(prime_bound)
    value = math.exp(head + tail)
    err = value * (0.25 * abs(tail) + abs(lam) ** 6 / prime_bound**2 + 1e-15 * math.sqrt(len(primes)))
    return value, err


def _check_lambda(lam, prime_bound):
    if int(lam) != lam:
        raise UnsupportedExponentError("arithmetic factor implemented for integer lambda only")
    if lam < -1:
        raise UnsupportedExponentError("arithmetic factor implemented for lambda >= -1 only")
    if int(prime_bound) != prime_bound or prime_bound < 100:
        raise DomainError("prime_bound must be an integer >= 100")


def arithmetic_factor(lam, prime_bound=DEFAULT_PRIME_BOUND):
    """Euler product a(lam) truncated at ``prime_bound`` with a tail correction.

    a(lam) = prod_p (1 - 1/p)^(lam^2) sum_m d_lam(p^m)^2 p^-m.  a(0) = a(1) = 1
    and a(-1) = a(2) = 6 / pi^2.
    """
    _check_lambda(lam, prime_bound)
    if lam in (0, 1):
        return 1.0
    return _arithmetic(int(lam), int(prime_bound))[0]


def arithmetic_factor_error(lam, prime_bound=DEFAULT_PRIME_BOUND):
    """Absolute truncation-error estimate for arithmetic_factor."""
    _check_lambda(lam, prime_bound)
    if lam in (0, 1):
        return 0.0
    return _arithmetic(int(lam), int(prime_bound))[1]


def _lambda_of(two_lambda):
    if int(two_lambda) != two_lambda:
        raise UnsupportedExponentError("2 lambda must be an integer")
    two_lambda = int(two_lambda)
    if two_lambda == -3:
        raise PoleError("the G-function ratio has a simple pole at 2 lambda = -3")
    if two_lambda < -3:
        raise UnsupportedExponentError("no prediction below the pole at 2 lambda = -3")
    if two_lambda % 2:
        raise UnsupportedExponentError("only even 2 lambda is supported")
    return two_lambda // 2


@dataclass(frozen=True)
class HKOModel:
    two_lambda: int
    g_ratio: Fraction
    a_factor: float
    prime_bound: int
    a_error: float = 0.0

    @property
    def lam(self):
        return self.two_lambda // 2

    @property
    def power(self):
        return self.lam * (self.lam + 2)

    @property
    def constant(self):
        return self.a_factor * float(self.g_ratio)

    def leading(self, T):
        return self.constant * _log_height(T) ** self.power


def hko_model(two_lambda, prime_bound=DEFAULT_PRIME_BOUND):
    lam = _lambda_of(two_lambda)
    return HKOModel(
        two_lambda=int(two_lambda),
        g_ratio=g_ratio(lam),
        a_factor=arithmetic_factor(lam, prime_bound),
        prime_bound=int(prime_bound),
        a_error=arithmetic_factor_error(lam, prime_bound),
    )


def _log_height(T):
    T = float(T)
    if not (math.isfinite(T) and T > TWO_PI):
        raise DomainError("height T must exceed 2 pi")
    return math.log(T / TWO_PI)


def hko_leading(two_lambda, T, prime_bound=DEFAULT_PRIME_BOUND):
    """a(lam) G(lam+2)^2 / G(2 lam+3) (log T/2pi)^(lam(lam+2))."""
    return hko_model(two_lambda, prime_bound).leading(T)


def gonek_negative(T):
    """Conjectured J_{-1}(T) ~ (6/pi^2) / log(T/2pi)."""
    T = float(T)
    if not T > TWO_PI * math.e:
        raise DomainError("gonek_negative needs T > 2 pi e")
    return 6.0 / math.pi**2 / math.log(T / TWO_PI)


@dataclass(frozen=True)
class FujiiTerms:
    c0: float = 0.5772156649015329
    c1: float = -0.0728158454836767

    def __post_init__(self):
        if abs(self.c0 - 0.5772) >= 1e-3 or abs(self.c1 + 0.0728) >= 1e-3:
            raise ConfigError(f"Fujii constants out of range: c0={self.c0}, c1={self.c1}")


DEFAULT_FUJII = FujiiTerms()


def fujii_prediction(T, terms=DEFAULT_FUJII):
    """Main terms of sum_{0<gamma<=T} zeta'(rho)."""
    L = _log_height(T)
    u = float(T) / TWO_PI
    return 0.5 * u * L * L + (terms.c0 - 1.0) * u * L - (terms.c1 + terms.c0) * u


def clt_location(gamma):
    """Mean of log|zeta'| predicted by the central limit law at height gamma."""
    return math.log(_log_height(gamma)) - math.log(TWO_PI)


def clt_scale(N):
    if not N >= 3:
        raise DomainError("N must be >= 3")
    return math.sqrt(0.5 * math.log(math.log(N)))


def clt_normalize(log_abs, gamma, N):
    """(log 2pi + log|zeta'| - log log(gamma/2pi)) / sqrt(log log N / 2)."""
    out = (np.asarray(log_abs, dtype=np.float64) - clt_location(gamma)) / clt_scale(N)
    return out if out.ndim else float(out)


def cs_degree(two_lambda):
    lam = _lambda_of(two_lambda)
    return lam * (lam + 2) + 1


@dataclass(frozen=True)
class CSPolynomial:
    """Full-moment polynomial P(x), coefficients highest degree first.

    ``known`` counts the leading coefficients that came from the source;
    the rest are zero placeholders.
    """

    two_lambda: int
    coeffs: tuple
    source: str
    known: int = field(default=-1)

    def __post_init__(self):
        if self.two_lambda not in (2, 4):
            raise ConfigError("CS polynomials are supported for 2 lambda in {2, 4}")
        if not self.source or not str(self.source).strip():
            raise ConfigError("CS polynomial needs a non-empty source")
        deg = cs_degree(self.two_lambda)
        coeffs = tuple(float(c) for c in self.coeffs)
        if not 1 <= len(coeffs) <= deg + 1:
            raise ConfigError(f"2 lambda = {self.two_lambda} needs 1..{deg + 1} coefficients, got {len(coeffs)}")
        if not all(math.isfinite(c) for c in coeffs):
            raise ConfigError("CS coefficients must be finite")
        known = len(coeffs) if self.known < 0 else self.known
        coeffs = coeffs + (0.0,) * (deg + 1 - len(coeffs))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "known", known)
        lead = expected_cs_leading(self.two_lambda)
        if abs(coeffs[0] - lead) > 1e-6 * abs(lead):
            raise ConfigError(f"leading CS coefficient {coeffs[0]!r} disagrees with the HKO constant {lead!r}")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def complete(self):
        return self.known == len(self.coeffs)

    @classmethod
    def leading_only(cls, two_lambda):
        return cls(two_lambda, (expected_cs_leading(two_lambda),), "leading term from the HKO constant", 1)


def expected_cs_leading(two_lambda):
    # d/dT of N(T) J(T) ~ (1/2pi) log(T/2pi) * constant * log^(lam(lam+2))
    return hko_model(two_lambda).constant / TWO_PI


def cs_integral(poly, t_lo, t_hi):
    """Integral of P(log(t/2pi)) over [t_lo, t_hi], in closed form.

    With u = log(t/2pi) the antiderivative is t Q(u), Q = P - P' + P'' - ...
    It is evaluated in multiprecision so narrow blocks lose no digits;
    t_lo = 0 is allowed (t Q(u) -> 0).
    """
    if not isinstance(poly, CSPolynomial):
        raise ConfigError("cs_integral needs a CSPolynomial")
    t_lo, t_hi = float(t_lo), float(t_hi)
    if not (0.0 <= t_lo < t_hi and math.isfinite(t_hi)):
        raise DomainError("need 0 <= t_lo < t_hi")
    p = list(poly.coeffs)  # highest first
    q = [0.0] * len(p)
    deriv = p[:]
    sign = 1
    while deriv:
        off = len(q) - len(deriv)
        for i, c in enumerate(deriv):
            q[off + i] += sign * c
        deg = len(deriv) - 1
        deriv = [c * (deg - i) for i, c in enumerate(deriv[:-1])]
        sign = -sign
    with mpmath.workdps(40):
        def anti(t):
            if t == 0.0:
                return mpmath.mpf(0)
            t = mpmath.mpf(t)
            return t * mpmath.polyval(q, mpmath.log(t / (2 * mpmath.pi)))

        return float(anti(t_hi) - anti(t_lo))


def spike_locations(T, k_max):
    """log k / log(T/2pi) for k = 2..k_max, dropping values >= 1."""
    if int(k_max) != k_max or k_max < 2:
        raise DomainError("k_max must be an integer >= 2")
    T = float(T)
    if not T > TWO_PI * math.e:
        raise DomainError("spike_locations needs T > 2 pi e")
    L = math.log(T / TWO_PI)
    return [x for x in (math.log(k) / L for k in range(2, int(k_max) + 1)) if x < 1.0]
