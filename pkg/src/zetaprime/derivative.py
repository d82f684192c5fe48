"""Z'(gamma) and zeta'(1/2 + i gamma) at located zeros.

The reported values come from a symmetric difference quotient of Z.  An
analytic derivative of the Riemann-Siegel formula is kept alongside as an
independent cross-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import rscore
from .errors import DomainError, SmallDerivativeWarning, ZeroDerivativeError
from .rscore import DEFAULT_POLICY, T_MIN
from .zeros import ZeroRecord, ZeroTable, mean_spacing

ABSOLUTE = "absolute"
RELATIVE = "relative"
SMALL_FACTOR = 10.0  # flag when |Z'| <= SMALL_FACTOR * err_est


@dataclass(frozen=True)
class StepPolicy:
    mode: str = RELATIVE
    h_abs: float = 1e-5
    h_rel: float = 1e-4
    richardson: bool = False

    def __post_init__(self):
        if self.mode not in (ABSOLUTE, RELATIVE):
            raise ValueError(f"mode must be {ABSOLUTE!r} or {RELATIVE!r}")
        if not self.h_abs > 0:
            raise ValueError("h_abs must be > 0")
        if not 0 < self.h_rel < 0.1:
            raise ValueError("h_rel must lie in (0, 0.1)")

    def step(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.mode == ABSOLUTE:
            return np.full(t.shape, self.h_abs)
        return self.h_rel * mean_spacing(t)

    def as_dict(self):
        return {"mode": self.mode, "h_abs": self.h_abs, "h_rel": self.h_rel,
                "richardson": self.richardson}


DEFAULT_STEP = StepPolicy()


@dataclass(frozen=True)
class DerivativeRecord:
    zero: ZeroRecord
    h: float
    zprime: float
    zeta_prime: complex
    abs_zeta_prime: float
    log_abs: float
    err_est: float
    flagged: bool = False


def _stencil(ts, hs, policy, evaluator):
    """Values at t-2h, t-h, t+h, t+2h, all routed by the centre t."""
    offsets = np.array([-2.0, -1.0, 1.0, 2.0])
    pts = (ts[:, None] + offsets[None, :] * hs[:, None]).ravel()
    if evaluator is not None:
        vals = np.asarray(evaluator(pts), dtype=np.float64)
        return vals.reshape(-1, 4), np.zeros(ts.shape)
    route = np.repeat(ts, 4)
    z, _, est, _, _ = rscore.evaluate(pts, policy, route=route)
    return z.reshape(-1, 4), est.reshape(-1, 4).max(axis=1)


def snap_step(ts, hs):
    """h rounded to a multiple of ulp(t), so that t +- h is exact.

    A rounded t +- h costs |Z'| ulp(t) / h in the quotient, ~1e-7 at t ~ 1e4.
    """
    return (ts + hs) - ts


def central_batch(ts, hs, policy=DEFAULT_POLICY, evaluator=None):
    """Vectorized z_prime_central; returns (value, err_est)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    hs = np.broadcast_to(np.asarray(hs, dtype=np.float64), ts.shape).copy()
    if not np.all(hs > 0) or not np.all(np.isfinite(hs)):
        raise DomainError("step h must be positive and finite")
    if evaluator is None and ts.size and (ts - 2 * hs).min() < T_MIN:
        raise DomainError(f"stencil must stay in t >= {T_MIN}")
    hs = snap_step(ts, hs)
    v, eps = _stencil(ts, hs, policy, evaluator)
    value = (v[:, 2] - v[:, 1]) / ((ts + hs) - (ts - hs))
    third = (v[:, 3] - 2.0 * v[:, 2] + 2.0 * v[:, 1] - v[:, 0]) / (2.0 * hs**3)
    err = np.abs(third) * hs**2 / 6.0 + eps / hs
    return value, err


def z_prime_central(t, h, policy=DEFAULT_POLICY, evaluator=None):
    """(Z(t+h) - Z(t-h)) / 2h with an error estimate.

    err_est = |Z'''| h^2 / 6 + eps / h, with Z''' from a five-point stencil
    and eps the evaluator's error bound.  ``evaluator`` replaces Z by any
    vectorized callable (used to test exactness on polynomials).
    """
    t, h = float(t), float(h)
    if not (math.isfinite(t) and math.isfinite(h)) or h <= 0:
        raise DomainError("t and h must be finite with h > 0")
    if evaluator is None and t - 2 * h < T_MIN:
        raise DomainError(f"t - 2h must be >= {T_MIN}")
    value, err = central_batch(np.array([t]), np.array([h]), policy, evaluator)
    return float(value[0]), float(err[0])


def analytic_batch(ts, policy=DEFAULT_POLICY, order=None):
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    _, dz, _, _, _ = rscore.evaluate(ts, policy, want_deriv=True, order=order)
    return dz


def z_prime_analytic(t, policy=DEFAULT_POLICY, order=None):
    """Term-by-term derivative of the Z formula in use at t.

    On the Riemann-Siegel route this differentiates the main sum and every
    correction term kept; on the low-height route it differentiates the
    Euler-Maclaurin zeta.  It is a cross-check, not the reported value.
    """
    t = float(t)
    if not t >= T_MIN:
        raise DomainError(f"t must be >= {T_MIN}")
    return float(analytic_batch(np.array([t]), policy, order)[0])


def recover_zeta_prime(theta_mod, zprime):
    """zeta'(1/2 + i gamma) = -i exp(-i theta) Z'(gamma) at a zero."""
    theta_mod = np.asarray(theta_mod, dtype=np.float64)
    zprime = np.asarray(zprime, dtype=np.float64)
    return zprime * (-np.sin(theta_mod) - 1j * np.cos(theta_mod))


class DerivativeTable:
    """Columnar, read-only sequence of DerivativeRecord."""

    _columns = ("index", "gamma", "theta_mod", "residual", "h", "zprime", "err_est", "flagged")

    def __init__(self, index, gamma, theta_mod, residual, h, zprime, err_est, flagged):
        self.index = np.asarray(index, dtype=np.int64)
        self.gamma = np.asarray(gamma, dtype=np.float64)
        self.theta_mod = np.asarray(theta_mod, dtype=np.float64)
        self.residual = np.asarray(residual, dtype=np.float64)
        self.h = np.asarray(h, dtype=np.float64)
        self.zprime = np.asarray(zprime, dtype=np.float64)
        self.err_est = np.asarray(err_est, dtype=np.float64)
        self.flagged = np.asarray(flagged, dtype=bool)
        for k in self._columns:
            getattr(self, k).setflags(write=False)

    def __len__(self):
        return int(self.index.shape[0])

    @property
    def abs_zeta_prime(self):
        return np.abs(self.zprime)

    @property
    def log_abs(self):
        return np.log(np.abs(self.zprime))

    @property
    def zeta_prime(self):
        return recover_zeta_prime(self.theta_mod, self.zprime)

    def zeros(self):
        return ZeroTable(self.index, self.gamma, self.theta_mod, self.residual)

    def __getitem__(self, i):
        if isinstance(i, (slice, np.ndarray)):
            return DerivativeTable(*(getattr(self, k)[i] for k in self._columns))
        zero = ZeroRecord(int(self.index[i]), float(self.gamma[i]),
                          float(self.theta_mod[i]), float(self.residual[i]))
        zp = float(self.zprime[i])
        return DerivativeRecord(
            zero=zero,
            h=float(self.h[i]),
            zprime=zp,
            zeta_prime=complex(recover_zeta_prime(zero.theta_at_gamma, zp)),
            abs_zeta_prime=abs(zp),
            log_abs=math.log(abs(zp)),
            err_est=float(self.err_est[i]),
            flagged=bool(self.flagged[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __repr__(self):
        return f"DerivativeTable({len(self)} records, {int(self.flagged.sum())} flagged)"

    @classmethod
    def from_records(cls, records):
        records = list(records)
        return cls(
            [r.zero.index for r in records],
            [r.zero.gamma for r in records],
            [r.zero.theta_at_gamma for r in records],
            [r.zero.refine_residual for r in records],
            [r.h for r in records],
            [r.zprime for r in records],
            [r.err_est for r in records],
            [r.flagged for r in records],
        )

    @classmethod
    def concat(cls, tables):
        tables = list(tables)
        return cls(*(np.concatenate([getattr(t, k) for t in tables]) for k in cls._columns))


def derivative_table(zeros, step=DEFAULT_STEP, policy=DEFAULT_POLICY, warn=True):
    """Derivatives at every zero of a ZeroTable (or iterable of ZeroRecord)."""
    if not isinstance(zeros, ZeroTable):
        zs = list(zeros)
        zeros = ZeroTable([z.index for z in zs], [z.gamma for z in zs],
                          [z.theta_at_gamma for z in zs], [z.refine_residual for z in zs])
    g = zeros.gamma
    hs = snap_step(g, step.step(g)) if g.size else np.empty(0)
    value, err = central_batch(g, hs, policy) if g.size else (np.empty(0), np.empty(0))
    if step.richardson and g.size:
        half, _ = central_batch(g, hs / 2, policy)
        err = np.maximum(err, np.abs(value - half))
    if np.any(value == 0.0):
        bad = int(zeros.index[np.nonzero(value == 0.0)[0][0]])
        raise ZeroDerivativeError(f"Z'(gamma) evaluated to 0 at zero #{bad}")
    flagged = np.abs(value) <= SMALL_FACTOR * err
    if warn and flagged.any():
        warnings.warn(
            f"{int(flagged.sum())} zero(s) with |Z'| <= {SMALL_FACTOR:g} x error estimate "
            f"(first #{int(zeros.index[np.nonzero(flagged)[0][0]])}); kept and flagged",
            SmallDerivativeWarning,
            stacklevel=2,
        )
    return DerivativeTable(zeros.index, g, zeros.theta_mod, zeros.residual, hs, value, err, flagged)


def zeta_prime_at_zero(zero, step=DEFAULT_STEP, policy=DEFAULT_POLICY):
    """DerivativeRecord for one zero."""
    return derivative_table([zero], step, policy)[0]
