"""Riemann-Siegel theta and Hardy's Z on the critical line.

Z(t) = exp(i theta(t)) zeta(1/2 + it) is evaluated by the Riemann-Siegel
main sum plus correction terms C_0..C_J.  Where the correction series
cannot reach ``target_abs_error`` (low heights) the evaluator switches to
an Euler-Maclaurin summation of zeta, so one entry point covers t >= 7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from ._rscoeffs import CORRECTION_SERIES
from .errors import DomainError, PrecisionError

T_MIN = 7.0
TWO_PI = 2.0 * math.pi
EPS = np.finfo(np.float64).eps
EPS_LD = float(np.finfo(np.longdouble).eps)

# Gabcke: |R_J(t)| <= c_J t^(-(2J+3)/4) for t >= 200.
GABCKE = (0.127, 0.053, 0.011, 0.031, 0.017)
RS_MIN_HEIGHT = 200.0
EM_MAX_HEIGHT = 1e5
_BOUND_SAFETY = 2.0

RIEMANN_SIEGEL = "riemann-siegel"
EULER_MACLAURIN = "euler-maclaurin"


@dataclass(frozen=True)
class PrecisionPolicy:
    """Accuracy targets for theta and Z.

    ``correction_order`` is the minimum number of Riemann-Siegel corrections
    beyond C_0; more are added (up to ``max_correction_order``) when needed
    to meet ``target_abs_error``.  ``em_terms`` is the number of Bernoulli
    corrections in the low-height Euler-Maclaurin path.
    """

    phase_digits: int = 9
    target_abs_error: float = 1e-10
    correction_order: int = 3
    max_correction_order: int = 4
    em_terms: int = 14

    def __post_init__(self):
        if self.phase_digits < 6:
            raise ValueError("phase_digits must be >= 6")
        if not self.target_abs_error > 0:
            raise ValueError("target_abs_error must be > 0")
        if not 0 <= self.correction_order <= self.max_correction_order < len(CORRECTION_SERIES):
            raise ValueError(
                f"need 0 <= correction_order <= max_correction_order <= {len(CORRECTION_SERIES) - 1}"
            )
        if not 1 <= self.em_terms <= 14:
            raise ValueError("em_terms must be in 1..14")

    def as_dict(self):
        return {
            "phase_digits": self.phase_digits,
            "target_abs_error": self.target_abs_error,
            "correction_order": self.correction_order,
            "max_correction_order": self.max_correction_order,
            "em_terms": self.em_terms,
        }


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class PhasePoint:
    t: float
    theta: float
    theta_mod: float
    dtheta: float


@dataclass(frozen=True)
class ZEvaluation:
    t: float
    z: float
    main_sum_length: int
    correction_order: int
    est_error: float
    method: str = RIEMANN_SIEGEL


def _check_heights(t):
    t = np.asarray(t, dtype=np.float64)
    if t.size and not (np.all(np.isfinite(t)) and t.min() >= T_MIN):
        raise DomainError(f"heights must be finite and >= {T_MIN}")
    return t


def theta_value(t):
    """theta(t) in plain double precision (no reduction); vectorized."""
    t = _check_heights(t)
    th, _ = kernels.theta_ld(np.atleast_1d(t))
    out = th.astype(np.float64)
    return out.reshape(t.shape) if t.shape else float(out[0])


def dtheta_value(t):
    t = _check_heights(t)
    _, dth = kernels.theta_ld(np.atleast_1d(t))
    return dth.reshape(t.shape) if t.shape else float(dth[0])


def _nu(t):
    return np.floor(np.sqrt(t / TWO_PI)).astype(np.int64)


def phase_error(t):
    """Bound on the absolute error of one reduced main-sum phase at height t."""
    t = np.asarray(t, dtype=np.float64)
    big = 0.5 * t * np.log(t / TWO_PI) + t * np.log(np.maximum(_nu(t), 1) + 1.0)
    return 4.0 * EPS_LD * (big + 1.0)


def phase_digits_available(t):
    return float(-np.log10(phase_error(t)))


def _require_digits(t, policy):
    worst = float(np.max(t)) if np.size(t) else T_MIN
    if phase_digits_available(worst) < policy.phase_digits:
        raise PrecisionError(
            f"only {phase_digits_available(worst):.1f} phase digits available at t={worst:g} "
            f"(long double eps {EPS_LD:.3g}); policy asks for {policy.phase_digits}"
        )


def theta(t, policy=DEFAULT_POLICY):
    """theta(t), its reduction to [0, 2 pi), and theta'(t)."""
    t = float(t)
    _check_heights(t)
    _require_digits(np.array([t]), policy)
    ts = np.array([t])
    th, dth = kernels.theta_ld(ts)
    return PhasePoint(
        t=t,
        theta=float(th[0]),
        theta_mod=float(kernels.theta_mod(ts)[0]),
        dtheta=float(dth[0]),
    )


@lru_cache(maxsize=None)
def _series(order):
    width = max(len(s) for s in CORRECTION_SERIES[: order + 1])
    ser = np.zeros((order + 1, width))
    dser = np.zeros((order + 1, width))
    for j, s in enumerate(CORRECTION_SERIES[: order + 1]):
        ser[j, : len(s)] = s
        d = np.polynomial.polynomial.polyder(np.asarray(s))
        dser[j, : len(d)] = d
    ser.setflags(write=False)
    dser.setflags(write=False)
    return ser, dser


def rs_truncation_bound(t, order):
    t = np.asarray(t, dtype=np.float64)
    order = np.asarray(order)
    return _BOUND_SAFETY * np.take(GABCKE, order) * t ** (-(2 * order + 3) / 4.0)


def _em_cut(t):
    return np.maximum(10, np.ceil(0.5 * t)).astype(np.int64) + 10


@lru_cache(maxsize=None)
def _bernoulli_ratio(k):
    # |B_2k| / (2k)!
    import mpmath

    return float(abs(mpmath.bernoulli(2 * k)) / mpmath.factorial(2 * k))


def em_truncation_bound(t, terms):
    """Size of the first omitted Euler-Maclaurin correction (times a safety factor)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    cut = _em_cut(t).astype(np.float64)
    s_abs = np.ones_like(t)
    for j in range(2 * terms + 1):
        s_abs = s_abs * np.hypot(0.5 + j, t)
    return 10.0 * _bernoulli_ratio(terms + 1) * s_abs * cut ** (-(2.0 * terms + 1.5))


def _roundoff(length):
    # 10 unit roundoffs per term of a sum bounded by 2 sqrt(length) in magnitude
    return 10.0 * EPS * 4.0 * np.sqrt(length)


def plan(t, policy=DEFAULT_POLICY, order=None):
    """Choose the method and correction order for each height.

    Returns (is_rs, order, est_error) arrays.  ``order`` forces the
    Riemann-Siegel correction order at every t.
    """
    t = np.asarray(t, dtype=np.float64)
    if order is not None:
        if not 0 <= order < len(CORRECTION_SERIES):
            raise ValueError(f"correction order must be in 0..{len(CORRECTION_SERIES) - 1}")
        is_rs = np.ones(t.shape, dtype=bool)
        orders = np.full(t.shape, order, dtype=np.int64)
    else:
        orders = np.full(t.shape, policy.max_correction_order, dtype=np.int64)
        ok = np.zeros(t.shape, dtype=bool)
        for j in range(policy.max_correction_order, policy.correction_order - 1, -1):
            fits = rs_truncation_bound(t, j) <= 0.5 * policy.target_abs_error
            orders = np.where(fits, j, orders)
            ok |= fits
        is_rs = ok & (t >= RS_MIN_HEIGHT)
        # Euler-Maclaurin cost grows like t; past this use the best RS order
        is_rs |= t >= EM_MAX_HEIGHT
    nu = np.maximum(_nu(t), 1)
    phase = phase_error(t)
    est = np.empty(t.shape)
    rs_est = rs_truncation_bound(t, orders) + _roundoff(nu) + phase * 4.0 * np.sqrt(nu)
    est = np.where(is_rs, rs_est, 0.0)
    if not is_rs.all():
        tt = t[~is_rs]
        cut = _em_cut(tt)
        est[~is_rs] = (em_truncation_bound(tt, policy.em_terms) + _roundoff(cut)
                       + phase_error(tt) * 4.0 * np.sqrt(cut))
    return is_rs, orders, est


def evaluate(ts, policy=DEFAULT_POLICY, want_deriv=False, route=None, order=None):
    """Batch Z(t) (and the analytic Z'(t)) for an array of heights.

    ``route`` supplies, per point, the height that decides method and
    order; finite-difference stencils pass their centre so every point of
    a stencil is evaluated by the same formula.  Returns (z, dz, est_error,
    is_rs, orders).
    """
    ts = _check_heights(np.atleast_1d(np.asarray(ts, dtype=np.float64)))
    _require_digits(ts, policy)
    route = ts if route is None else np.atleast_1d(np.asarray(route, dtype=np.float64))
    is_rs, orders, _ = plan(route, policy, order)
    _, _, est = plan(ts, policy, order)
    z = np.empty(ts.shape)
    dz = np.full(ts.shape, np.nan)
    for j in np.unique(orders[is_rs]):
        sel = is_rs & (orders == j)
        ser, dser = _series(int(j))
        z[sel], dz[sel] = kernels.rs_batch(ts[sel], ser, dser, want_deriv)
    if not is_rs.all():
        sel = ~is_rs
        z[sel], dz[sel] = kernels.em_batch(ts[sel], _em_cut(route[sel]), policy.em_terms, want_deriv)
    if route is not ts:
        # the routing height may use a different formula than ts itself would
        est = np.maximum(est, plan(route, policy, order)[2])
    return z, dz, est, is_rs, orders


def rs_z(t, policy=DEFAULT_POLICY, order=None):
    """Z(t) with its error estimate."""
    t = float(t)
    z, _, est, is_rs, orders = evaluate(np.array([t]), policy, order=order)
    if is_rs[0]:
        return ZEvaluation(t, float(z[0]), int(_nu(t)), int(orders[0]), float(est[0]), RIEMANN_SIEGEL)
    return ZEvaluation(t, float(z[0]), int(_em_cut(np.array([t]))[0]), policy.em_terms,
                       float(est[0]), EULER_MACLAURIN)


def zeta_critical(t, policy=DEFAULT_POLICY):
    """zeta(1/2 + it) recovered as exp(-i theta) Z(t)."""
    ph = theta(t, policy)
    z = rs_z(t, policy).z
    return complex(z * math.cos(ph.theta_mod), -z * math.sin(ph.theta_mod))
