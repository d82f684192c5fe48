"""Empirical statistics of zeta'(1/2 + i gamma_n) over a block of zeros.

Every function accepts a DerivativeTable or any iterable of
DerivativeRecord.  Sums go through math.fsum (correctly rounded), so the
results do not depend on record order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, predictions
from .derivative import DerivativeTable
from .errors import (ConfigError, DegenerateError, EmptyInputError, NonConsecutiveError, PoleError, RangeError,
                     UnsupportedExponentError, ZeroDerivativeError)
from .zeros import mean_spacing

DEFAULT_BIN_WIDTH = 0.0512
DEFAULT_XMAX = 0.05
DEFAULT_GRID = 4096
INDEX = "index"
SCALED = "scaled"


def as_table(records):
    if isinstance(records, DerivativeTable):
        return records
    return DerivativeTable.from_records(records)


def _need(table, n=1):
    if len(table) < n:
        raise EmptyInputError(f"need at least {n} record(s), got {len(table)}")


def _fsum(a):
    return math.fsum(np.asarray(a, dtype=np.float64).tolist())


def _check_consecutive(table):
    idx = table.index
    if idx.size > 1 and not np.all(np.diff(idx) == 1):
        raise NonConsecutiveError("records must carry consecutive zero indices in order")


def block_range(table):
    return float(table.gamma.min()), float(table.gamma.max())


def block_height(table, mode="auto"):
    """Representative height T of a block.

    'midpoint' of the ordinate range, or 'top'.  'auto' picks 'top' for a
    block that starts at zero #1 (the cumulative average up to T) and the
    midpoint for a short block away from the origin.
    """
    lo, hi = block_range(table)
    if mode == "auto":
        mode = "top" if int(table.index.min()) == 1 else "midpoint"
    if mode == "midpoint":
        return 0.5 * (lo + hi)
    if mode == "top":
        return hi
    raise ValueError("mode must be 'auto', 'midpoint' or 'top'")


@dataclass(frozen=True)
class SummaryStats:
    count: int
    min: float
    max: float
    mean: float
    sd: float


def summary_stats(records):
    """Min, max, mean and (population) SD of log|zeta'|."""
    t = as_table(records)
    _need(t, 2)
    x = t.log_abs
    mean = _fsum(x) / x.size
    sd = math.sqrt(_fsum((x - mean) ** 2) / x.size)
    return SummaryStats(int(x.size), float(x.min()), float(x.max()), mean, sd)


@dataclass(frozen=True)
class MomentResult:
    two_lambda: int
    t_lo: float
    t_hi: float
    count: int
    raw: float
    hko_ratio: float | None = None
    cs_ratio: float | None = None


def _powers(t, exponent):
    if exponent < 0 and np.any(t.zprime == 0.0):
        raise ZeroDerivativeError("|zeta'| = 0 with a negative exponent")
    return np.exp(exponent * t.log_abs)


def moment_sum(records, two_lambda):
    """sum |zeta'|^(2 lambda) over the block (correctly rounded)."""
    t = as_table(records)
    _need(t)
    if two_lambda == 0:
        return float(len(t))
    p = _powers(t, two_lambda)
    # largest contributions first; fsum is exact, the order only documents intent
    return _fsum(np.sort(p)[::-1])


def moment(records, two_lambda, T=None, cs_poly=None, cs_range=None):
    """J = mean of |zeta'|^(2 lambda), with prediction ratios where defined."""
    t = as_table(records)
    _need(t)
    raw = moment_sum(t, two_lambda) / len(t)
    lo, hi = block_range(t)
    hko = None
    try:
        hko = raw / predictions.hko_leading(two_lambda, T if T is not None else block_height(t))
    except (PoleError, UnsupportedExponentError):
        pass
    cs = None
    if cs_poly is not None and cs_poly.two_lambda == two_lambda:
        cs = cs_ratio(t, cs_poly, cs_range)
    return MomentResult(int(two_lambda), lo, hi, len(t), raw, hko, cs)


def hko_ratio(records, two_lambda, T=None):
    """J / hko_leading(2 lambda, T); T defaults to block_height(records)."""
    t = as_table(records)
    _need(t)
    T = block_height(t) if T is None else T
    return moment_sum(t, two_lambda) / len(t) / predictions.hko_leading(two_lambda, T)


def cs_block_range(table):
    """Integration range for a block: from 0 when it starts at zero #1,
    otherwise half a mean spacing either side of the first and last ordinate."""
    lo, hi = block_range(table)
    start = 0.0 if int(table.index.min()) == 1 else lo - 0.5 * float(mean_spacing(lo))
    return start, hi + 0.5 * float(mean_spacing(hi))


def cs_ratio(records, poly, t_range=None):
    """sum |zeta'|^(2 lambda) / integral of P(log(t/2pi)) over the block."""
    if not isinstance(poly, predictions.CSPolynomial):
        raise ConfigError("cs_ratio needs a CSPolynomial")
    t = as_table(records)
    _need(t)
    lo, hi = cs_block_range(t) if t_range is None else t_range
    return moment_sum(t, poly.two_lambda) / predictions.cs_integral(poly, lo, hi)


def _zscores(t):
    s = summary_stats(t)
    if not s.sd > 0:
        raise DegenerateError("log|zeta'| has zero spread")
    return (t.log_abs - s.mean) / s.sd, s


@dataclass(frozen=True)
class DensityReport:
    bin_width: float
    bins: list
    mean: float
    sd: float
    diffs: list


def gaussian_pdf(x):
    return np.exp(-0.5 * np.asarray(x) ** 2) / math.sqrt(2.0 * math.pi)


def normalized_density(records, bin_width=DEFAULT_BIN_WIDTH):
    """Histogram of z-scores of log|zeta'|, bins centred on multiples of bin_width."""
    if not bin_width > 0:
        raise ValueError("bin_width must be > 0")
    t = as_table(records)
    z, s = _zscores(t)
    k = np.rint(z / bin_width).astype(np.int64)
    ks, counts = np.unique(k, return_counts=True)
    centers = ks * bin_width
    dens = counts / (z.size * bin_width)
    gauss = gaussian_pdf(centers)
    return DensityReport(
        bin_width=float(bin_width),
        bins=list(zip(centers.tolist(), dens.tolist())),
        mean=s.mean,
        sd=s.sd,
        diffs=list(zip(centers.tolist(), (dens - gauss).tolist())),
    )


def gaussian_moment(k):
    """E[X^k] for a standard normal: 0 for odd k, (k-1)!! for even k."""
    if k % 2:
        return 0.0
    return float(math.prod(range(k - 1, 0, -2)))


def gaussian_moments(records, k_max=10):
    """[(k, empirical k-th moment of z-scores, Gaussian value)] for k = 3..k_max."""
    if not 3 <= k_max <= 10:
        raise RangeError("k_max must lie in 3..10")
    z, _ = _zscores(as_table(records))
    return [(k, _fsum(z**k) / z.size, gaussian_moment(k)) for k in range(3, k_max + 1)]


@dataclass(frozen=True)
class TailRow:
    side: str
    cutoff: float
    empirical_pct: float
    gaussian_pct: float
    clt_pct: float | None


def _upper_tail(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def tail_report(records, thresholds, gamma=None, N=None):
    """Share of |zeta'| above/below cutoffs vs Gaussian predictions.

    ``gaussian_pct`` uses a normal law with the block's own mean and SD of
    log|zeta'|; ``clt_pct`` (when gamma and N are given) uses the central
    limit location and scale instead.
    """
    t = as_table(records)
    _need(t)
    s = summary_stats(t) if len(t) > 1 else None
    a = t.abs_zeta_prime
    rows = []
    for side, cutoff in thresholds:
        if side not in ("above", "below") or not cutoff > 0:
            raise ValueError("threshold must be ('above' | 'below', cutoff > 0)")
        lc = math.log(cutoff)
        if side == "above":
            emp = 100.0 * np.count_nonzero(a > cutoff) / a.size
        else:
            emp = 100.0 * np.count_nonzero(a < cutoff) / a.size
        gauss = math.nan
        if s is not None and s.sd > 0:
            zz = (lc - s.mean) / s.sd
            gauss = 100.0 * (_upper_tail(zz) if side == "above" else _upper_tail(-zz))
        clt = None
        if gamma is not None and N is not None:
            zz = predictions.clt_normalize(lc, gamma, N)
            clt = 100.0 * (_upper_tail(zz) if side == "above" else _upper_tail(-zz))
        rows.append(TailRow(side, float(cutoff), float(emp), float(gauss), clt))
    return rows


def shifted_moment(records, two_lambda, m):
    """sum_n |zeta'(gamma_n) zeta'(gamma_{n+m})|^(2 lambda) within the block."""
    t = as_table(records)
    _need(t)
    _check_consecutive(t)
    if int(m) != m or m < 0:
        raise RangeError("shift m must be a non-negative integer")
    m = int(m)
    if m >= len(t):
        raise RangeError(f"shift {m} leaves no pairs in a block of {len(t)}")
    la = t.log_abs
    if two_lambda < 0 and np.any(t.zprime == 0.0):
        raise ZeroDerivativeError("|zeta'| = 0 with a negative exponent")
    return _fsum(np.exp(two_lambda * (la[: la.size - m] + la[m:])))


def shifted_series(records, two_lambda, m_max):
    """S(m) / S(0) for m = 0..m_max."""
    t = as_table(records)
    s0 = shifted_moment(t, two_lambda, 0)
    return np.array([shifted_moment(t, two_lambda, m) / s0 for m in range(int(m_max) + 1)])


def fujii_empirical(records):
    """sum of complex zeta'(1/2 + i gamma_n) over the block."""
    t = as_table(records)
    _need(t)
    zp = t.zeta_prime
    return complex(_fsum(zp.real), _fsum(zp.imag))


@dataclass(frozen=True)
class SpectrumSeries:
    x_grid: np.ndarray
    values: np.ndarray
    variant: str
    T: float | None = None

    @property
    def magnitude(self):
        return np.abs(self.values)

    def local_maxima(self):
        m = self.magnitude
        inner = np.nonzero((m[1:-1] > m[:-2]) & (m[1:-1] >= m[2:]))[0] + 1
        return self.x_grid[inner]


def spectrum(records, x_max=DEFAULT_XMAX, grid_points=DEFAULT_GRID, variant=INDEX, T=None):
    """f(x) = sum zeta'(1/2 + i gamma_n) exp(2 pi i w_n x) on a uniform grid in [0, x_max].

    w_n = n for the index variant; w_n = (gamma_n / 2pi) log(T/2pi) for the
    scaled variant (T defaults to the top of the block).
    """
    if int(grid_points) != grid_points or grid_points < 2:
        raise RangeError("grid_points must be an integer >= 2")
    if not x_max > 0:
        raise RangeError("x_max must be > 0")
    t = as_table(records)
    _need(t)
    if variant == INDEX:
        w = t.index.astype(np.float64)
        T_used = None
    elif variant == SCALED:
        T_used = block_height(t, "top") if T is None else float(T)
        w = t.gamma / (2.0 * math.pi) * math.log(T_used / (2.0 * math.pi))
    else:
        raise RangeError(f"variant must be {INDEX!r} or {SCALED!r}")
    grid_points = int(grid_points)
    dx = x_max / (grid_points - 1)
    x = np.arange(grid_points) * dx
    vals = kernels.exp_sum_grid(t.zeta_prime, w, 0.0, dx, grid_points)
    return SpectrumSeries(x, vals, variant, T_used)


def top_contributors(records, two_lambda, k):
    """Cumulative % of sum |zeta'|^(2 lambda) carried by the k largest terms."""
    t = as_table(records)
    _need(t)
    if int(k) != k or not 1 <= k <= len(t):
        raise RangeError(f"k must lie in 1..{len(t)}")
    p = np.sort(_powers(t, two_lambda))[::-1]
    total = _fsum(p)
    return (100.0 * np.cumsum(p[: int(k)]) / total).tolist()


@dataclass(frozen=True)
class GapRow:
    n: int
    gamma: float
    gap: float
    abs_left: float
    abs_right: float
    gap_over_spacing: float


def min_gap_report(records, k):
    """The k smallest gaps gamma_{n+1} - gamma_n, smallest first."""
    t = as_table(records)
    _need(t, 2)
    _check_consecutive(t)
    gaps = np.diff(t.gamma)
    k = min(int(k), gaps.size)
    if k < 1:
        raise RangeError("k must be >= 1")
    order = np.argsort(gaps, kind="stable")[:k]
    a = t.abs_zeta_prime
    mid = 0.5 * (t.gamma[order] + t.gamma[order + 1])
    ratio = gaps[order] / mean_spacing(mid)
    return [
        GapRow(int(t.index[i]), float(t.gamma[i]), float(gaps[i]), float(a[i]), float(a[i + 1]), float(r))
        for i, r in zip(order, ratio)
    ]
