"""Locate zeros of Z(t): Gram points, sign-change scans, refinement.

A scan is audited on spans between *good* Gram points g_n, those with
(-1)^n Z(g_n) > 0.  At a good Gram point the zero count is exactly n + 1
(at desk heights |S(t)| < 2), so each span between consecutive good Gram
points a < b must hold exactly b - a zeros.  Spans that show fewer sign
changes are subdivided until the missing pair turns up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rscore
from .errors import BracketError, ConvergenceError, DomainError, MissingZeroError, RangeError
from .rscore import DEFAULT_POLICY, T_MIN, TWO_PI

ZERO_TOL = 1e-14  # relative; see refine_zero
SUBDIVISION_FLOOR = 1e-4  # in units of the mean spacing
UNIFORM_LEVELS = 4
MAX_LEVELS = 60
SCAN_CHUNK = 20000  # Gram intervals per internal pass


@dataclass(frozen=True)
class GramPoint:
    index: int
    t: float


@dataclass(frozen=True)
class ZeroRecord:
    index: int
    gamma: float
    theta_at_gamma: float
    refine_residual: float


@dataclass(frozen=True)
class BlockCount:
    """Completeness audit of the Gram-aligned span [t_lo, t_hi]."""

    t_lo: float
    t_hi: float
    found: int
    expected: int


class ZeroTable:
    """Columnar, read-only sequence of ZeroRecord."""

    def __init__(self, index, gamma, theta_mod, residual):
        self.index = np.asarray(index, dtype=np.int64)
        self.gamma = np.asarray(gamma, dtype=np.float64)
        self.theta_mod = np.asarray(theta_mod, dtype=np.float64)
        self.residual = np.asarray(residual, dtype=np.float64)
        for a in (self.index, self.gamma, self.theta_mod, self.residual):
            a.setflags(write=False)

    def __len__(self):
        return int(self.index.shape[0])

    def __getitem__(self, i):
        if isinstance(i, (slice, np.ndarray)):
            return ZeroTable(self.index[i], self.gamma[i], self.theta_mod[i], self.residual[i])
        return ZeroRecord(int(self.index[i]), float(self.gamma[i]),
                          float(self.theta_mod[i]), float(self.residual[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __repr__(self):
        if not len(self):
            return "ZeroTable(empty)"
        return (f"ZeroTable({len(self)} zeros, #{self.index[0]} at {self.gamma[0]:.6f} .. "
                f"#{self.index[-1]} at {self.gamma[-1]:.6f})")

    @classmethod
    def concat(cls, tables):
        tables = list(tables)
        if not tables:
            return cls([], [], [], [])
        return cls(*(np.concatenate([getattr(t, k) for t in tables])
                     for k in ("index", "gamma", "theta_mod", "residual")))


def mean_spacing(t):
    """Average gap 2 pi / log(t / 2 pi) between zeros near height t."""
    return TWO_PI / np.log(np.asarray(t, dtype=np.float64) / TWO_PI)


def expected_count(t):
    """Smooth zero count theta(t)/pi + 1 (the S(t) term is omitted)."""
    return rscore.theta_value(t) / math.pi + 1.0


def height_of_zero(n):
    """Height where the smooth count reaches n - 1/2, a proxy for gamma_n."""
    if n < 1:
        raise DomainError("zero number must be >= 1")
    return float(gram_points([float(n) - 1.5])[0])


def _lambert_w(y):
    # principal branch, y >= -1/e
    y = np.asarray(y, dtype=np.float64)
    w = np.where(y > 1.0, np.log(np.maximum(y, 1.0)), 0.5 * y)
    for _ in range(60):
        ew = np.exp(w)
        f = w * ew - y
        step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0))
        w = w - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(w))):
            break
    return w


def gram_points(indices):
    """Vectorized Gram points: t with theta(t) = n pi, t > 2 pi."""
    n = np.asarray(indices, dtype=np.float64)
    if n.size and n.min() < -1:
        raise DomainError("Gram index must be >= -1")
    y = (n + 0.125) / math.e
    t = TWO_PI * (n + 0.125) / _lambert_w(y)
    t = np.where(np.isfinite(t), t, TWO_PI * math.e)
    pi_ld = np.longdouble("3.14159265358979323846264338327950288")
    target = n.astype(np.longdouble) * pi_ld
    for _ in range(50):
        t = np.maximum(t, T_MIN)
        th, dth = rscore.kernels.theta_ld(t)
        step = ((th - target).astype(np.float64)) / dth
        t = t - step
        if np.all(np.abs(step) <= 4.0 * np.spacing(t)):
            return t
    raise ConvergenceError("Gram point Newton iteration did not converge")


def gram_point(n):
    """The n-th Gram point g_n, theta(g_n) = n pi (n = -1 gives g_{-1} ~ 9.667)."""
    if int(n) != n or n < -1:
        raise DomainError("Gram index must be an integer >= -1")
    return GramPoint(int(n), float(gram_points([n])[0]))


def _z(ts, policy):
    z, _, _, _, _ = rscore.evaluate(ts, policy)
    return z


def _tol(t, zero_tol):
    return np.maximum(zero_tol * np.abs(t), 4.0 * np.spacing(np.abs(t)))


def _refine_batch(lo, hi, flo, fhi, policy, zero_tol, max_iter=100):
    """Illinois iteration on many brackets at once; returns (root, residual)."""
    lo = np.array(lo, dtype=np.float64)
    hi = np.array(hi, dtype=np.float64)
    flo = np.array(flo, dtype=np.float64)
    fhi = np.array(fhi, dtype=np.float64)
    m = lo.shape[0]
    root = 0.5 * (lo + hi)
    resid = np.full(m, np.inf)
    side = np.zeros(m, dtype=np.int8)  # which endpoint was kept last: -1 lo, +1 hi
    active = np.ones(m, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            return root, resid
        a, b, fa, fb = lo[idx], hi[idx], flo[idx], fhi[idx]
        x = b - fb * (b - a) / (fb - fa)
        width = b - a
        bad = ~np.isfinite(x) | (x <= a + 0.01 * width) | (x >= b - 0.01 * width)
        x = np.where(bad, 0.5 * (a + b), x)
        fx = _z(x, policy)
        root[idx] = x
        resid[idx] = np.abs(fx)
        left = np.sign(fx) == np.sign(fa)  # root in [x, b]
        s = side[idx]
        # Illinois: halve the retained endpoint's value when it is kept twice
        new_fb = np.where(left & (s == 1), 0.5 * fb, fb)
        new_fa = np.where(~left & (s == -1), 0.5 * fa, fa)
        lo[idx] = np.where(left, x, a)
        flo[idx] = np.where(left, fx, new_fa)
        hi[idx] = np.where(left, b, x)
        fhi[idx] = np.where(left, new_fb, fx)
        side[idx] = np.where(left, 1, -1)
        done = (fx == 0.0) | (hi[idx] - lo[idx] <= _tol(x, zero_tol))
        active[idx[done]] = False
    if active.any():
        raise ConvergenceError(f"{int(active.sum())} brackets did not converge")
    return root, resid


def refine_zero(bracket_lo, bracket_hi, policy=DEFAULT_POLICY, zero_tol=ZERO_TOL, index=None):
    """Refine a sign-change bracket of Z to a zero.

    Iterates until the bracket is narrower than ``zero_tol`` relative (or a
    few ulps).  Without ``index`` the global zero number is estimated as
    floor(expected_count(gamma)) + 1, which is exact whenever |S| < 1/2.
    """
    lo, hi = float(bracket_lo), float(bracket_hi)
    if not lo < hi:
        raise RangeError("bracket must satisfy lo < hi")
    flo, fhi = _z(np.array([lo, hi]), policy)
    if flo == 0.0 or fhi == 0.0:
        gamma = lo if flo == 0.0 else hi
        resid = 0.0
    else:
        if np.sign(flo) == np.sign(fhi):
            raise BracketError(f"Z has the same sign at {lo!r} and {hi!r}")
        r, res = _refine_batch([lo], [hi], [flo], [fhi], policy, zero_tol)
        gamma, resid = float(r[0]), float(res[0])
    if index is None:
        index = int(math.floor(expected_count(gamma))) + 1
    th = float(rscore.kernels.theta_mod(np.array([gamma]))[0])
    return ZeroRecord(int(index), gamma, th, resid)


def _good(idx, z):
    return np.where(idx % 2 == 0, z > 0, z < 0)


def _sign_changes(v):
    return np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]


def _complete_blocks(blocks, policy):
    """Subdivide deficient Gram blocks until each shows its expected count.

    ``blocks`` is a list of [points, values, expected]; points/values are
    updated in place.  All intervals are halved for a few levels; after
    that only the two whose endpoints come closest to zero are split.
    """
    pending = [b for b in blocks if len(_sign_changes(b[1])) < b[2]]
    for level in range(MAX_LEVELS):
        if not pending:
            return
        new_pts = []
        owners = []
        for k, (pts, vals, expected) in enumerate(pending):
            floor = SUBDIVISION_FLOOR * float(mean_spacing(pts[0]))
            # a missing pair can also hide beside a crossing, so every
            # interval is a candidate, not only those with equal end signs
            cand = np.nonzero(np.diff(pts) > floor)[0]
            if cand.size == 0:
                raise MissingZeroError("subdivision floor reached", float(pts[0]), float(pts[-1]),
                                       len(_sign_changes(vals)), expected)
            if level >= UNIFORM_LEVELS and cand.size > 2:
                dip = np.minimum(np.abs(vals[cand]), np.abs(vals[cand + 1]))
                cand = cand[np.argsort(dip)[:2]]
            mids = 0.5 * (pts[cand] + pts[cand + 1])
            new_pts.append(mids)
            owners.append(np.full(mids.size, k))
        allp = np.concatenate(new_pts)
        allv = _z(allp, policy)
        own = np.concatenate(owners)
        still = []
        for k, blk in enumerate(pending):
            sel = own == k
            pts = np.concatenate([blk[0], allp[sel]])
            vals = np.concatenate([blk[1], allv[sel]])
            order = np.argsort(pts, kind="stable")
            blk[0], blk[1] = pts[order], vals[order]
            found = len(_sign_changes(blk[1]))
            if found > blk[2]:
                raise MissingZeroError("more sign changes than zeros (counting anomaly)",
                                       float(blk[0][0]), float(blk[0][-1]), found, blk[2])
            if found < blk[2]:
                still.append(blk)
        pending = still
    if pending:
        blk = pending[0]
        raise MissingZeroError("subdivision depth exhausted", float(blk[0][0]), float(blk[0][-1]),
                               len(_sign_changes(blk[1])), blk[2])


class _GramCache:
    """Gram points and Z values on demand, for one scan."""

    def __init__(self, policy):
        self.policy = policy
        self.t = {}
        self.z = {}

    def fill(self, lo, hi):
        need = [n for n in range(lo, hi + 1) if n not in self.t]
        if need:
            ts = gram_points(need)
            zs = _z(ts, self.policy)
            for n, t, z in zip(need, ts, zs):
                self.t[n] = t
                self.z[n] = z

    def good(self, n):
        self.fill(n, n)
        return bool(_good(np.array([n]), np.array([self.z[n]]))[0])

    def drop_below(self, n):
        for k in [k for k in self.t if k < n]:
            del self.t[k]
            del self.z[k]


def _scan_span(a, b, cache, policy, zero_tol):
    """Zeros in the good-Gram span [g_a, g_b]; returns (gammas, residuals)."""
    cache.fill(a, b)
    idx = np.arange(a, b + 1)
    pts = np.array([cache.t[n] for n in idx])
    vals = np.array([cache.z[n] for n in idx])
    good = np.nonzero(_good(idx, vals))[0]
    blocks = []
    brackets_lo, brackets_hi, f_lo, f_hi = [], [], [], []
    for s, e in zip(good[:-1], good[1:]):
        bp, bv = pts[s:e + 1], vals[s:e + 1]
        expected = int(e - s)
        if len(_sign_changes(bv)) == expected:
            c = _sign_changes(bv)
            brackets_lo.append(bp[c])
            brackets_hi.append(bp[c + 1])
            f_lo.append(bv[c])
            f_hi.append(bv[c + 1])
        else:
            blocks.append([bp.copy(), bv.copy(), expected])
    _complete_blocks(blocks, policy)
    for bp, bv, _ in blocks:
        c = _sign_changes(bv)
        brackets_lo.append(bp[c])
        brackets_hi.append(bp[c + 1])
        f_lo.append(bv[c])
        f_hi.append(bv[c + 1])
    if not brackets_lo:
        return np.empty(0), np.empty(0)
    lo = np.concatenate(brackets_lo)
    hi = np.concatenate(brackets_hi)
    flo = np.concatenate(f_lo)
    fhi = np.concatenate(f_hi)
    order = np.argsort(lo)
    lo, hi, flo, fhi = lo[order], hi[order], flo[order], fhi[order]
    exact = flo == 0.0
    roots = np.where(exact, lo, 0.0)
    resid = np.zeros(lo.shape)
    live = ~exact & (fhi != 0.0)
    roots = np.where(fhi == 0.0, hi, roots)
    if live.any():
        r, res = _refine_batch(lo[live], hi[live], flo[live], fhi[live], policy, zero_tol)
        roots[live] = r
        resid[live] = res
    return roots, resid


def _first_gram_index(t):
    return max(-1, int(math.floor(rscore.theta_value(t) / math.pi)))


def scan_zeros(t_lo, t_hi, policy=DEFAULT_POLICY, zero_tol=ZERO_TOL, chunk=SCAN_CHUNK):
    """All zeros with t_lo < gamma <= t_hi, with a completeness audit.

    Returns (ZeroTable, BlockCount); the BlockCount covers the enclosing
    span between good Gram points, where found == expected is enforced.
    """
    t_lo, t_hi = float(t_lo), float(t_hi)
    if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or not t_lo < t_hi:
        raise RangeError(f"empty or malformed range ({t_lo!r}, {t_hi!r})")
    if t_lo < T_MIN:
        raise RangeError(f"t_lo must be >= {T_MIN}")
    cache = _GramCache(policy)
    a = _first_gram_index(t_lo)
    while not cache.good(a):
        a -= 1
        if a < -1:
            raise MissingZeroError("no good Gram point below range", T_MIN, t_lo, 0, 0)
    b_final = max(a + 1, int(math.ceil(rscore.theta_value(t_hi) / math.pi)))
    while not cache.good(b_final):
        b_final += 1
    span_lo = cache.t[a]
    span_hi = cache.t[b_final]
    gammas, resids = [], []
    total = 0
    cur = a
    while cur < b_final:
        nxt = min(cur + chunk, b_final)
        while not cache.good(nxt):
            nxt += 1
        g, r = _scan_span(cur, nxt, cache, policy, zero_tol)
        if len(g) != nxt - cur:
            raise MissingZeroError("Gram span count mismatch", cache.t[cur], cache.t[nxt], len(g), nxt - cur)
        total += len(g)
        gammas.append(g)
        resids.append(r)
        cache.drop_below(nxt)
        cur = nxt
    g = np.concatenate(gammas) if gammas else np.empty(0)
    r = np.concatenate(resids) if resids else np.empty(0)
    if g.size > 1 and not np.all(np.diff(g) > 0):
        raise MissingZeroError("refined zeros not strictly increasing", span_lo, span_hi, len(g), total)
    first_index = a + 2  # N(g_a) = a + 1
    index = np.arange(first_index, first_index + g.size, dtype=np.int64)
    keep = (g > t_lo) & (g <= t_hi)
    g, r, index = g[keep], r[keep], index[keep]
    th = rscore.kernels.theta_mod(g) if g.size else np.empty(0)
    return ZeroTable(index, g, th, r), BlockCount(span_lo, span_hi, total, b_final - a)


def first_zeros(n, policy=DEFAULT_POLICY, zero_tol=ZERO_TOL):
    """The first n zeros, gamma_1 .. gamma_n."""
    if n < 1:
        raise RangeError("n must be >= 1")
    hi = float(gram_points([n])[0])
    table, count = scan_zeros(T_MIN, hi, policy, zero_tol)
    while len(table) < n:  # pragma: no cover - g_n already encloses zero n at desk heights
        hi *= 1.01
        table, count = scan_zeros(T_MIN, hi, policy, zero_tol)
    return table[:n], count
