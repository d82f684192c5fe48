"""NumPy implementation of the hot kernels.

Used when the compiled extension is unavailable or ``ZETAPRIME_PURE`` is
set. Every function here has a twin of the same name and signature in
``_ckernels.pyx``; the two must agree to roundoff.

Phases (theta(t) - t log n, t log n up to ~1e8) are formed and reduced
modulo 2 pi in ``numpy.longdouble`` before the cosine is taken in double.
"""

import math

import numpy as np

LD = np.longdouble
TWO_PI_LD = LD(2) * LD("3.14159265358979323846264338327950288")
INV_TWO_PI_LD = LD(1) / TWO_PI_LD
PI_OVER_8_LD = TWO_PI_LD / LD(16)

# (1 - 2^(1-2k)) |B_2k| / (4k (2k-1)), coefficient of t^(1-2k) in theta(t)
THETA_SERIES = (
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
    1414477.0 / 1476034560.0,
    8191.0 / 2555904.0,
    118518239.0 / 7113539584.0,
)

# B_2k / (2k)! for the Euler-Maclaurin tail, k = 1..14
EM_BERNOULLI = tuple(
    float(v)
    for v in (
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
        43867.0 / 5109094217170944000.0,
        -174611.0 / 802857662698291200000.0,
        77683.0 / 14101100039391805440000.0,
        -236364091.0 / 1693824136731743669452800000.0,
        657931.0 / 186134520519971831808000000.0,
        -3392780147.0 / 37893265687455865519472640000000.0,
    )
)


def _theta_tail(t):
    inv = 1.0 / t
    inv2 = inv * inv
    acc = np.zeros_like(t)
    dacc = np.zeros_like(t)
    power = inv.copy()
    for k, c in enumerate(THETA_SERIES, start=1):
        acc += c * power
        dacc += c * (1 - 2 * k) * power * inv
        power = power * inv2
    return acc, dacc


def theta_ld(ts):
    """theta(t) in long double and theta'(t) in double for an array of t."""
    t = np.asarray(ts, dtype=np.float64)
    tl = t.astype(LD)
    log_ratio = np.log(tl * INV_TWO_PI_LD)
    tail, dtail = _theta_tail(t)
    th = LD(0.5) * tl * log_ratio - LD(0.5) * tl - PI_OVER_8_LD + tail.astype(LD)
    dth = 0.5 * log_ratio.astype(np.float64) + dtail
    return th, dth


def reduce_2pi(x):
    """Reduce long-double angles to [-pi, pi] and return them in double."""
    k = np.rint(x * INV_TWO_PI_LD)
    return (x - k * TWO_PI_LD).astype(np.float64)


def theta_mod(ts):
    th, _ = theta_ld(ts)
    r = reduce_2pi(th)
    return np.where(r < 0.0, r + 2.0 * math.pi, r)


def _horner(coeffs, z):
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def rs_batch(ts, series, dseries, want_deriv):
    """Riemann-Siegel Z(t) (and optionally Z'(t)) for each t.

    ``series[j]`` / ``dseries[j]`` hold the power series in p - 1/2 of C_j
    and its p-derivative; the number of rows fixes the correction order.
    Returns (z, dz); dz is all-NaN when ``want_deriv`` is false.
    """
    t = np.ascontiguousarray(ts, dtype=np.float64)
    m = t.shape[0]
    z = np.zeros(m)
    dz = np.full(m, np.nan)
    if m == 0:
        return z, dz
    th, dth = theta_ld(t)
    a = np.sqrt(t / (2.0 * math.pi))
    nu = np.floor(a).astype(np.int64)
    p = a - nu
    nu_max = int(nu.max())
    logn = np.log(np.arange(1, nu_max + 1, dtype=LD))
    rsqrt = 1.0 / np.sqrt(np.arange(1, nu_max + 1, dtype=np.float64))
    tl = t.astype(LD)
    main = np.zeros(m)
    dmain = np.zeros(m)
    # loop over n keeps memory flat for large batches
    for n in range(1, nu_max + 1):
        sel = nu >= n
        if not sel.all():
            idx = np.nonzero(sel)[0]
        else:
            idx = slice(None)
        phase = reduce_2pi(th[idx] - tl[idx] * logn[n - 1])
        main[idx] += rsqrt[n - 1] * np.cos(phase)
        if want_deriv:
            dmain[idx] -= rsqrt[n - 1] * (dth[idx] - float(logn[n - 1])) * np.sin(phase)
    zz = p - 0.5
    u = 1.0 / a  # (t / 2 pi)^(-1/2)
    sign = np.where(nu % 2 == 1, 1.0, -1.0)  # (-1)^(nu - 1)
    pref = sign * np.sqrt(u)
    corr = np.zeros(m)
    dcorr = np.zeros(m)
    upow = np.ones(m)
    dp_dt = u / (4.0 * math.pi)
    for j in range(len(series)):
        cj = _horner(series[j], zz)
        corr += cj * upow
        if want_deriv:
            dcj = _horner(dseries[j], zz)
            dcorr += (dcj * dp_dt - (0.25 + 0.5 * j) * cj / t) * upow
        upow = upow * u
    z = 2.0 * main + pref * corr
    if want_deriv:
        dz = 2.0 * dmain + pref * dcorr
    return z, dz


def em_batch(ts, n_terms, n_bernoulli, want_deriv):
    """Euler-Maclaurin Z(t) (and Z'(t)) with an explicit tail.

    ``n_terms`` holds the cut N for each t; the tail uses ``n_bernoulli``
    Bernoulli corrections.
    """
    t = np.ascontiguousarray(ts, dtype=np.float64)
    cuts = np.ascontiguousarray(n_terms, dtype=np.int64)
    m = t.shape[0]
    z = np.zeros(m)
    dz = np.full(m, np.nan)
    th, dth = theta_ld(t)
    tl = t.astype(LD)
    for i in range(m):
        big_n = int(cuts[i])
        ns = np.arange(1, big_n, dtype=np.float64)
        logn = np.log(np.arange(1, big_n, dtype=LD))
        # e^{i theta} n^{-s} = n^{-1/2} e^{i (theta - t log n)}
        ph = reduce_2pi(th[i] - tl[i] * logn)
        w = 1.0 / np.sqrt(ns)
        rot = np.exp(1j * ph) * w
        s = complex(0.5, t[i])
        head = rot.sum()
        dhead = -(rot * logn.astype(np.float64)).sum()
        lnN = math.log(big_n)
        phn = float(reduce_2pi(th[i:i + 1] - tl[i] * np.log(LD(big_n)))[0])
        # e^{i theta} N^{-s}
        rn = complex(math.cos(phn), math.sin(phn)) / math.sqrt(big_n)
        tail = rn * big_n / (s - 1.0) + 0.5 * rn
        dtail = (-lnN * rn * big_n / (s - 1.0) - rn * big_n / (s - 1.0) ** 2
                 - 0.5 * lnN * rn)
        poch = s  # s (s+1) ... (s + 2k - 2)
        recip = 1.0 / s  # sum of 1/(s+j) over the same factors
        npow = 1.0 / big_n
        for k in range(1, n_bernoulli + 1):
            term = EM_BERNOULLI[k - 1] * poch * rn * npow
            tail += term
            dtail += term * (recip - lnN)
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            recip += 1.0 / (s + 2 * k - 1) + 1.0 / (s + 2 * k)
            npow /= big_n * big_n
        total = head + tail
        z[i] = total.real
        if want_deriv:
            # d/dt [e^{i theta} zeta(1/2 + it)] = i (theta' e^{i theta} zeta + e^{i theta} zeta')
            dz[i] = (1j * (dth[i] * total + (dhead + dtail))).real
    return z, dz


def neumaier_sum(values):
    """Compensated (Neumaier) sum of a float64 array."""
    total = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=np.float64).tolist():
        s = total + v
        if abs(total) >= abs(v):
            comp += (total - s) + v
        else:
            comp += (v - s) + total
        total = s
    return total + comp


def exp_sum_grid(coeffs, weights, x0, dx, count):
    """f_k = sum_n c_n exp(2 pi i w_n (x0 + k dx)) for k = 0..count-1."""
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty(count, dtype=np.complex128)
    step = np.exp(2j * math.pi * np.fmod(w * dx, 1.0))
    cur = None
    for k in range(count):
        if k % 64 == 0:
            cur = c * np.exp(2j * math.pi * np.fmod(w * (x0 + k * dx), 1.0))
        else:
            cur = cur * step
        out[k] = cur.sum()
    return out
