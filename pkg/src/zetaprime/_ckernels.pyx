# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Same names, signatures and numerics; phases are carried in C ``long
double`` and reduced modulo 2 pi before the double-precision cosine.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, floor, log, fmod, M_PI

cnp.import_array()

cdef extern from "math.h" nogil:
    long double logl(long double)
    long double rintl(long double)

cdef extern from *:
    """
    static const long double ZP_TWO_PI_LD = 6.283185307179586476925286766559005768L;
    static const long double ZP_INV_TWO_PI_LD = 0.159154943091895335768883763372514362L;
    static const long double ZP_PI_OVER_8_LD = 0.392699081698724154807830422909937861L;
    """
    const long double TWO_PI_LD "ZP_TWO_PI_LD"
    const long double INV_TWO_PI_LD "ZP_INV_TWO_PI_LD"
    const long double PI_OVER_8_LD "ZP_PI_OVER_8_LD"

cdef double[8] THETA_SERIES
THETA_SERIES[:] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
    1414477.0 / 1476034560.0,
    8191.0 / 2555904.0,
    118518239.0 / 7113539584.0,
]

cdef double[14] EM_BERNOULLI
EM_BERNOULLI[:] = [
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
]


cdef inline void _theta(double t, long double *th, double *dth) noexcept nogil:
    cdef double inv = 1.0 / t
    cdef double inv2 = inv * inv
    cdef double power = inv
    cdef double acc = 0.0
    cdef double dacc = 0.0
    cdef int k
    for k in range(1, 9):
        acc += THETA_SERIES[k - 1] * power
        dacc += THETA_SERIES[k - 1] * (1 - 2 * k) * power * inv
        power *= inv2
    cdef long double tl = t
    cdef long double lr = logl(tl * INV_TWO_PI_LD)
    th[0] = 0.5 * tl * lr - 0.5 * tl - PI_OVER_8_LD + <long double>acc
    dth[0] = 0.5 * <double>lr + dacc


cdef inline double _reduce(long double x) noexcept nogil:
    cdef long double k = rintl(x * INV_TWO_PI_LD)
    return <double>(x - k * TWO_PI_LD)


def theta_ld(ts):
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t m = t.shape[0], i
    th = np.empty(m, dtype=np.longdouble)
    cdef cnp.ndarray[long double, ndim=1] thv = th
    dth = np.empty(m)
    cdef double[::1] dthv = dth
    cdef long double a
    cdef double b
    for i in range(m):
        _theta(t[i], &a, &b)
        thv[i] = a
        dthv[i] = b
    return th, dth


def theta_mod(ts):
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t m = t.shape[0], i
    out = np.empty(m)
    cdef double[::1] o = out
    cdef long double a
    cdef double b, r
    for i in range(m):
        _theta(t[i], &a, &b)
        r = _reduce(a)
        o[i] = r + 2.0 * M_PI if r < 0.0 else r
    return out


cdef inline double _horner(const double[:, ::1] s, Py_ssize_t j, double z) noexcept nogil:
    cdef Py_ssize_t i = s.shape[1] - 1
    cdef double acc = 0.0
    while i >= 0:
        acc = acc * z + s[j, i]
        i -= 1
    return acc


def rs_batch(ts, series, dseries, bint want_deriv):
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef const double[:, ::1] ser = np.ascontiguousarray(series, dtype=np.float64)
    cdef const double[:, ::1] dser = np.ascontiguousarray(dseries, dtype=np.float64)
    cdef Py_ssize_t m = t.shape[0], i, n, j
    cdef Py_ssize_t order = ser.shape[0]
    z_out = np.zeros(m)
    dz_out = np.full(m, np.nan)
    if m == 0:
        return z_out, dz_out
    cdef double[::1] zv = z_out
    cdef double[::1] dzv = dz_out
    cdef Py_ssize_t nu_max = 1
    for i in range(m):
        n = <Py_ssize_t>floor(sqrt(t[i] / (2.0 * M_PI)))
        if n > nu_max:
            nu_max = n
    logn_arr = np.empty(nu_max + 1, dtype=np.longdouble)
    cdef cnp.ndarray[long double, ndim=1] logn = logn_arr
    lognd_arr = np.empty(nu_max + 1)
    cdef double[::1] lognd = lognd_arr
    rsq_arr = np.empty(nu_max + 1)
    cdef double[::1] rsq = rsq_arr
    for n in range(1, nu_max + 1):
        logn[n] = logl(<long double>n)
        lognd[n] = <double>logn[n]
        rsq[n] = 1.0 / sqrt(<double>n)
    cdef long double *lp = <long double *>cnp.PyArray_DATA(logn_arr)
    cdef long double th, tl
    cdef double dth, a, p, zz, u, pref, corr, dcorr, upow, dp_dt, cj, dcj
    cdef double main, dmain, r, tt
    cdef Py_ssize_t nu
    with nogil:
        for i in range(m):
            tt = t[i]
            _theta(tt, &th, &dth)
            tl = tt
            a = sqrt(tt / (2.0 * M_PI))
            nu = <Py_ssize_t>floor(a)
            p = a - nu
            main = 0.0
            dmain = 0.0
            if want_deriv:
                for n in range(1, nu + 1):
                    r = _reduce(th - tl * lp[n])
                    main += rsq[n] * cos(r)
                    dmain -= rsq[n] * (dth - lognd[n]) * sin(r)
            else:
                for n in range(1, nu + 1):
                    r = _reduce(th - tl * lp[n])
                    main += rsq[n] * cos(r)
            zz = p - 0.5
            u = 1.0 / a
            pref = sqrt(u) if nu % 2 == 1 else -sqrt(u)
            corr = 0.0
            dcorr = 0.0
            upow = 1.0
            dp_dt = u / (4.0 * M_PI)
            for j in range(order):
                cj = _horner(ser, j, zz)
                corr += cj * upow
                if want_deriv:
                    dcj = _horner(dser, j, zz)
                    dcorr += (dcj * dp_dt - (0.25 + 0.5 * j) * cj / tt) * upow
                upow *= u
            zv[i] = 2.0 * main + pref * corr
            if want_deriv:
                dzv[i] = 2.0 * dmain + pref * dcorr
    return z_out, dz_out


def em_batch(ts, n_terms, int n_bernoulli, bint want_deriv):
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef const cnp.int64_t[::1] cuts = np.ascontiguousarray(n_terms, dtype=np.int64)
    cdef Py_ssize_t m = t.shape[0], i, n
    cdef int k
    z_out = np.zeros(m)
    dz_out = np.full(m, np.nan)
    cdef double[::1] zv = z_out
    cdef double[::1] dzv = dz_out
    cdef long double th, tl, ln
    cdef double dth, ph, w, lnd, lnN, npow
    cdef Py_ssize_t big_n
    cdef double complex rot, head, dhead, rn, tail, dtail, s, poch, recip, term, total
    with nogil:
        for i in range(m):
            _theta(t[i], &th, &dth)
            tl = t[i]
            big_n = cuts[i]
            s = 0.5 + 1j * t[i]
            head = 0.0
            dhead = 0.0
            for n in range(1, big_n):
                ln = logl(<long double>n)
                ph = _reduce(th - tl * ln)
                w = 1.0 / sqrt(<double>n)
                rot = (cos(ph) + 1j * sin(ph)) * w
                head = head + rot
                dhead = dhead - rot * <double>ln
            lnN = log(<double>big_n)
            ph = _reduce(th - tl * logl(<long double>big_n))
            rn = (cos(ph) + 1j * sin(ph)) / sqrt(<double>big_n)
            tail = rn * big_n / (s - 1.0) + 0.5 * rn
            dtail = (-lnN * rn * big_n / (s - 1.0) - rn * big_n / ((s - 1.0) * (s - 1.0))
                     - 0.5 * lnN * rn)
            poch = s
            recip = 1.0 / s
            npow = 1.0 / big_n
            for k in range(1, n_bernoulli + 1):
                term = EM_BERNOULLI[k - 1] * poch * rn * npow
                tail = tail + term
                dtail = dtail + term * (recip - lnN)
                poch = poch * (s + 2 * k - 1) * (s + 2 * k)
                recip = recip + 1.0 / (s + 2 * k - 1) + 1.0 / (s + 2 * k)
                npow = npow / (<double>big_n * big_n)
            total = head + tail
            zv[i] = total.real
            if want_deriv:
                dzv[i] = (1j * (dth * total + (dhead + dtail))).real
    return z_out, dz_out


def neumaier_sum(values):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double total = 0.0, comp = 0.0, s, x
    with nogil:
        for i in range(v.shape[0]):
            x = v[i]
            s = total + x
            if (total if total >= 0 else -total) >= (x if x >= 0 else -x):
                comp += (total - s) + x
            else:
                comp += (x - s) + total
            total = s
    return total + comp


cdef inline void _seed(double complex cn, double wn, double x, double dx,
                       double* cre, double* cim, double* sre, double* sim) noexcept nogil:
    cdef double ang = 2.0 * M_PI * fmod(wn * dx, 1.0)
    sre[0] = cos(ang)
    sim[0] = sin(ang)
    ang = 2.0 * M_PI * fmod(wn * x, 1.0)
    cre[0] = cn.real * cos(ang) - cn.imag * sin(ang)
    cim[0] = cn.real * sin(ang) + cn.imag * cos(ang)


def exp_sum_grid(coeffs, weights, double x0, double dx, Py_ssize_t count):
    cdef const double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.zeros(count, dtype=np.complex128)
    cdef double complex[::1] acc = out
    cdef double[64] are
    cdef double[64] aim
    cdef double[4] cre, cim, sre, sim
    cdef Py_ssize_t n, j, m, k0, kk, width, nterms = c.shape[0]
    cdef double t
    with nogil:
        # blocks of 64 grid points, phase re-seeded at each block start;
        # four terms advance together so their recurrences overlap
        for k0 in range(0, count, 64):
            width = min(64, count - k0)
            for kk in range(width):
                are[kk] = 0.0
                aim[kk] = 0.0
            for n in range(0, nterms, 4):
                m = min(4, nterms - n)
                for j in range(4):
                    if j < m:
                        _seed(c[n + j], w[n + j], x0 + k0 * dx, dx, &cre[j], &cim[j], &sre[j], &sim[j])
                    else:
                        cre[j] = 0.0
                        cim[j] = 0.0
                        sre[j] = 1.0
                        sim[j] = 0.0
                for kk in range(width):
                    are[kk] += (cre[0] + cre[1]) + (cre[2] + cre[3])
                    aim[kk] += (cim[0] + cim[1]) + (cim[2] + cim[3])
                    for j in range(4):
                        t = cre[j] * sre[j] - cim[j] * sim[j]
                        cim[j] = cre[j] * sim[j] + cim[j] * sre[j]
                        cre[j] = t
            for kk in range(width):
                acc[k0 + kk] = are[kk] + 1j * aim[kk]
    return out
