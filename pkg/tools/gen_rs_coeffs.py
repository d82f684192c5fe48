"""Regenerate ``src/zetaprime/_rscoeffs.py``.

The Riemann-Siegel correction functions C_0..C_4 are written as power
series in z = p - 1/2 built from the Taylor series of

    Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
           = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z)

computed by exact power-series division at 60 digits.

    python tools/gen_rs_coeffs.py > src/zetaprime/_rscoeffs.py
"""
import mpmath as mp

mp.mp.dps = 60
DEGREE = 96
TRUNC = mp.mpf("1e-24")  # drop terms below this on |z| <= 1/2


def psi_series(deg):
    two_pi = 2 * mp.pi
    num = [mp.mpf(0)] * (deg + 1)
    c, s = mp.cos(5 * mp.pi / 8), mp.sin(5 * mp.pi / 8)
    k = 0
    while 4 * k <= deg:
        # cos(w) and sin(w) with w = 2 pi z^2
        num[4 * k] += -c * (-1) ** k * two_pi ** (2 * k) / mp.factorial(2 * k)
        if 4 * k + 2 <= deg:
            num[4 * k + 2] += -s * (-1) ** k * two_pi ** (2 * k + 1) / mp.factorial(2 * k + 1)
        k += 1
    den = [mp.mpf(0)] * (deg + 1)
    for k in range(0, deg // 2 + 1):
        den[2 * k] = (-1) ** k * two_pi ** (2 * k) / mp.factorial(2 * k)
    out = [mp.mpf(0)] * (deg + 1)
    for k in range(deg + 1):
        acc = num[k]
        for j in range(1, k + 1):
            acc -= den[j] * out[k - j]
        out[k] = acc / den[0]
    return out


def deriv(series, order):
    out = list(series)
    for _ in range(order):
        out = [i * out[i] for i in range(1, len(out))]
    return out


def combine(terms, deg):
    out = [mp.mpf(0)] * (deg + 1)
    for weight, series in terms:
        for i, a in enumerate(series[: deg + 1]):
            out[i] += weight * a
    return out


def correction_series():
    psi = psi_series(DEGREE)
    d = {k: deriv(psi, k) for k in range(13)}
    pi2 = mp.pi ** 2
    deg = DEGREE - 12
    c0 = combine([(1, d[0])], deg)
    c1 = combine([(-1 / (96 * pi2), d[3])], deg)
    c2 = combine([(1 / (64 * pi2), d[2]), (1 / (18432 * pi2 ** 2), d[6])], deg)
    c3 = combine([(-1 / (64 * pi2), d[1]), (-1 / (3840 * pi2 ** 2), d[5]),
                  (-1 / (5308416 * pi2 ** 3), d[9])], deg)
    c4 = combine([(1 / (128 * pi2), d[0]), (mp.mpf(19) / (24576 * pi2 ** 2), d[4]),
                  (mp.mpf(11) / (5898240 * pi2 ** 3), d[8]),
                  (1 / (2038431744 * pi2 ** 4), d[12])], deg)
    return [c0, c1, c2, c3, c4]


def trimmed(series):
    last = 0
    for i, a in enumerate(series):
        if abs(a) * mp.mpf(0.5) ** i > TRUNC:
            last = i
    return series[: last + 1]


def main():
    print('"""Power-series coefficients of the Riemann-Siegel corrections.')
    print()
    print("CORRECTION_SERIES[j][i] is the coefficient of (p - 1/2)**i in C_j(p).")
    print('Generated by tools/gen_rs_coeffs.py; do not edit by hand.\n"""')
    print()
    print("CORRECTION_SERIES = (")
    for series in correction_series():
        print("    (")
        for a in trimmed(series):
            print(f"        {mp.nstr(a, 20, min_fixed=1, max_fixed=0)},")
        print("    ),")
    print(")")


if __name__ == "__main__":
    main()
