import math
from fractions import Fraction

import mpmath
import pytest

from zetaprime import predictions as pr
from zetaprime import zeros
from zetaprime.errors import ConfigError, DomainError, PoleError, UnsupportedExponentError


def _oracle_a(lam, bound):
    # product of (1 - 1/p)^(lam^2) 2F1(lam, lam; 1; 1/p) over p <= bound, no tail
    with mpmath.workdps(30):
        acc = mpmath.mpf(0)
        for p in _sieve(bound):
            x = mpmath.mpf(1) / p
            acc += lam * lam * mpmath.log1p(-x) + mpmath.log(mpmath.hyp2f1(lam, lam, 1, x))
        return acc


def _sieve(n):
    flags = [True] * (n + 1)
    for p in range(2, n + 1):
        if flags[p]:
            yield p
            for q in range(p * p, n + 1, p):
                flags[q] = False


def test_barnes_g():
    assert [pr.barnes_g_int(n) for n in range(1, 8)] == [1, 1, 1, 2, 12, 288, 34560]
    with pytest.raises(DomainError):
        pr.barnes_g_int(0)


def test_barnes_g_matches_mpmath():
    with mpmath.workdps(60):
        for n in (3, 9, 12):
            assert pr.barnes_g_int(n) == int(mpmath.nint(mpmath.barnesg(n)))


def test_g_ratio():
    assert pr.g_ratio(1) == Fraction(1, 12)
    assert pr.g_ratio(0) == 1
    assert pr.g_ratio(-1) == 1
    assert pr.g_ratio(2) == Fraction(2**2, 34560)  # G(4)^2 / G(7)


def test_arithmetic_factor_identities():
    assert pr.arithmetic_factor(1) == pytest.approx(1.0, abs=1e-12)
    assert pr.arithmetic_factor(0) == 1.0
    assert pr.arithmetic_factor(2) == pytest.approx(6 / math.pi**2, abs=1e-6)
    assert pr.arithmetic_factor(-1) == pytest.approx(6 / math.pi**2, abs=1e-6)
    assert pr.arithmetic_factor_error(2) < 1e-6


def test_arithmetic_factor_error_covers_truth():
    err = abs(pr.arithmetic_factor(2) - 6 / math.pi**2)
    assert err <= pr.arithmetic_factor_error(2)
    coarse = pr.arithmetic_factor(2, prime_bound=1000)
    assert abs(coarse - 6 / math.pi**2) <= pr.arithmetic_factor_error(2, prime_bound=1000)


@pytest.mark.parametrize("lam", [2, 3, 4])
def test_arithmetic_factor_matches_hypergeometric_oracle(lam):
    bound = 2000
    head = float(_oracle_a(lam, bound))
    tail = -lam * lam * (lam - 1) ** 2 / 4.0 / (bound * math.log(bound))
    got = pr.arithmetic_factor(lam, prime_bound=bound)
    assert got == pytest.approx(math.exp(head + tail), rel=1e-12)


@pytest.mark.parametrize("lam", [3, 4])
def test_arithmetic_factor_converges(lam):
    a = pr.arithmetic_factor(lam, prime_bound=10**4)
    b = pr.arithmetic_factor(lam, prime_bound=10**6)
    assert abs(a - b) <= pr.arithmetic_factor_error(lam, prime_bound=10**4)


def test_arithmetic_factor_rejects():
    with pytest.raises(UnsupportedExponentError):
        pr.arithmetic_factor(1.5)
    with pytest.raises(UnsupportedExponentError):
        pr.arithmetic_factor(-2)
    with pytest.raises(DomainError):
        pr.arithmetic_factor(2, prime_bound=10)


def test_hko_leading_lambda_one():
    model = pr.hko_model(2)
    assert model.constant == pytest.approx(1 / 12, abs=1e-12)
    assert model.power == 3
    T = 1e6
    assert pr.hko_leading(2, T) == pytest.approx(math.log(T / (2 * math.pi)) ** 3 / 12, rel=1e-12)


def test_hko_negative_matches_gonek():
    for T in (100.0, 1e8):
        assert pr.hko_leading(-2, T) == pytest.approx(pr.gonek_negative(T), rel=1e-6)


def test_hko_exponent_errors():
    with pytest.raises(PoleError):
        pr.hko_leading(-3, 1e6)
    assert issubclass(PoleError, DomainError)
    with pytest.raises(UnsupportedExponentError):
        pr.hko_leading(-4, 1e6)
    with pytest.raises(UnsupportedExponentError):
        pr.hko_leading(3, 1e6)
    with pytest.raises(DomainError):
        pr.hko_leading(2, 5.0)


def test_gonek_documentation_values():
    assert pr.gonek_negative(zeros.height_of_zero(10**20)) == pytest.approx(0.014362, abs=5e-5)
    assert pr.gonek_negative(zeros.height_of_zero(10**23)) == pytest.approx(0.012385, abs=5e-5)
    assert pr.gonek_negative(zeros.height_of_zero(10**16)) == pytest.approx(0.01808, rel=0.01)
    with pytest.raises(DomainError):
        pr.gonek_negative(10.0)


def test_fujii_prediction_form():
    T = 1e5
    u = T / (2 * math.pi)
    L = math.log(u)
    c0, c1 = float(mpmath.euler), -0.0728158454836767
    want = u * L * L / 2 + (c0 - 1) * u * L - (c1 + c0) * u
    assert pr.fujii_prediction(T) == pytest.approx(want, rel=1e-14)
    with pytest.raises(ConfigError):
        pr.FujiiTerms(c0=0.6)


def test_clt_constants_at_high_height():
    assert pr.clt_location(1.3066434e22) == pytest.approx(2.0557, abs=1e-4)
    assert pr.clt_scale(1e23) == pytest.approx(1.4088, abs=1e-4)
    z = pr.clt_normalize([2.0557, 3.4645], 1.3066434e22, 1e23)
    assert z[0] == pytest.approx(0.0, abs=1e-4)
    assert z[1] == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(DomainError):
        pr.clt_scale(2)


def test_cs_degree_and_leading():
    assert pr.cs_degree(2) == 4
    assert pr.cs_degree(4) == 9
    assert pr.expected_cs_leading(2) == pytest.approx(1 / 12 / (2 * math.pi), rel=1e-12)


def test_cs_polynomial_validation():
    lead = pr.expected_cs_leading(2)
    p = pr.CSPolynomial(2, (lead, 0.5), "test")
    assert p.degree == 4 and p.known == 2 and not p.complete
    assert p.coeffs[2:] == (0.0, 0.0, 0.0)
    with pytest.raises(ConfigError):
        pr.CSPolynomial(2, (lead,), "")
    with pytest.raises(ConfigError):
        pr.CSPolynomial(2, (2 * lead,), "test")
    with pytest.raises(ConfigError):
        pr.CSPolynomial(2, (lead,) + (0.0,) * 5, "test")
    with pytest.raises(ConfigError):
        pr.CSPolynomial(6, (1.0,), "test")


def test_cs_integral_matches_quadrature():
    lead = pr.expected_cs_leading(4)
    p = pr.CSPolynomial(4, (lead, 0.3, -1.0, 2.0, 0.1), "test")
    with mpmath.workdps(30):
        f = lambda t: mpmath.polyval(list(p.coeffs), mpmath.log(t / (2 * mpmath.pi)))
        want = float(mpmath.quad(f, [1e3, 5e3, 1e4]))
    assert pr.cs_integral(p, 1e3, 1e4) == pytest.approx(want, rel=1e-12)


def test_cs_leading_term_reproduces_hko_times_count():
    p = pr.CSPolynomial.leading_only(2)
    T, H = 1e8, 1e3
    count = H * math.log(T / (2 * math.pi)) / (2 * math.pi)
    got = pr.cs_integral(p, T, T + H)
    assert got == pytest.approx(pr.hko_leading(2, T + H / 2) * count, rel=1e-6)


def test_cs_integral_from_zero():
    p = pr.CSPolynomial.leading_only(2)
    assert pr.cs_integral(p, 0.0, 100.0) == pytest.approx(pr.cs_integral(p, 1e-300, 100.0), abs=1e-9)
    with pytest.raises(DomainError):
        pr.cs_integral(p, 10.0, 5.0)


def test_spike_locations():
    T = 1e6
    L = math.log(T / (2 * math.pi))
    assert pr.spike_locations(T, 4) == pytest.approx([math.log(k) / L for k in (2, 3, 4)])
    assert pr.spike_locations(30.0, 100)[-1] < 1.0
    with pytest.raises(DomainError):
        pr.spike_locations(T, 1)
