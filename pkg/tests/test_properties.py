import math
import random
import tempfile
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as hs

from zetaprime import cache, rscore
from zetaprime import derivative as dv
from zetaprime import statistics as st
from zetaprime import zeros
from zetaprime.zeros import ZeroTable

SETTINGS = settings(max_examples=60, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.function_scoped_fixture])

positive = hs.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
values = hs.lists(positive, min_size=3, max_size=60)


def make_table(zp, theta=None):
    zp = np.asarray(zp, dtype=float)
    n = zp.size
    theta = np.linspace(0.1, 6.0, n) if theta is None else np.asarray(theta, float)
    z = np.zeros(n)
    return dv.DerivativeTable(np.arange(1, n + 1), 20.0 + np.arange(n), theta, z, z + 1e-5, zp, z,
                              z.astype(bool))


@SETTINGS
@given(hs.floats(min_value=10.0, max_value=5000.0))
def test_rotated_zeta_is_real(t):
    with mpmath.workdps(20):
        zeta = complex(mpmath.zeta(mpmath.mpc(0.5, t)))
    rot = complex(math.cos(rscore.theta(t).theta_mod), math.sin(rscore.theta(t).theta_mod)) * zeta
    assert abs(rot.imag) <= 1e-9
    assert rot.real == pytest.approx(rscore.rs_z(t).z, abs=1e-8)


@SETTINGS
@given(values, hs.randoms(use_true_random=False))
def test_statistics_permutation_invariant(zp, rnd):
    t = make_table(zp)
    recs = list(t)
    rnd.shuffle(recs)
    shuffled = dv.DerivativeTable.from_records(recs)
    assert st.summary_stats(shuffled) == st.summary_stats(t)
    for tl in (-2, 2, 4):
        assert st.moment_sum(shuffled, tl) == st.moment_sum(t, tl)
    assert st.fujii_empirical(shuffled) == st.fujii_empirical(t)
    if st.summary_stats(t).sd > 0:
        assert st.gaussian_moments(shuffled, 6) == st.gaussian_moments(t, 6)


@SETTINGS
@given(values, hs.sampled_from([-4, -2, 2, 4, 6]))
def test_shifted_moment_at_zero_shift(zp, tl):
    t = make_table(zp)
    assert st.shifted_moment(t, tl, 0) == pytest.approx(st.moment_sum(t, 2 * tl), rel=1e-12)


@SETTINGS
@given(hs.lists(hs.floats(min_value=-5, max_value=5), min_size=3, max_size=200),
       hs.floats(min_value=0.01, max_value=1.0))
def test_density_normalization(logs, bw):
    x = np.asarray(logs)
    if np.std(x) < 1e-6:
        return
    d = st.normalized_density(make_table(np.exp(x)), bw)
    total = math.fsum(w * d.bin_width for _, w in d.bins)
    assert abs(total - 1.0) <= 1e-9


@SETTINGS
@given(hs.lists(hs.floats(min_value=1e-6, max_value=50.0), min_size=1, max_size=40),
       hs.floats(min_value=14.0, max_value=1e6), hs.integers(min_value=1, max_value=10**6))
def test_zero_cache_round_trip(gaps, start, first):
    gamma = start + np.cumsum(gaps)
    if not np.all(np.diff(gamma) > 0):
        return
    t = ZeroTable(np.arange(first, first + gamma.size), gamma, np.zeros(gamma.size), np.zeros(gamma.size))
    with tempfile.TemporaryDirectory() as d:
        _zero_round_trip(Path(d), t, start)


def _zero_round_trip(tmp_path, t, start):
    gamma = t.gamma
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cache.write_zero_cache(a, t, {"t_lo": cache.fmt(start)})
    back, meta = cache.read_zero_cache(a, theta=False)
    assert np.array_equal(back.gamma, gamma)
    del meta["count"], meta["first_index"]
    cache.write_zero_cache(b, back, meta)
    assert a.read_bytes() == b.read_bytes()


@SETTINGS
@given(hs.lists(hs.floats(min_value=-1e3, max_value=1e3), min_size=1, max_size=30),
       hs.lists(hs.floats(min_value=0.0, max_value=2 * math.pi - 1e-9), min_size=30, max_size=30),
       hs.lists(hs.floats(min_value=1e-12, max_value=1.0), min_size=30, max_size=30))
def test_deriv_cache_round_trip(zp, theta, err):
    zp = [v if v != 0 else 1.0 for v in zp]
    n = len(zp)
    t = dv.DerivativeTable(np.arange(5, 5 + n), 100.0 + np.arange(n) * 0.7, theta[:n], np.zeros(n),
                           np.full(n, 1e-5), zp, err[:n], [i % 3 == 0 for i in range(n)])
    with tempfile.TemporaryDirectory() as d:
        _deriv_round_trip(Path(d), t)


def _deriv_round_trip(tmp_path, t):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cache.write_deriv_cache(a, t, {"x": "y"})
    back, meta = cache.read_deriv_cache(a)
    del meta["count"]
    cache.write_deriv_cache(b, back, meta)
    assert a.read_bytes() == b.read_bytes()


@pytest.fixture(scope="module")
def reference_zeros():
    table, _ = zeros.scan_zeros(rscore.T_MIN, 1e5)
    return table


def test_scan_completeness_on_random_subranges(reference_zeros):
    rng = random.Random(20240611)
    ref = reference_zeros
    for _ in range(100):
        lo = rng.uniform(rscore.T_MIN, 1e5 - 10.0)
        hi = min(1e5, lo + rng.uniform(1.0, 300.0))
        table, audit = zeros.scan_zeros(lo, hi)
        assert audit.found == audit.expected
        mask = (ref.gamma > lo) & (ref.gamma <= hi)
        assert table.index.tolist() == ref.index[mask].tolist()
        assert np.allclose(table.gamma, ref.gamma[mask], rtol=0, atol=1e-9)


@SETTINGS
@given(hs.lists(positive, min_size=10, max_size=10), hs.lists(hs.floats(0.0, 6.28), min_size=10, max_size=10))
def test_ten_record_blocks_match_naive_sums(zp, theta):
    t = make_table(zp, theta)
    x = np.log(np.asarray(zp))
    mean = sum(x.tolist()) / 10
    assert st.summary_stats(t).mean == pytest.approx(mean, rel=1e-14)
    assert st.moment_sum(t, 4) == pytest.approx(sum(v**4 for v in zp), rel=1e-13)
    f = st.fujii_empirical(t)
    naive = sum(z * complex(-math.sin(th), -math.cos(th)) for z, th in zip(zp, theta))
    assert f == pytest.approx(naive, rel=1e-12, abs=1e-12)


@SETTINGS
@given(hs.lists(hs.floats(min_value=1.0, max_value=1e3), min_size=2, max_size=40))
def test_moments_nondecreasing_when_all_at_least_one(zp):
    t = make_table(zp)
    raws = [st.moment_sum(t, k) for k in (-6, -4, -2, 0, 2, 4, 6)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(raws, raws[1:]))


@SETTINGS
@given(values, hs.integers(min_value=1, max_value=50))
def test_spectrum_is_linear_over_blocks(zp, cut):
    t = make_table(zp)
    cut = min(cut, len(t) - 1)
    whole = st.spectrum(t, x_max=0.3, grid_points=17)
    parts = st.spectrum(t[:cut], x_max=0.3, grid_points=17).values + st.spectrum(t[cut:], x_max=0.3,
                                                                                 grid_points=17).values
    assert np.allclose(whole.values, parts, rtol=1e-10, atol=1e-9 * np.abs(t.zprime).sum())
