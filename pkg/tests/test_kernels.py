import math

import numpy as np
import pytest

from zetaprime import _pykernels as py
from zetaprime import kernels, rscore

compiled = kernels.compiled()
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


@needs_ext
def test_theta_backends_agree():
    ts = np.geomspace(7.0, 1e8, 200)
    a, da = compiled.theta_ld(ts)
    b, db = py.theta_ld(ts)
    assert np.max(np.abs((a - b).astype(float))) <= 1e-9
    assert np.max(np.abs(da - db)) <= 1e-14
    assert np.max(np.abs(compiled.theta_mod(ts) - py.theta_mod(ts))) <= 1e-12


@needs_ext
@pytest.mark.parametrize("order", [0, 2, 4])
def test_rs_batch_backends_agree(order):
    ts = np.linspace(300.0, 4e5, 64)
    ser, dser = rscore._series(order)
    za, dza = compiled.rs_batch(ts, ser, dser, True)
    zb, dzb = py.rs_batch(ts, ser, dser, True)
    assert np.max(np.abs(za - zb)) <= 1e-12
    assert np.max(np.abs(dza - dzb)) <= 1e-10


@needs_ext
def test_em_batch_backends_agree():
    ts = np.linspace(8.0, 1500.0, 40)
    cuts = rscore._em_cut(ts)
    za, dza = compiled.em_batch(ts, cuts, 14, True)
    zb, dzb = py.em_batch(ts, cuts, 14, True)
    assert np.max(np.abs(za - zb)) <= 1e-12
    assert np.max(np.abs(dza - dzb)) <= 1e-11


def test_rs_without_derivative_gives_nan():
    ser, dser = rscore._series(1)
    _, dz = kernels.rs_batch(np.array([1000.0]), ser, dser, False)
    assert np.isnan(dz).all()


@pytest.mark.parametrize("impl", [py, compiled] if compiled is not None else [py])
def test_neumaier_sum(impl):
    v = np.array([1e16, 1.0, -1e16, 1.0] * 10)
    assert impl.neumaier_sum(v) == 20.0
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1000) * 10.0 ** rng.integers(-8, 8, 1000)
    assert impl.neumaier_sum(x) == pytest.approx(math.fsum(x.tolist()), rel=1e-15, abs=1e-300)


@pytest.mark.parametrize("impl", [py, compiled] if compiled is not None else [py])
def test_exp_sum_grid_matches_direct(impl):
    rng = np.random.default_rng(7)
    c = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    w = np.arange(1, 51, dtype=float) * 1.37
    x0, dx, count = 0.01, 0.003, 200
    got = impl.exp_sum_grid(c, w, x0, dx, count)
    xs = x0 + dx * np.arange(count)
    want = (c[None, :] * np.exp(2j * math.pi * np.outer(xs, w))).sum(axis=1)
    assert np.max(np.abs(got - want)) <= 1e-11


def test_reduce_2pi_range():
    x = np.array([1e7, -1e7, 3.0, 1e12], dtype=np.longdouble)
    r = py.reduce_2pi(x)
    assert np.all(np.abs(r) <= math.pi + 1e-12)
