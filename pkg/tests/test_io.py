import csv
import json

import numpy as np
import pytest

from zetaprime import cache, cli, config, pipeline
from zetaprime import derivative as dv
from zetaprime.errors import ConfigError, RangeError
from zetaprime.predictions import expected_cs_leading

LEAD2 = expected_cs_leading(2)

GOOD = f"""
# comment
[precision]
phase_digits = 8
target_abs_error = 1e-11

[step]
mode = absolute
h_abs = 2e-5

[run]
out = somewhere
checkpoint_every = 500

[report]
two_lambda = -2, 2, 4
tails = above:100, below:0.5
cs_fallback = yes

[fujii]
c1 = -0.0728

[cs.2]
coeffs = {LEAD2!r}, 0.1,
         0.2
source = hand-entered for a test
"""


def test_parse_config():
    cfg = config.parse_config(GOOD)
    assert cfg.precision.phase_digits == 8
    assert cfg.precision.target_abs_error == 1e-11
    assert cfg.step.mode == "absolute" and cfg.step.h_abs == 2e-5
    assert cfg.out == "somewhere" and cfg.checkpoint_every == 500
    assert cfg.report.two_lambda == (-2, 2, 4)
    assert cfg.report.tails == (("above", 100.0), ("below", 0.5))
    assert cfg.report.cs_fallback is True
    assert cfg.fujii.c1 == -0.0728
    assert cfg.cs[2].coeffs[:3] == (LEAD2, 0.1, 0.2) and cfg.cs[2].known == 3
    assert 4 not in cfg.cs


def test_defaults_without_file():
    cfg = config.load_config(None)
    assert cfg.precision.phase_digits == 9
    assert cfg.report.bin_width == 0.0512
    assert cfg.cs == {}


@pytest.mark.parametrize("text", [
    "[nonsense]\na = 1\n",
    "[precision]\nbogus = 1\n",
    "[precision]\nphase_digits = many\n",
    "[step]\nmode = sideways\n",
    "[report]\ntails = left:3\n",
    f"[cs.2]\ncoeffs = {LEAD2!r}\n",
    f"[cs.2]\ncoeffs = {LEAD2!r}\nsource =\n",
    "[cs.2]\ncoeffs = 1.0\nsource = wrong leading term\n",
    "[cs.4]\nsource = x\n",
    "[fujii]\nc0 = 0.7\n",
    "no section header\n",
])
def test_config_rejects(text):
    with pytest.raises(ConfigError):
        config.parse_config(text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        config.load_config(tmp_path / "absent.ini")


@pytest.fixture(scope="module")
def small_derivs(first_1000):
    return dv.derivative_table(first_1000[:200])


def test_zero_cache_round_trip_is_byte_identical(tmp_path, first_1000):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cache.write_zero_cache(a, first_1000, {"t_lo": "7", "note": "x"})
    table, meta = cache.read_zero_cache(a)
    assert np.array_equal(table.gamma, first_1000.gamma)
    assert np.allclose(table.theta_mod, first_1000.theta_mod, atol=1e-12)
    meta.pop("count")
    meta.pop("first_index")
    cache.write_zero_cache(b, table, meta)
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_deriv_cache_round_trip_is_byte_identical(tmp_path, small_derivs):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cache.write_deriv_cache(a, small_derivs, {"step_policy": "x"})
    table, meta = cache.read_deriv_cache(a)
    for k in ("index", "gamma", "zprime", "theta_mod", "err_est", "h", "flagged"):
        assert np.array_equal(getattr(table, k), getattr(small_derivs, k))
    meta.pop("count")
    cache.write_deriv_cache(b, table, meta)
    assert a.read_bytes() == b.read_bytes()


def test_cache_header_and_columns(tmp_path, small_derivs):
    p = tmp_path / "d.csv"
    cache.write_deriv_cache(p, small_derivs, {"k": "v"})
    lines = p.read_text().split("\n")
    assert lines[0] == "# zetaprime derivative cache v1"
    body = [ln for ln in lines if not ln.startswith("#")]
    assert tuple(body[0].split(",")) == cache.DERIV_COLUMNS


def test_cache_rejects_corruption(tmp_path, first_1000):
    p = tmp_path / "z.csv"
    cache.write_zero_cache(p, first_1000[:10], {})
    text = p.read_text()
    p.write_text(text.replace("# count = 10", "# count = 11"))
    with pytest.raises(cache.CacheError):
        cache.read_zero_cache(p)
    p.write_text("garbage\n")
    with pytest.raises(cache.CacheError):
        cache.read_zero_cache(p)
    lines = text.splitlines()
    lines[-1], lines[-2] = lines[-2], lines[-1]
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(cache.CacheError):
        cache.read_zero_cache(p)


def test_cmd_zeros_range_and_idempotence(tmp_path):
    cfg = config.RunConfig()
    path = pipeline.cmd_zeros(cfg, tmp_path, t_range=(7.0, 100.0))
    table, meta = cache.read_zero_cache(path)
    assert len(table) == 29
    stamp = path.stat().st_mtime_ns
    assert pipeline.cmd_zeros(cfg, tmp_path, t_range=(7.0, 100.0)) == path
    assert path.stat().st_mtime_ns == stamp


def test_cmd_zeros_first_n_matches_chunking(tmp_path):
    cfg = config.RunConfig()
    a = pipeline.cmd_zeros(cfg, tmp_path / "a", first=300)
    b = pipeline.cmd_zeros(cfg, tmp_path / "b", first=300, chunk_zeros=37)
    ta, _ = cache.read_zero_cache(a)
    tb, _ = cache.read_zero_cache(b)
    assert ta.index.tolist() == list(range(1, 301))
    assert np.array_equal(ta.gamma, tb.gamma)


def test_cmd_zeros_resumes_after_interruption(tmp_path, monkeypatch):
    cfg = config.RunConfig()
    clean = pipeline.cmd_zeros(cfg, tmp_path / "clean", first=400, chunk_zeros=50)
    calls = {"n": 0}
    real = pipeline.scan_zeros

    def flaky(*args, **kw):
        calls["n"] += 1
        if calls["n"] == 4:
            raise KeyboardInterrupt
        return real(*args, **kw)

    monkeypatch.setattr(pipeline, "scan_zeros", flaky)
    out = tmp_path / "run"
    with pytest.raises(KeyboardInterrupt):
        pipeline.cmd_zeros(cfg, out, first=400, chunk_zeros=50)
    state = json.loads((out / "zeros.checkpoint.json").read_text())
    assert state["rows"] > 0
    monkeypatch.setattr(pipeline, "scan_zeros", real)
    resumed = pipeline.cmd_zeros(cfg, out, first=400, chunk_zeros=50)
    assert resumed.read_bytes() == clean.read_bytes()
    assert not (out / "zeros.checkpoint.json").exists()


def test_cmd_zeros_restarts_on_bad_checkpoint(tmp_path):
    cfg = config.RunConfig()
    out = tmp_path / "run"
    out.mkdir()
    (out / "zeros.partial.csv").write_text("1,14.1\n")
    (out / "zeros.checkpoint.json").write_text('{"run_digest": "nope"}')
    with pytest.warns(RuntimeWarning):
        path = pipeline.cmd_zeros(cfg, out, first=20)
    table, _ = cache.read_zero_cache(path)
    assert len(table) == 20 and table.gamma[0] == pytest.approx(14.134725141734693)


def test_cmd_zeros_job_validation(tmp_path):
    cfg = config.RunConfig()
    with pytest.raises(RangeError):
        pipeline.cmd_zeros(cfg, tmp_path)
    with pytest.raises(RangeError):
        pipeline.cmd_zeros(cfg, tmp_path, first=10, t_range=(10, 20))
    with pytest.raises(RangeError):
        pipeline.cmd_zeros(cfg, tmp_path, t_range=(50, 20))


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = config.RunConfig()
    pipeline.cmd_zeros(cfg, out, first=2000)
    pipeline.cmd_derivatives(cfg, out / "zeros.csv", out)
    return out


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_cmd_derivatives_outputs(run_dir):
    table, meta = cache.read_deriv_cache(run_dir / "derivatives.csv")
    assert len(table) == 2000
    assert meta["flagged"] == "0"
    assert meta["zero_cache_digest"] == cache.file_digest(run_dir / "zeros.csv")
    assert _read(run_dir / "derivatives.audit.csv") == []
    stamp = (run_dir / "derivatives.csv").stat().st_mtime_ns
    pipeline.cmd_derivatives(config.RunConfig(), run_dir / "zeros.csv", run_dir)
    assert (run_dir / "derivatives.csv").stat().st_mtime_ns == stamp


def test_cmd_report_schemas(run_dir, tmp_path):
    cfg = config.RunConfig()
    paths = pipeline.cmd_report(cfg, run_dir / "derivatives.csv", tmp_path, grid=256)
    names = {p.name for p in paths}
    assert "ratios.csv" not in names  # no CS coefficients and no fallback
    assert {"summary.csv", "moments.csv", "hist.csv", "spectrum.csv", "fujii.csv",
            "reference_targets.csv"} <= names
    moments = _read(tmp_path / "moments.csv")
    assert len(moments) == 10
    assert [int(r["two_lambda"]) for r in moments] == list(config.DEFAULT_TWO_LAMBDA)
    assert next(r for r in moments if r["two_lambda"] == "-3")["hko_ratio"] == ""
    spectrum = _read(tmp_path / "spectrum.csv")
    assert len(spectrum) == 256
    r = spectrum[7]
    assert float(r["abs"]) == pytest.approx(abs(complex(float(r["re"]), float(r["im"]))))
    fujii = _read(tmp_path / "fujii.csv")[0]
    assert set(fujii) == {"T", "re", "im", "prediction", "ratio"}
    assert all(r["asserted"] == "no" for r in _read(tmp_path / "reference_targets.csv"))
    raw = (tmp_path / "summary.csv").read_bytes()
    assert raw.endswith(b"\n") and b"\r\n" not in raw


def test_cmd_report_ratios_need_coefficients(run_dir, tmp_path):
    with pytest.raises(ConfigError):
        pipeline.cmd_report(config.RunConfig(), run_dir / "derivatives.csv", tmp_path, which=["ratios"])
    cfg = config.parse_config("[report]\ncs_fallback = true\n")
    with pytest.warns(RuntimeWarning):
        pipeline.cmd_report(cfg, run_dir / "derivatives.csv", tmp_path, which=["ratios"])
    rows = _read(tmp_path / "ratios.csv")
    assert [r["two_lambda"] for r in rows] == ["2", "4"]
    assert "fallback" in rows[0]["note"]


def test_cmd_report_unknown(run_dir, tmp_path):
    with pytest.raises(ConfigError):
        pipeline.cmd_report(config.RunConfig(), run_dir / "derivatives.csv", tmp_path, which=["nope"])


def test_cli_end_to_end(tmp_path, capsys):
    out = str(tmp_path)
    assert cli.main(["zeros", "--first", "50", "--out", out]) == 0
    assert cli.main(["derivatives", "--out", out]) == 0
    assert cli.main(["report", "--out", out, "--which", "summary,moments", "--two-lambda", "-2,2"]) == 0
    assert len(_read(tmp_path / "moments.csv")) == 2
    assert cli.main(["predict", "--first", "1000000", "--out", out]) == 0
    rows = _read(tmp_path / "predictions.csv")
    assert any(r["quantity"] == "gonek_negative" for r in rows)
    assert cli.main(["predict", "--range", "100:1e6", "--two-lambda", "-3,2"]) == 0
    assert "PoleError" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    assert cli.main(["zeros", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[bogus]\n")
    assert cli.main(["verify", "--config", str(bad)]) == 1
    assert "ConfigError" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["zeros", "--range", "nocolon"])


def test_cli_verify(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8
