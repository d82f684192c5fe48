"""Batch commands behind the CLI: zeros, derivatives, report, predict, verify."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import warnings
from pathlib import Path

import numpy as np

from . import cache, kernels, predictions, rscore
from . import statistics as st
from .derivative import DerivativeTable, derivative_table
from .errors import ConfigError, RangeError, SmallDerivativeWarning
from .zeros import ZERO_TOL, ZeroTable, gram_points, height_of_zero, scan_zeros

log = logging.getLogger("zetaprime")

REPORTS = ("summary", "moments", "ratios", "hist", "tails", "gauss", "shifted", "spectrum", "fujii", "top", "gaps")
DERIV_CHUNK = 100_000

# Large-height reference values, reported alongside desk results and never
# asserted: (quantity, location, value).
REFERENCE_TARGETS = (
    ("mean log|zeta'|", "zero 1e23 block", 3.4907),
    ("sd log|zeta'|", "zero 1e23 block", 1.0977),
    ("4th moment of z-scores", "zero 1e23 block", 3.01364),
    ("6th moment of z-scores", "zero 1e23 block", 15.3053),
    ("% |zeta'| > 860 predicted", "zero 1e23 block", 0.1462),
    ("% |zeta'| > 860 observed", "zero 1e23 block", 0.1056),
    ("% |zeta'| < 1 predicted", "zero 1e23 block", 0.0736),
    ("% |zeta'| < 1 observed", "zero 1e23 block", 0.1051),
    ("hko ratio 2l=2", "first 1e8 zeros", 1.1247),
    ("hko ratio 2l=4", "first 1e8 zeros", 3.1579),
    ("cs ratio 2l=2", "first 1e8 zeros", 1.0000),
    ("cs ratio 2l=4", "first 1e8 zeros", 1.0924),
    ("J 2l=-2", "first 1e8 zeros", 0.041129),
    ("J 2l=-3", "first 1e8 zeros", 0.059025),
    ("J 2l=-2", "zero 1e23 block", 0.012347),
    ("fujii sum real part", "zero 1e20 block", 21766088.0),
    ("fujii sum imaginary part", "zero 1e20 block", -14579.0),
)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([cache.fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return Path(path)


def _precision_digest(cfg):
    return cache.digest({"precision": cfg.precision.as_dict(), "zero_tol": ZERO_TOL, "v": cache.VERSION})


# ---------------------------------------------------------------- zeros


def _job(first, t_range):
    if (first is None) == (t_range is None):
        raise RangeError("give exactly one of first-N or a t range")
    if first is not None:
        if int(first) < 1:
            raise RangeError("first-N must be >= 1")
        return {"mode": "first", "n": int(first)}
    lo, hi = (float(x) for x in t_range)
    if not rscore.T_MIN <= lo < hi:
        raise RangeError(f"range must satisfy {rscore.T_MIN} <= t_lo < t_hi")
    return {"mode": "range", "t_lo": lo, "t_hi": hi}


def _load_checkpoint(ckpt, partial, run_digest):
    if not ckpt.exists():
        if partial.exists():
            warnings.warn(f"discarding {partial} without a checkpoint", RuntimeWarning, stacklevel=3)
            partial.unlink()
        return None
    try:
        state = json.loads(ckpt.read_text())
        ok = (state["run_digest"] == run_digest and partial.exists()
              and cache.file_digest(partial) == state["sha"])
    except (ValueError, KeyError, OSError):
        ok = False
    if not ok:
        warnings.warn(f"checkpoint {ckpt} does not match this run; restarting cleanly",
                      RuntimeWarning, stacklevel=3)
        ckpt.unlink(missing_ok=True)
        partial.unlink(missing_ok=True)
        return None
    return state


def _read_partial(partial):
    idx, gam = [], []
    if partial.exists():
        for line in partial.read_text().splitlines():
            i, g = line.split(",")
            idx.append(int(i))
            gam.append(float(g))
    return idx, gam


def cmd_zeros(cfg, out_dir, first=None, t_range=None, chunk_zeros=None):
    """Scan zeros in checkpointed chunks and write ``zeros.csv``.

    Rerunning with the same job is a no-op; an interrupted run resumes from
    its last checkpoint.  The checkpoint is trusted only when its digest
    and the partial file's hash both match.
    """
    job = _job(first, t_range)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    final = out / "zeros.csv"
    partial = out / "zeros.partial.csv"
    ckpt = out / "zeros.checkpoint.json"
    pdig = _precision_digest(cfg)
    run_digest = cache.digest({"job": job, "policy": pdig})
    if final.exists():
        try:
            meta = cache._split(final.read_text(), cache.ZERO_MAGIC)[0]
            if meta.get("run_digest") == run_digest:
                log.info("zeros: %s is up to date", final)
                return final
        except cache.CacheError:
            pass
    every = int(chunk_zeros or cfg.checkpoint_every)
    if every < 1:
        raise ConfigError("checkpoint_every must be >= 1")
    state = _load_checkpoint(ckpt, partial, run_digest)
    start = job["t_lo"] if job["mode"] == "range" else rscore.T_MIN
    next_t = state["next_t"] if state else start
    idx, gam = _read_partial(partial)
    last_index = idx[-1] if idx else None
    target = job.get("n")
    t_end = job.get("t_hi", math.inf)
    with open(partial, "a", newline="\n") as fh:
        while next_t < t_end and (target is None or (last_index or 0) < target):
            n_here = max(-1, int(math.floor(rscore.theta_value(max(next_t, rscore.T_MIN)) / math.pi)))
            chunk_hi = float(gram_points([n_here + every])[0])
            chunk_hi = min(chunk_hi, t_end)
            if target is not None:
                # g_{target} lies past zero #target except where Gram's law fails nearby
                remaining = target - (last_index or 0)
                chunk_hi = min(chunk_hi, float(gram_points([n_here + remaining + 1])[0]))
            table, audit = scan_zeros(next_t, chunk_hi, cfg.precision)
            log.info("zeros: (%.6g, %.6g] -> %d zeros, audit %d/%d", next_t, chunk_hi, len(table),
                     audit.found, audit.expected)
            if len(table) and last_index is not None and int(table.index[0]) != last_index + 1:
                raise RangeError(f"chunk starts at zero #{table.index[0]}, expected #{last_index + 1}")
            rows = table if target is None else table[: max(0, target - (last_index or 0))]
            fh.write(cache.zero_rows_text(rows))
            fh.flush()
            os.fsync(fh.fileno())
            if len(rows):
                last_index = int(rows.index[-1])
                idx.extend(rows.index.tolist())
                gam.extend(rows.gamma.tolist())
            next_t = chunk_hi
            tmp = ckpt.with_name(ckpt.name + ".tmp")
            tmp.write_text(json.dumps({"run_digest": run_digest, "next_t": next_t, "rows": len(idx),
                                       "sha": cache.file_digest(partial)}))
            tmp.replace(ckpt)
    table = ZeroTable(idx, gam, np.zeros(len(idx)), np.zeros(len(idx)))
    meta = {
        "t_lo": cache.fmt(start),
        "t_hi": cache.fmt(job["t_hi"]) if job["mode"] == "range" else cache.fmt(gam[-1]),
        "policy_digest": pdig,
        "run_digest": run_digest,
        "job": json.dumps(job, sort_keys=True),
        "audit": "every chunk passed the good-Gram-point count",
    }
    cache.write_zero_cache(final, table, meta)
    partial.unlink(missing_ok=True)
    ckpt.unlink(missing_ok=True)
    log.info("zeros: wrote %d rows to %s", len(table), final)
    return final


# ---------------------------------------------------------------- derivatives


def _step_text(step):
    return " ".join(f"{k}={v}" for k, v in step.as_dict().items())


def cmd_derivatives(cfg, zeros_path, out_dir):
    """Derivatives at every cached zero; flagged rows also go to an audit sidecar."""
    zeros_path = Path(zeros_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    final = out / "derivatives.csv"
    audit = out / "derivatives.audit.csv"
    zdig = cache.file_digest(zeros_path)
    ddig = cache.digest({"zeros": zdig, "step": cfg.step.as_dict(), "precision": cfg.precision.as_dict(),
                         "v": cache.VERSION})
    if final.exists() and audit.exists():
        try:
            meta = cache._split(final.read_text(), cache.DERIV_MAGIC)[0]
            if meta.get("deriv_digest") == ddig:
                log.info("derivatives: %s is up to date", final)
                return final
        except cache.CacheError:
            pass
    zeros, _ = cache.read_zero_cache(zeros_path)
    parts = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallDerivativeWarning)
        for s in range(0, len(zeros), DERIV_CHUNK):
            parts.append(derivative_table(zeros[s : s + DERIV_CHUNK], cfg.step, cfg.precision, warn=False))
            log.info("derivatives: %d / %d", min(s + DERIV_CHUNK, len(zeros)), len(zeros))
    table = DerivativeTable.concat(parts) if parts else derivative_table(zeros, cfg.step, cfg.precision)
    flagged = np.nonzero(table.flagged)[0]
    if flagged.size:
        warnings.warn(f"{flagged.size} derivative(s) flagged as small; see {audit}", SmallDerivativeWarning,
                      stacklevel=2)
    meta = {
        "zero_cache": zeros_path.name,
        "zero_cache_digest": zdig,
        "step_policy": _step_text(cfg.step),
        "policy_digest": _precision_digest(cfg),
        "deriv_digest": ddig,
        "flagged": int(flagged.size),
    }
    _write_csv(audit, ("index", "gamma", "zprime", "err_est"),
               [(int(table.index[i]), table.gamma[i], table.zprime[i], table.err_est[i]) for i in flagged])
    cache.write_deriv_cache(final, table, meta)
    return final


# ---------------------------------------------------------------- reports


def _cs_polys(cfg, strict):
    polys = {}
    notes = {}
    for tl in (2, 4):
        if tl in cfg.cs:
            polys[tl] = cfg.cs[tl]
            notes[tl] = f"cs source: {cfg.cs[tl].source}"
            if not cfg.cs[tl].complete:
                notes[tl] += f" ({cfg.cs[tl].known} of {len(cfg.cs[tl].coeffs)} coefficients known)"
        elif cfg.report.cs_fallback:
            polys[tl] = predictions.CSPolynomial.leading_only(tl)
            notes[tl] = "cs fallback: leading term only"
            warnings.warn(f"no CS coefficients for 2 lambda = {tl}; using the leading term only",
                          RuntimeWarning, stacklevel=3)
        elif strict:
            raise ConfigError(f"no [cs.{tl}] coefficients configured and cs_fallback is off")
    return polys, notes


def cmd_report(cfg, derivs_path, out_dir, which=None, two_lambda=None, grid=None, x_max=None):
    """Write one CSV per requested report; returns the paths."""
    table, meta = cache.read_deriv_cache(derivs_path)
    p = cfg.report
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    explicit = which is not None
    which = list(REPORTS if which is None else which)
    for w in which:
        if w not in REPORTS:
            raise ConfigError(f"unknown report {w!r}; choose from {', '.join(REPORTS)}")
    two_lambda = tuple(p.two_lambda if two_lambda is None else two_lambda)
    grid = p.grid if grid is None else int(grid)
    x_max = p.x_max if x_max is None else float(x_max)
    T = st.block_height(table, p.block_height)
    neg = table[~table.flagged] if p.exclude_flagged else table
    paths = []

    if "summary" in which:
        s = st.summary_stats(table)
        paths.append(_write_csv(out / "summary.csv", ("count", "min", "max", "mean", "sd"),
                                [(s.count, s.min, s.max, s.mean, s.sd)]))
    polys, notes = ({}, {})
    if "ratios" in which or "moments" in which:
        polys, notes = _cs_polys(cfg, strict=explicit and "ratios" in which)
        if not explicit and "ratios" in which and not polys:
            which.remove("ratios")
    if "moments" in which:
        rows = []
        for tl in two_lambda:
            src = neg if tl < 0 else table
            m = st.moment(src, tl, T=T, cs_poly=polys.get(tl))
            rows.append((tl, m.count, m.t_lo, m.t_hi, T, m.raw,
                         "" if m.hko_ratio is None else m.hko_ratio,
                         "" if m.cs_ratio is None else m.cs_ratio, notes.get(tl, "")))
        paths.append(_write_csv(out / "moments.csv",
                                ("two_lambda", "count", "t_lo", "t_hi", "T", "raw", "hko_ratio", "cs_ratio", "note"),
                                rows))
    if "ratios" in which:
        rows = []
        for tl in (2, 4):
            if tl in polys:
                lo, hi = st.cs_block_range(table)
                rows.append((tl, T, st.hko_ratio(table, tl, T), st.cs_ratio(table, polys[tl]), lo, hi, notes[tl]))
        paths.append(_write_csv(out / "ratios.csv",
                                ("two_lambda", "T", "hko_ratio", "cs_ratio", "integral_lo", "integral_hi", "note"),
                                rows))
    if "hist" in which:
        d = st.normalized_density(table, p.bin_width)
        g = st.gaussian_pdf([c for c, _ in d.bins])
        paths.append(_write_csv(out / "hist.csv", ("x", "density", "gaussian", "diff"),
                                [(c, v, float(gv), v - float(gv)) for (c, v), gv in zip(d.bins, g)]))
    if "tails" in which:
        rows = st.tail_report(table, p.tails, gamma=T, N=max(3, int(table.index.max())))
        paths.append(_write_csv(out / "tails.csv", ("side", "cutoff", "empirical_pct", "gaussian_pct", "clt_pct"),
                                [(r.side, r.cutoff, r.empirical_pct, r.gaussian_pct,
                                  "" if r.clt_pct is None else r.clt_pct) for r in rows]))
    if "gauss" in which:
        paths.append(_write_csv(out / "gauss.csv", ("k", "empirical", "gaussian"), st.gaussian_moments(table)))
    if "shifted" in which:
        m_max = min(p.shift_max, len(table) - 1)
        ser = st.shifted_series(table, p.shift_two_lambda, m_max)
        paths.append(_write_csv(out / "shifted.csv", ("m", "ratio"), [(m, float(v)) for m, v in enumerate(ser)]))
    if "spectrum" in which:
        sp = st.spectrum(table, x_max, grid, p.variant, T=None if p.variant == st.INDEX else T)
        paths.append(_write_csv(out / "spectrum.csv", ("x", "re", "im", "abs"),
                                [(float(x), float(v.real), float(v.imag), float(abs(v)))
                                 for x, v in zip(sp.x_grid, sp.values)]))
    if "fujii" in which:
        f = st.fujii_empirical(table)
        pred = predictions.fujii_prediction(T, cfg.fujii)
        paths.append(_write_csv(out / "fujii.csv", ("T", "re", "im", "prediction", "ratio"),
                                [(T, f.real, f.imag, pred, f.real / pred)]))
    if "top" in which:
        k = min(p.top_k, len(table))
        rows = []
        for tl in two_lambda:
            for rank, c in enumerate(st.top_contributors(table, tl, k), start=1):
                rows.append((tl, rank, c))
        paths.append(_write_csv(out / "top.csv", ("two_lambda", "rank", "cumulative_pct"), rows))
    if "gaps" in which:
        rows = st.min_gap_report(table, p.gap_k)
        paths.append(_write_csv(out / "gaps.csv",
                                ("n", "gamma", "gap", "abs_left", "abs_right", "gap_over_spacing"),
                                [(r.n, r.gamma, r.gap, r.abs_left, r.abs_right, r.gap_over_spacing) for r in rows]))
    paths.append(_write_csv(out / "reference_targets.csv", ("quantity", "where", "value", "asserted"),
                            [(q, w, v, "no") for q, w, v in REFERENCE_TARGETS]))
    return paths


# ---------------------------------------------------------------- predict / verify


def cmd_predict(cfg, T, two_lambda, N=None):
    """Rows (quantity, two_lambda, value, note) of predictions at height T."""
    rows = []
    for tl in two_lambda:
        try:
            rows.append(("hko_leading", tl, predictions.hko_leading(tl, T), ""))
        except (predictions.PoleError, predictions.UnsupportedExponentError) as exc:
            rows.append(("hko_leading", tl, "", f"{type(exc).__name__}: {exc}"))
    rows.append(("gonek_negative", -2, predictions.gonek_negative(T), ""))
    rows.append(("fujii_prediction", "", predictions.fujii_prediction(T, cfg.fujii), ""))
    rows.append(("clt_location", "", predictions.clt_location(T), ""))
    if N is not None and N >= 3:
        rows.append(("clt_scale", "", predictions.clt_scale(N), f"N = {N}"))
    for k, x in enumerate(predictions.spike_locations(T, 6), start=2):
        rows.append(("spike_location", "", x, f"k = {k}"))
    return rows


def write_predictions(path, rows):
    return _write_csv(path, ("quantity", "two_lambda", "value", "note"), rows)


def cmd_verify(cfg):
    """Fast self-checks; returns [(name, ok, detail)]."""
    import mpmath

    checks = []

    def check(name, ok, detail):
        checks.append((name, bool(ok), detail))

    for t in (30.0, 1000.0, 5000.0):
        got = rscore.rs_z(t, cfg.precision).z
        want = float(mpmath.siegelz(t))
        check(f"Z({t:g}) vs mpmath", abs(got - want) <= 1e-9, f"|diff| = {abs(got - want):.2e}")
    table, audit = scan_zeros(rscore.T_MIN, 100.0, cfg.precision)
    check("zeros below 100", len(table) == 29 and audit.found == audit.expected,
          f"{len(table)} zeros, audit {audit.found}/{audit.expected}")
    g1 = float(table.gamma[0])
    check("gamma_1", abs(g1 - 14.134725141734693) <= 1e-9, f"{g1!r}")
    d = derivative_table(table[:1], cfg.step, cfg.precision)[0]
    want = abs(complex(mpmath.zeta(mpmath.mpc(0.5, g1), derivative=1)))
    check("|zeta'(rho_1)| vs mpmath", abs(d.abs_zeta_prime - want) <= 1e-6 * want,
          f"{d.abs_zeta_prime:.12f} vs {want:.12f}")
    check("G(7) = 34560", predictions.barnes_g_int(7) == 34560, str(predictions.barnes_g_int(7)))
    a2 = predictions.arithmetic_factor(2)
    check("a(2) = 6/pi^2", abs(a2 - 6 / math.pi**2) <= 1e-6, f"{a2:.10f}")
    c1 = predictions.hko_model(2).constant
    check("HKO constant at lambda = 1", abs(c1 - 1 / 12) <= 1e-12, f"{c1!r}")
    comp = kernels.compiled()
    if comp is not None:
        from . import _pykernels

        ts = np.linspace(2000.0, 3000.0, 17)
        ser, dser = rscore._series(3)
        a = comp.rs_batch(ts, ser, dser, False)[0]
        b = _pykernels.rs_batch(ts, ser, dser, False)[0]
        check("compiled vs python kernels", np.max(np.abs(a - b)) <= 1e-12, f"max |diff| = {np.max(np.abs(a - b)):.1e}")
    else:
        check("compiled vs python kernels", True, "compiled extension not built; python kernels only")
    return checks
