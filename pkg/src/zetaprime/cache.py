"""Plain-text caches for zeros and derivatives.

A cache is a block of ``# key = value`` header lines followed by a CSV
table (header row, LF endings).  Floats are written with 18 significant
digits, which round-trips every double exactly, so write -> read -> write
reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .derivative import DerivativeTable
from .errors import ConfigError
from .zeros import ZeroTable

ZERO_MAGIC = "zetaprime zero cache"
DERIV_MAGIC = "zetaprime derivative cache"
VERSION = "1"
ZERO_COLUMNS = ("index", "gamma")
DERIV_COLUMNS = ("index", "gamma", "zprime", "theta_mod", "err_est", "h", "flagged")


class CacheError(ConfigError):
    """A cache file is malformed or inconsistent with its header."""


def fmt(x):
    return f"{float(x):.18g}"


def digest(obj):
    """Short stable digest of a JSON-serializable object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def _header_text(magic, meta):
    lines = [f"# {magic} v{VERSION}"]
    lines += [f"# {k} = {v}" for k, v in meta.items()]
    return "\n".join(lines) + "\n"


def _split(text, magic):
    lines = text.split("\n")
    if not lines or lines[0] != f"# {magic} v{VERSION}":
        raise CacheError(f"not a {magic} (v{VERSION})")
    meta = {}
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        key, sep, value = lines[i][1:].strip().partition(" = ")
        if not sep:
            raise CacheError(f"bad header line {lines[i]!r}")
        meta[key] = value
        i += 1
    return meta, "\n".join(lines[i:])


def _rows(body, columns):
    reader = csv.reader(io.StringIO(body))
    head = next(reader, None)
    if tuple(head or ()) != columns:
        raise CacheError(f"expected columns {columns}, got {head}")
    return [r for r in reader if r]


def zero_rows_text(table):
    out = io.StringIO()
    for i, g in zip(table.index.tolist(), table.gamma.tolist()):
        out.write(f"{i},{fmt(g)}\n")
    return out.getvalue()


def write_zero_cache(path, table, meta):
    """Write a zero cache; ``meta`` supplies t_lo, t_hi, policy_digest and so on."""
    meta = dict(meta)
    meta["first_index"] = int(table.index[0]) if len(table) else 0
    meta["count"] = len(table)
    text = _header_text(ZERO_MAGIC, meta) + ",".join(ZERO_COLUMNS) + "\n" + zero_rows_text(table)
    _atomic_write(path, text)


def _atomic_write(path, text):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    tmp.replace(path)


def read_zero_cache(path, theta=True):
    """Returns (ZeroTable, meta).  theta_mod is recomputed from gamma."""
    from . import kernels

    meta, body = _split(Path(path).read_text(), ZERO_MAGIC)
    rows = _rows(body, ZERO_COLUMNS)
    index = np.array([int(r[0]) for r in rows], dtype=np.int64)
    gamma = np.array([float(r[1]) for r in rows])
    _check_count(meta, len(rows))
    if gamma.size > 1 and not np.all(np.diff(gamma) > 0):
        raise CacheError("ordinates are not strictly increasing")
    if index.size > 1 and not np.all(np.diff(index) == 1):
        raise CacheError("zero indices are not consecutive")
    th = kernels.theta_mod(gamma) if theta and gamma.size else np.zeros(gamma.size)
    return ZeroTable(index, gamma, th, np.zeros(gamma.size)), meta


def _check_count(meta, n):
    if "count" not in meta:
        raise CacheError("header lacks count")
    if int(meta["count"]) != n:
        raise CacheError(f"header count {meta['count']} but {n} rows")


def write_deriv_cache(path, table, meta):
    meta = dict(meta)
    meta["count"] = len(table)
    out = io.StringIO()
    out.write(_header_text(DERIV_MAGIC, meta))
    out.write(",".join(DERIV_COLUMNS) + "\n")
    for i, g, zp, th, e, h, f in zip(table.index.tolist(), table.gamma.tolist(), table.zprime.tolist(),
                                     table.theta_mod.tolist(), table.err_est.tolist(), table.h.tolist(),
                                     table.flagged.tolist()):
        out.write(f"{i},{fmt(g)},{fmt(zp)},{fmt(th)},{fmt(e)},{fmt(h)},{int(f)}\n")
    _atomic_write(path, out.getvalue())


def read_deriv_cache(path):
    """Returns (DerivativeTable, meta)."""
    meta, body = _split(Path(path).read_text(), DERIV_MAGIC)
    rows = _rows(body, DERIV_COLUMNS)
    _check_count(meta, len(rows))
    if not rows:
        cols = [[] for _ in DERIV_COLUMNS]
    else:
        cols = list(zip(*rows))
    index = np.array([int(x) for x in cols[0]], dtype=np.int64)
    floats = [np.array([float(x) for x in c]) for c in cols[1:6]]
    flagged = np.array([x == "1" for x in cols[6]], dtype=bool)
    gamma, zprime, theta_mod, err, h = floats
    table = DerivativeTable(index, gamma, theta_mod, np.zeros(index.size), h, zprime, err, flagged)
    return table, meta
