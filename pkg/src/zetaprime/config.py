"""Run configuration: line-oriented ``key = value`` text with sections.

    [precision]
    phase_digits = 9
    target_abs_error = 1e-10

    [step]
    mode = relative
    h_rel = 1e-4

    [cs.2]
    coeffs = 0.0132629119, ...
    source = where the numbers came from

Unknown sections and keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .derivative import DEFAULT_STEP, StepPolicy
from .errors import ConfigError
from .predictions import DEFAULT_FUJII, CSPolynomial, FujiiTerms
from .rscore import DEFAULT_POLICY, PrecisionPolicy

_PRECISION_KEYS = {
    "phase_digits": int,
    "target_abs_error": float,
    "correction_order": int,
    "max_correction_order": int,
    "em_terms": int,
}
_STEP_KEYS = {"mode": str, "h_abs": float, "h_rel": float, "richardson": "bool"}
_RUN_KEYS = {"out": str, "checkpoint_every": int}
_REPORT_KEYS = {
    "two_lambda": "intlist",
    "bin_width": float,
    "x_max": float,
    "grid": int,
    "variant": str,
    "block_height": str,
    "top_k": int,
    "gap_k": int,
    "shift_two_lambda": int,
    "shift_max": int,
    "tails": "tails",
    "cs_fallback": "bool",
    "exclude_flagged": "bool",
}
_FUJII_KEYS = {"c0": float, "c1": float}
_CS_KEYS = {"coeffs", "source"}

DEFAULT_TWO_LAMBDA = (-6, -4, -3, -2, 2, 4, 6, 8, 10, 12)
DEFAULT_TAILS = (("above", 860.0), ("below", 1.0))


@dataclass(frozen=True)
class ReportParams:
    two_lambda: tuple = DEFAULT_TWO_LAMBDA
    bin_width: float = 0.0512
    x_max: float = 0.05
    grid: int = 4096
    variant: str = "index"
    block_height: str = "auto"
    top_k: int = 5
    gap_k: int = 10
    shift_two_lambda: int = 4
    shift_max: int = 300
    tails: tuple = DEFAULT_TAILS
    cs_fallback: bool = False
    exclude_flagged: bool = False


@dataclass(frozen=True)
class RunConfig:
    precision: PrecisionPolicy = DEFAULT_POLICY
    step: StepPolicy = DEFAULT_STEP
    out: str = "out"
    checkpoint_every: int = 10_000
    report: ReportParams = field(default_factory=ReportParams)
    fujii: FujiiTerms = DEFAULT_FUJII
    cs: dict = field(default_factory=dict)  # two_lambda -> CSPolynomial
    path: str | None = None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _intlist(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _tails(text):
    # "above:860, below:1"
    out = []
    for item in text.split(","):
        side, _, cutoff = item.strip().partition(":")
        if side not in ("above", "below"):
            raise ValueError(f"tail side must be above/below, got {side!r}")
        out.append((side, float(cutoff)))
    return tuple(out)


def _convert(kind, text):
    if kind == "bool":
        return _bool(text)
    if kind == "intlist":
        return _intlist(text)
    if kind == "tails":
        return _tails(text)
    return kind(text.strip())


def _section(parser, name, keys):
    if not parser.has_section(name):
        return {}
    out = {}
    for key, raw in parser.items(name):
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
        try:
            out[key] = _convert(keys[key], raw)
        except ValueError as exc:
            raise ConfigError(f"[{name}] {key}: {exc}") from None
    return out


def parse_coefficients(text):
    try:
        return tuple(float(x) for x in text.replace("\n", " ").split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad coefficient list: {exc}") from None


def parse_config(text, path=None):
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#", ";"), default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {"precision", "step", "run", "report", "fujii", "cs.2", "cs.4"}
    for name in parser.sections():
        if name not in known:
            raise ConfigError(f"unknown section [{name}]")
    try:
        precision = PrecisionPolicy(**_section(parser, "precision", _PRECISION_KEYS))
        step = StepPolicy(**_section(parser, "step", _STEP_KEYS))
        report = ReportParams(**_section(parser, "report", _REPORT_KEYS))
        fujii = FujiiTerms(**_section(parser, "fujii", _FUJII_KEYS))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = _section(parser, "run", _RUN_KEYS)
    cs = {}
    for two_lambda in (2, 4):
        name = f"cs.{two_lambda}"
        if not parser.has_section(name):
            continue
        items = dict(parser.items(name))
        extra = set(items) - _CS_KEYS
        if extra:
            raise ConfigError(f"unknown key(s) {sorted(extra)} in [{name}]")
        if "source" not in items or not items["source"].strip():
            raise ConfigError(f"[{name}] needs a source")
        if "coeffs" not in items:
            raise ConfigError(f"[{name}] needs coeffs")
        cs[two_lambda] = CSPolynomial(two_lambda, parse_coefficients(items["coeffs"]), items["source"].strip())
    return RunConfig(precision=precision, step=step, out=run.get("out", "out"),
                     checkpoint_every=run.get("checkpoint_every", 10_000), report=report,
                     fujii=fujii, cs=cs, path=path)


def load_config(path=None):
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(p))
