"""Command-line entry point: ``zetaprime {zeros,derivatives,report,predict,verify}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import load_config
from .errors import ZetaPrimeError
from .zeros import height_of_zero


def _range(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected t_lo:t_hi")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--out", help="output directory (default: [run] out, else ./out)")
    common.add_argument("-v", "--verbose", action="store_true")

    where = argparse.ArgumentParser(add_help=False)
    grp = where.add_mutually_exclusive_group()
    grp.add_argument("--range", type=_range, metavar="T_LO:T_HI")
    grp.add_argument("--first", type=int, metavar="N")

    parser = argparse.ArgumentParser(prog="zetaprime", description="zeta' at zeros of the zeta function")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("zeros", parents=[common, where], help="locate zeros and write zeros.csv")

    p = sub.add_parser("derivatives", parents=[common], help="Z' and zeta' at cached zeros")
    p.add_argument("--zeros", help="zero cache (default: OUT/zeros.csv)")

    p = sub.add_parser("report", parents=[common], help="statistics CSVs from a derivative cache")
    p.add_argument("--derivs", help="derivative cache (default: OUT/derivatives.csv)")
    p.add_argument("--which", type=lambda s: [w for w in s.split(",") if w],
                   help=f"comma-separated subset of: {','.join(pipeline.REPORTS)}")
    p.add_argument("--two-lambda", type=_int_list, help="exponents 2 lambda, e.g. -2,2,4")
    p.add_argument("--grid", type=int, help="spectrum grid points")
    p.add_argument("--xmax", type=float, help="spectrum x_max")

    p = sub.add_parser("predict", parents=[common, where], help="predictions at a height")
    p.add_argument("--two-lambda", type=_int_list, default=(-2, 2, 4, 6, 8, 10, 12))

    sub.add_parser("verify", parents=[common], help="quick self-checks")
    return parser


def _glue_negative(argv):
    # "--two-lambda -2,2" would otherwise read -2,2 as an option
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok == "--two-lambda" and out[i + 1][:1] == "-" and out[i + 1][1:2].isdigit():
            out[i : i + 2] = [f"{tok}={out[i + 1]}"]
            return _glue_negative(out)
    return out


def main(argv=None):
    argv = _glue_negative(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        out = Path(args.out or cfg.out)
        if args.command == "zeros":
            if args.first is None and args.range is None:
                print("zeros: give --first N or --range t_lo:t_hi", file=sys.stderr)
                return 2
            print(pipeline.cmd_zeros(cfg, out, first=args.first, t_range=args.range))
        elif args.command == "derivatives":
            print(pipeline.cmd_derivatives(cfg, args.zeros or out / "zeros.csv", out))
        elif args.command == "report":
            paths = pipeline.cmd_report(cfg, args.derivs or out / "derivatives.csv", out, which=args.which,
                                        two_lambda=args.two_lambda, grid=args.grid, x_max=args.xmax)
            for p in paths:
                print(p)
        elif args.command == "predict":
            if args.first is not None:
                T, N = height_of_zero(args.first), args.first
            elif args.range is not None:
                T, N = args.range[1], None
            else:
                print("predict: give --first N or --range t_lo:t_hi", file=sys.stderr)
                return 2
            rows = pipeline.cmd_predict(cfg, T, args.two_lambda, N)
            if args.out:
                out.mkdir(parents=True, exist_ok=True)
                print(pipeline.write_predictions(out / "predictions.csv", rows))
            else:
                print(f"T = {T!r}")
                for q, tl, v, note in rows:
                    print(f"{q:18s} {tl!s:>4} {v!s:>24} {note}")
        elif args.command == "verify":
            checks = pipeline.cmd_verify(cfg)
            for name, ok, detail in checks:
                print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            return 0 if all(ok for _, ok, _ in checks) else 1
    except (ZetaPrimeError, ValueError, OSError) as exc:
        print(f"zetaprime {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
