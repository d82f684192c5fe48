"""Freeze the first N zeros (and Z' there) from the mpmath reference.

Seeds come from a fast float scan; every seed is re-solved in the
multiprecision reference and the count between neighbours is checked with
an independent zero counter, so a wrong or missing seed aborts the run.

    python3 tools/gen_oracle_zeros.py 10000 tests/data/oracle_zeros.csv
"""

import sys
from pathlib import Path

from mpmath import mp, mpf, nstr

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
import oracle  # noqa: E402

from zetaprime.zeros import first_zeros  # noqa: E402


def main():
    count = int(sys.argv[1])
    out = Path(sys.argv[2])
    mp.dps = oracle.DPS
    seeds, _ = first_zeros(count)
    rows = []
    prev = mpf(0)
    for rec in seeds:
        g, zp = oracle.polish_zero(rec.gamma)
        if abs(g - rec.gamma) > 1e-6:
            sys.exit(f"zero {rec.index}: seed {rec.gamma!r} moved to {g}")
        mid = (prev + g) / 2 if rec.index > 1 else mpf(10)
        n_mid = oracle.zero_count(mid)
        if n_mid != rec.index - 1:
            sys.exit(f"zero {rec.index}: N({mid}) = {n_mid}, expected {rec.index - 1}")
        rows.append(f"{rec.index},{nstr(g, 25, strip_zeros=False)},{nstr(zp, 20)}\n")
        prev = g
        if rec.index % 500 == 0:
            print(rec.index, nstr(g, 20), flush=True)
    if oracle.zero_count(prev + mpf("0.01")) != count:
        sys.exit("count check after the last zero failed")
    out.write_text("index,gamma,z_prime\n" + "".join(rows), newline="\n")


if __name__ == "__main__":
    main()
