"""Time the min(f, g) bound under a few precisions and split budgets.

    python3 scripts/lemma123_profile.py --bits 24 53 --splits 14 18
"""

import argparse
import time
from fractions import Fraction

from bookramsey.numerics.library import LemmaBudget, lemma_12_3_check


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--delta", type=Fraction, default=Fraction(1, 2**11))
    ap.add_argument("--bits", type=int, nargs="+", default=[24, 53])
    ap.add_argument("--splits", type=int, nargs="+", default=[14, 18])
    a = ap.parse_args()
    print(f"{'bits':>4} {'split':>5} {'verdict':>8} {'boxes':>8} {'depth':>12} {'secs':>7}")
    for bits in a.bits:
        for s in a.splits:
            t = time.perf_counter()
            cert = lemma_12_3_check(a.delta, LemmaBudget(s, s), bits)
            dt = time.perf_counter() - t
            depth = ",".join(f"{k}{v}" for k, v in sorted(cert.max_depth_used.items()))
            print(f"{bits:>4} {s:>5} {cert.verdict:>8} {cert.boxes_examined:>8} {depth:>12} {dt:>7.2f}")


if __name__ == "__main__":
    main()
