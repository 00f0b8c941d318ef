"""Print exact small Ramsey numbers next to the Erdos-Szekeres bound and the
best first-moment lower bound.  Set RAMSEY_THREADS to parallelise.

    python3 scripts/oracle_table.py --max 4 --cap 10   # the (4, 4) search takes about a minute
"""

import argparse
import time

from bookramsey.ramsey import best_certificate, erdos_szekeres, ramsey_oracle


def first_moment(k, l, cap):
    # largest n certified as a strict lower bound, scanning upward
    best = None
    if k < 2 or l < 2:
        return None
    for n in range(2, cap + 1):
        if not best_certificate(k, l, n).valid:
            break
        best = n
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max", type=int, default=3)
    ap.add_argument("--cap", type=int, default=12)
    a = ap.parse_args()
    print(f"{'k':>2} {'l':>2} {'R(k,l)':>8} {'ES bound':>9} {'1st moment':>10} {'secs':>7}")
    for k in range(1, a.max + 1):
        for l in range(k, a.max + 1):
            t = time.perf_counter()
            res = ramsey_oracle(k, l, a.cap)
            dt = time.perf_counter() - t
            val = f"> {a.cap}" if res.value is None else str(res.value)
            fm = first_moment(k, l, a.cap)
            fm = "-" if fm is None else f"> {fm}"
            print(f"{k:>2} {l:>2} {val:>8} {erdos_szekeres(k, l):>9} {fm:>10} {dt:>7.2f}")


if __name__ == "__main__":
    main()
