"""Sweep mu over random colourings and tabulate step kinds and monitor outcomes.

    python3 scripts/mu_sweep.py --n 64 --k 8 --l 5 --rho 7/10 --threshold lower
"""

import argparse
from collections import Counter
from fractions import Fraction

from bookramsey import book as bk
from bookramsey.graph import random_colouring
from bookramsey.monitors import run_monitors


def sweep(n, k, l, mus, seeds, rho, threshold):
    rows = []
    for mu in mus:
        kinds, status, unsat, viol = Counter(), Counter(), Counter(), 0
        for seed in range(seeds):
            c = random_colouring(n, rho, seed)
            params = bk.BookParams(k, l, mu, Fraction(1, 10), threshold)
            X0, Y0 = bk.halves(n)
            trace = bk.run(params, c, X0, Y0)
            kinds.update(r["kind"] for r in trace.records)
            status[trace.final["status"]] += 1
            viol += bool(bk.trace_violations(c, trace))
            for rep in run_monitors(trace):
                if not rep.satisfied:
                    unsat[rep.lemma_id] += 1
        rows.append((mu, kinds, status, unsat, viol))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--l", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--rho", type=Fraction, default=Fraction(7, 10))
    ap.add_argument("--threshold", default="lower")
    ap.add_argument("--mus", default="1/10,1/5,3/10,2/5,1/2,3/5,7/10")
    a = ap.parse_args()
    mus = [Fraction(m) for m in a.mus.split(",")]
    print(f"{'mu':>5} {'D':>5} {'R':>5} {'B':>5} {'S':>5}  halted  violations  unsatisfied monitors")
    for mu, kinds, status, unsat, viol in sweep(a.n, a.k, a.l, mus, a.seeds, a.rho, a.threshold):
        un = ", ".join(f"{k}:{v}" for k, v in sorted(unsat.items())) or "-"
        print(
            f"{str(mu):>5} {kinds['D']:>5} {kinds['R']:>5} {kinds['B']:>5} {kinds['S']:>5}"
            f"  {status['halted']:>6}  {viol:>10}  {un}"
        )


if __name__ == "__main__":
    main()
