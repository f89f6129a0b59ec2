"""Run every identity check and write one JSON report per line."""
import argparse
import os
from fractions import Fraction

from qmark import relations
from qmark.fourier import coefficient_table
from qmark.numerics import PrecisionContext


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--outdir", default="results")
    p.add_argument("--nmax", type=int, default=10000)
    a = p.parse_args()
    os.makedirs(a.outdir, exist_ok=True)
    ctx = PrecisionContext(256)
    with ctx.workprec():
        tab = coefficient_table(a.nmax, ctx)
        reps = [relations.check_r1(tab, ctx)]
        reps += [relations.check_trig(Fraction(x), a.nmax, tab, ctx) for x in ("1/3", "1/4", "2/5", "1/2")]
        for N in (100, 1000, 10000):
            if N <= a.nmax:
                reps += relations.check_specializations(N, tab, ctx)
        reps += [relations.check_cr(m, tab, min(8192, a.nmax), ctx) for m in (1, 2, 3)]
    with open(os.path.join(a.outdir, "relations.jsonl"), "w") as fh:
        for r in reps:
            fh.write(r.to_json() + "\n")
            print(f"{r.name:14s} residual {float(r.residual):.3e}  budget {float(r.budget):.3e}  "
                  f"{'PASS' if r.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
