"""Moments, d_n (two routes) and M(s) values to CSV."""
import argparse
import csv
import os

import mpmath

from qmark.fourier import dn_operator, dn_taylor
from qmark.measure import moments
from qmark.numerics import PrecisionContext, fmt_decimal
from qmark import zeta


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--outdir", default="results")
    p.add_argument("--prec", type=int, default=256)
    p.add_argument("--nmax", type=int, default=10)
    a = p.parse_args()
    os.makedirs(a.outdir, exist_ok=True)
    ctx = PrecisionContext(a.prec)
    with ctx.workprec():
        tab = moments(260, ctx)
        with open(os.path.join(a.outdir, "moments.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["L", "m_L", "err"])
            for L in range(tab.Lmax + 1):
                w.writerow([L, fmt_decimal(tab[L].value, 40), mpmath.nstr(tab[L].err, 3)])

        with open(os.path.join(a.outdir, "dn.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "taylor", "taylor_err", "operator", "operator_err", "difference"])
            for n in range(1, a.nmax + 1):
                t, o = dn_taylor(n, tab, ctx), dn_operator(n, ctx)
                w.writerow([n, fmt_decimal(t.value, 40), mpmath.nstr(t.err, 3), fmt_decimal(o.value, 40),
                            mpmath.nstr(o.err, 3), mpmath.nstr(abs(t.value - o.value), 3)])
                print(f"d_{n} = {fmt_decimal(t.value, 25)}")

        vals = [zeta.ZetaValue(2 * v, zeta.m_even(v, tab, ctx), zeta.Route.EVENMO) for v in range(1, 6)]
        vals.append(zeta.ZetaValue(1, zeta.m_one(tab, ctx), zeta.Route.PROP4))
        vals.append(zeta.ZetaValue(1, zeta.ttar_decomposition(tab, ctx).total, zeta.Route.PROP4))
        vals.append(zeta.ZetaValue(1, zeta.m_one_cotangent(), zeta.Route.COT))
        zeta.to_csv(vals, os.path.join(a.outdir, "zeta.csv"), 40)
        for row in zeta.zeta_rows(vals, 30):
            print(*row)


if __name__ == "__main__":
    main()
