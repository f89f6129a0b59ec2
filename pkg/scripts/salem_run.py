"""Sigma(N) sweep with exponent fit, and the C(beta) profile."""
import argparse
import os

from qmark import salem
from qmark.numerics import PrecisionContext


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--outdir", default="results")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--nmax", type=int, default=10 ** 7)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--n-cbeta", type=int, default=10 ** 5)
    a = p.parse_args()
    os.makedirs(a.outdir, exist_ok=True)
    ctx = PrecisionContext(256)
    with ctx.workprec():
        samples = []
        for N in salem.default_n_list():
            if N > a.nmax:
                break
            s = salem.sigma_sum(N, ctx, a.threads)
            samples.append(s)
            print(f"N = {N:>8d}  N*Sigma(N) = {float(s.scaled):.6f}")
        with open(os.path.join(a.outdir, "sigma.csv"), "w", newline="") as fh:
            salem.to_csv(samples, fh)
        if len(samples) >= 6:
            fit = salem.fit_exponent(samples)
            with open(os.path.join(a.outdir, "sigma_fit.json"), "w") as fh:
                fh.write(fit.to_json() + "\n")
            print(f"slope {fit.slope:.4f}  r2 {fit.r2:.6f}  below Lipschitz {fit.below_lipschitz}  "
                  f"in (-1.25, -0.85) {fit.conjecture_consistent}")
        cb = salem.c_beta(a.grid, a.n_cbeta, ctx, a.threads)
        with open(os.path.join(a.outdir, "cbeta.csv"), "w", newline="") as fh:
            salem.to_csv(cb, fh)
        print(f"C(beta) symmetry defect {salem.symmetry_defect(cb):.3e}")


if __name__ == "__main__":
    main()
