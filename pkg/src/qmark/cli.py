"""
qmark command line.

    qmark eval --x 1/3
    qmark dn --max 10 --method taylor --out json
    qmark zeta --m1 --digits 30
    qmark salem --sigma --n-list 1000,10000,100000
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import __version__
from .exact import ResourceError, cf_expand, farey_generation, question_mark
from .fourier import (Method, RangeError, coefficient_table, dn_operator, dn_taylor, stieltjes_coefficient_table,
                      weyl_sum)
from .measure import ConvergenceError, ResolutionError, moments
from .numerics import BigReal, PrecisionContext, fmt_decimal
from . import relations, salem, zeta


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 256
    output: str = "csv"
    digits: int = 30
    threads: int = 1
    deterministic: bool = True

    def __post_init__(self):
        if self.precision_bits < 64:
            raise UsageError("--prec must be >= 64")
        if self.digits < 1 or self.digits > int(self.precision_bits * 0.30):
            raise UsageError(f"--digits must be in 1..{int(self.precision_bits * 0.30)} at {self.precision_bits} bits")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.precision_bits)


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational: {s!r}")


def _num(x, cfg: RunConfig) -> str:
    return fmt_decimal(x, cfg.digits)


def _err(b: BigReal) -> str:
    return "unknown" if b.err is None else mpmath.nstr(b.err, 3)


# -- subcommands: each returns (columns, rows, params) ---------------------------

def cmd_eval(a, cfg):
    x = _frac(a.x)
    q = question_mark(x)
    f = q.to_fraction()
    dec = _num(mpmath.mpf(f.numerator) / f.denominator, cfg)
    return ["x", "exact", "decimal", "err"], [[str(x), str(f), dec, "0"]], {"x": str(x)}


def cmd_cf(a, cfg):
    x = _frac(a.x)
    rows = []
    for alt in (False, True):
        c = cf_expand(x, alternate=alt)
        rows.append(["alternate" if alt else "canonical", str(x), c.a0, " ".join(map(str, c.quotients))])
    return ["form", "x", "a0", "quotients"], rows, {"x": str(x)}


def cmd_farey(a, cfg):
    if a.gen < 0:
        raise UsageError("--gen must be >= 0")
    g = farey_generation(a.gen)
    rows = [[str(v), str(question_mark(v).to_fraction())] for v in g.members]
    return ["x", "qm"], rows, {"gen": a.gen}


def cmd_moments(a, cfg):
    t = moments(a.max, cfg.ctx)
    rows = [[L, _num(t[L].value, cfg), _err(t[L])] for L in range(a.max + 1)]
    return ["L", "value", "err"], rows, {"max": a.max}


def cmd_dn(a, cfg):
    ctx = cfg.ctx
    if a.max < 1:
        raise UsageError("--max must be >= 1")
    m = Method(a.method)
    if m is Method.TAYLOR:
        tab = moments(260, ctx)
        vals = [dn_taylor(n, tab, ctx) for n in range(1, a.max + 1)]
    elif m is Method.OPERATOR:
        vals = [dn_operator(n, ctx) for n in range(1, a.max + 1)]
    else:
        t = stieltjes_coefficient_table(a.max, a.depth)
        vals = [t[n] for n in range(1, a.max + 1)]
    rows = [[n, m.value, _num(v.value, cfg), _err(v)] for n, v in enumerate(vals, 1)]
    return ["n", "method", "value", "err"], rows, {"max": a.max, "method": m.value, "depth": a.depth}


def cmd_zeta(a, cfg):
    ctx = cfg.ctx
    out = []
    if a.even_max:
        tab = moments(260, ctx)
        out += [zeta.ZetaValue(2 * v, zeta.m_even(v, tab, ctx), zeta.Route.EVENMO) for v in range(1, a.even_max + 1)]
    if a.m1:
        out.append(zeta.ZetaValue(1, zeta.m_one(None, ctx), zeta.Route.PROP4))
    if a.cot:
        out.append(zeta.ZetaValue(1, zeta.m_one_cotangent(a.cot), zeta.Route.COT))
    if a.direct is not None:
        if not a.nmax:
            raise UsageError("--direct needs --nmax")
        tab = coefficient_table(a.nmax, ctx)
        out.append(zeta.ZetaValue(a.direct, zeta.m_direct(a.direct, tab, a.nmax, ctx), zeta.Route.DIRECT))
    if not out:
        raise UsageError("zeta needs --even-max, --m1, --cot or --direct")
    rows = [[z.s, z.route.value, _num(z.value.value, cfg), _err(z.value)] for z in out]
    return ["s", "route", "value", "err"], rows, {"even_max": a.even_max, "m1": a.m1, "cot": a.cot,
                                                  "direct": a.direct, "nmax": a.nmax}


def cmd_relations(a, cfg):
    ctx = cfg.ctx
    if a.check == "r1":
        reps = [relations.check_r1(coefficient_table(a.nmax or 100, ctx), ctx)]
    elif a.check == "trig":
        x = _frac(a.x or "1/3")
        if not 0 <= x <= 1:
            raise UsageError("--x must lie in [0, 1]")
        n = a.nmax or 10000
        reps = [relations.check_trig(x, n, coefficient_table(n, ctx), ctx)]
    elif a.check == "spec":
        n = a.nmax or 10000
        tab = coefficient_table(n, ctx)
        reps = [r for k in (100, 1000, 10000) if k <= n for r in relations.check_specializations(k, tab, ctx)]
    else:
        n = a.nmax or 8192
        reps = [relations.check_cr(a.m or 1, coefficient_table(n, ctx), n, ctx)]
    rows = [[r.name, mpmath.nstr(r.residual, 6), mpmath.nstr(r.budget, 6), r.passed,
             json.dumps(r.params, sort_keys=True)] for r in reps]
    return ["name", "residual", "budget", "pass", "params"], rows, {"check": a.check, "x": a.x, "nmax": a.nmax, "m": a.m}


def _ints(s: str) -> list[int]:
    try:
        return [int(float(t)) for t in s.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad integer list {s!r}")


def cmd_salem(a, cfg):
    ctx = cfg.ctx
    if a.weyl:
        if a.n is None or a.gen is None:
            raise UsageError("--weyl needs --n and --gen")
        w = weyl_sum(a.n, a.gen, cfg.threads)
        return ["n", "gen", "real", "imag"], [[w.n, w.m, repr(w.real), repr(w.imag)]], {"n": a.n, "gen": a.gen}
    if a.hist:
        if a.n is None:
            raise UsageError("--hist needs --n")
        rows = [[i, repr(v)] for i, v in salem.histogram(a.n, ctx, cfg.threads)]
        return ["i", "density"], rows, {"n": a.n}
    if a.cbeta:
        if a.n is None or a.grid is None:
            raise UsageError("--cbeta needs --grid and --n")
        samples = salem.c_beta(a.grid, a.n, ctx, cfg.threads)
        params = {"grid": a.grid, "n": a.n}
    elif a.sigma:
        Ns = _ints(a.n_list) if a.n_list else salem.default_n_list()
        samples = [salem.sigma_sum(N, ctx, cfg.threads) for N in Ns]
        params = {"n_list": Ns}
        if a.fit:
            f = salem.fit_exponent(samples)
            rows = [[f.slope, f.intercept, f.r2, " ".join(map(str, f.N_list)), f.below_lipschitz,
                     f.conjecture_consistent]]
            return ["slope", "intercept", "r2", "N_list", "below_lipschitz", "conjecture_consistent"], rows, params
    else:
        raise UsageError("salem needs --sigma, --cbeta, --hist or --weyl")
    rows = [[s.N, _num(s.beta, cfg), _num(s.sum_value.value, cfg), _num(s.scaled, cfg)] for s in samples]
    return ["N", "beta", "sum", "scaled"], rows, params


COMMANDS = {"eval": cmd_eval, "cf": cmd_cf, "farey": cmd_farey, "moments": cmd_moments, "dn": cmd_dn,
            "zeta": cmd_zeta, "relations": cmd_relations, "salem": cmd_salem}


def build_parser() -> argparse.ArgumentParser:
    def add_globals(q, default):
        d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
        q.add_argument("--prec", type=int, default=d(256), help="working precision in bits")
        q.add_argument("--digits", type=int, default=d(30))
        q.add_argument("--out", choices=["csv", "json"], default=d("csv"))
        q.add_argument("--threads", type=int, default=d(1))

    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, False)
    p = argparse.ArgumentParser(prog="qmark", description=__doc__.strip().splitlines()[0])
    add_globals(p, True)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    s = sub.add_parser("eval", help="exact ?(x)")
    s.add_argument("--x", required=True)
    s = sub.add_parser("cf", help="both continued fractions of x")
    s.add_argument("--x", required=True)
    s = sub.add_parser("farey", help="one generation of the Farey tree")
    s.add_argument("--gen", type=int, required=True)
    s = sub.add_parser("moments", help="m_L = int x^L d?")
    s.add_argument("--max", type=int, default=20)
    s = sub.add_parser("dn", help="Fourier-Stieltjes coefficients")
    s.add_argument("--max", type=int, default=10)
    s.add_argument("--method", choices=[m.value for m in Method], default="taylor")
    s.add_argument("--depth", type=int, default=None, help="Farey generation for midpoint sums")
    s = sub.add_parser("zeta", help="values of the Dirichlet series of d_n")
    s.add_argument("--even-max", type=int, default=0)
    s.add_argument("--m1", action="store_true")
    s.add_argument("--cot", type=int, nargs="?", const=55000, default=None, help="cotangent route, N cells")
    s.add_argument("--direct", type=float, default=None)
    s.add_argument("--nmax", type=int, default=None)
    s = sub.add_parser("relations", help="numerical checks of identities")
    s.add_argument("--check", choices=["r1", "trig", "spec", "cr"], required=True)
    s.add_argument("--x", default=None)
    s.add_argument("--nmax", type=int, default=None)
    s.add_argument("--m", type=int, default=None)
    s = sub.add_parser("salem", help="correlation sums on the uniform partition")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--sigma", action="store_true")
    g.add_argument("--cbeta", action="store_true")
    g.add_argument("--weyl", action="store_true")
    g.add_argument("--hist", action="store_true")
    s.add_argument("--n-list", default=None)
    s.add_argument("--fit", action="store_true")
    s.add_argument("--grid", type=int, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--gen", type=int, default=None)
    return p


def render(command: str, cols, rows, params, cfg: RunConfig) -> str:
    if cfg.output == "json":
        doc = {"command": command, "params": params, "precision_bits": cfg.precision_bits,
               "rows": [dict(zip(cols, r)) for r in rows], "err_fields_present": True}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows(rows)
    buf.write(f"# precision_bits={cfg.precision_bits} version={__version__}\n")
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = RunConfig(a.prec, a.out, a.digits, a.threads)
        with mpmath.workprec(cfg.ctx.work_bits):
            cols, rows, params = COMMANDS[a.command](a, cfg)
    except UsageError as e:
        print(f"qmark: usage error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, ResourceError, RangeError, ConvergenceError, ResolutionError) as e:
        print(f"qmark: {a.command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"qmark: {a.command} failed unexpectedly: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(render(a.command, cols, rows, params, cfg))
    return 0


if __name__ == "__main__":
    sys.exit(main())
