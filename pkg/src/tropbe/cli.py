"""Command-line entry point: ``tropbe {trop,roots,be,exp1,exp2}``.

Exit codes: 0 success, 1 parse or I/O error, 2 numerical failure,
3 violated precondition.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import harness
from .backward_error import ALL_MEASURES, analyze
from .errors import ConvergenceError, DomainError, ParseError
from .poly import FORMAT_HELP, format_complex_list, read_complex_list, read_polynomial, write_complex_list
from .rootfind import aberth
from .tropical import tropical_roots

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_DOMAIN = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _emit_table(header, rows, as_csv: bool):
    if as_csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print("  ".join(s.rjust(w) for s, w in zip(r, widths)))


def _g(x) -> str:
    if x is None:
        return "n/a"
    return f"{x:.6g}"


def cmd_trop(args):
    p = read_polynomial(args.poly)
    t = tropical_roots(p)
    mult = {}
    for lo, hi in t.subdivision:
        for i in range(lo + 1, hi + 1):
            mult[i] = hi - lo
    rows = []
    for i in range(p.degree + 1):
        tau = _g(float(t.tau[i - 1])) if i >= 1 else ""
        rows.append([i, _g(abs(p.coeffs[i])), _g(float(t.valuations[i])),
                     "*" if t.is_vertex(i) else "", tau, mult.get(i, ""), _g(float(t.r[i]))])
    _emit_table(["i", "|c_i|", "v_i", "vertex", "tau_i", "m", "r_i"], rows, args.csv)
    if not args.csv:
        print(f"hull vertices: {list(t.hull_vertices)}")
        print(f"subdivision: {t.subdivision}")
    return EXIT_OK


def cmd_roots(args):
    p = read_polynomial(args.poly)
    roots = aberth(p).roots
    if args.out:
        write_complex_list(args.out, roots, header=f"roots of {args.poly}")
    else:
        sys.stdout.write(format_complex_list(roots))
    return EXIT_OK


def cmd_be(args):
    p = read_polynomial(args.poly)
    roots = read_complex_list(args.roots)
    if roots.size != p.degree:
        raise ParseError(f"{args.roots}: expected {p.degree} roots, found {roots.size}")
    measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    bad = [m for m in measures if m not in ALL_MEASURES]
    if bad:
        raise ParseError(f"--measures: unknown measure(s) {', '.join(bad)}")
    rep = analyze(p, roots, measures)
    rows = [[m, _g(getattr(rep, "embe_ub" if m == "embe" else m))] for m in measures]
    _emit_table(["measure", "value"], rows, args.csv)
    if "embe" in measures:
        if rep.embe_ub is None:
            print("embe: refinement diverged; upper bound unavailable", file=sys.stderr)
        if rep.pairing_collision:
            print("warning: refined roots collided; |x_hat| ~ |x| may not hold", file=sys.stderr)
    if not args.csv:
        print()
        _emit_table(["i", "|c_i - c^_i|", "relative", "r-scaled"],
                    [[e.index, _g(e.abs_error), _g(e.rel_error), _g(e.scaled_error)]
                     for e in rep.per_coeff], False)
    if "embe" in measures and rep.embe_ub is None:
        return EXIT_NUMERIC
    return EXIT_OK


def _exp_config(args):
    return harness.ExperimentConfig(d=args.d, k=args.k, trials=args.trials, seed=args.seed,
                                    jobs=args.jobs)


def cmd_exp1(args):
    cfg = _exp_config(args)
    recs = harness.experiment1(cfg)
    path = harness.write_experiment1(recs, args.out)
    s = harness.exp1_summary(recs)
    print(f"wrote {path} ({s['trials']} rows)")
    print(f"EMBE bound available: {s['available']}, unavailable: {s['unavailable']}, "
          f"collisions: {s['collisions']}")
    print(f"embe_ub <= 100 max(TBE, u): {s['within_factor']}/{s['available']} "
          f"({100 * s['fraction_within']:.1f}%)")
    return EXIT_OK


def cmd_exp2(args):
    cfg = _exp_config(args)
    recs = harness.experiment2(cfg)
    path = harness.write_experiment2(recs, args.out)
    s = harness.exp2_summary(recs)
    print(f"wrote {path} ({s['ratios']} ratios from {s['trials']} trials)")
    print(f"ratios within 10%: {s['within_band']}/{s['ratios']} ({100 * s['fraction_within']:.1f}%)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tropbe", description="Backward error measures for polynomial roots.",
                 epilog=FORMAT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, fn):
        sp = sub.add_parser(name, help=help_, description=help_, epilog=FORMAT_HELP,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("trop", "tropical roots, hull vertices and r_i constants", cmd_trop)
    sp.add_argument("--poly", required=True, help="polynomial file")
    sp.add_argument("--csv", action="store_true", help="CSV on standard output")

    sp = add("roots", "approximate all roots (Aberth iteration)", cmd_roots)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--out", help="write roots here instead of standard output")

    sp = add("be", "backward errors of a root set", cmd_be)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--roots", required=True, help="roots file, same grammar as polynomials")
    sp.add_argument("--measures", default=",".join(ALL_MEASURES),
                    help="comma-separated subset of nbe,ebe,tbe,embe")
    sp.add_argument("--csv", action="store_true")

    for name, fn, trials, seed in (("exp1", cmd_exp1, 1000, 42), ("exp2", cmd_exp2, 10000, 7)):
        sp = add(name, f"numerical experiment {name[-1]}", fn)
        sp.add_argument("--d", type=int, default=20, help="degree")
        sp.add_argument("--k", type=float, default=8.0, help="exponent spread")
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--seed", type=int, default=seed)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--out", default=".", help="output directory")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if getattr(exc, "residuals", None) is not None:
            print(f"residuals: {np.asarray(exc.residuals)}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def main():
    sys.exit(run())
