"""Command-line front end: roots, benchmarks, experiment tables, generators.

Coefficient files are plain ASCII: one "re im" pair per line, ascending
degree, '#' starts a comment, blank lines are skipped.  Exit codes:
0 success, 2 unusable input (parse failure, bad family, zero leading
coefficient), 3 QZ failed to converge (partial results with --partial).
"""

import argparse
import json
import os
import statistics
import sys
import time

import numpy as np

from .backward import (
    coefficient_deviations,
    measured_backward_error,
    predicted_backward_error_table,
)
from .dense import dense_eigenvalues
from .families import (
    FAMILIES,
    bernoulli,
    chebyshev,
    cyclotomic,
    equispaced,
    power_sum,
    random_coefficients,
    unbalanced,
)
from .generators import Polynomial, build_companion_pencil, reconstruct_dense
from .structured import ConvergenceError, eigenvalues

DEFAULT_SEED = 20240811
BENCH_DEGREES = (100, 200, 400, 800)
TABLE_SIZES = (50, 100, 200)


class InputError(Exception):
    """Unusable input; maps to exit code 2."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def resolve_seed(args):
    """--seed flag, else FASTQZ_SEED from the environment, else default."""
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("FASTQZ_SEED", DEFAULT_SEED))


def read_coefficients(path):
    """Parse a coefficient file (or stdin for '-') into complex128."""
    fh = sys.stdin if path == "-" else open(path)
    coeffs = []
    try:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError("expected 're im', got %r" % line, lineno)
            try:
                coeffs.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise InputError("not a number pair: %r" % line, lineno)
    finally:
        if fh is not sys.stdin:
            fh.close()
    return np.array(coeffs, dtype=np.complex128)


def format_root(root):
    if np.isinf(root):
        return "inf"
    return "%.17g %.17g" % (root.real, root.imag)


def json_root(root):
    if np.isinf(root):
        return "inf"
    return [root.real, root.imag]


def forward_error(computed, reference):
    """max over reference roots of the distance to the nearest computed one."""
    computed = np.asarray(computed, dtype=np.complex128)
    computed = computed[np.isfinite(computed)]
    if computed.size == 0:
        return float("inf")
    return float(max(np.abs(computed - r).min() for r in reference))


def solve(poly, method, max_iter=30):
    """Roots of a polynomial through the requested QZ path."""
    gen = build_companion_pencil(poly)
    if method == "fast":
        return eigenvalues(gen, max_iter_per_eig=max_iter)
    A, B, _, _ = reconstruct_dense(gen)
    return dense_eigenvalues(A, B, max_iter_per_eig=max_iter)


def warm_up():
    """Trigger kernel compilation so timings see steady-state code."""
    p, _ = random_coefficients(16, np.random.default_rng(0))
    eigenvalues(build_companion_pencil(p.normalized()))


def reference_roots_mp(coeffs, dps=50):
    """High-precision roots for families without a closed form."""
    import mpmath as mp

    with mp.workdps(dps):
        rts = mp.polyroots([mp.mpc(c) for c in coeffs[::-1]], maxsteps=200,
                           extraprec=200)
        return np.array([complex(r) for r in rts])


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def cmd_roots(args):
    coeffs = read_coefficients(args.input)
    if len(coeffs) < 2:
        raise InputError("need at least two coefficients (degree >= 1)")
    if coeffs[-1] == 0:
        raise InputError("leading coefficient must be nonzero")
    poly = Polynomial(coeffs)
    if not args.no_normalize:
        poly = poly.normalized()

    partial_error = None
    try:
        result = solve(poly, args.method, args.max_iter)
    except ConvergenceError as exc:
        if not args.partial:
            print("error: %s" % exc, file=sys.stderr)
            return 3
        partial_error = str(exc)
        result = exc.partial

    roots = result.roots
    if args.json:
        payload = {
            "method": args.method,
            "degree": poly.degree,
            "normalized": not args.no_normalize,
            "max_iter": args.max_iter,
            "total_sweeps": result.total_sweeps,
            "iterations": list(result.iterations),
            "roots": [json_root(r) for r in roots],
        }
        if partial_error is not None:
            payload["error"] = partial_error
        print(json.dumps(payload))
    else:
        for r in roots:
            print(format_root(r))
        if partial_error is not None:
            print("error: %s" % partial_error, file=sys.stderr)
    return 0 if partial_error is None else 3


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args):
    seed = resolve_seed(args)
    build = FAMILIES[args.family]
    poly, roots = build(args.degree, np.random.default_rng(seed))

    header = ["# family: %s" % args.family, "# degree: %d" % args.degree]
    if args.family == "random":
        header.append("# seed: %d" % seed)
    header.append("# columns: re im (ascending degree)")
    lines = header + ["%.17g %.17g" % (c.real, c.imag) for c in poly.coeffs]
    body = "\n".join(lines) + "\n"

    if args.output == "-":
        sys.stdout.write(body)
        return 0
    with open(args.output, "w") as fh:
        fh.write(body)
    if roots is not None:
        root_lines = ["# reference roots for %s, degree %d"
                      % (args.family, args.degree)]
        root_lines += ["%.17g %.17g" % (r.real, r.imag) for r in roots]
        with open(args.output + ".roots", "w") as fh:
            fh.write("\n".join(root_lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def bench_times(degrees, trials, seed):
    """Median fast/dense solve times per degree plus the fast-path slope.

    Identical seeded polynomials feed both methods; the slope is the
    log-log least-squares fit of the fast times against the degrees
    (None for fewer than two degrees).
    """
    rng = np.random.default_rng(seed)
    polys = {d: [random_coefficients(d, rng)[0].normalized()
                 for _ in range(trials)] for d in degrees}
    warm_up()

    fast_times = []
    dense_times = []
    for d in degrees:
        ft, dt = [], []
        for p in polys[d]:
            t0 = time.perf_counter()
            solve(p, "fast")
            ft.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            solve(p, "dense")
            dt.append(time.perf_counter() - t0)
        fast_times.append(statistics.median(ft))
        dense_times.append(statistics.median(dt))

    slope = None
    if len(degrees) > 1:
        slope = float(np.polyfit(np.log10(degrees),
                                 np.log10(fast_times), 1)[0])
    return fast_times, dense_times, slope


def cmd_bench(args):
    degrees = args.degrees
    if any(d < 2 for d in degrees):
        raise InputError("bench degrees must be >= 2")
    fast_times, dense_times, slope = bench_times(degrees, args.trials,
                                                 resolve_seed(args))
    slope_text = "" if slope is None else "%.3f" % slope
    print("degree,fast_seconds,dense_seconds,ratio,slope")
    for i, d in enumerate(degrees):
        last = i == len(degrees) - 1
        print("%d,%.6e,%.6e,%.3f,%s"
              % (d, fast_times[i], dense_times[i],
                 fast_times[i] / dense_times[i], slope_text if last else ""))
    return 0


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def _solve_timed(poly, method):
    t0 = time.perf_counter()
    result = solve(poly, method)
    return result, time.perf_counter() - t0


def _table_random(args):
    seed = resolve_seed(args)
    rng = np.random.default_rng(seed)
    warm_up()
    print("random polynomials, %d trials per degree, fast path" % args.trials)
    print("%8s  %14s  %14s  %10s" % ("degree", "backward(avg)",
                                     "iters/eig(avg)", "time(med)"))
    for n in TABLE_SIZES:
        errs, iters, times = [], [], []
        for _ in range(args.trials):
            p = random_coefficients(n, rng)[0].normalized()
            res, dt = _solve_timed(p, "fast")
            errs.append(measured_backward_error(p, res.roots, p.coeffs[-1]))
            iters.append(float(np.mean(res.iterations)))
            times.append(dt)
        print("%8d  %14.2e  %14.2f  %9.3fs"
              % (n, np.mean(errs), np.mean(iters), statistics.median(times)))
    return 0


def _table_cyclotomic(args):
    warm_up()
    print("cyclotomic z^N - i, fast path")
    print("%8s  %14s  %14s  %10s" % ("degree", "forward", "iters/eig",
                                     "time"))
    for n in TABLE_SIZES:
        p, ref = cyclotomic(n)
        res, dt = _solve_timed(p.normalized(), "fast")
        print("%8d  %14.2e  %14.2f  %9.3fs"
              % (n, forward_error(res.roots, ref),
                 float(np.mean(res.iterations)), dt))
    return 0


def _degree20_suite():
    """The four degree-20 polynomials with their reference roots."""
    suite = []
    for name, build in (("power-sum", power_sum), ("equispaced", equispaced),
                        ("chebyshev", chebyshev), ("bernoulli", bernoulli)):
        p, ref = build(20)
        if ref is None:
            ref = reference_roots_mp(p.coeffs)
        suite.append((name, p, ref))
    return suite


def _table_degree20_forward(args):
    warm_up()
    print("degree-20 polynomial suite, fast path")
    print("%12s  %14s  %14s" % ("polynomial", "forward", "iters/eig"))
    for name, p, ref in _degree20_suite():
        res, _ = _solve_timed(p.normalized(), "fast")
        print("%12s  %14.2e  %14.2f"
              % (name, forward_error(res.roots, ref),
                 float(np.mean(res.iterations))))
    return 0


def _table_degree20_backward(args):
    warm_up()
    print("degree-20 suite: per-coefficient log10 backward error,")
    print("measured from fast-path roots / predicted from the first-order")
    print("model (coefficients ascending; '.' marks an exact zero)")

    def fmt(vals):
        out = []
        for v in vals:
            out.append("  ." if not np.isfinite(v) else "%4d" % int(v))
        return "".join(out)

    for name, p, _ in _degree20_suite():
        pn = p.normalized()
        res, _ = _solve_timed(pn, "fast")
        dev = coefficient_deviations(pn, res.roots, pn.coeffs[-1])
        with np.errstate(divide="ignore"):
            measured = np.round(np.log10(dev))
        predicted = predicted_backward_error_table(pn.coeffs)
        print("%12s measured : %s" % (name, fmt(measured)))
        print("%12s predicted: %s" % ("", fmt(predicted)))
    return 0


def _table_unbalanced(args):
    warm_up()
    p, _ = unbalanced(20)
    ref = reference_roots_mp(p.coeffs)
    print("unbalanced alternating-magnitude polynomial, degree 20")
    print("%12s  %14s  %14s" % ("method", "forward", "backward"))

    runs = [("fast-qz", lambda: solve(p.normalized(), "fast")),
            ("dense-qz", lambda: solve(p.normalized(), "dense"))]
    # QR stand-in: the same dense sweeps on the monic rescaling, where
    # B is exactly the identity and all pencil advantages are gone.
    monic = Polynomial(p.coeffs / p.coeffs[-1])
    runs.append(("qr-standin", lambda: solve(monic, "dense")))

    for name, run in runs:
        res = run()
        fwd = forward_error(res.roots, ref)
        back = measured_backward_error(p, res.roots, p.coeffs[-1])
        print("%12s  %14.2e  %14.2e" % (name, fwd, back))
    return 0


TABLES = {
    1: _table_random,
    2: _table_cyclotomic,
    3: _table_degree20_forward,
    4: _table_degree20_backward,
    5: _table_unbalanced,
}


def cmd_tables(args):
    return TABLES[args.which](args)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="fastqz",
        description="Polynomial roots via structured QZ on companion pencils")
    sub = parser.add_subparsers(dest="command", required=True)

    p_roots = sub.add_parser("roots", help="roots of a coefficient file")
    p_roots.add_argument("input", help="coefficient file, '-' for stdin")
    p_roots.add_argument("--method", choices=("fast", "dense"),
                         default="fast")
    p_roots.add_argument("--no-normalize", action="store_true",
                         help="skip the unit 2-norm rescaling")
    p_roots.add_argument("--max-iter", type=int, default=30, metavar="K",
                         help="sweep budget per eigenvalue (default 30)")
    p_roots.add_argument("--json", action="store_true",
                         help="machine-readable output with sweep counts")
    p_roots.add_argument("--partial", action="store_true",
                         help="on non-convergence, print what was found")
    p_roots.set_defaults(func=cmd_roots)

    p_gen = sub.add_parser("gen", help="write a test polynomial")
    p_gen.add_argument("family", choices=sorted(FAMILIES))
    p_gen.add_argument("--degree", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--output", default="-", metavar="PATH",
                       help="output file; reference roots go to PATH.roots "
                            "when a closed form exists (default stdout)")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="fast-vs-dense timing CSV")
    p_bench.add_argument("--degrees", type=_int_list,
                         default=list(BENCH_DEGREES),
                         help="comma-separated degrees (default %s)"
                              % ",".join(map(str, BENCH_DEGREES)))
    p_bench.add_argument("--trials", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.set_defaults(func=cmd_bench)

    p_tab = sub.add_parser("tables", help="regenerate an experiment table")
    p_tab.add_argument("which", type=int, choices=sorted(TABLES))
    p_tab.add_argument("--trials", type=int, default=10)
    p_tab.add_argument("--seed", type=int, default=None)
    p_tab.set_defaults(func=cmd_tables)

    return parser


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
