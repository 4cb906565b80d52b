"""Command-line front end: every verb is a thin wrapper over one library call."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .arith import evaluate
from .asymptotic import MODELS, FitResult, fit
from .audit import FORMATS, REGISTRY, AuditConfig, render, run_all
from .errors import UsageError
from .sieve import APClass, build_prime_table, prime_count
from . import sums
from .trace import SumTrace, fmt, parse_grid

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


def number(text: str):
    """int or float from text such as ``1e8`` or ``2.5``; integral values come back as int."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return int(v) if v.is_integer() and abs(v) < 2**63 else v


def integer(text: str) -> int:
    v = number(text)
    if not isinstance(v, int):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for {args.verb} {getattr(args, 'op', '')}".rstrip())


def _form(args) -> sums.LinearForm:
    _require(args, "m", "k")
    return sums.LinearForm(args.m, args.k)


def _table(n: int, args):
    return build_prime_table(max(int(n), 2) + 64, workers=args.workers)


def _ap(args) -> APClass:
    _require(args, "q", "a")
    return APClass(args.a, args.q)


# ---------------------------------------------------------------------------
# sum: one scalar per operation


def _sum_value(args):
    op = args.op
    if op == "twisted-mobius":
        _require(args, "x")
        res = APClass(args.a, args.q) if args.q is not None and args.a is not None else None
        cop = args.coprime_to
        return sums.twisted_mobius_sum(args.x, args.s if args.s is not None else 1.0, args.log_power, cop, res).value
    _require(args, "x")
    x = args.x
    if op in ("mertens-ap",):
        return sums.mertens_ap(_table(x, args), x, _ap(args), args.weight or "reciprocal").value
    if op in ("psi-ap", "pi-ap"):
        _require(args, "q", "a")
        fn = sums.psi_ap if op == "psi-ap" else sums.pi_ap
        return fn(_table(x, args), x, args.q, args.a)
    f = _form(args)
    top = f(x)
    if op == "pair-weighted":
        return sums.pair_weighted_sum(_table(top, args), x, f)
    if op == "inversion":
        return sums.inversion_decomposition(_table(top, args), x, f, args.restricted).value
    if op == "prime-power-pair":
        return sums.prime_power_pair_sum(_table(top, args), x, f, args.weight or "reciprocal", args.tail_from)
    if op == "lambda-pair":
        return sums.lambda_pair_sum(_table(top, args), x, f)
    if op == "pair-count":
        return sums.pair_count(_table(x, args), x, f)
    if op == "hl-partial":
        return sums.hl_partial_sum(_table(top, args), x, f, args.s if args.s is not None else 1.0)
    if op == "chebyshev-tail":
        _require(args, "x0")
        r = sums.chebyshev_tail(_table(top, args), args.x0, x, f)
        return {"total": r.total, "pair_part": r.pair_part, "power_part": r.power_part}
    raise UsageError(f"unknown sum {op!r}")


SUM_OPS = ("mertens-ap", "pair-weighted", "inversion", "twisted-mobius", "prime-power-pair", "psi-ap",
           "pi-ap", "lambda-pair", "pair-count", "hl-partial", "chebyshev-tail")


# ---------------------------------------------------------------------------
# scan: a trace over a grid


def _scan_trace(args) -> SumTrace:
    op = args.op
    _require(args, "grid")
    grid = parse_grid(args.grid)
    top = grid[-1]
    if op == "twisted-mobius":
        res = APClass(args.a, args.q) if args.q is not None and args.a is not None else None
        return sums.twisted_mobius_trace(grid, args.s if args.s is not None else 1.0, args.log_power,
                                         args.coprime_to, res)
    if op == "mertens-ap":
        return sums.mertens_ap_trace(_table(top, args), grid, _ap(args), args.weight or "reciprocal")
    if op in ("psi-ap", "pi-ap"):
        _require(args, "q", "a")
        fn = sums.psi_ap_trace if op == "psi-ap" else sums.pi_ap_trace
        return fn(_table(top, args), grid, args.q, args.a)
    if op == "vonmangoldt-dirichlet":
        _require(args, "s")
        return sums.vonmangoldt_dirichlet_trace(_table(top, args), grid, args.s)
    f = _form(args)
    if op == "restricted-mobius":
        return sums.restricted_mobius_trace(grid, f, args.s if args.s is not None else 1.0, args.log_power)
    if op == "pair-count":
        return sums.pair_count_trace(_table(top, args), grid, f)
    T = _table(f(top), args)
    if op == "pair-weighted":
        return sums.pair_weighted_trace(T, grid, f)
    if op == "lambda-pair":
        return sums.lambda_pair_trace(T, grid, f)
    if op == "prime-power-pair":
        return sums.prime_power_pair_trace(T, grid, f, args.weight or "reciprocal", args.tail_from)
    if op == "hl-partial":
        return sums.hl_partial_trace(T, grid, f, args.s if args.s is not None else 1.0)
    raise UsageError(f"unknown scan {op!r}")


# ---------------------------------------------------------------------------
# plot scripts

_GNUPLOT_SHAPE = {
    "loglog": "log(log(x))",
    "x_log2": "x / log(x)**2",
    "li": "li(x)",
}


def plot_script(trace_file: str, result: FitResult) -> str:
    """A gnuplot script drawing the trace on a log x axis with the fitted curve over it."""
    lines = [
        f"# {result.model} fit: c = {fmt(result.c)}, b = {fmt(result.b)}, rms = {fmt(result.rms_residual)}",
        "set datafile separator ','",
        "set logscale x",
        "set key top left",
        "set xlabel 'x'",
        "set ylabel 'value'",
    ]
    if result.model == "li":
        # li(x) by trapezoidal integration of 1/log t from 2, enough for a picture
        lines += ["li(x) = (x <= 2) ? 1.04516378 : 1.04516378 + (x - 2) / 200.0 * "
                  "sum [i=0:200] ((i == 0 || i == 200 ? 0.5 : 1.0) / log(2 + i * (x - 2) / 200.0))"]
    lines += [
        f"c = {fmt(result.c)}",
        f"b = {fmt(result.b)}",
        f"f(x) = c * {_GNUPLOT_SHAPE[result.model]} + b",
        f"plot '{trace_file}' using 1:2 every ::1 with linespoints title 'value', \\",
        f"     f(x) with lines title 'c {result.model} + b'",
    ]
    return "\n".join(lines) + "\n"


def _read_trace(path: str) -> SumTrace:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read trace {path}: {e.strerror}") from None
    tr = SumTrace.from_csv(text)
    if not len(tr):
        raise UsageError(f"trace {path} has no checkpoints")
    return tr


def _window(text: str | None):
    if text is None:
        return (1e3, math.inf)
    try:
        lo, hi = text.split(":")
        return (float(lo) if lo else 0.0, float(hi) if hi else math.inf)
    except ValueError:
        raise UsageError(f"--window must look like lo:hi, got {text!r}") from None


# ---------------------------------------------------------------------------
# output


def _emit(args, text: str | bytes) -> None:
    data = text.encode() if isinstance(text, str) else text
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _value_text(v) -> str:
    if isinstance(v, dict):
        return " ".join(f"{k}={fmt(x)}" for k, x in v.items()) + "\n"
    return fmt(v) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="primepairs", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output file (default: standard output)")
        sp.add_argument("--workers", type=integer, default=os.cpu_count() or 1)

    def op_flags(sp):
        for name in ("x", "m", "k", "q", "a", "x0", "tail-from", "coprime-to"):
            sp.add_argument(f"--{name}", type=integer)
        sp.add_argument("--s", type=number)
        sp.add_argument("--log-power", type=integer, default=1)
        sp.add_argument("--weight", choices=["reciprocal", "log_over_p", "unweighted"])
        sp.add_argument("--restricted", action="store_true")

    sp = sub.add_parser("sieve", help="prime table statistics")
    sp.add_argument("--limit", type=integer, required=True)
    sp.add_argument("--x", type=integer, action="append", help="also report pi(x); repeatable")
    common(sp)

    sp = sub.add_parser("eval", help="mu, Lambda and phi at n")
    sp.add_argument("--n", type=integer, required=True)
    common(sp)

    sp = sub.add_parser("sum", help="one finite sum")
    sp.add_argument("op", choices=SUM_OPS)
    op_flags(sp)
    common(sp)

    sp = sub.add_parser("scan", help="a sum at every point of a geometric grid, as CSV")
    sp.add_argument("op", choices=sorted(sums.SCANS))
    sp.add_argument("--grid", help="lo:hi:ratio")
    op_flags(sp)
    common(sp)

    sp = sub.add_parser("fit", help="least-squares model fit to a trace CSV")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--model", choices=sorted(MODELS), required=True)
    sp.add_argument("--window", help="lo:hi (default 1e3:)")
    sp.add_argument("--plot", action="store_true", help="also write a .plot script next to the output")
    common(sp)

    sp = sub.add_parser("plot", help="write a plot script for a trace and model fit")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--model", choices=sorted(MODELS), required=True)
    sp.add_argument("--window")
    common(sp)

    sp = sub.add_parser("audit", help="run the claim registry")
    sp.add_argument("--limit", type=integer, default=AuditConfig.limit)
    sp.add_argument("--format", choices=FORMATS, default="json")
    sp.add_argument("--claims", help="comma-separated claim ids (default: all)")
    sp.add_argument("--exclude", help="comma-separated claim ids to skip")
    common(sp)
    return p


def _ids(text: str | None):
    if text is None:
        return None
    ids = tuple(t.strip() for t in text.split(",") if t.strip())
    unknown = [i for i in ids if i not in REGISTRY]
    if unknown:
        raise UsageError(f"unknown claim ids {unknown}; registered: {', '.join(REGISTRY)}")
    return ids


def _plot_path(args) -> Path:
    base = Path(args.out) if args.out else Path(args.trace)
    return base.with_suffix(".plot")


def dispatch(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    v = args.verb
    if v == "sieve":
        T = _table(args.limit, args)
        lines = [f"limit={args.limit}", f"pi={prime_count(T, args.limit)}"]
        for x in args.x or []:
            if x > args.limit:
                raise UsageError(f"--x {x} exceeds --limit {args.limit}")
            lines.append(f"pi({x})={prime_count(T, x)}")
        _emit(args, "\n".join(lines) + "\n")
    elif v == "eval":
        r = evaluate(args.n)
        _emit(args, f"mu={r.mu} lambda={fmt(r.lambda_)} phi={r.phi}\n")
    elif v == "sum":
        _emit(args, _value_text(_sum_value(args)))
    elif v == "scan":
        _emit(args, _scan_trace(args).to_csv())
    elif v in ("fit", "plot"):
        tr = _read_trace(args.trace)
        res = fit(tr, args.model, _window(args.window))
        if v == "fit":
            _emit(args, json.dumps(res.to_dict(), allow_nan=False) + "\n")
        if v == "plot" or args.plot:
            path = _plot_path(args) if v == "fit" or not args.out else Path(args.out)
            path.write_text(plot_script(args.trace, res))
            if v == "plot":
                print(path)
    elif v == "audit":
        cfg = AuditConfig(limit=args.limit, claims=_ids(args.claims), exclude=_ids(args.exclude) or (),
                          workers=args.workers)
        report = run_all(cfg)
        _emit(args, render(report, args.format))
        if report.exact_failures:
            print(f"exact invariant failed: {', '.join(report.exact_failures)}", file=sys.stderr)
            return EXIT_INVARIANT
    return EXIT_OK


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"primepairs: warning: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            warnings.showwarning = _show_warning
            return dispatch(argv)
    except UsageError as e:  # RangeError included
        print(f"primepairs: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
