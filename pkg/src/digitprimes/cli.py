"""Batch command line for the digitprimes computations.

Every subcommand writes one CSV or JSON report (stdout unless ``--out``) and a
one-line summary on stderr.  Output depends only on the flags; ``--threads``
and ``--out`` never change the bytes written.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import digits, fourier, moments, quadratic, sieve
from .report import emit, render_csv, render_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# flags that must not leak into the provenance line
_SILENT = {"out", "threads", "command", "func"}


class UsageError(ValueError):
    pass


def _digits(text):
    try:
        return digits.ExcludedDigits.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _theta(text):
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad theta {text!r}: {exc}")


def _int_list(text):
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _num(text):
    # accept 1e6 style integers
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(v)


def _flags(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _SILENT or v is None:
            continue
        if isinstance(v, digits.ExcludedDigits):
            v = v.label()
        elif isinstance(v, list):
            v = ":".join(str(i) for i in v)
        out[k] = v
    out["command"] = args.command
    return out


def _write(args, fields=None, rows=None, obj=None):
    flags = _flags(args)
    if args.format == "json":
        payload = obj if obj is not None else {"rows": list(rows)}
        text = render_json(payload, flags)
    else:
        if fields is None:
            fields = sorted(k for k in obj if not isinstance(obj[k], (dict, list)))
            rows = [{k: obj[k] for k in fields}]
        text = render_csv(fields, rows, flags)
    emit(text, args.out)


def _summary(msg: str):
    print(msg, file=sys.stderr)


# subcommands ----------------------------------------------------------------

def cmd_enumerate(args):
    conv = digits.DigitConvention(args.convention)
    k = args.k if conv is digits.PADDED else None
    if conv is digits.PADDED and k is None:
        raise UsageError("--k is required with --convention padded")
    vals = list(digits.enumerate_members(args.limit, args.B, conv, k=k))
    if args.format == "txt":
        emit("".join(f"{v}\n" for v in vals), args.out)
    else:
        _write(args, ("n",), ({"n": v} for v in vals), {"members": vals, "count": len(vals)})
    _summary(f"enumerate: {len(vals)} members <= {args.limit} avoiding {{{args.B.label()}}}")
    return EXIT_OK


def cmd_fourier(args):
    out = {"B": args.B.label(), "k": args.k, "theta": str(args.theta)}
    if args.method in ("product", "both"):
        out["product"] = fourier.eval_product(args.k, args.B, args.theta).magnitude
    if args.method in ("direct", "both"):
        out["direct"] = fourier.eval_direct(args.k, args.B, args.theta).magnitude
    _write(args, obj=out)
    val = out.get("product", out.get("direct"))
    _summary(f"fourier: F_10^{args.k}({args.theta}) = {val!r}")
    return EXIT_OK


def cmd_scan(args):
    if (args.q is None) == (args.Q is None):
        raise UsageError("give exactly one of --q or --Q")
    if args.q is not None:
        rep = fourier.scan_single_modulus(args.k, args.B, args.q, args.grid)
    else:
        rep = fourier.scan_farey(args.k, args.B, args.Q, args.grid)
    _write(args, fourier.ScanReport.CSV_FIELDS, [rep.csv_row()], dict(rep.csv_row(), kind=rep.kind,
           margin=rep.margin, argmax_beta=rep.argmax_beta))
    _summary(f"scan[{rep.kind}]: measured {rep.measured:.6g}, reference {rep.reference:.6g}, "
             f"ratio {rep.ratio:.4g}, grid margin {rep.margin:.3g}")
    return EXIT_OK


def cmd_eigen(args):
    if args.t < 0:
        raise UsageError("--t must be nonnegative")
    threshold = args.threshold if args.threshold is not None else moments.threshold_for(args.d)
    certs = moments.certify_all(args.d, args.J, args.t, threshold, args.grid, args.window, args.threads)
    rows = [c.csv_row() for c in certs]
    _write(args, moments.EigenCertificate.CSV_FIELDS, rows, {"certificates": rows})
    passed = sum(c.verdict == "pass" for c in certs)
    worst = max(certs, key=lambda c: c.lambda_upper)
    ok = passed == len(certs)
    _summary(f"eigen-certify d={args.d} J={args.J}: {passed}/{len(certs)} pass "
             f"(worst B={{{worst.B}}} upper={worst.lambda_upper:.6f} vs {threshold:.6f}) "
             f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_constants(args):
    sc = quadratic.singular_constants(args.B, args.pmax)
    obj = sc.to_json()
    obj.pop("schema", None)
    obj["B"] = args.B.label()
    _write(args, obj=obj)
    _summary(f"constants: C = {sc.C!r} (primes <= {args.pmax}), kappa = {sc.kappa}")
    return EXIT_OK


def cmd_rho(args):
    if args.D < 1 or args.ell < 1:
        raise UsageError("--D and --ell must be positive")
    plain = quadratic.rho_table(args.D)
    shifted = quadratic.rho_ell_table(args.ell, args.D, plain)
    rows = [{"d": d, "rho": int(plain[d]), "rho_ell": int(shifted[d])} for d in range(1, args.D + 1)]
    obj = {"ell": args.ell, "rows": rows}
    if args.V is not None:
        obj["mobius_rho_partial_sum"] = quadratic.mobius_rho_partial_sum(args.ell, args.V)
    _write(args, ("d", "rho", "rho_ell"), rows, obj)
    _summary(f"rho: ell={args.ell}, d <= {args.D}")
    return EXIT_OK


def _run(args):
    return sieve.SieveRun(args.x, args.P, args.B, threads=args.threads)


def cmd_sieve_verify(args):
    res = sieve.verify_main_theorem(_run(args), args.pmax)
    obj = res.to_json()
    obj.pop("schema", None)
    _write(args, obj=obj)
    _summary(f"sieve-verify: S/main = {res.ratio:.6f} at x={args.x}, P={args.P}, "
             f"B={{{args.B.label()}}} (theorem_mode={res.theorem_mode})")
    return EXIT_OK


def cmd_typeI(args):
    run = _run(args)
    D_values = sorted(set(args.D))
    fit = sieve.type_one_fit(run, D_values)
    rows = [{"x": run.x, "D": D, "R": repr(R), "scale": repr(sieve.type_one_scale(run.x, D, run.B)),
             "c": repr(c)} for D, R, c in zip(fit.D_values, fit.R_values, fit.constants)]
    _write(args, ("x", "D", "R", "scale", "c"), rows,
           {"rows": rows, "fitted_c": fit.fitted_c, "spread": fit.spread})
    _summary(f"typeI: fitted c = {fit.fitted_c:.4g}, spread {fit.spread:.3g} over D = {D_values}")
    return EXIT_OK


def cmd_vaughan(args):
    p = sieve.vaughan_decompose(_run(args), args.U, args.V)
    obj = {"small": p.small, "mu_log": p.mu_log, "triple": p.triple, "bilinear": p.bilinear,
           "sum": p.total, "S": p.S, "residual": p.residual}
    _write(args, obj=obj)
    _summary(f"vaughan: relative residual {p.residual:.3e}")
    return EXIT_OK


# parser ----------------------------------------------------------------------

def _fmt(s, default):
    s.add_argument("--format", choices=("csv", "json"), default=default)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="digitprimes", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common], help="list digit-restricted integers")
    s.add_argument("--B", type=_digits, required=True)
    s.add_argument("--limit", type=_num, required=True)
    s.add_argument("--convention", choices=[c.value for c in digits.DigitConvention], default="genuine")
    s.add_argument("--k", type=int)
    s.add_argument("--format", choices=("txt", "csv", "json"), default="txt")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("fourier", parents=[common], help="evaluate F_{10^k}(theta)")
    s.add_argument("--B", type=_digits, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--theta", type=_theta, required=True)
    s.add_argument("--method", choices=("product", "direct", "both"), default="product")
    _fmt(s, "json")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("scan", parents=[common], help="large-sieve scans at one modulus or over Farey fractions")
    s.add_argument("--B", type=_digits, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--q", type=int)
    s.add_argument("--Q", type=int)
    s.add_argument("--grid", type=int, default=256)
    _fmt(s, "csv")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("eigen-certify", parents=[common], help="bound transfer-matrix Perron roots")
    s.add_argument("--d", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--J", type=int, choices=moments.SUPPORTED_J, default=2)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=moments.DEFAULT_GRID)
    s.add_argument("--threshold", type=float)
    s.add_argument("--window", choices=moments.WINDOWS, default="symmetric")
    _fmt(s, "csv")
    s.set_defaults(func=cmd_eigen)

    s = sub.add_parser("constants", parents=[common], help="singular constants of the main term")
    s.add_argument("--B", type=_digits, required=True)
    s.add_argument("--pmax", type=_num, default=10**6)
    _fmt(s, "json")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("rho", parents=[common], help="root counts of nu^2 + l^2 modulo d")
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--D", type=_num, required=True)
    s.add_argument("--V", type=_num)
    _fmt(s, "csv")
    s.set_defaults(func=cmd_rho)

    for name, func, helptext in (("sieve-verify", cmd_sieve_verify, "S(x) against the main term"),
                                 ("typeI", cmd_typeI, "Type I remainders R(x, D)"),
                                 ("vaughan", cmd_vaughan, "Vaughan decomposition of S(x)")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--B", type=_digits, required=True)
        s.add_argument("--x", type=_num, required=True)
        s.add_argument("--P", type=int, required=True)
        s.set_defaults(func=func)
        if name == "sieve-verify":
            s.add_argument("--pmax", type=_num, default=10**6)
            _fmt(s, "json")
        elif name == "typeI":
            s.add_argument("--D", type=_int_list, required=True, help="comma-separated cutoffs")
            _fmt(s, "csv")
        else:
            s.add_argument("--U", type=_num, required=True)
            s.add_argument("--V", type=_num, required=True)
            _fmt(s, "json")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
