"""Command-line front end.

Every subcommand writes JSON, CSV or (for curves) SVG to standard output or
``--output``.  Exit status: 0 success, 1 module error or failed
verification, 2 invalid input.  Module errors are reported on standard
error as ``{"error": code, "detail": ...}``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .basis_ops import CoefficientVector
from .deficiency import eigenvector_at, km_block_test
from .errors import GribovError
from .inverse_op import KernelSpec, apply_quadrature, nystrom_perron, right_inverse_residual
from .jacobi import ScalarJacobiSpec, sigma0_curve, truncated_spectrum
from .ortho_poly import KINDS, exact_poly, first_kind_poly, first_second_eval
from .output import to_csv, to_json
from .svg import line_plot

CURVE_COMMANDS = ("sigma0", "kernel-apply", "eigvec")


class UsageError(Exception):
    """Invalid input detected after argument parsing (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def thread_count() -> int:
    raw = os.environ.get("GRIBOV_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"GRIBOV_THREADS must be a positive integer, got {raw!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gribov", description="Spectral computations for the Gribov operator family.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv"), default="json"):
        p.add_argument("--format", choices=("json", "csv", "svg"), default=default)
        p.add_argument("--output", help="write here instead of standard output")
        p.set_defaults(formats=formats)
        return p

    p = common(sub.add_parser("spectrum", help="eigenvalues of the n-truncation"), default="csv")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=_positive(int), required=True)
    p.add_argument("--tol", type=_positive(float), default=1e-12)
    p.add_argument("--method", choices=("aberth", "dense"), default="aberth")

    p = common(sub.add_parser("sigma0", help="sigma0(mu) from truncations and/or the Nystrom Perron root"),
               formats=("json", "csv", "svg"), default="csv")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--mu", type=_float_list, required=True, help="comma-separated grid, e.g. 0.5,1,2")
    p.add_argument("--n", type=_positive(int), default=1024)
    p.add_argument("--method", choices=("matrix", "nystrom", "both"), default="matrix")
    p.add_argument("--L", type=_positive(float), default=12.0)
    p.add_argument("--nodes", type=_positive(int), default=400)
    p.add_argument("--tol", type=_positive(float), default=1e-8)

    p = common(sub.add_parser("kernel-apply", help="K_{mu,lam} psi sampled on [0, ymax]"),
               formats=("json", "csv", "svg"), default="csv")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="coefficient-vector JSON file in the u-basis")
    src.add_argument("--coeffs", type=_float_list, help="real u-basis coefficients from index 0")
    p.add_argument("--ymax", type=_positive(float), default=3.0)
    p.add_argument("--samples", type=_positive(int), default=31)
    p.add_argument("--L", type=_positive(float), default=12.0)

    p = common(sub.add_parser("inverse-check", help="right-inverse residual of K_{0,lam}"))
    p.add_argument("--nmax", type=_positive(int), default=200)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)

    p = common(sub.add_parser("deficiency", help="complete-indeterminacy test for H^{p,m}"))
    p.add_argument("--p", type=_positive(int), required=True)
    p.add_argument("--m", type=_positive(int), required=True)
    p.add_argument("--jmax", type=_positive(int), default=500)

    p = common(sub.add_parser("polys", help="polynomial families"))
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=_complex, help="evaluation point (first/second kind)")

    p = common(sub.add_parser("eigvec", help="eigenvector of H_I at xi"), formats=("json", "csv", "svg"))
    p.add_argument("--xi", type=_complex, required=True)
    p.add_argument("--n", dest="N", type=_positive(int), default=5000)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", action="append", help="check key or module name; repeatable")
    p.add_argument("--output")
    p.set_defaults(format="text", formats=("text",))
    return parser


# --- subcommands ------------------------------------------------------------------------

def _spectrum(a):
    res = truncated_spectrum(ScalarJacobiSpec(a.mu, a.lam, a.n), tol=a.tol, method=a.method)
    if a.format == "json":
        return to_json(res.to_json_obj())
    rows = [(z.real, z.imag, r) for z, r in zip(res.eigenvalues, res.residuals)]
    return to_csv(["re", "im", "residual"], rows)


def _sigma0(a):
    threads = thread_count()
    if any(not mu > 0 for mu in a.mu):
        raise UsageError("--mu values must be positive")
    rows, header = [], ["mu"]
    matrix = nystrom = None
    if a.method in ("matrix", "both"):
        matrix = sigma0_curve(a.lam, a.mu, a.n, tol=a.tol, threads=threads)
        header += ["sigma0_re", "sigma0_im", "residual"]
    if a.method in ("nystrom", "both"):
        specs = [KernelSpec(mu, a.lam, a.L, a.nodes) for mu in a.mu]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                nystrom = list(pool.map(nystrom_perron, specs))
        else:
            nystrom = [nystrom_perron(s) for s in specs]
        header += ["nystrom_sigma0", "iterations"]
        if matrix is not None:
            header.append("rel_diff")
    for k, mu in enumerate(a.mu):
        row = [mu]
        if matrix is not None:
            pt = matrix[k]
            row += [pt.sigma0.real, pt.sigma0.imag, pt.residual]
        if nystrom is not None:
            row += [nystrom[k].sigma0, nystrom[k].iterations]
            if matrix is not None:
                row.append(abs(nystrom[k].sigma0 - matrix[k].sigma0.real) / abs(matrix[k].sigma0.real))
        rows.append(row)
    if a.format == "csv":
        return to_csv(header, rows)
    if a.format == "json":
        return to_json({"lambda": a.lam, "n": a.n, "columns": header, "rows": rows})
    series = {}
    if matrix is not None:
        series[f"truncation n={a.n}"] = [pt.sigma0.real for pt in matrix]
    if nystrom is not None:
        series[f"Nystrom {a.nodes} nodes"] = [r.sigma0 for r in nystrom]
    return line_plot(a.mu, series, title=f"sigma0(mu), lambda={a.lam:g}", xlabel="mu", ylabel="sigma0")


def _load_vector(a):
    if a.coeffs is not None:
        return CoefficientVector("u", 0, np.array(a.coeffs))
    try:
        with open(a.input, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {a.input}: {exc}") from exc
    try:
        v = CoefficientVector.from_json(obj)
    except GribovError as exc:
        raise UsageError(str(exc)) from exc
    if v.basis != "u":
        raise UsageError("kernel-apply expects a u-basis vector")
    return v


def _kernel_apply(a):
    v = _load_vector(a)
    spec = KernelSpec(a.mu, a.lam, a.L)
    ys = np.linspace(0.0, a.ymax, a.samples)
    vals = np.asarray(apply_quadrature(spec, lambda s: v.evaluate(s), ys), dtype=complex)
    is_real = not np.any(v.entries.imag)
    if a.format == "svg":
        return line_plot(ys, {"K psi": vals.real}, title=f"K psi, mu={a.mu:g}, lambda={a.lam:g}",
                         xlabel="y", ylabel="value")
    if a.format == "json":
        obj = {"mu": a.mu, "lambda": a.lam, "y": ys, "value": vals.real}
        if not is_real:
            obj["value_im"] = vals.imag
        return to_json(obj)
    if is_real:
        return to_csv(["y", "value"], zip(ys, vals.real))
    return to_csv(["y", "value", "value_im"], zip(ys, vals.real, vals.imag))


def _inverse_check(a):
    if a.nmax < 2:
        raise UsageError("--nmax must be at least 2")
    r = right_inverse_residual(a.lam, a.nmax)
    if a.format == "csv":
        return to_csv(["lambda", "nmax", "max_residual"], [(a.lam, a.nmax, r)])
    return to_json({"max_residual": r, "lambda": a.lam, "nmax": a.nmax})


def _deficiency(a):
    rep = km_block_test(a.p, a.m, a.jmax)
    obj = rep.to_json_obj()
    if a.format == "csv":
        return to_csv(list(obj), [["" if v is None else v for v in obj.values()]])
    return to_json(obj)


def _polys(a):
    if a.kind in ("first", "second"):
        if a.n < 1:
            raise UsageError("--n must be at least 1")
        if a.x is None:
            coeffs = list(first_kind_poly(a.n).coeffs) if a.kind == "first" else None
            if coeffs is None:
                raise UsageError("--x is required for the second kind")
            obj = {"kind": a.kind, "n": a.n, "coeffs": coeffs}
        else:
            P, Q = first_second_eval(a.n, a.x)
            obj = {"x_re": a.x.real, "x_im": a.x.imag, "P": [P.real, P.imag], "Q": [Q.real, Q.imag]}
    else:
        poly = exact_poly(a.kind, a.n)
        obj = {"kind": a.kind, "n": a.n, "coeffs": [Fraction(c) for c in poly.coeffs]}
    if a.format == "csv":
        if "coeffs" in obj:
            rows = [(k, str(c)) for k, c in enumerate(obj["coeffs"])]
            return to_csv(["power", "coefficient"], rows)
        return to_csv(["x_re", "x_im", "P_re", "P_im", "Q_re", "Q_im"],
                      [(a.x.real, a.x.imag, *obj["P"], *obj["Q"])])
    return to_json(obj)


def _eigvec(a):
    if a.N < 10:
        raise UsageError("--n must be at least 10")
    tail = eigenvector_at(a.xi, a.N)
    n = np.arange(1, a.N + 1)
    if a.format == "csv":
        return to_csv(["n", "re", "im", "partial_l2"], zip(n, tail.values.real, tail.values.imag, tail.partial_l2))
    if a.format == "svg":
        return line_plot(n, {"|u_n| sqrt(n) ln n": np.abs(tail.values) * np.sqrt(n) * np.log(n)},
                         title=f"eigenvector at xi={a.xi}", xlabel="n", ylabel="scaled |u_n|")
    obj = {
        "xi_re": a.xi.real, "xi_im": a.xi.imag, "N": a.N,
        "M": tail.bound_constant, "argmax_n": tail.bound_index,
        "l2_sum": float(tail.partial_l2[-1]),
        "cauchy_ratio": tail.cauchy_ratio(a.N // 2) if a.N >= 4 else None,
    }
    return to_json(obj)


def _verify(a):
    from .verify import run_checks

    try:
        results = run_checks(a.only)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    text = "".join(r.line() + "\n" for r in results)
    failed = [r.key for r in results if not r.ok]
    text += f"{len(results) - len(failed)}/{len(results)} checks passed\n"
    return text, (1 if failed else 0)


HANDLERS = {
    "spectrum": _spectrum,
    "sigma0": _sigma0,
    "kernel-apply": _kernel_apply,
    "inverse-check": _inverse_check,
    "deficiency": _deficiency,
    "polys": _polys,
    "eigvec": _eigvec,
    "verify": _verify,
}


def _error_json(code, detail):
    return json.dumps({"error": code, "detail": detail}) + "\n"


def _execute(argv):
    target = None
    try:
        args = build_parser().parse_args(argv)
        if args.format not in args.formats:
            raise UsageError(f"--format {args.format} is not available for {args.command}")
        target = args.output
        out = HANDLERS[args.command](args)
    except UsageError as exc:
        return 2, "", _error_json("invalid_input", str(exc)), None
    except GribovError as exc:
        return 1, "", _error_json(exc.code, exc.detail or str(exc)), None
    code = 0
    if isinstance(out, tuple):
        out, code = out
    return code, out, "", target


def render(argv) -> tuple:
    """Run one invocation; returns ``(exit_code, stdout_text, stderr_text)`` and writes no files."""
    return _execute(argv)[:3]


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, out, err, target = _execute(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if err:
        sys.stderr.write(err)
    if out:
        if target:
            try:
                with open(target, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(out)
            except OSError as exc:
                sys.stderr.write(_error_json("invalid_input", f"cannot write {target}: {exc}"))
                return 2
        else:
            sys.stdout.write(out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
