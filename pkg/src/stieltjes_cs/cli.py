"""Command-line front end: verification runs emitted as CSV or JSON.

Exit status: 0 when the run passes, 2 when a check exceeds its tolerance or
a quadrature fails to converge, 1 for usage and configuration errors.

The default ``--rel-tol`` can be overridden with ``STIELTJES_CS_REL_TOL``.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .errors import AccuracyError, RangeError, StieltjesError
from .moments import (
    QDeformation,
    QuadratureConfig,
    log_factorials,
    moment_exact_log,
    verify_moments,
    weight_laplace,
    weight_mellin_barnes,
)
from .quantization import (
    RadialPolynomial,
    quantize,
    time_evolved_symbol,
    time_evolved_symbol_matrix,
    uncertainty_product,
    uncertainty_product_direct,
)

REL_TOL_ENV = "STIELTJES_CS_REL_TOL"
EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_q(text):
    """A literal ``q >= 1`` or the token ``e2`` for ``e**2``."""
    if text.strip().lower() == "e2":
        return QDeformation.from_lambda(2.0)
    try:
        return QDeformation(float(text))
    except (ValueError, StieltjesError) as exc:
        raise argparse.ArgumentTypeError(f"invalid q {text!r}: {exc}") from None


def parse_grid(text):
    """``lo:hi:points`` with ``0 <= lo < hi`` and ``points >= 2``."""
    try:
        lo, hi, points = text.split(":")
        lo, hi, points = float(lo), float(hi), int(points)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:points, got {text!r}") from None
    if not (0 <= lo < hi) or points < 2:
        raise argparse.ArgumentTypeError(f"grid needs 0 <= lo < hi and points >= 2, got {text!r}")
    return lo, hi, points


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}") from None


def parse_monomial(text):
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"monomial must be 'a,b', got {text!r}") from None
    if a < 0 or b < 0:
        raise argparse.ArgumentTypeError("monomial exponents must be non-negative")
    return a, b


def _default_rel_tol():
    raw = os.environ.get(REL_TOL_ENV)
    if raw is None:
        return 1e-8
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{REL_TOL_ENV}={raw!r} is not a number") from None
    if not value > 0:
        raise UsageError(f"{REL_TOL_ENV} must be positive")
    return value


def build_parser():
    parser = _Parser(prog="stieltjes-cs", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=parse_q, required=True, help="deformation q >= 1, or 'e2'")
    common.add_argument("--rel-tol", type=float, default=None, help=f"tolerance (env {REL_TOL_ENV})")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default="-", help="output file, '-' for stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-moments", parents=[common], help="numeric vs exact moments")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--method", choices=("quadrature", "fubini"), default="quadrature")

    p = sub.add_parser("weight", parents=[common], help="weight on a t grid by both paths")
    p.add_argument("--grid", type=parse_grid, default=(0.1, 5.0, 50))
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")

    p = sub.add_parser("resolution", parents=[common], help="quantized 1 against the identity")
    p.add_argument("--n-trunc", type=int, default=8)

    p = sub.add_parser("quantize", parents=[common], help="matrix of a quantized polynomial")
    p.add_argument("--n-trunc", type=int, default=8)
    p.add_argument(
        "--monomial", type=parse_monomial, action="append",
        help="term zeta^a conj(zeta)^b as 'a,b' (repeatable; default 1,0)",
    )

    p = sub.add_parser("symbol-evolution", parents=[common], help="time-evolved lower symbol")
    p.add_argument("--zeta", type=parse_complex, default=1 + 0j)
    p.add_argument("--t-max", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=64)

    p = sub.add_parser("uncertainty", parents=[common], help="uncertainty product along a ray")
    p.add_argument("--grid", type=parse_grid, default=(0.0, 2.0, 11))
    p.add_argument("--angle", type=float, default=0.0, help="argument of zeta in radians")
    return parser


# -- commands ----------------------------------------------------------------


class _Partial(Exception):
    """Carries rows computed before a numerical failure."""

    def __init__(self, rows, cause):
        self.rows = rows
        self.cause = cause


def _grid_points(grid, spacing):
    lo, hi, points = grid
    if spacing == "log":
        if lo <= 0:
            raise UsageError("log spacing needs a positive lower bound")
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def run_verify_moments(args, q, cfg):
    if args.n_max < 0:
        raise UsageError("--n-max must be >= 0")
    if q.is_degenerate:
        raise UsageError("verify-moments needs q > 1 (at q = 1 the weight is exp(-t))")
    report = verify_moments(q, args.n_max, cfg, args.method)
    rows = [
        {"n": n, "numeric_log": num, "exact_log": ex, "discrepancy": d}
        for n, num, ex, d in zip(report.orders, report.numeric_log, report.exact_log, report.discrepancies)
    ]
    return rows, report.max_discrepancy, report.passed


def run_weight(args, q, cfg):
    t = _grid_points(args.grid, args.spacing)
    exact = np.exp(-t)
    if q.is_degenerate:
        laplace = mb = exact
    else:
        if np.any(t <= 0):
            raise UsageError("the Mellin-Barnes path needs t > 0")
        laplace = weight_laplace(t, q, cfg)
        mb = weight_mellin_barnes(t, q, cfg)
    rel = np.abs(laplace - mb) / laplace
    rows = [
        {
            "t": float(ti), "laplace": float(a), "mellin_barnes": float(b), "rel_diff": float(r),
            "exp_neg_t": float(e), "rel_dev_from_exp": float(abs(a - e) / e),
        }
        for ti, a, b, r, e in zip(t, laplace, mb, rel, exact)
    ]
    worst = float(np.max(rel))
    return rows, worst, bool(worst < cfg.rel_tol and np.all(laplace > 0))


def run_resolution(args, q, cfg):
    if args.n_trunc < 0:
        raise UsageError("--n-trunc must be >= 0")
    op = quantize(RadialPolynomial.constant(1.0), q, args.n_trunc, cfg)
    off = op - np.diag(np.diag(op))
    rows = [
        {"n": n, "diagonal": float(op[n, n].real), "deviation": float(abs(op[n, n] - 1.0))}
        for n in range(op.shape[0])
    ]
    worst = float(np.max(np.abs(op - np.eye(op.shape[0]))))
    return rows, worst, bool(worst < cfg.rel_tol and not np.any(off))


def run_quantize(args, q, cfg):
    if args.n_trunc < 0:
        raise UsageError("--n-trunc must be >= 0")
    monomials = args.monomial or [(1, 0)]
    f = RadialPolynomial(tuple((a, b, 1.0) for a, b in monomials))
    op = quantize(f, q, args.n_trunc, cfg)
    dim = op.shape[0]
    log_fact = log_factorials(q, dim - 1)
    expected = np.zeros_like(op)
    for a, b, _ in f.terms:
        for n in range(dim):
            m = n + b - a
            if 0 <= m < dim:
                expected[m, n] += math.exp(moment_exact_log(n + b, q) - 0.5 * (log_fact[m] + log_fact[n]))
    rows, worst = [], 0.0
    for m, n in zip(*np.nonzero(expected)):
        err = abs(op[m, n] - expected[m, n]) / abs(expected[m, n])
        worst = max(worst, err)
        rows.append({
            "row": int(m), "col": int(n), "re": float(op[m, n].real), "im": float(op[m, n].imag),
            "expected": float(expected[m, n].real), "rel_err": float(err),
        })
    stray = np.any(op[expected == 0])
    return rows, worst, bool(worst < cfg.rel_tol and not stray)


def run_symbol_evolution(args, q, cfg):
    if args.steps < 1 or not args.t_max > 0:
        raise UsageError("--steps must be >= 1 and --t-max > 0")
    zeta = args.zeta
    rows, worst = [], 0.0
    for t in np.linspace(0.0, args.t_max, args.steps + 1):
        try:
            series = time_evolved_symbol(zeta, t, q)
            matrix = time_evolved_symbol_matrix(zeta, t, q)
        except (AccuracyError, RangeError) as exc:
            exc.where.setdefault("t", float(t))
            raise _Partial(rows, exc) from exc
        row = {
            "t": float(t), "re": series.real, "im": series.imag,
            "matrix_re": matrix.real, "matrix_im": matrix.imag, "route_diff": abs(series - matrix),
        }
        worst = max(worst, row["route_diff"])
        if q.is_degenerate:
            row["closed_form_diff"] = abs(series - zeta * np.exp(-1j * t))
            worst = max(worst, row["closed_form_diff"])
        rows.append(row)
    return rows, worst, worst < cfg.rel_tol


def run_uncertainty(args, q, cfg):
    rows, worst = [], 0.0
    for r in _grid_points(args.grid, "linear"):
        zeta = complex(r * math.cos(args.angle), r * math.sin(args.angle))
        formula = uncertainty_product(zeta, q)
        direct = uncertainty_product_direct(zeta, q)
        diff = abs(formula - direct) / formula
        worst = max(worst, diff)
        rows.append({
            "zeta_re": zeta.real, "zeta_im": zeta.imag,
            "formula": formula, "direct": direct, "rel_diff": diff,
        })
    return rows, worst, worst < cfg.rel_tol


COMMANDS = {
    "verify-moments": run_verify_moments,
    "weight": run_weight,
    "resolution": run_resolution,
    "quantize": run_quantize,
    "symbol-evolution": run_symbol_evolution,
    "uncertainty": run_uncertainty,
}


# -- output ------------------------------------------------------------------


def _render(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    header = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_render(row.get(k, "")) for k in header])
    return buf.getvalue()


def render_json(payload):
    return json.dumps(payload, indent=2) + "\n"


def _write(text, path):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(argv=None):
    """Parse ``argv``, execute one command, write its records; return the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rel_tol = args.rel_tol if args.rel_tol is not None else _default_rel_tol()
        cfg = QuadratureConfig(rel_tol=rel_tol)
    except (UsageError, StieltjesError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    q = args.q
    payload = {"command": args.command, "q": q.q}
    try:
        rows, worst, passed = COMMANDS[args.command](args, q, cfg)
        code = EXIT_OK if passed else EXIT_FAILED
        payload.update(rows=rows, max_discrepancy=worst, **{"pass": bool(passed)})
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_Partial, AccuracyError, RangeError) as exc:
        rows = exc.rows if isinstance(exc, _Partial) else []
        cause = exc.cause if isinstance(exc, _Partial) else exc
        print(f"{parser.prog}: {cause}", file=sys.stderr)
        payload.update(rows=rows, max_discrepancy=None, error={"message": str(cause), **cause.where})
        payload["pass"] = False
        code = EXIT_FAILED
    except StieltjesError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.format == "json":
            _write(render_json(_jsonable(payload)), args.output)
        else:
            _write(render_csv(payload["rows"]), args.output)
    except OSError as exc:
        print(f"{parser.prog}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
