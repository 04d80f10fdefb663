"""Argument parsing and dispatch for the command-line front end."""

import argparse
import io
import logging
import re
import sys
from dataclasses import asdict
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from src.algorithms.casimir import energy_curve, energy_record, pfa_energy
from src.algorithms.characteristic import char_value
from src.algorithms.coefficients import fourier_coeffs, second_kind_coeffs
from src.algorithms.edge_fit import DEFAULT_FIT_RANGE, fit_edge_coefficients
from src.algorithms.mathieu import evaluate
from src.checks.suites import SUITE_NAMES, build_suite
from src.cli.complex_literal import format_complex, parse_complex, parse_orders
from src.cli.output import OutputRecord, read_curve_csv, render, write_curve_csv
from src.models.casimir_config import BoundaryCondition, CasimirConfig
from src.models.errors import DomainError, MathieuError
from src.models.function_id import FunctionClass, FunctionId, Parity, family_names

logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "csv")
DEFAULT_FORMATS = {
    "eval": "text",
    "table": "text",
    "check": "text",
    "casimir": "json",
    "curve": "csv",
    "fit": "json",
}

# options whose complex values may start with "-"
COMPLEX_OPTIONS = ("--q", "--arg")
_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")

# handler(args) -> (record, exit code)
Handler = Callable[[argparse.Namespace], Tuple[OutputRecord, int]]


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="mathieu-casimir",
        description="Mathieu functions of complex parameter and the strip-plane Casimir energy.",
        parents=[_common_options(top_level=True)],
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = [_common_options(top_level=False)]

    eval_parser = commands.add_parser("eval", parents=common, help="evaluate one function or characteristic value")
    eval_parser.add_argument("--function", required=True, choices=family_names() + ("charval",))
    eval_parser.add_argument("--order", type=_non_negative_int, required=True)
    eval_parser.add_argument("--q", type=parse_complex, required=True)
    eval_parser.add_argument("--arg", type=parse_complex, default=None)
    eval_parser.add_argument("--parity", choices=[parity.value for parity in Parity], default="even")
    eval_parser.add_argument("--derivative", action="store_true", help="also print the derivative in the argument")

    table_parser = commands.add_parser("table", parents=common, help="coefficient or characteristic-value tables")
    table_parser.add_argument("--kind", choices=("coeffs", "second", "charval"), default="coeffs")
    table_parser.add_argument("--parity", choices=[parity.value for parity in Parity], default="even")
    table_parser.add_argument("--order", type=_non_negative_int, default=0)
    table_parser.add_argument("--orders", type=parse_orders, default=None, help="a..b or a,b,c (charval only)")
    table_parser.add_argument("--q", type=parse_complex, required=True)

    check_parser = commands.add_parser("check", parents=common, help="run a diagnostic suite")
    check_parser.add_argument("--suite", choices=SUITE_NAMES, default="all")
    check_parser.add_argument("--orders", type=parse_orders, default=parse_orders("0..4"))
    check_parser.add_argument("--q", type=parse_complex, required=True)

    casimir_parser = commands.add_parser("casimir", parents=common, help="energy per length at one height")
    _add_geometry_arguments(casimir_parser)
    casimir_parser.add_argument("--H", type=_positive_float, required=True)

    curve_parser = commands.add_parser("curve", parents=common, help="energy curve over a range of heights")
    _add_geometry_arguments(curve_parser)
    curve_parser.add_argument("--H-min", type=_positive_float, required=True)
    curve_parser.add_argument("--H-max", type=_positive_float, required=True)
    curve_parser.add_argument("--points", type=_positive_int, default=12)
    curve_parser.add_argument("--out", default=None, help="write the curve CSV here instead of stdout")

    fit_parser = commands.add_parser("fit", parents=common, help="fit beta and gamma to a curve CSV")
    fit_parser.add_argument("--in", dest="input", required=True, help="curve CSV path, or - for stdin")
    fit_parser.add_argument("--fit-min", type=_positive_float, default=DEFAULT_FIT_RANGE[0], help="lowest 2d/H")
    fit_parser.add_argument("--fit-max", type=_positive_float, default=DEFAULT_FIT_RANGE[1], help="highest 2d/H")
    fit_parser.add_argument("--H-max-fit", type=_positive_float, default=None)
    fit_parser.add_argument("--fixed-intercept", action="store_true", help="fix the ratio intercept to 1")
    return parser


def _common_options(top_level: bool) -> argparse.ArgumentParser:
    """Options accepted both before and after the subcommand name.

    Subcommand copies default to SUPPRESS: a value given before the
    subcommand is kept unless it is repeated after it.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=FORMATS,
        default=None if top_level else argparse.SUPPRESS,
        help="output format (default depends on command)",
    )
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=1 if top_level else argparse.SUPPRESS,
        help="worker processes for Casimir runs",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0 if top_level else argparse.SUPPRESS,
        help="more logging on stderr (repeatable)",
    )
    return common


def join_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite ``--q -1+0.5i`` as ``--q=-1+0.5i`` so argparse does not read the value as an option."""
    joined: List[str] = []
    index = 0
    while index < len(argv):
        token = argv[index]
        following = argv[index + 1] if index + 1 < len(argv) else None
        if token in COMPLEX_OPTIONS and following is not None and _NEGATIVE_VALUE.match(following):
            joined.append(f"{token}={following}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def run(argv: Optional[List[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    """Parse argv, run the command and write its output.

    Returns:
        0 on success, 1 on a library error or failed check, 2 on a usage error
    """
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    argv = join_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)

    _configure_logging(args.verbose, stderr)
    handler = _HANDLERS[args.command]
    try:
        record, code = handler(args)
    except MathieuError as e:
        stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1
    except OSError as e:
        stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1

    stdout.write(render(record, args.format or DEFAULT_FORMATS[args.command]))
    return code


def _configure_logging(verbosity: int, stream: TextIO) -> None:
    level = max(logging.DEBUG, logging.WARNING - 10 * verbosity)
    logging.basicConfig(stream=stream, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _cmd_eval(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    inputs = {
        "function": args.function,
        "order": args.order,
        "q": args.q,
        "arg": args.arg,
        "derivative": args.derivative,
    }
    if args.function == "charval":
        parity = Parity(args.parity)
        value = char_value(parity, args.order, args.q)
        inputs["parity"] = parity.value
        record = OutputRecord(
            command="eval",
            inputs=inputs,
            payload={"value": value.alpha},
            diagnostics={"matrix_dim": value.matrix_dim},
            text=format_complex(value.alpha),
        )
        return record, 0

    if args.arg is None:
        raise DomainError(f"--arg is required for {args.function}")
    function_id = FunctionId.from_name(args.function, args.order)
    result = evaluate(function_id, args.q, args.arg)
    q_table = -args.q if function_id.modified else args.q
    table = fourier_coeffs(function_id.parity, args.order, q_table)
    diagnostics = {
        "coefficient_terms": table.M + 1,
        "tail_ratio": table.tail_ratio(),
        "characteristic_value": table.alpha,
    }
    if function_id.function_class is FunctionClass.ANGULAR and args.arg.imag != 0:
        diagnostics["route"] = "radial series with joining factor"
    value = complex(result.value)
    payload = {"value": value}
    columns = ["value_re", "value_im"]
    row = [value.real, value.imag]
    lines = [format_complex(value)]
    if args.derivative:
        derivative = complex(result.derivative)
        payload["derivative"] = derivative
        columns += ["derivative_re", "derivative_im"]
        row += [derivative.real, derivative.imag]
        lines.append(format_complex(derivative))
    record = OutputRecord(
        command="eval",
        inputs=inputs,
        payload=payload,
        diagnostics=diagnostics,
        columns=columns,
        rows=[row],
        text="\n".join(lines),
    )
    return record, 0


def _cmd_table(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    parity = Parity(args.parity)
    inputs = {"kind": args.kind, "parity": parity.value, "q": args.q}
    if args.kind == "charval":
        orders = args.orders if args.orders is not None else [args.order]
        values = [(r, char_value(parity, r, args.q)) for r in orders if not (parity is Parity.ODD and r == 0)]
        inputs["orders"] = orders
        rows = [[r, value.alpha.real, value.alpha.imag] for r, value in values]
        payload = {"orders": [r for r, _ in values], "values": [value.alpha for _, value in values]}
        diagnostics = {"matrix_dims": [value.matrix_dim for _, value in values]}
        columns = ["r", "re", "im"]
    elif args.kind == "coeffs":
        table = fourier_coeffs(parity, args.order, args.q)
        inputs["order"] = args.order
        rows = [[int(n), c.real, c.imag] for n, c in zip(table.orders, table.coeffs)]
        payload = {"orders": table.orders, "coefficients": table.coeffs, "characteristic_value": table.alpha}
        diagnostics = {"terms": table.M + 1, "tail_ratio": table.tail_ratio(), "meet_index": table.meet_index}
        columns = ["n", "re", "im"]
    else:
        table = second_kind_coeffs(parity, args.order, args.q)
        inputs["order"] = args.order
        rows = [[int(n), c.real, c.imag] for n, c in zip(table.orders, table.coeffs)]
        payload = {
            "orders": table.orders,
            "coefficients": table.coeffs,
            "rho": table.rho,
            "scale": table.scale,
            "theta_weight": table.theta_weight,
        }
        diagnostics = {
            "terms": len(table.coeffs),
            "alpha_sums": table.alpha_sums,
            "literal_discrepancy": table.literal_discrepancy,
        }
        columns = ["n", "re", "im"]

    text = "\n".join(f"{row[0]} {format_complex(complex(row[1], row[2]))}" for row in rows)
    record = OutputRecord(
        command="table", inputs=inputs, payload=payload, diagnostics=diagnostics, columns=columns, rows=rows, text=text
    )
    return record, 0


def _cmd_check(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    manager = build_suite(args.suite, args.orders, args.q)
    results = manager.run_all()
    passed = all(results)
    lines = [
        f"{'PASS' if result else 'FAIL'} {result.check_name} max_deviation={result.max_deviation:.3e}"
        + (f" ({result.reason})" if result.reason else "")
        for result in results
    ]
    summary = f"{'PASS' if passed else 'FAIL'} {sum(map(bool, results))}/{len(results)}"
    worst = max((result.max_deviation for result in results), default=0.0)
    record = OutputRecord(
        command="check",
        inputs={"suite": args.suite, "orders": args.orders, "q": args.q},
        payload={"passed": passed, "max_deviation": worst, "results": [result.to_dict() for result in results]},
        diagnostics={"checks": len(results)},
        columns=["check", "status", "max_deviation", "tolerance", "reason"],
        rows=[[r.check_name, "PASS" if r else "FAIL", r.max_deviation, r.tolerance, r.reason] for r in results],
        text="\n".join(lines + [summary]),
    )
    return record, 0 if passed else 1


def _cmd_casimir(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    cfg = CasimirConfig(
        d=args.d,
        H=args.H,
        mu0=args.mu0,
        bc=BoundaryCondition.parse(args.bc),
        r_max=args.rmax,
        tol=args.tol,
        workers=args.threads,
        extrapolate=args.extrapolate,
    )
    result = energy_record(cfg)
    payload = {
        "energy_per_length": result.energy_per_length,
        "ratio_pfa": result.ratio_pfa,
        "est_error": result.est_error,
        "r_max_used": result.r_max_used,
        "parts": result.parts,
    }
    record = OutputRecord(
        command="casimir",
        inputs=_geometry_inputs(args, H=args.H),
        payload=payload,
        diagnostics={
            "pfa_energy": pfa_energy(cfg),
            "tol": cfg.tol,
            "quadrature": asdict(cfg.quad),
            "extrapolated": result.extrapolated,
        },
    )
    return record, 0


def _cmd_curve(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    if args.H_max < args.H_min:
        raise DomainError("--H-max must not be below --H-min")
    heights = np.linspace(args.H_min, args.H_max, args.points)
    bc = BoundaryCondition.parse(args.bc)
    curve = energy_curve(
        args.d,
        heights,
        bc=bc,
        mu0=args.mu0,
        r_max=args.rmax,
        tol=args.tol,
        workers=args.threads,
        extrapolate=args.extrapolate,
    )
    buffer = io.StringIO()
    write_curve_csv(curve, buffer)
    inputs = _geometry_inputs(args, H_min=args.H_min, H_max=args.H_max, points=args.points)
    payload = {
        "H": curve.heights(),
        "energy_per_length": [record.energy_per_length for record in curve.records],
        "ratio_pfa": curve.ratios(),
        "est_error": curve.errors(),
        "r_max_used": [record.r_max_used for record in curve.records],
    }
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(buffer.getvalue())
        payload["out"] = args.out
    record = OutputRecord(
        command="curve",
        inputs=inputs,
        payload=payload,
        diagnostics={"max_est_error": float(np.max(curve.errors()))},
        csv_text=buffer.getvalue() if args.out is None else None,
        text=buffer.getvalue() if args.out is None else f"wrote {len(curve)} points to {args.out}",
        columns=["out", "points"],
        rows=[[args.out, len(curve)]],
    )
    return record, 0


def _cmd_fit(args: argparse.Namespace) -> Tuple[OutputRecord, int]:
    if args.input == "-":
        curve = read_curve_csv(sys.stdin)
    else:
        with open(args.input, "r", encoding="utf-8") as handle:
            curve = read_curve_csv(handle)
    beta, gamma, report = fit_edge_coefficients(
        curve,
        fit_range=(args.fit_min, args.fit_max),
        intercept_free=not args.fixed_intercept,
        h_max=args.H_max_fit,
    )
    summary = report.to_dict()
    payload = {key: summary.pop(key) for key in ("beta", "gamma", "sigma_beta", "sigma_gamma", "intercept")}
    record = OutputRecord(
        command="fit",
        inputs={
            "in": args.input,
            "d": curve.d,
            "bc": curve.bc.value,
            "fit_range": [args.fit_min, args.fit_max],
            "H_max_fit": args.H_max_fit,
            "intercept_free": not args.fixed_intercept,
        },
        payload=payload,
        diagnostics=summary,
    )
    return record, 0


def _add_geometry_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", type=_positive_float, required=True, help="strip half-width")
    parser.add_argument("--bc", default="em", choices=("dirichlet", "neumann", "em", "electromagnetic"))
    parser.add_argument("--mu0", type=float, default=0.0)
    parser.add_argument("--rmax", type=_positive_int, default=None)
    parser.add_argument("--tol", type=_positive_float, default=1e-6)
    parser.add_argument(
        "--no-extrapolate",
        dest="extrapolate",
        action="store_false",
        help="report the energy at r_max instead of its limit in the channel cutoff",
    )


def _geometry_inputs(args: argparse.Namespace, **extra) -> Dict[str, object]:
    inputs = {
        "d": args.d,
        "bc": args.bc,
        "mu0": args.mu0,
        "rmax": args.rmax,
        "tol": args.tol,
        "extrapolate": args.extrapolate,
    }
    inputs.update(extra)
    return inputs


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got '{text}'")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got '{text}'")
    return value


_HANDLERS: Dict[str, Handler] = {
    "eval": _cmd_eval,
    "table": _cmd_table,
    "check": _cmd_check,
    "casimir": _cmd_casimir,
    "curve": _cmd_curve,
    "fit": _cmd_fit,
}
