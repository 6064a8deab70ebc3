#!/usr/bin/env python3
"""
Command line front end for the lattice heat-kernel toolkit.

    heatkernel kernel --s1 0 --s2 0 --eps 1 --t 0 --J 0
    heatkernel kernel --s1 0 1 2 --s2 0 --t 0.5 2 8 --format csv --workers 4
    heatkernel expansion --kind u --s1 3 --s2 1 --t 20 40 80 --N 2
    heatkernel omega --r 10 20 40 --psi 0 0.3927
    heatkernel constants --format json
    heatkernel verify --suite all

Results go to stdout in a fixed format; log messages and the verification
summary go to stderr. Exit status: 0 success, 1 computation error,
2 verification failure, 3 usage error.
"""

import argparse
import itertools
import logging
import math
import sys

from colorama import Fore, Style, init
from rich.console import Console
from rich.table import Table

from constants import s0_quadrature
from errors import FitError, HeatKernelError
from expansion import SUPPORTED_J, SUPPORTED_N, u_expansion, v_expansion_offorigin, v_expansion_origin
from kernel import KERNEL_COLUMNS, KernelQuery, LatticePoint, route_rows
from omega import omega_leading, omega_exact
from settings import get_settings
from verify import (PASS, SUITES, DashboardConfig, bound_dashboard, dumps_json, fit_decay, format_float,
                    write_report, write_rows)

__version__ = "1.0.0"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_USAGE = 3

EXPANSION_COLUMNS = ("kind", "s1", "s2", "eps", "t", "J", "N", "value", "exact", "residual", "bound_check")
OMEGA_COLUMNS = ("s1", "s2", "r", "psi", "i1", "i3", "i4", "omega", "leading", "scaled_residual")

logger = logging.getLogger("heatkernel")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage problems mapped to exit status 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class ColorFormatter(logging.Formatter):
    COLORS = {
        logging.DEBUG: Fore.BLUE,
        logging.INFO: Fore.CYAN,
        logging.WARNING: Fore.YELLOW,
        logging.ERROR: Fore.RED,
        logging.CRITICAL: Fore.RED + Style.BRIGHT,
    }

    def format(self, record):
        message = super().format(record)
        return f"{self.COLORS.get(record.levelno, '')}{message}{Style.RESET_ALL}"


def setup_logging(level):
    init()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ColorFormatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def emit_json(data, stream=None):
    (stream or sys.stdout).write(dumps_json(data) + "\n")


# --- validation -----------------------------------------------------------------

def require(condition, message):
    if not condition:
        raise UsageError(message)


def check_common(args):
    require(args.eps > 0 and math.isfinite(args.eps), f"--eps must be positive, got {args.eps}")


# --- subcommands ----------------------------------------------------------------

def cmd_kernel(args):
    check_common(args)
    require(all(t >= 0 for t in args.t), "--t values must be non-negative")
    require(args.J >= 0, f"--J must be non-negative, got {args.J}")
    require(not (0 in args.t and args.J > 0), "time derivatives need --t > 0")
    require(args.workers is None or args.workers >= 1, f"--workers must be positive, got {args.workers}")
    queries = [KernelQuery(LatticePoint(s1, s2, args.eps), t, args.J)
               for s1, s2, t in itertools.product(args.s1, args.s2, args.t)]
    rows = route_rows(queries, args.workers)
    if args.format == "text":
        for row in rows:
            print(format_float(row["value_product"]))
    elif args.format == "csv":
        write_rows(sys.stdout, KERNEL_COLUMNS, rows)
    else:
        emit_json({"rows": rows})
    return EXIT_OK


def cmd_expansion(args):
    check_common(args)
    require(args.N in SUPPORTED_N, f"--N must be one of {SUPPORTED_N}")
    require(all(t > 0 for t in args.t), "--t values must be positive")
    t0 = args.t0 if args.t0 is not None else get_settings().t0
    require(t0 > 0, f"--t0 must be positive, got {t0}")
    floor = t0 * args.eps ** 2
    require(all(t >= floor for t in args.t), f"--t values must be at least t0*eps^2 = {format_float(floor)}")
    point = LatticePoint(args.s1, args.s2, args.eps)
    reports = []
    for t in args.t:
        if args.kind == "u":
            require(args.J in SUPPORTED_J, f"--J must be one of {SUPPORTED_J}")
            reports.append(u_expansion(KernelQuery(point, t, args.J), args.N, t0=t0))
        elif point.is_origin:
            reports.append(v_expansion_origin(t, args.eps, args.N, t0=t0))
        else:
            reports.append(v_expansion_offorigin(point, t, args.N, t0=t0))
    rows = [r.to_row() for r in reports]
    if args.format == "csv":
        write_rows(sys.stdout, EXPANSION_COLUMNS, rows)
        return EXIT_OK
    data = {"rows": rows}
    if len(reports) >= 2:
        try:
            fit = fit_decay([(r.t, abs(r.residual)) for r in reports])
            data["fit"] = {"slope": fit.slope, "prefactor": fit.prefactor, "r_squared": fit.r_squared,
                           "expected_slope": -float(reports[0].order)}
        except FitError as exc:
            logger.warning("no decay fit: %s", exc)
    emit_json(data)
    return EXIT_OK


def cmd_omega(args):
    require(all(r >= 1 for r in args.r), "--r values must be at least 1")
    rows = []
    fits = {}
    for psi in args.psi:
        samples = []
        for r in args.r:
            point = LatticePoint(int(round(r * math.cos(psi))), int(round(r * math.sin(psi))))
            split = omega_exact(point)
            leading = omega_leading(split.r, split.psi)
            gap = abs(split.omega - leading)
            samples.append((split.r, gap))
            rows.append({"s1": point.s1, "s2": point.s2, "r": split.r, "psi": split.psi, "i1": split.i1,
                         "i3": split.i3, "i4": split.i4, "omega": split.omega, "leading": leading,
                         "scaled_residual": split.r ** 2.5 * gap})
        try:
            fit = fit_decay(samples)
            fits[format_float(psi)] = {"slope": fit.slope, "prefactor": fit.prefactor, "r_squared": fit.r_squared}
        except FitError as exc:
            logger.info("psi=%s: no far-field fit (%s)", psi, exc)
    if args.format == "csv":
        write_rows(sys.stdout, OMEGA_COLUMNS, rows)
    else:
        emit_json({"rows": rows, "fits": fits})
    return EXIT_OK


def cmd_constants(args):
    breakdown = s0_quadrature()
    if args.format == "json":
        emit_json(breakdown.to_dict())
    else:
        for key, value in sorted(breakdown.to_dict().items()):
            print(f"{key} {value if isinstance(value, str) else format_float(value)}")
    return EXIT_OK


def print_summary(report):
    table = Table(title="Bound dashboard")
    table.add_column("Suite", style="cyan")
    table.add_column("Bound")
    table.add_column("Constant", justify="right")
    table.add_column("Slope", justify="right")
    table.add_column("Verdict")
    for result in report.results:
        colour = "green" if result.verdict == PASS else "red"
        slope = "" if result.slope is None else f"{result.slope:.3f}"
        table.add_row(result.name, result.bound, f"{result.constant:.4g}", slope,
                      f"[{colour}]{result.verdict}[/{colour}]")
    Console(stderr=True).print(table)


def cmd_verify(args):
    if args.list:
        for name in sorted(SUITES):
            print(name)
        return EXIT_OK
    unknown = sorted(set(args.suite) - set(SUITES) - {"all"})
    require(not unknown, f"unknown suite(s): {', '.join(unknown)}")
    report = bound_dashboard(DashboardConfig(suites=tuple(args.suite)))
    path = write_report(report, args.output_dir or get_settings().output_dir)
    if not args.quiet:
        print_summary(report)
    print(path)
    return EXIT_OK if report.verdict == PASS else EXIT_FAIL


# --- parser ---------------------------------------------------------------------

def add_site(parser, many=False):
    nargs = "+" if many else None
    parser.add_argument("--s1", type=int, nargs=nargs, required=True, help="first lattice index")
    parser.add_argument("--s2", type=int, nargs=nargs, required=True, help="second lattice index")
    parser.add_argument("--eps", type=float, default=1.0, help="lattice spacing (default 1)")


def build_parser():
    parser = ArgumentParser(prog="heatkernel", description="Lattice heat kernel and its large-time expansion")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
                        help="override HEATKERNEL_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    sub.required = True

    kernel = sub.add_parser("kernel", help="d^J u_eps/dt^J by both routes over s1 x s2 x t")
    add_site(kernel, many=True)
    kernel.add_argument("--t", type=float, nargs="+", required=True, help="one or more times")
    kernel.add_argument("--J", type=int, default=0, help="time-derivative order")
    kernel.add_argument("--workers", type=int, default=None, help="threads for a sweep (default serial)")
    kernel.add_argument("--format", choices=("text", "csv", "json"), default="text")
    kernel.set_defaults(handler=cmd_kernel)

    expansion = sub.add_parser("expansion", help="truncated expansion against the exact kernel")
    add_site(expansion)
    expansion.add_argument("--kind", choices=("u", "v"), default="u")
    expansion.add_argument("--t", type=float, nargs="+", required=True, help="one or more times")
    expansion.add_argument("--J", type=int, default=0)
    expansion.add_argument("--N", type=int, default=1, help="number of expansion terms")
    expansion.add_argument("--t0", type=float, default=None, help="regime constant (default HEATKERNEL_T0)")
    expansion.add_argument("--format", choices=("csv", "json"), default="csv")
    expansion.set_defaults(handler=cmd_expansion)

    omega = sub.add_parser("omega", help="Omega and its far-field form along rays")
    omega.add_argument("--r", type=float, nargs="+", required=True, help="radii")
    omega.add_argument("--psi", type=float, nargs="+", default=[0.0], help="angles in radians")
    omega.add_argument("--format", choices=("csv", "json"), default="csv")
    omega.set_defaults(handler=cmd_omega)

    constants = sub.add_parser("constants", help="the constant S0 and its parts")
    constants.add_argument("--format", choices=("text", "json"), default="text")
    constants.set_defaults(handler=cmd_constants)

    verify = sub.add_parser("verify", help="run the bound dashboard")
    verify.add_argument("--suite", nargs="*", default=["all"], help="suite names or 'all'")
    verify.add_argument("--output-dir", default=None, help="default HEATKERNEL_OUTPUT_DIR")
    verify.add_argument("--list", action="store_true", help="list suite names and exit")
    verify.add_argument("--quiet", action="store_true", help="skip the summary table")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level or get_settings().log_level)
        return args.handler(args)
    except UsageError as exc:
        parser.error(str(exc))
    except HeatKernelError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR
    except KeyboardInterrupt:
        logger.error("interrupted")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
