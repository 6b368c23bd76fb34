import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import yaml
from pydantic import ValidationError

from sdpkit import __meta__, __title__
from sdpkit.copos import MAX_K_LEVEL, alpha0, in_dnn, in_splus_plus_n, k_r_member, p_r_outer, stable_via_qp
from sdpkit.formats import get_format
from sdpkit.impl import Base, ParseError, SdpkitError
from sdpkit.maxcut import maxcut_solve
from sdpkit.qcr import qcr_solve
from sdpkit.schemas import BnbOptions, Command, OutputFormat, SchemeOption, Subcommand
from sdpkit.sdpsolve import solve
from sdpkit.sos import sos_decompose
from sdpkit.symcore import chol_psd, eig_decompose, psd_check
from sdpkit.theta import theta_report
from sdpkit.utils import get_logger, json_ready, set_logger_config

LOGGER = get_logger("sdpkit")

EXIT_SUCCESS = 0
EXIT_UNHANDLED = 1
EXIT_INVALID = 2
EXIT_FAILURE = 3

# file format read by each subcommand
INPUT_FORMATS = {
    Subcommand.PSD: "matrix",
    Subcommand.CHOL: "matrix",
    Subcommand.EIG: "matrix",
    Subcommand.SOLVE: "sdpa",
    Subcommand.THETA: "graph",
    Subcommand.STABLE: "graph",
    Subcommand.COPOS: "matrix",
    Subcommand.SOS: "poly",
    Subcommand.MAXCUT: "weighted-graph",
    Subcommand.QCR: "binqp",
}

SUBCOMMAND_HELP = {
    Subcommand.PSD: "Positive semidefinite status of a symmetric matrix.",
    Subcommand.CHOL: "Pivoted Cholesky factor of a positive semidefinite matrix.",
    Subcommand.EIG: "Eigenvalues and eigenvectors of a symmetric matrix.",
    Subcommand.SOLVE: "Solve a semidefinite program given in sparse SDPA format.",
    Subcommand.THETA: "Theta number of a graph with its sandwich bounds.",
    Subcommand.STABLE: "Stability number through the standard quadratic program and its copositive bound.",
    Subcommand.COPOS: "Membership of a matrix in the inner and outer approximations of the copositive cone.",
    Subcommand.SOS: "Sum of squares decomposition of a homogeneous polynomial.",
    Subcommand.MAXCUT: "Maximum cut relaxation with random hyperplane rounding.",
    Subcommand.QCR: "Binary quadratic program by convex reformulation and branch and bound.",
}


def run_psd(value: Any, cmd: Command) -> Any:
    return psd_check(value)


def run_chol(value: Any, cmd: Command) -> Any:
    lower, rank = chol_psd(value)
    return {"lower": lower, "rank": rank}


def run_eig(value: Any, cmd: Command) -> Any:
    values, vectors = eig_decompose(value)
    return {"eigenvalues": values, "eigenvectors": vectors}


def run_solve(value: Any, cmd: Command) -> Any:
    return solve(value, cmd.solve_options())


def run_theta(value: Any, cmd: Command) -> Any:
    return theta_report(value, cmd.solve_options())


def run_stable(value: Any, cmd: Command) -> Any:
    result, x = stable_via_qp(value)
    return {"qp_value": result, "alpha": int(round(1.0 / result)), "x": x,
            "alpha0": alpha0(value, cmd.solve_options())}


def run_copos(value: Any, cmd: Command) -> Any:
    opts = cmd.solve_options()
    report = {
        "r": cmd.r,
        "splus_cap_n": in_dnn(value),
        "splus_plus_n": in_splus_plus_n(value, opts),
        "k_r": None,
        "p_r_outer": p_r_outer(value, max(cmd.r, 1)),
    }
    if cmd.r <= MAX_K_LEVEL:
        report["k_r"] = k_r_member(value, cmd.r, opts)
    else:
        LOGGER.warning("Inner approximation skipped: level [%s] exceeds supported [%s]", cmd.r, MAX_K_LEVEL)
    return report


def run_sos(value: Any, cmd: Command) -> Any:
    return sos_decompose(value, cmd.solve_options())


def run_maxcut(value: Any, cmd: Command) -> Any:
    return maxcut_solve(value, cmd.solve_options(), cmd.rounding_options())


def run_qcr(value: Any, cmd: Command) -> Any:
    return qcr_solve(value, cmd.scheme, cmd.solve_options(), BnbOptions())


RUNNERS = {
    Subcommand.PSD: run_psd,
    Subcommand.CHOL: run_chol,
    Subcommand.EIG: run_eig,
    Subcommand.SOLVE: run_solve,
    Subcommand.THETA: run_theta,
    Subcommand.STABLE: run_stable,
    Subcommand.COPOS: run_copos,
    Subcommand.SOS: run_sos,
    Subcommand.MAXCUT: run_maxcut,
    Subcommand.QCR: run_qcr,
}  # type: Dict[Subcommand, Callable[[Any, Command], Any]]


def render_text(data: Any, prefix: str = "") -> List[str]:
    """
    Flattens the JSON report into ``key: value`` lines, nested keys joined by dots.
    """
    if isinstance(data, dict):
        lines = []
        for key, val in data.items():
            lines.extend(render_text(val, f"{prefix}.{key}" if prefix else str(key)))
        return lines
    if isinstance(data, list) and any(isinstance(item, (dict, list)) for item in data):
        lines = []
        for index, item in enumerate(data):
            lines.extend(render_text(item, f"{prefix}[{index}]"))
        return lines
    text = json.dumps(data)
    return [f"{prefix}: {text}" if prefix else text]


def render(report: Any, output_format: OutputFormat) -> str:
    data = json_ready(report.json() if isinstance(report, Base) else report)
    if output_format is OutputFormat.TEXT:
        return "\n".join(render_text(data)) + "\n"
    return json.dumps(data, indent=2) + "\n"


def execute(cmd: Command) -> str:
    """
    Reads the problem of the command, runs the subcommand and renders its report.
    """
    fmt = get_format(INPUT_FORMATS[cmd.subcommand])
    value = fmt.load(cmd.input)
    LOGGER.info("Running [%s] on [%s]", cmd.subcommand, cmd.input)
    report = RUNNERS[cmd.subcommand](value, cmd)
    return render(report, cmd.format)


def load_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    with open(path, mode="r", encoding="utf-8") as config_file:
        config = yaml.safe_load(config_file) or {}
    if not isinstance(config, dict):
        raise ValueError(f"Configuration file [{path}] must hold a mapping of options")
    LOGGER.debug("Loaded configuration [%s]: %s", path, config)
    return config


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdpkit", description=__title__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__meta__['Version']}")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand", required=True)
    for sub in Subcommand:
        sub_parser = subparsers.add_parser(str(sub), help=SUBCOMMAND_HELP[sub], description=SUBCOMMAND_HELP[sub])
        sub_parser.add_argument("-i", "--input", required=True,
                                help=f"Problem file in [{INPUT_FORMATS[sub]}] format, or '-' for standard input.")
        sub_parser.add_argument("-o", "--output", help="File where to write the report instead of standard output.")
        sub_parser.add_argument("-f", "--format", choices=[str(fmt) for fmt in OutputFormat],
                                help="Report format (default: json).")
        sub_parser.add_argument("-c", "--config", help="YAML file providing defaults of the options.")

        opt_args = sub_parser.add_argument_group(title="Options", description="Solver and algorithm options.")
        opt_args.add_argument("--tol", type=float, help="Relative duality gap target of the solver.")
        opt_args.add_argument("--feas-tol", dest="feas_tol", type=float, help="Residual target of the solver.")
        opt_args.add_argument("--max-iter", dest="max_iter", type=int, help="Iteration cap of the solver.")
        opt_args.add_argument("--seed", type=int, help="Seed of every random draw (default: 0).")
        opt_args.add_argument("--trials", type=int, help="Amount of rounding trials.")
        opt_args.add_argument("--threads", type=int, help="Workers sharing the rounding trials (default: 1).")
        opt_args.add_argument("--r", type=int, help="Hierarchy level.")
        opt_args.add_argument("--scheme", choices=[str(scheme) for scheme in SchemeOption],
                              help="Redundant constraints of the convexification program (default: r2).")

        log_args = sub_parser.add_argument_group(title="Logger", description="Logging control.")
        level_args = log_args.add_mutually_exclusive_group()
        level_args.add_argument("-q", "--quiet", action="store_true", help="Disable logging except errors.")
        level_args.add_argument("-d", "--debug", action="store_true", help="Debug level logging.")
        log_args.add_argument("-v", "--verbose", action="store_true", help="Enforce verbose logging to stdout.")
        log_args.add_argument("-l", "--log", help="Output file to write generated logs.")
    return parser


def make_command(ns: argparse.Namespace) -> Command:
    options = load_config(ns.config)
    for key in ("input", "output", "format", "tol", "feas_tol", "max_iter", "seed", "trials", "threads", "r",
                "scheme"):
        value = getattr(ns, key)
        if value is not None:
            options[key] = value
    options["subcommand"] = ns.subcommand
    return Command(**options)


def main(args: Optional[List[str]] = None) -> int:
    parser = make_parser()
    ns = parser.parse_args(args=args)

    # set full module config
    level = logging.DEBUG if ns.debug else logging.ERROR
    msg_fmt = "[%(asctime)s] %(levelname)-10.10s [%(threadName)s][%(name)s] %(message)s"
    logger = set_logger_config(LOGGER, level=level, force_stdout=ns.verbose, file=ns.log, message_format=msg_fmt)
    try:
        cmd = make_command(ns)
        text = execute(cmd)
    except ParseError as exc:
        return fail(logger, exc, EXIT_INVALID)
    except SdpkitError as exc:
        return fail(logger, exc, EXIT_FAILURE)
    except (ValidationError, OSError, yaml.YAMLError, ValueError) as exc:
        return fail(logger, exc, EXIT_INVALID)
    except Exception as exc:  # noqa
        logger.error("Unhandled error: %s", exc, exc_info=exc)
        return EXIT_UNHANDLED
    if cmd.output:
        with open(cmd.output, mode="w", encoding="utf-8") as report_file:
            report_file.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_SUCCESS


def fail(logger: logging.Logger, exc: Exception, code: int) -> int:
    logger.debug("Failed with [%s]: %s", type(exc).__name__, exc, exc_info=exc)
    sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
