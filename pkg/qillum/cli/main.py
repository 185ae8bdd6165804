"""Command-line entry point. Payloads (JSON or CSV) go to stdout; logs,
errors and tables go to stderr.

Exit codes: 0 on success, 1 on numerical or I/O failure, 2 on usage errors.
"""
import json
import logging
import math
import sys
from argparse import Namespace
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from cmd2 import Cmd2ArgumentParser
from colorama import Fore, Style, just_fix_windows_console
from tabulate import tabulate

from qillum.analytics.metrics import EnvironmentSpec, perr_from_fisher
from qillum.analytics.pandas.accessor import reports_to_frame
from qillum.analytics.sweeps import SweepSpec, run_sweep, write_csv
from qillum.cli.argparsers import (
    qfi_argparser,
    simulate_argparser,
    sweep_argparser,
    verify_argparser,
)
from qillum.constants import VERIFY_RTOL
from qillum.detection.campaign import campaign_from_probe, run_campaign
from qillum.exceptions import DomainError, QIllumError, VerificationError
from qillum.oracle.verify import (
    OracleConfig,
    default_grid,
    run_configuration,
    verify_closed_forms,
)
from qillum.states.probes import squeezing_from_r
from qillum.utils import dumps_json, parse_complex

just_fix_windows_console()

BOLD = "\033[1m"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"

logger = logging.getLogger(__name__)


def print_error(msg: str) -> None:
    print(BOLD + Fore.RED + "ERROR: " + Style.RESET_ALL + msg, file=sys.stderr)


def configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        stream=sys.stderr, level=level, format=LOG_FORMAT, force=True
    )


def config_from_opts(opts: Namespace) -> OracleConfig:
    """The probe configuration described by the shared probe flags."""
    z = opts.z
    if opts.r is not None:
        if opts.r < 0.0:
            raise DomainError(f"Invalid r: {opts.r}. Must be >= 0.")
        z = squeezing_from_r(opts.r)
    alpha = None
    if opts.alpha is not None:
        try:
            alpha = parse_complex(opts.alpha)
        except ValueError:
            raise DomainError(f"Invalid alpha: {opts.alpha!r}") from None
    return OracleConfig(
        family=opts.family,
        N_B=opts.nb,
        kappa=opts.kappa,
        z=z,
        N_S=opts.ns,
        alpha=alpha,
        chi=opts.chi,
        epsilon=opts.epsilon,
        p=opts.p,
        phi=opts.phi,
        tail_tolerance=opts.tail_tolerance,
        cutoff=opts.cutoff,
        dim_bath=opts.dim_bath,
    )


def cmd_qfi(opts: Namespace) -> int:
    """Prints the FisherReport of one configuration."""
    EnvironmentSpec(opts.nb, opts.eta)
    config = config_from_opts(opts)
    report = run_configuration(config, oracle=opts.oracle, eta=opts.eta)
    print(dumps_json(report.to_dict()))
    return 0


SWEEP_FLAGS = {
    "family": "family",
    "kappa": "kappa_list",
    "axis": "axis",
    "min": "axis_min",
    "max": "axis_max",
    "points": "axis_points",
    "nb": "N_B",
    "eta": "eta",
    "outputs": "outputs",
    "chi": "chi",
    "epsilon": "epsilon",
}


def sweep_spec_from_opts(opts: Namespace) -> SweepSpec:
    """The sweep described by a preset, explicit flags, or both.

    Args:
        opts (Namespace): Parsed sweep flags.

    Raises:
        ValueError: If the flags do not describe a valid sweep.

    Returns:
        SweepSpec: The sweep.
    """
    fields = {
        field: getattr(opts, flag)
        for flag, field in SWEEP_FLAGS.items()
        if getattr(opts, flag) is not None
    }
    if opts.preset is not None:
        return SweepSpec.from_preset(opts.preset, **fields)
    missing = [
        "--" + flag
        for flag in ("family", "axis", "min", "max", "points", "nb")
        if getattr(opts, flag) is None
    ]
    if missing:
        raise ValueError(
            "Without --preset the sweep needs " + ", ".join(missing)
        )
    fields.setdefault("kappa_list", [0])
    return SweepSpec(**fields)


def cmd_sweep(opts: Namespace) -> int:
    """Writes the sweep table as CSV."""
    try:
        spec = sweep_spec_from_opts(opts)
    except (ValueError, TypeError) as error:
        sweep_argparser.error(str(error))
    df = run_sweep(spec, workers=opts.workers)
    if opts.out == "-":
        write_csv(df, sys.stdout)
    else:
        write_csv(df, Path(opts.out))
        logger.info("Wrote %d rows to %s", len(df), opts.out)
    return 0


def load_grid(path: str) -> list[OracleConfig]:
    """Reads a verification grid: a JSON list of configuration objects, or an
    object holding that list under "configurations".
    """
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if isinstance(data, dict):
        data = data.get("configurations", [])
    if not isinstance(data, list):
        raise DomainError(f"Grid {path} must hold a list of configurations")
    return [OracleConfig.from_dict(item) for item in data]


def cmd_verify(opts: Namespace) -> int:
    """Prints the maximum relative discrepancy per family; exits 1 unless
    every configuration agrees to VERIFY_RTOL and satisfies the
    ``4 (snr / eta)^2 <= cfi <= qfi`` ordering.
    """
    grid = default_grid() if opts.grid is None else load_grid(opts.grid)
    reports = verify_closed_forms(grid, workers=opts.workers)
    frame = reports_to_frame(reports)
    per_family = frame.qillum.max_discrepancy()
    failing = sorted(
        family
        for family, value in per_family.items()
        if not value < VERIFY_RTOL
    )
    violations = frame.qillum.hierarchy_violations()
    summary = {
        "configurations": len(reports),
        "max_relative_discrepancy": per_family.to_dict(),
        "failures": failing,
        "hierarchy_violations": len(violations),
        "passed": not failing and violations.empty,
        "tolerance": VERIFY_RTOL,
    }
    print(dumps_json(summary))
    if opts.table and not frame.empty:
        columns = [
            "config.family",
            "config.kappa",
            "config.z",
            "config.N_B",
            "qfi_analytic",
            "qfi_oracle",
            "relative_discrepancy",
            "cfi",
            "snr_over_eta",
        ]
        table = frame[[c for c in columns if c in frame.columns]]
        print(
            tabulate(
                table.qillum.format_for_cli(),
                headers="keys",
                tablefmt="github",
                showindex=False,
            ),
            file=sys.stderr,
        )
    if failing:
        print_error(
            "Closed forms disagree with the oracle for: " + ", ".join(failing)
        )
    if not violations.empty:
        families = sorted(set(violations["config.family"]))
        print_error("Fisher hierarchy violated for: " + ", ".join(families))
    return 0 if summary["passed"] else 1


def cmd_simulate(opts: Namespace) -> int:
    """Prints the campaign result with its analytic comparisons."""
    environment = EnvironmentSpec(opts.nb, opts.eta, opts.M)
    probe = config_from_opts(opts).probe()
    spec = campaign_from_probe(
        probe,
        environment.eta,
        environment.M,
        opts.trials,
        opts.seed,
        chunk_size=opts.chunk_size,
        workers=opts.workers,
    )
    result = run_campaign(spec)
    qfi = probe.qfi()
    deviation = result.empirical_perr - result.analytic_perr
    payload = {
        "probe": probe.describe(),
        "campaign": spec.to_dict(),
        "result": result.to_dict(),
        "analytic": {
            "qfi": qfi,
            "perr_from_qfi": perr_from_fisher(qfi, opts.eta, opts.M),
            "deviation": deviation,
            "deviation_in_stderr": (
                deviation / result.stderr if result.stderr > 0 else math.nan
            ),
        },
    }
    print(dumps_json(payload))
    return 0


class Command(NamedTuple):
    parser: Cmd2ArgumentParser
    run: Callable[[Namespace], int]


COMMANDS: dict[str, Command] = {
    "qfi": Command(qfi_argparser, cmd_qfi),
    "sweep": Command(sweep_argparser, cmd_sweep),
    "verify": Command(verify_argparser, cmd_verify),
    "simulate": Command(simulate_argparser, cmd_simulate),
}

USAGE = "usage: qillum {" + ",".join(COMMANDS) + "} [options]"


def _error_payload(error: Exception) -> dict:
    payload = {"error": type(error).__name__, "message": str(error)}
    if isinstance(error, VerificationError):
        payload["failures"] = [
            {
                "index": failure.index,
                "family": failure.config.family,
                "error": type(failure.error).__name__,
                "message": str(failure.error),
            }
            for failure in error.failures
        ]
    return payload


def main(argv: Sequence[str] | None = None) -> int:
    """Runs one command.

    Args:
        argv (Sequence[str] | None): Arguments without the program name.
            Defaults to ``sys.argv[1:]``.

    Returns:
        int: The exit code.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE, file=sys.stderr)
        return 0 if argv else 2
    if argv[0] not in COMMANDS:
        print_error(f"Unknown command {argv[0]!r}")
        print(USAGE, file=sys.stderr)
        return 2
    command = COMMANDS[argv[0]]
    try:
        opts = command.parser.parse_args(argv[1:])
        configure_logging(opts.verbose)
        return command.run(opts)
    except SystemExit as exit_:
        if exit_.code is None:
            return 0
        return exit_.code if isinstance(exit_.code, int) else 2
    except (QIllumError, OSError, ValueError, TypeError, KeyError) as error:
        print_error(str(error))
        print(dumps_json(_error_payload(error)), file=sys.stderr)
        return 1
