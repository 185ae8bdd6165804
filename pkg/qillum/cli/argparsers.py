from cmd2 import Cmd2ArgumentParser

from qillum.constants import (
    DEFAULT_CHUNK,
    DEFAULT_ETA,
    DEFAULT_TAIL_TOLERANCE,
    FAMILIES,
    PRESETS,
    SWEEP_AXES,
    SWEEP_OUTPUTS,
)


def _add_verbosity(parser: Cmd2ArgumentParser) -> None:
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr; repeat for debug output.",
    )


def _add_workers(parser: Cmd2ArgumentParser) -> None:
    parser.add_argument(
        "-w",
        "--workers",
        type=int,
        default=None,
        help="Number of worker threads. Defaults to running serially.",
    )


def _add_probe_arguments(parser: Cmd2ArgumentParser) -> None:
    parser.add_argument(
        "-f",
        "--family",
        required=True,
        choices=FAMILIES,
        help="The probe family.",
    )
    parser.add_argument(
        "--nb",
        type=float,
        required=True,
        help="Mean thermal photon number of the background.",
    )
    parser.add_argument(
        "--ns",
        type=float,
        default=None,
        help=(
            "Mean signal photon number. Used when the family's own parameter "
            + "(--z, --r, --alpha or --p) is not given."
        ),
    )
    parser.add_argument(
        "-k",
        "--kappa",
        type=int,
        default=0,
        help="Photons added or subtracted. Defaults to 0 (plain TMSV).",
    )
    squeezing = parser.add_mutually_exclusive_group()
    squeezing.add_argument(
        "--z", type=float, default=None, help="Squeezing parameter tanh(r)."
    )
    squeezing.add_argument(
        "--r", type=float, default=None, help="Squeezing strength."
    )
    parser.add_argument(
        "--alpha",
        default=None,
        help="Coherent amplitude, e.g. 1.5 or 1+0.5j.",
    )
    parser.add_argument(
        "--chi",
        type=float,
        default=0.0,
        help="Nonlinear phase strength of generalized coherent states.",
    )
    parser.add_argument(
        "--epsilon",
        type=float,
        default=1.0,
        help="Exponent of the nonlinear phase. Defaults to 1.",
    )
    parser.add_argument(
        "--p", type=float, default=None, help="Weight of the toy states."
    )
    parser.add_argument(
        "--phi",
        type=float,
        default=None,
        help="Quadrature phase. Defaults to the phase of <a_S>.",
    )
    parser.add_argument(
        "--eta",
        type=float,
        default=DEFAULT_ETA,
        help=f"Reflectivity amplitude. Defaults to {DEFAULT_ETA}.",
    )
    parser.add_argument(
        "--tail-tolerance",
        type=float,
        default=DEFAULT_TAIL_TOLERANCE,
        help="Probability the automatic Fock cutoffs may discard.",
    )
    parser.add_argument(
        "--cutoff",
        type=int,
        default=None,
        help="Fixed signal and idler Fock cutoff.",
    )
    parser.add_argument(
        "--dim-bath",
        type=int,
        default=None,
        help="Fixed background Fock cutoff.",
    )


qfi_argparser = Cmd2ArgumentParser(
    prog="qillum qfi",
    description="Fisher information of a single probe configuration.",
)
_add_probe_arguments(qfi_argparser)
qfi_argparser.add_argument(
    "-o",
    "--oracle",
    action="store_true",
    help="Also evaluate the truncated Fock-space oracle.",
)
_add_verbosity(qfi_argparser)

sweep_argparser = Cmd2ArgumentParser(
    prog="qillum sweep",
    description="Sweep analytic figures of merit over one axis to CSV.",
)
sweep_argparser.add_argument(
    "-p",
    "--preset",
    choices=sorted(PRESETS),
    default=None,
    help="A predefined sweep. Explicit flags override its fields.",
)
sweep_argparser.add_argument(
    "-f", "--family", choices=FAMILIES, default=None, help="The probe family."
)
sweep_argparser.add_argument(
    "-k",
    "--kappa",
    type=int,
    nargs="+",
    default=None,
    help="Photon numbers added or subtracted, one column each.",
)
sweep_argparser.add_argument(
    "-a", "--axis", choices=SWEEP_AXES, default=None, help="The swept axis."
)
sweep_argparser.add_argument(
    "--min", type=float, default=None, help="First axis value."
)
sweep_argparser.add_argument(
    "--max", type=float, default=None, help="Last axis value."
)
sweep_argparser.add_argument(
    "--points", type=int, default=None, help="Number of axis values."
)
sweep_argparser.add_argument(
    "--nb", type=float, default=None, help="Mean thermal photon number."
)
sweep_argparser.add_argument(
    "--eta", type=float, default=None, help="Reflectivity amplitude."
)
sweep_argparser.add_argument(
    "--outputs",
    nargs="+",
    choices=SWEEP_OUTPUTS,
    default=None,
    help="Figures of merit to tabulate.",
)
sweep_argparser.add_argument(
    "--chi", type=float, default=None, help="Nonlinear phase strength."
)
sweep_argparser.add_argument(
    "--epsilon", type=float, default=None, help="Nonlinear phase exponent."
)
sweep_argparser.add_argument(
    "-o",
    "--out",
    default="-",
    help="Output CSV path. Defaults to stdout.",
)
_add_workers(sweep_argparser)
_add_verbosity(sweep_argparser)

verify_argparser = Cmd2ArgumentParser(
    prog="qillum verify",
    description="Check every closed-form QFI against the numerical oracle.",
)
verify_argparser.add_argument(
    "-g",
    "--grid",
    default=None,
    help="JSON file with a list of configurations. Defaults to the built-in "
    + "grid.",
)
verify_argparser.add_argument(
    "-t",
    "--table",
    action="store_true",
    help="Print a table of every configuration to stderr.",
)
_add_workers(verify_argparser)
_add_verbosity(verify_argparser)

simulate_argparser = Cmd2ArgumentParser(
    prog="qillum simulate",
    description="Monte Carlo error rates of the M-copy threshold test.",
)
_add_probe_arguments(simulate_argparser)
simulate_argparser.add_argument(
    "-m",
    "--m",
    dest="M",
    type=int,
    required=True,
    help="Copies per decision.",
)
simulate_argparser.add_argument(
    "-n",
    "--trials",
    type=int,
    default=100_000,
    help="Decisions simulated per hypothesis. Defaults to 100000.",
)
simulate_argparser.add_argument(
    "-s",
    "--seed",
    type=int,
    required=True,
    help="Seed of the random streams.",
)
simulate_argparser.add_argument(
    "--chunk-size",
    type=int,
    default=DEFAULT_CHUNK,
    help=f"Decisions per random stream. Defaults to {DEFAULT_CHUNK}.",
)
_add_workers(simulate_argparser)
_add_verbosity(simulate_argparser)
