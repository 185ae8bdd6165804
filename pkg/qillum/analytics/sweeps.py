"""Parameter sweeps of the analytic figures of merit, one column per
``(output, kappa)`` pair.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Callable

import numpy as np
import pandas as pd
from typing_extensions import Self

from qillum.analytics.families import ProbeModel, build_probe
from qillum.constants import (
    CI_FAMILIES,
    CSV_FLOAT_FORMAT,
    DEFAULT_ETA,
    FAMILIES,
    PRESETS,
    PSI_FAMILIES,
    SWEEP_AXES,
    SWEEP_OUTPUTS,
)
from qillum.exceptions import DegenerateError, DomainError
from qillum.states.probes import squeezing_from_r

logger = logging.getLogger(__name__)

ALLOWED_AXES = {
    "coherent": ("N_S",),
    "generalized_coherent": ("N_S",),
    "tmsv": ("r", "N_S"),
    "mpa": ("r", "N_S"),
    "mps": ("r", "N_S"),
    "psi_plus": ("p", "N_S"),
    "psi_minus": ("p", "N_S"),
}
SINGLE_KAPPA = ("coherent", "generalized_coherent", "tmsv") + PSI_FAMILIES


@dataclass(frozen=True)
class SweepSpec:
    family: str
    kappa_list: list[int]
    axis: str
    axis_min: float
    axis_max: float
    axis_points: int
    N_B: float
    eta: float = DEFAULT_ETA
    outputs: list[str] = field(default_factory=lambda: ["qfi"])
    chi: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(
                f"Invalid family: {self.family!r}. Must be in {FAMILIES}."
            )
        if self.axis not in SWEEP_AXES:
            raise ValueError(
                f"Invalid axis: {self.axis!r}. Must be in {SWEEP_AXES}."
            )
        if self.axis not in ALLOWED_AXES[self.family]:
            raise ValueError(
                f"Axis {self.axis!r} is not available for {self.family}. "
                + f"Must be in {ALLOWED_AXES[self.family]}."
            )
        if not self.axis_min < self.axis_max:
            raise ValueError(
                f"Invalid axis range: [{self.axis_min}, {self.axis_max}]. "
                + "axis_min must be below axis_max."
            )
        if self.axis_points < 2:
            raise ValueError(
                f"Invalid axis_points: {self.axis_points}. Must be >= 2."
            )
        if not self.kappa_list:
            raise ValueError("kappa_list must not be empty")
        if any(int(k) != k or k < 0 for k in self.kappa_list):
            raise ValueError(
                f"Invalid kappa_list: {self.kappa_list}. Must be integers >= 0."
            )
        if self.family in SINGLE_KAPPA and list(self.kappa_list) != [0]:
            raise ValueError(
                f"The {self.family} family only takes kappa_list [0]"
            )
        if not self.outputs:
            raise ValueError("outputs must not be empty")
        for output in self.outputs:
            if output not in SWEEP_OUTPUTS:
                raise ValueError(
                    f"Invalid output: {output!r}. Must be in {SWEEP_OUTPUTS}."
                )
        if "g2" in self.outputs and self.family in CI_FAMILIES:
            raise ValueError(f"g2 is undefined for the {self.family} family")
        if not self.N_B >= 0.0:
            raise ValueError(f"Invalid N_B: {self.N_B}. Must be >= 0.")

    @classmethod
    def from_preset(cls, name: str, **overrides) -> Self:
        if name not in PRESETS:
            raise ValueError(
                f"Invalid preset: {name!r}. Must be in {sorted(PRESETS)}."
            )
        options = {**PRESETS[name], **overrides}
        return cls(**options)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def axis_values(self) -> np.ndarray:
        return np.linspace(self.axis_min, self.axis_max, self.axis_points)

    @property
    def columns(self) -> list[str]:
        return ["axis"] + [
            f"{output}_k{kappa}"
            for output in self.outputs
            for kappa in self.kappa_list
        ]


def _probe_at(spec: SweepSpec, kappa: int, value: float) -> ProbeModel:
    options: dict = {"kappa": kappa}
    if spec.family in CI_FAMILIES:
        options.update(chi=spec.chi, epsilon=spec.epsilon)
    if spec.axis == "r":
        options["z"] = squeezing_from_r(value)
    elif spec.axis == "N_S":
        options["N_S"] = value
    else:
        options["p"] = value
    return build_probe(spec.family, spec.N_B, **options)


def _evaluators(spec: SweepSpec) -> dict[str, Callable[[ProbeModel], float]]:
    return {
        "qfi": lambda probe: probe.qfi(),
        "averaged_qfi": lambda probe: probe.averaged_qfi(),
        "snr_over_eta": lambda probe: probe.snr_over_eta(spec.eta),
        "advantage": lambda probe: probe.advantage(),
        "g2": lambda probe: probe.g2(),
        "mean_photon": lambda probe: probe.mean_photon,
    }


def _sweep_row(spec: SweepSpec, value: float) -> list[float]:
    evaluators = _evaluators(spec)
    probes: dict[int, ProbeModel | None] = {}
    for kappa in spec.kappa_list:
        try:
            probes[kappa] = _probe_at(spec, kappa, value)
        except (DomainError, DegenerateError) as error:
            logger.debug(
                "No probe at %s=%s, kappa=%d: %s",
                spec.axis,
                value,
                kappa,
                error,
            )
            probes[kappa] = None
    row = [float(value)]
    for output in spec.outputs:
        for kappa in spec.kappa_list:
            probe = probes[kappa]
            if probe is None:
                row.append(math.nan)
                continue
            try:
                row.append(float(evaluators[output](probe)))
            except (DomainError, DegenerateError):
                row.append(math.nan)
    return row


def run_sweep(spec: SweepSpec, workers: int | None = None) -> pd.DataFrame:
    """Evaluate every requested output over the axis grid.

    Cells where the probe or the output is undefined (an MPA state below
    ``kappa`` photons, g2 at zero photons) hold NaN.

    Args:
        spec (SweepSpec): The sweep.
        workers (int | None): Thread count over axis points; None or 1 runs
            serially.

    Returns:
        pd.DataFrame: One row per axis value, columns ``spec.columns``.
    """
    values = spec.axis_values

    def row(value: float) -> list[float]:
        return _sweep_row(spec, value)

    if workers is None or workers <= 1:
        rows = [row(value) for value in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(row, values))
    logger.info(
        "Swept %s over %d %s points", spec.family, len(rows), spec.axis
    )
    return pd.DataFrame(rows, columns=spec.columns)


def write_csv(df: pd.DataFrame, out: str | Path | IO[str]) -> None:
    """UTF-8, comma separated, LF line endings, 12 significant digits."""
    df.to_csv(
        out,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        lineterminator="\n",
        na_rep="nan",
        encoding="utf-8",
    )
