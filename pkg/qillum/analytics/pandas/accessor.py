from typing import Sequence

import pandas as pd

from qillum.analytics.metrics import FisherReport
from qillum.constants import HIERARCHY_TOL
from qillum.utils import flatten_dict, to_jsonable


def reports_to_frame(reports: Sequence[FisherReport]) -> pd.DataFrame:
    """One row per report, with the configuration flattened into
    ``config.<key>`` columns.
    """
    rows = [flatten_dict(to_jsonable(report.to_dict())) for report in reports]
    return pd.DataFrame(rows)


@pd.api.extensions.register_dataframe_accessor("qillum")
class QIllumAccessor:
    """Helpers over a frame built by ``reports_to_frame``."""

    def __init__(self, pandas_obj: pd.DataFrame) -> None:
        self._obj = pandas_obj

    def max_discrepancy(self, by: str = "config.family") -> pd.Series:
        """Largest relative discrepancy between closed form and oracle in each
        group.

        Args:
            by (str): The column to group by. Defaults to "config.family".

        Returns:
            pd.Series: The maximum discrepancy per group, NaN for groups
                without an oracle value.
        """
        df = self._obj
        if df.empty:
            return pd.Series(dtype=float)
        discrepancy = pd.to_numeric(df["relative_discrepancy"], errors="coerce")
        return discrepancy.groupby(df[by], sort=True).max()

    def hierarchy_violations(self, tol: float = HIERARCHY_TOL) -> pd.DataFrame:
        """Rows where ``4 (snr / eta)^2 <= cfi <= qfi`` fails by more than
        ``tol``.

        Args:
            tol (float): Slack. Defaults to HIERARCHY_TOL.

        Returns:
            pd.DataFrame: The offending rows.
        """
        df = self._obj
        if df.empty:
            return df
        snr_bound = 4.0 * pd.to_numeric(df["snr_over_eta"]) ** 2
        cfi = pd.to_numeric(df["cfi"])
        qfi = pd.to_numeric(df["qfi_oracle"]).fillna(
            pd.to_numeric(df["qfi_analytic"])
        )
        bad = (snr_bound > cfi + tol) | (cfi > qfi + tol)
        return df[bad.fillna(False)]

    def format_for_cli(self, digits: int = 6) -> pd.DataFrame:
        """Formats the frame for a terminal table: the configuration prefix is
        dropped from column names and floats are shown in scientific
        notation.

        Args:
            digits (int): Significant digits. Defaults to 6.

        Returns:
            pd.DataFrame: The formatted frame.
        """
        df = self._obj.copy()
        df.columns = [col.removeprefix("config.") for col in df.columns]
        float_cols = df.select_dtypes(include="float").columns
        df[float_cols] = df[float_cols].map(
            lambda x: "" if pd.isna(x) else f"{x:.{digits - 1}e}"
        )
        return df
