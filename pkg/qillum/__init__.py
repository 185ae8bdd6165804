import qillum.analytics.pandas.accessor
from qillum.analytics.families import ProbeModel, build_probe
from qillum.analytics.metrics import (
    EnvironmentSpec,
    FisherReport,
    MeasurementMoments,
)
from qillum.fock.core import TruncationSpec
