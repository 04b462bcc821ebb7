"""Norm-inflation sweeps: log-log slope of the low-frequency second iterate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..symbols import AbcdParams
from .kernels import a2_lowfreq_norm
from .regimes import IllposedRegime

SLOPE_TOL = 0.15
FLAT_TOL = 0.2


@dataclass
class InflationReport:
    regime: str
    s: float
    sprime: float
    Ns: list
    times: list
    norms: list
    certificates: list
    slope: float
    predicted: float

    @property
    def passed(self) -> bool:
        return abs(self.slope - self.predicted) <= SLOPE_TOL

    @property
    def flat(self) -> bool:
        return abs(self.slope) <= FLAT_TOL

    @property
    def certificate(self) -> float:
        return max(self.certificates)


def fit_slope(Ns, values) -> float:
    return float(np.polyfit(np.log(Ns), np.log(values), 1)[0])


def inflation_sweep(regime, s: float, sprime: float, N_list, p: AbcdParams | None = None,
                    mapper=map) -> InflationReport:
    """Evaluate :func:`a2_lowfreq_norm` at each ``N`` and fit the slope.

    ``mapper`` lets callers fan the points out to a worker pool.
    """
    regime = IllposedRegime.parse(regime)
    Ns = sorted(float(N) for N in N_list)
    if len(Ns) < 3:
        raise ValueError("a sweep needs at least three values of N")
    results = list(mapper(lambda N: a2_lowfreq_norm(regime, N, s, sprime, p), Ns))
    norms = [r.norm for r in results]
    return InflationReport(regime.value, s, sprime, Ns, [regime.time(N) for N in Ns], norms,
                           [r.certificate for r in results], fit_slope(Ns, norms),
                           regime.predicted_exponent(s))
