"""The five ill-posedness settings with their time rules and growth exponents."""
from __future__ import annotations

import enum

from ..symbols import BBM, GENERIC, KDV, AbcdParams, Regime


class IllposedRegime(enum.Enum):
    GEN1D = "gen1d"
    KDV1D = "kdv1d"
    GEN2D = "gen2d"
    KDV2D = "kdv2d"
    BBM2D = "bbm2d"

    @classmethod
    def parse(cls, name) -> "IllposedRegime":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            choices = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown regime {name!r} (choose from {choices})") from None

    @property
    def dimension(self) -> int:
        return 1 if self in (IllposedRegime.GEN1D, IllposedRegime.KDV1D) else 2

    @property
    def default_params(self) -> AbcdParams:
        if self in (IllposedRegime.GEN1D, IllposedRegime.GEN2D):
            return GENERIC
        if self in (IllposedRegime.KDV1D, IllposedRegime.KDV2D):
            return KDV
        return BBM

    @property
    def model_regime(self) -> Regime:
        return self.default_params.regime

    @property
    def threshold(self) -> float:
        """Regularity below which the second iterate inflates."""
        table = {"gen1d": -0.5, "kdv1d": -1.5, "gen2d": -0.5, "kdv2d": -1.5, "bbm2d": 0.0}
        return table[self.value]

    def time(self, N: float) -> float:
        if self in (IllposedRegime.GEN1D, IllposedRegime.GEN2D):
            return 1.0 / (100.0 * N)
        if self in (IllposedRegime.KDV1D, IllposedRegime.KDV2D):
            return 1.0 / (100.0 * N**3)
        return 1.0 / 1000.0

    def predicted_exponent(self, s: float) -> float:
        shift = {"gen1d": -1, "kdv1d": -3, "gen2d": -1, "kdv2d": -3, "bbm2d": 0}[self.value]
        return -2.0 * s + shift

    def check_params(self, p: AbcdParams) -> None:
        p.require(self.model_regime)
