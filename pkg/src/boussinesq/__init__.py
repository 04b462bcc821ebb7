"""Spectral laboratory for the linear flows, second Picard iterates and
bilinear estimates of the (abcd)-Boussinesq system."""

from .symbols import (BBM, GENERIC, KDV, AbcdParams, PhysicalDerivation, Regime,
                      RegimeError, SymbolDomainError)
from .spectral import FrequencyGrid, SpectralField
from .propagators import DiagonalState, StateVector

__version__ = "0.1.0"

__all__ = [
    "AbcdParams", "PhysicalDerivation", "Regime", "RegimeError", "SymbolDomainError",
    "GENERIC", "KDV", "BBM", "FrequencyGrid", "SpectralField", "StateVector",
    "DiagonalState",
]
