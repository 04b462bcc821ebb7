"""Second Picard iterate on the lattice: pseudo-spectral products plus
Gauss-Legendre in time."""
from __future__ import annotations

import numpy as np

from ..nonlinear import AliasingError, high_band_fraction, quadratic_forcing
from ..propagators import StateVector, apply_linear
from ..spectral import FrequencyGrid, japanese
from ..symbols import AbcdParams
from .data import LocalizedData
from .kernels import gauss_legendre, low_region_panels
from .regimes import IllposedRegime


def second_iterate(state: StateVector, t: float, p: AbcdParams, time_order: int = 8,
                   alias_tol: float = 1e-12) -> StateVector:
    """``A_2(v0)(t) = int_0^t S(t - s) F(S(s) v0) ds`` for arbitrary lattice data.

    Raises :class:`AliasingError` when more than ``alias_tol`` of the data energy
    sits at ``|k| >= P/4`` on some axis, where quadratic products would wrap around.
    The linear flow keeps the support, so checking the data suffices.
    """
    grid = state.grid
    if high_band_fraction(state.coeffs, grid, fraction=1 / 2) > alias_tol:
        raise AliasingError("data reaches a quarter of the lattice; products would wrap")
    nodes, weights = gauss_legendre(time_order, 0.0, t)
    acc = np.zeros_like(state.coeffs)
    for s, w in zip(nodes, weights):
        free = apply_linear(state, s, p)
        f = quadratic_forcing(free.coeffs, grid, p)
        acc += w * apply_linear(StateVector(grid, f), t - s, p).coeffs
    return StateVector(grid, acc)


def picard_a2(regime, data: LocalizedData, t: float | None = None, p: AbcdParams | None = None,
              time_order: int = 8) -> StateVector:
    regime = IllposedRegime.parse(regime)
    p = regime.default_params if p is None else p
    regime.check_params(p)
    t = regime.time(data.N) if t is None else t
    if data.state is None:
        raise ValueError("data carries no lattice state")
    return second_iterate(data.state, t, p, time_order)


def low_region_mask(grid: FrequencyGrid) -> np.ndarray:
    """Lattice points inside ``|xi| <= 1`` (1D) or ``S_L`` (2D)."""
    eps = 1e-9
    inside = np.ones(grid.shape, bool)
    panels = low_region_panels(grid.dimension)
    lo = np.min([pl[0] for pl in panels], axis=0)
    hi = np.max([pl[1] for pl in panels], axis=0)
    for j in range(grid.dimension):
        inside &= (grid.xi[j] >= lo[j] - eps) & (grid.xi[j] <= hi[j] + eps)
    return inside


def predicted_support_mask(grid: FrequencyGrid, N: float) -> np.ndarray:
    """Low region plus the doubled band ``2N-1 <= |xi_1| <= 2N+1`` (``|xi_2| <= 2``)."""
    eps = 1e-9
    x1 = np.abs(grid.xi[0])
    high = (x1 >= 2 * N - 1 - eps) & (x1 <= 2 * N + 1 + eps)
    if grid.dimension == 2:
        high = high & (np.abs(grid.xi[1]) <= 2 + eps)
    return low_region_mask(grid) | high


def support_fraction(a2: StateVector, N: float) -> float:
    """Share of ``sum |A_2|^2`` (all components) inside the predicted support."""
    energy = (np.abs(a2.coeffs) ** 2).sum(axis=0)
    total = energy.sum()
    if total == 0:
        return 1.0
    return float(energy[predicted_support_mask(a2.grid, N)].sum() / total)


def low_region_norm(a2: StateVector, sprime: float = 0.0, component: int = 1) -> float:
    """Discrete ``|| <xi>^{s'} A_2 component ||`` over the low region."""
    grid = a2.grid
    mask = low_region_mask(grid)
    w = japanese(grid.modulus) ** (2 * sprime)
    vals = np.abs(a2.coeffs[component]) ** 2 * w
    return float(np.sqrt(vals[mask].sum() * grid.cell))
