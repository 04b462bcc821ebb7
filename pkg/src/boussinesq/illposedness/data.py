"""Frequency-localized initial data: zero elevation, velocity spectrum equal to
``N^{-s}`` on two unit boxes at ``+-N``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..propagators import StateVector
from ..spectral import FrequencyGrid, SpectralField
from .regimes import IllposedRegime


class GridTooSmallError(ValueError):
    pass


#: default lattice spacings; box edges must fall on lattice points
DEFAULT_DXI_1D = 1 / 128
DEFAULT_DXI_2D = (1 / 4, 1 / 4)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def contains(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        points = np.asarray(points, float)
        inside = np.ones(points.shape[:-1], bool)
        for j, (a, b) in enumerate(zip(self.lo, self.hi)):
            inside &= (points[..., j] >= a - slack) & (points[..., j] <= b + slack)
        return inside

    @property
    def measure(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))


def data_boxes(dimension: int, N: float) -> list:
    """Support of the velocity spectrum: ``A_N`` (1D) or ``S_N^+ u S_N^-`` (2D)."""
    if dimension == 1:
        return [Box((N - 0.5,), (N + 0.5,)), Box((-N - 0.5,), (-N + 0.5,))]
    return [Box((N - 0.5, -1.0), (N + 0.5, 1.0)), Box((-N - 0.5, -1.0), (-N + 0.5, 1.0))]


@dataclass(frozen=True, eq=False)
class LocalizedData:
    regime: IllposedRegime
    N: float
    s: float
    boxes: list
    grid: FrequencyGrid | None = None
    state: StateVector | None = None

    @property
    def dimension(self) -> int:
        return self.regime.dimension

    @property
    def height(self) -> float:
        return float(self.N) ** (-self.s)

    @property
    def velocity(self) -> SpectralField:
        """First velocity component (all components are equal)."""
        return self.state.velocity[0]


def default_grid(regime: IllposedRegime, N: float) -> FrequencyGrid:
    """Smallest lattice-aligned grid that resolves the doubled band."""
    if regime.dimension == 1:
        return FrequencyGrid.with_spacing(DEFAULT_DXI_1D, 4 * N)
    return FrequencyGrid.with_spacing(DEFAULT_DXI_2D, (max(4 * N, 1.5 * (2 * N + 1)), 4.0))


def _aligned(value: float, step: float) -> bool:
    r = value / step
    return abs(r - round(r)) < 1e-9


def _edge_weights(axis: np.ndarray, lo: float, hi: float, step: float) -> np.ndarray:
    """Trapezoid weights of the indicator of ``[lo, hi]`` on a lattice axis."""
    tol = 1e-9 * step
    w = ((axis > lo + tol) & (axis < hi - tol)).astype(float)
    w[np.abs(axis - lo) <= tol] = 0.5
    w[np.abs(axis - hi) <= tol] = 0.5
    return w


def sample_boxes(boxes, grid: FrequencyGrid, height: float = 1.0) -> np.ndarray:
    """Lattice samples of ``height * sum(chi_box)`` with half weights on edges."""
    out = np.zeros(grid.shape)
    for box in boxes:
        factor = np.ones(())
        for j, (a, b) in enumerate(zip(box.lo, box.hi)):
            w = _edge_weights(grid.axes[j], a, b, grid.dxi[j])
            factor = factor[..., None] * w if factor.ndim else w
        out += factor
    return height * out


def build_data(regime, N: float, s: float, grid: FrequencyGrid | None = None,
               with_state: bool = True) -> LocalizedData:
    """Construct the localized data for ``regime`` at frequency ``N``.

    With ``with_state=False`` only the box description is returned (enough for
    the quadrature routines, which never touch a lattice).
    """
    regime = IllposedRegime.parse(regime)
    if N < 64:
        raise ValueError("N must be at least 64")
    boxes = data_boxes(regime.dimension, N)
    if not with_state:
        return LocalizedData(regime, N, s, boxes)
    grid = default_grid(regime, N) if grid is None else grid
    if grid.dimension != regime.dimension:
        raise ValueError("grid dimension does not match the regime")
    if grid.nyquist[0] < 4 * N:
        raise GridTooSmallError(f"Nyquist {grid.nyquist[0]} < 4N = {4 * N}")
    if grid.dimension == 2 and grid.nyquist[1] < 4:
        raise GridTooSmallError("second axis must resolve |xi_2| <= 2 with margin")
    for box in boxes:
        for j, (a, b) in enumerate(zip(box.lo, box.hi)):
            if not (_aligned(a, grid.dxi[j]) and _aligned(b, grid.dxi[j])):
                raise GridTooSmallError("box edges must be lattice points")
    u = sample_boxes(boxes, grid, float(N) ** (-s))
    comps = [np.zeros(grid.shape)] + [u] * regime.dimension
    return LocalizedData(regime, N, s, boxes, grid, StateVector(grid, np.stack(comps)))
