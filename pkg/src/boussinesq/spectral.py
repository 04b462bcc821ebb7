"""Periodic frequency lattices, Fourier transforms, Sobolev norms and
Littlewood-Paley blocks.

Conventions
-----------
The physical box is ``[-L_j, L_j)`` along each axis with ``P_j`` points, and
the dual lattice is ``xi = pi k / L_j``.  Coefficients approximate the
continuum transform ``f_hat(xi) = int exp(-i x.xi) f(x) dx``, so

* ``f_hat_k = dx * sum_j f(x_j) exp(-i x_j xi_k)``,
* products satisfy ``(fg)^ = (2 pi)^-n  f_hat * g_hat`` (lattice convolution
  with weight ``dxi^n``),
* norms of coefficients carry the lattice measure ``dxi^n``; no ``2 pi``
  factor is inserted, so the norm of a band indicator of width 1 is 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np


def _as_tuple(value, dimension: int) -> tuple:
    if np.isscalar(value):
        return (value,) * dimension
    value = tuple(value)
    if len(value) != dimension:
        raise ValueError(f"expected {dimension} entries, got {len(value)}")
    return value


@dataclass(frozen=True, eq=True)
class FrequencyGrid:
    """Uniform periodic grid; ``shape`` and ``extent`` are given per axis."""

    shape: tuple
    extent: tuple

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        extent = tuple(float(L) for L in self.extent)
        if len(shape) not in (1, 2) or len(shape) != len(extent):
            raise ValueError("grids are one- or two-dimensional")
        for n in shape:
            if n < 8 or n & (n - 1):
                raise ValueError(f"points per axis must be a power of two >= 8, got {n}")
        if any(L <= 0 for L in extent):
            raise ValueError("extent must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "extent", extent)

    @classmethod
    def make(cls, dimension: int, points, extent) -> "FrequencyGrid":
        return cls(_as_tuple(points, dimension), _as_tuple(extent, dimension))

    @classmethod
    def with_spacing(cls, dxi, nyquist_at_least) -> "FrequencyGrid":
        """Smallest power-of-two grid with lattice spacing ``dxi`` (per axis) whose
        Nyquist frequency reaches ``nyquist_at_least`` (per axis)."""
        dxi = tuple(np.atleast_1d(dxi).astype(float))
        nyq = tuple(np.broadcast_to(np.atleast_1d(nyquist_at_least), (len(dxi),)).astype(float))
        shape = []
        for step, target in zip(dxi, nyq):
            n = 8
            while n // 2 * step < target:
                n *= 2
            shape.append(n)
        return cls(tuple(shape), tuple(np.pi / s for s in dxi))

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def dxi(self) -> tuple:
        return tuple(np.pi / L for L in self.extent)

    @property
    def dx(self) -> tuple:
        return tuple(2 * L / n for L, n in zip(self.extent, self.shape))

    @property
    def cell(self) -> float:
        """Lattice measure ``prod(dxi)``."""
        return float(np.prod(self.dxi))

    @property
    def volume_element(self) -> float:
        return float(np.prod(self.dx))

    @property
    def nyquist(self) -> tuple:
        return tuple(n // 2 * s for n, s in zip(self.shape, self.dxi))

    @cached_property
    def index(self) -> list:
        """Signed integer lattice indices per axis, in FFT order."""
        return [np.fft.fftfreq(n, 1.0 / n).round().astype(np.int64) for n in self.shape]

    @cached_property
    def axes(self) -> list:
        return [k * s for k, s in zip(self.index, self.dxi)]

    @cached_property
    def xi(self) -> list:
        """Broadcastable frequency arrays, one per axis."""
        return list(np.meshgrid(*self.axes, indexing="ij", sparse=True))

    @cached_property
    def modulus(self) -> np.ndarray:
        return np.sqrt(sum(np.square(x) for x in self.xi))

    @cached_property
    def x(self) -> list:
        coords = [-L + np.arange(n) * h for L, n, h in zip(self.extent, self.shape, self.dx)]
        return list(np.meshgrid(*coords, indexing="ij", sparse=True))

    @cached_property
    def _shift(self) -> np.ndarray:
        # exp(i L xi_k) = (-1)^k re-centres the FFT on x in [-L, L)
        sign = np.ones(self.shape)
        for ax, k in enumerate(self.index):
            s = np.where(k % 2 == 0, 1.0, -1.0)
            sign = sign * s.reshape([-1 if i == ax else 1 for i in range(self.dimension)])
        return sign


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients on a :class:`FrequencyGrid` (FFT ordering)."""

    grid: FrequencyGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, complex))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def to_physical(self) -> np.ndarray:
        return to_physical(self.coeffs, self.grid)

    def is_real(self, rtol: float = 1e-12) -> bool:
        """Conjugate symmetry ``f_hat(-xi) = conj(f_hat(xi))``."""
        flipped = self.coeffs
        for ax in range(self.grid.dimension):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        scale = max(np.abs(self.coeffs).max(), 1e-300)
        return bool(np.abs(flipped - np.conj(self.coeffs)).max() <= rtol * scale)


@dataclass(frozen=True, eq=False)
class PhysicalField:
    grid: FrequencyGrid
    values: np.ndarray


def _same_grid(f: SpectralField, g: SpectralField) -> None:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def to_spectral(values: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[-grid.dimension:] != grid.shape:
        raise ValueError("size mismatch between values and grid")
    axes = tuple(range(-grid.dimension, 0))
    return np.fft.fftn(values, axes=axes) * grid._shift * grid.volume_element


def to_physical(coeffs: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    if coeffs.shape[-grid.dimension:] != grid.shape:
        raise ValueError("size mismatch between coefficients and grid")
    axes = tuple(range(-grid.dimension, 0))
    return np.fft.ifftn(coeffs * grid._shift, axes=axes) / grid.volume_element


def transform(field, direction: str):
    """``direction`` is ``"toPhysical"`` or ``"toSpectral"``."""
    if direction == "toPhysical":
        if not isinstance(field, SpectralField):
            raise TypeError("toPhysical expects a SpectralField")
        return PhysicalField(field.grid, to_physical(field.coeffs, field.grid))
    if direction == "toSpectral":
        if not isinstance(field, PhysicalField):
            raise TypeError("toSpectral expects a PhysicalField")
        return SpectralField(field.grid, to_spectral(field.values, field.grid))
    raise ValueError(f"unknown direction {direction!r}")


def japanese(modulus):
    """``<xi> = (1 + |xi|^2)^(1/2)``."""
    return np.sqrt(1.0 + np.square(modulus))


def sobolev_norm(field: SpectralField, s: float) -> float:
    """``(sum <xi>^{2s} |f_hat|^2 dxi^n)^{1/2}``."""
    w = japanese(field.grid.modulus) ** (2 * s)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2) * field.grid.cell))


def physical_lp_norm(values: np.ndarray, grid: FrequencyGrid, p) -> float:
    """Discrete ``L^p`` norm of physical samples (``p`` may be ``np.inf``)."""
    a = np.abs(values)
    if p == np.inf or p == "inf":
        return float(a.max())
    p = float(p)
    return float((np.sum(a**p) * grid.volume_element) ** (1 / p))


# --- Littlewood-Paley ------------------------------------------------------


def bump(r):
    """Radial profile: 1 on r<=1, cos^2 decay on (1, 2), 0 beyond."""
    r = np.asarray(r, dtype=float)
    mid = np.cos(0.5 * np.pi * (np.clip(r, 1.0, 2.0) - 1.0)) ** 2
    return np.where(r <= 1.0, 1.0, np.where(r >= 2.0, 0.0, mid))


def lp_multiplier(modulus, N: int):
    """``phi_N``; ``phi_1`` is the bump itself."""
    if N == 1:
        return bump(modulus)
    return bump(np.asarray(modulus) / N) - bump(2 * np.asarray(modulus) / N)


def _check_dyadic(N) -> int:
    N = int(N)
    if N < 1 or N & (N - 1):
        raise ValueError(f"{N} is not a dyadic number 2^k, k>=0")
    return N


def max_block(grid: FrequencyGrid) -> int:
    """Largest admissible dyadic block: at most half the (smallest) Nyquist frequency."""
    limit = min(grid.nyquist) / 2
    if limit < 1:
        raise ValueError("grid too coarse for Littlewood-Paley blocks")
    return 1 << int(np.floor(np.log2(limit)))


def lp_project(field: SpectralField, N: int) -> SpectralField:
    N = _check_dyadic(N)
    if N > min(field.grid.nyquist) / 2:
        raise ValueError(f"block N={N} exceeds half the Nyquist frequency")
    return SpectralField(field.grid, field.coeffs * lp_multiplier(field.grid.modulus, N))


@dataclass(frozen=True)
class LPDecomposition:
    blocks: list
    bump: Callable = field(default=bump)

    @property
    def levels(self) -> list:
        return [N for N, _ in self.blocks]

    def total(self) -> SpectralField:
        out = SpectralField.zeros(self.blocks[0][1].grid)
        for _, f in self.blocks:
            out = out + f
        return out


def lp_decompose(field: SpectralField, n_max: int | None = None) -> LPDecomposition:
    """Blocks ``P_N f`` for ``N = 1, 2, ..., n_max``; the sum reproduces ``f`` on
    ``|xi| <= n_max``."""
    n_max = max_block(field.grid) if n_max is None else _check_dyadic(n_max)
    blocks = []
    N = 1
    while N <= n_max:
        blocks.append((N, lp_project(field, N)))
        N *= 2
    return LPDecomposition(blocks)


def bernstein_ratio(field_N: SpectralField, N: int, p=2, q=None, s: float = 0.0) -> float:
    """Measured Bernstein ratio for a single dyadic block.

    With ``q`` omitted returns ``||D^s f_N||_p / (N^s ||f_N||_p)``; otherwise
    ``||f_N||_q / (N^{n/p - n/q} ||f_N||_p)``.
    """
    grid = field_N.grid
    if not np.any(field_N.coeffs):
        raise ValueError("empty block")
    f = to_physical(field_N.coeffs, grid)
    base = physical_lp_norm(f, grid, p)
    if q is None:
        mod = grid.modulus
        with np.errstate(divide="ignore"):
            mult = np.where(mod > 0, mod ** s, 0.0)
        g = to_physical(field_N.coeffs * mult, grid)
        return physical_lp_norm(g, grid, p) / (N**s * base)
    n = grid.dimension
    inv = lambda r: 0.0 if r in (np.inf, "inf") else 1.0 / float(r)
    return physical_lp_norm(f, grid, q) / (N ** (n * inv(p) - n * inv(q)) * base)


def random_block_field(grid: FrequencyGrid, levels: Sequence[int], rng: np.random.Generator,
                       real: bool = True) -> SpectralField:
    """Random field whose spectrum is a superposition of the given LP blocks."""
    z = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if real:
        z = to_spectral(to_physical(z, grid).real, grid)
    mult = np.zeros(grid.shape)
    for N in levels:
        mult = mult + rng.uniform(0.2, 1.0) * lp_multiplier(grid.modulus, N)
    return SpectralField(grid, z * mult)
