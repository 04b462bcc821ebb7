"""Quadratic forcing of the (abcd) system in Fourier variables.

Both the Picard iterate and the time stepper use :func:`quadratic_forcing`,
which returns the nonlinear part of ``d/dt (eta, u)``:

* ``eta``:  ``-i xi . (eta u)^ / (1 + b|xi|^2)``
* ``u_j``:  ``-i xi_j (|u|^2 / 2)^ / (1 + d|xi|^2)``
"""
from __future__ import annotations

import numpy as np

from .spectral import FrequencyGrid, to_physical, to_spectral
from .symbols import AbcdParams, eval_omega


class AliasingError(RuntimeError):
    """Product energy reached the top third of the lattice."""


def dealias_mask(grid: FrequencyGrid, fraction: float = 2 / 3) -> np.ndarray:
    """Boolean mask keeping ``|k_axis| < fraction * (P_axis / 2)`` on every axis.

    The strict inequality keeps triple products (the cubic energy term) free of
    aliasing into the zero mode.
    """
    mask = np.ones(grid.shape, bool)
    for ax, (k, n) in enumerate(zip(grid.index, grid.shape)):
        keep = np.abs(k) < fraction * (n // 2)
        mask &= keep.reshape([-1 if i == ax else 1 for i in range(grid.dimension)])
    return mask


def high_band_fraction(coeffs: np.ndarray, grid: FrequencyGrid, fraction: float = 2 / 3) -> float:
    """Share of ``sum |c|^2`` living outside :func:`dealias_mask`."""
    energy = np.abs(coeffs) ** 2
    if energy.ndim > grid.dimension:
        energy = energy.reshape((-1,) + grid.shape).sum(axis=0)
    total = energy.sum()
    if total == 0:
        return 0.0
    return float(energy[~dealias_mask(grid, fraction)].sum() / total)


def quadratic_forcing(coeffs: np.ndarray, grid: FrequencyGrid, p: AbcdParams,
                      mask: np.ndarray | None = None) -> np.ndarray:
    """Nonlinear time derivative for stacked coefficients ``(n+1, *grid.shape)``.

    ``mask`` (if given) is applied to the products before the multipliers.
    """
    n = grid.dimension
    phys = to_physical(coeffs, grid)
    eta, u = phys[0], phys[1:]
    eta_u = to_spectral(eta * u, grid)
    half_u2 = to_spectral(0.5 * np.sum(u * u, axis=0), grid)
    if mask is not None:
        eta_u = eta_u * mask
        half_u2 = half_u2 * mask
    k2 = grid.modulus**2
    out = np.empty_like(coeffs, dtype=complex)
    out[0] = -1j * sum(grid.xi[j] * eta_u[j] for j in range(n)) / (1 + p.b * k2)
    for j in range(n):
        out[j + 1] = -1j * grid.xi[j] * half_u2 / (1 + p.d * k2)
    return out


def linear_rhs(coeffs: np.ndarray, grid: FrequencyGrid, p: AbcdParams) -> np.ndarray:
    """Linear part: ``eta_t = -i w1 xi.u``, ``u_j,t = -i xi_j w2 eta``."""
    n = grid.dimension
    w1, w2 = eval_omega(grid.modulus, p)
    out = np.empty_like(coeffs, dtype=complex)
    out[0] = -1j * w1 * sum(grid.xi[j] * coeffs[j + 1] for j in range(n))
    for j in range(n):
        out[j + 1] = -1j * grid.xi[j] * w2 * coeffs[0]
    return out
