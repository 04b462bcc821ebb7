"""Exact linear flows of the (abcd) system as Fourier-multiplier matrices.

The linear system reads ``d/dt v_hat + i xi M(xi) v_hat = 0`` (1D) or
``d/dt v_hat + i |xi| A(xi) v_hat = 0`` (2D), so the flow is the matrix
exponential ``exp(-i xi M t)`` / ``exp(-i |xi| A t)``.  Both are assembled in
closed form below; the diagonal-variable route in :func:`change_of_variables`
is kept separate so the two can be checked against each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import FrequencyGrid, SpectralField
from .symbols import (AbcdParams, eval_dispersion, eval_h, eval_omega,
                      eval_varsigma)


class SingularFrequencyError(ValueError):
    """The 2D block matrices are undefined at xi = 0."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """``(eta, u)`` in 1D or ``(eta, u1, u2)`` in 2D, stacked along axis 0."""

    grid: FrequencyGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        n = self.grid.dimension
        if coeffs.shape != (n + 1,) + self.grid.shape:
            raise ValueError(f"state must have shape {(n + 1,) + self.grid.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_fields(cls, *fields: SpectralField) -> "StateVector":
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise ValueError("all components must share one grid")
        return cls(grid, np.stack([f.coeffs for f in fields]))

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "StateVector":
        return cls(grid, np.zeros((grid.dimension + 1,) + grid.shape, complex))

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    @property
    def eta(self) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[0])

    @property
    def velocity(self) -> list:
        return [SpectralField(self.grid, c) for c in self.coeffs[1:]]

    def fields(self) -> list:
        return [SpectralField(self.grid, c) for c in self.coeffs]

    def __add__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def curl_residual(self) -> float:
        """``max |xi_1 u2_hat - xi_2 u1_hat|`` relative to ``max |xi| |u_hat|``."""
        if self.dimension != 2:
            return 0.0
        x1, x2 = self.grid.xi
        r = np.abs(x1 * self.coeffs[2] - x2 * self.coeffs[1]).max()
        scale = (self.grid.modulus * np.abs(self.coeffs[1:]).max(axis=0)).max()
        return float(r / scale) if scale > 0 else 0.0

    def is_irrotational(self, tol: float = 1e-12) -> bool:
        return self.curl_residual() <= tol


@dataclass(frozen=True, eq=False)
class DiagonalState:
    """``(v, w)`` in 1D or ``(mu, nu1, nu2)`` in 2D, stacked along axis 0."""

    grid: FrequencyGrid
    coeffs: np.ndarray


# --- 1D -------------------------------------------------------------------


def propagator_matrix_1d(xi, t: float, p: AbcdParams) -> np.ndarray:
    """``exp(-i xi M(xi) t)`` with shape ``xi.shape + (2, 2)``."""
    xi = np.asarray(xi, dtype=float)
    theta = xi * eval_dispersion(xi, p, 1) * t
    h = eval_h(xi, p)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(xi.shape + (2, 2), complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * h * s
    out[..., 1, 0] = -1j * s / h
    out[..., 1, 1] = c
    return out


def generator_matrix_1d(xi, p: AbcdParams) -> np.ndarray:
    """``xi M(xi)`` where ``M = [[0, omega_1], [omega_2, 0]]``."""
    xi = np.asarray(xi, dtype=float)
    w1, w2 = eval_omega(xi, p)
    out = np.zeros(xi.shape + (2, 2))
    out[..., 0, 1] = xi * w1
    out[..., 1, 0] = xi * w2
    return out


# --- 2D -------------------------------------------------------------------


def _directions(x1, x2):
    mod = np.hypot(x1, x2)
    safe = np.where(mod > 0, mod, 1.0)
    e1 = np.where(mod > 0, x1 / safe, 1.0)
    e2 = np.where(mod > 0, x2 / safe, 0.0)
    return mod, e1, e2


def propagator_matrix_2d(x1, x2, t: float, p: AbcdParams) -> np.ndarray:
    """``P diag(1, e^{-i theta}, e^{i theta}) P^{-1}``, ``theta = |xi| rho(|xi|) t``.

    The kernel (eigenvalue 0) direction is kept, so the result is the identity at
    ``t = 0`` and at ``xi = 0``.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    mod, e1, e2 = _directions(x1, x2)
    theta = mod * eval_dispersion(mod, p, 2) * t
    vs = eval_varsigma(mod, p)
    c, s = np.cos(theta), np.sin(theta)
    e = (e1, e2)
    out = np.empty(x1.shape + (3, 3), complex)
    out[..., 0, 0] = c
    for j in range(2):
        out[..., 0, j + 1] = -1j * vs * e[j] * s
        out[..., j + 1, 0] = -1j * e[j] * s / vs
        for k in range(2):
            out[..., j + 1, k + 1] = (j == k) - e[j] * e[k] * (1 - c)
    return out


def generator_matrix_2d(xi, p: AbcdParams) -> np.ndarray:
    """The matrix ``A(xi)`` of the 2D linear system (``xi != 0``)."""
    x1, x2 = float(xi[0]), float(xi[1])
    mod = np.hypot(x1, x2)
    if mod == 0:
        raise SingularFrequencyError("A(xi) is undefined at xi = 0")
    w1, w2 = eval_omega(mod, p)
    e1, e2 = x1 / mod, x2 / mod
    return np.array([[0, e1 * w1, e2 * w1], [e1 * w2, 0, 0], [e2 * w2, 0, 0]], float)


def block_matrices(x1, x2, p: AbcdParams):
    """Vectorised ``P(xi)`` and ``P^{-1}(xi)``; at ``xi = 0`` the direction (1, 0) is used."""
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    mod, e1, e2 = _directions(x1, x2)
    vs = eval_varsigma(mod, p)
    P = np.zeros(x1.shape + (3, 3))
    P[..., 0, 1], P[..., 0, 2] = vs, -vs
    P[..., 1, 0], P[..., 1, 1], P[..., 1, 2] = -e2, e1, e1
    P[..., 2, 0], P[..., 2, 1], P[..., 2, 2] = e1, e2, e2
    Pinv = np.zeros(x1.shape + (3, 3))
    Pinv[..., 0, 1], Pinv[..., 0, 2] = -e2, e1
    Pinv[..., 1, 0], Pinv[..., 1, 1], Pinv[..., 1, 2] = 1 / (2 * vs), e1 / 2, e2 / 2
    Pinv[..., 2, 0], Pinv[..., 2, 1], Pinv[..., 2, 2] = -1 / (2 * vs), e1 / 2, e2 / 2
    return P, Pinv


def diagonalize_2d(xi, p: AbcdParams):
    """Return ``(P, P^{-1}, (0, rho, -rho))`` at a single non-zero frequency."""
    x1, x2 = float(xi[0]), float(xi[1])
    mod = np.hypot(x1, x2)
    if mod == 0:
        raise SingularFrequencyError("the block matrix is undefined at xi = 0")
    P, Pinv = block_matrices(x1, x2, p)
    rho = float(eval_dispersion(mod, p, 2))
    return P, Pinv, (0.0, rho, -rho)


# --- application ------------------------------------------------------------


def _apply(matrix: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    # matrix: grid.shape + (m, m); coeffs: (m,) + grid.shape
    return np.einsum("...ij,j...->i...", matrix, coeffs)


def apply_linear_1d(state: StateVector, t: float, p: AbcdParams) -> StateVector:
    if state.dimension != 1:
        raise ValueError("apply_linear_1d needs a 1D state")
    m = propagator_matrix_1d(state.grid.axes[0], t, p)
    return StateVector(state.grid, _apply(m, state.coeffs))


def apply_linear_2d(state: StateVector, t: float, p: AbcdParams) -> StateVector:
    if state.dimension != 2:
        raise ValueError("apply_linear_2d needs a 2D state")
    x1, x2 = state.grid.xi
    m = propagator_matrix_2d(x1, x2, t, p)
    return StateVector(state.grid, _apply(m, state.coeffs))


def apply_linear(state: StateVector, t: float, p: AbcdParams) -> StateVector:
    if state.dimension == 1:
        return apply_linear_1d(state, t, p)
    return apply_linear_2d(state, t, p)


def change_of_variables(state, direction: str, p: AbcdParams):
    """Map ``StateVector -> DiagonalState`` (``"toDiagonal"``) or back (``"fromDiagonal"``).

    1D: ``eta = H(v + w)``, ``u = v - w``.  2D: ``(mu, nu1, nu2) = P^{-1}(eta, u1, u2)``.
    """
    grid = state.grid
    if direction not in ("toDiagonal", "fromDiagonal"):
        raise ValueError(f"unknown direction {direction!r}")
    if grid.dimension == 1:
        h = eval_h(grid.axes[0], p)
        a, b = state.coeffs
        if direction == "toDiagonal":
            return DiagonalState(grid, np.stack([(a / h + b) / 2, (a / h - b) / 2]))
        return StateVector(grid, np.stack([h * (a + b), a - b]))
    x1, x2 = grid.xi
    P, Pinv = block_matrices(x1, x2, p)
    if direction == "toDiagonal":
        return DiagonalState(grid, _apply(Pinv, state.coeffs))
    return StateVector(grid, _apply(P, state.coeffs))


def diagonal_phases(grid: FrequencyGrid, t: float, p: AbcdParams) -> np.ndarray:
    """Per-component phase factors of the flow in diagonal variables."""
    if grid.dimension == 1:
        xi = grid.axes[0]
        theta = xi * eval_dispersion(xi, p, 1) * t
        return np.stack([np.exp(-1j * theta), np.exp(1j * theta)])
    mod = grid.modulus
    theta = mod * eval_dispersion(mod, p, 2) * t
    return np.stack([np.ones_like(theta, dtype=complex), np.exp(-1j * theta), np.exp(1j * theta)])


def apply_linear_diagonal(state: StateVector, t: float, p: AbcdParams) -> StateVector:
    """Flow computed through the diagonal variables (independent of the matrix path)."""
    diag = change_of_variables(state, "toDiagonal", p)
    moved = DiagonalState(state.grid, diag.coeffs * diagonal_phases(state.grid, t, p))
    return change_of_variables(moved, "fromDiagonal", p)


def weighted_energy_1d(state: StateVector, p: AbcdParams, s: float = 0.0) -> float:
    """``sum (|eta_hat / h|^2 + |u_hat|^2) <xi>^{2s}``; conserved by the 1D flow."""
    xi = state.grid.axes[0]
    h = eval_h(xi, p)
    w = (1 + xi**2) ** s
    return float(np.sum(w * (np.abs(state.coeffs[0] / h) ** 2 + np.abs(state.coeffs[1]) ** 2)))
