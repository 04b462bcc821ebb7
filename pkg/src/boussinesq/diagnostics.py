"""Randomised checks of the diagonalisation and of the group laws of the
linear flows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagators import (StateVector, apply_linear, block_matrices, change_of_variables,
                          diagonal_phases)
from .spectral import FrequencyGrid
from .symbols import BBM, GENERIC, KDV, AbcdParams, eval_dispersion, eval_omega

SYMMETRIC_GENERIC = AbcdParams(-1.0, 1.0, -1.0, 1.0)
ALL_REGIMES = {"generic": GENERIC, "kdv-kdv": KDV, "bbm-bbm": BBM, "generic-ab": SYMMETRIC_GENERIC}


@dataclass
class CheckRow:
    check: str
    regime: str
    dimension: int
    max_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error < self.tol)


def random_generic_params(rng: np.random.Generator) -> AbcdParams:
    a, c = -rng.uniform(0.05, 2.0, 2)
    b, d = rng.uniform(0.05, 2.0, 2)
    return AbcdParams(a, b, c, d)


def diagonalization_residual(samples: int, rng: np.random.Generator, batch: int = 100) -> float:
    """``max |P^-1 A P - diag(0, rho, -rho)|`` over random frequencies and generic parameters."""
    worst = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        p = random_generic_params(rng)
        xi = rng.normal(scale=3.0, size=(m, 2))
        mod = np.hypot(xi[:, 0], xi[:, 1])
        e1, e2 = xi[:, 0] / mod, xi[:, 1] / mod
        w1, w2 = eval_omega(mod, p)
        A = np.zeros((m, 3, 3))
        A[:, 0, 1], A[:, 0, 2] = e1 * w1, e2 * w1
        A[:, 1, 0], A[:, 2, 0] = e1 * w2, e2 * w2
        P, Pinv = block_matrices(xi[:, 0], xi[:, 1], p)
        rho = eval_dispersion(mod, p, 2)
        D = np.zeros((m, 3, 3))
        D[:, 1, 1], D[:, 2, 2] = rho, -rho
        res = np.abs(Pinv @ A @ P - D).max()
        worst = max(worst, float(res), float(np.abs(P @ Pinv - np.eye(3)).max()))
        done += m
    return worst


def random_state(grid: FrequencyGrid, rng: np.random.Generator) -> StateVector:
    shape = (grid.dimension + 1,) + grid.shape
    return StateVector(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def semigroup_checks(rng: np.random.Generator, trials: int = 5, points: int = 32,
                     extent: float = 2 * np.pi, tol: float = 1e-12) -> list:
    """Identity at 0, group law, inverse and diagonal-modulus conservation
    for every regime in 1D and 2D."""
    rows = []
    for name, p in ALL_REGIMES.items():
        for n in (1, 2):
            grid = FrequencyGrid.make(n, points, extent)
            err = {"identity": 0.0, "group": 0.0, "inverse": 0.0, "modulus": 0.0}
            for _ in range(trials):
                v = random_state(grid, rng)
                t, s = rng.uniform(-1, 1, 2)
                same = _rel(apply_linear(v, 0.0, p).coeffs, v.coeffs)
                err["identity"] = max(err["identity"], same)
                lhs = apply_linear(apply_linear(v, s, p), t, p).coeffs
                err["group"] = max(err["group"], _rel(lhs, apply_linear(v, t + s, p).coeffs))
                back = apply_linear(apply_linear(v, t, p), -t, p).coeffs
                err["inverse"] = max(err["inverse"], _rel(back, v.coeffs))
                d0 = change_of_variables(v, "toDiagonal", p).coeffs
                dt = change_of_variables(apply_linear(v, t, p), "toDiagonal", p).coeffs
                err["modulus"] = max(err["modulus"], _rel(np.abs(dt), np.abs(d0)))
                # the phase itself, not only its modulus
                err["modulus"] = max(err["modulus"], _rel(dt, d0 * diagonal_phases(grid, t, p)))
            rows += [CheckRow(k, name, n, e, tol) for k, e in err.items()]
    return rows
