"""Low-frequency product bound, dyadic Schur sums and an empirical probe of
``||J^{s-1} D (fg)|| <= C ||f||_{H^s} ||g||_{H^s}``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import (FrequencyGrid, SpectralField, japanese, lp_project, max_block,
                       random_block_field, sobolev_norm, to_physical, to_spectral)


def product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pseudo-spectral ``(fg)^`` on the shared grid."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    grid = f.grid
    phys = to_physical(f.coeffs, grid) * to_physical(g.coeffs, grid)
    return SpectralField(grid, to_spectral(phys, grid))


def low_block_constant(grid: FrequencyGrid) -> float:
    """Cauchy-Schwarz ceiling for :func:`low_block_product_check`:
    ``(2 pi)^-n (lattice measure of |xi| <= 2)^{1/2}``."""
    count = int(np.count_nonzero(grid.modulus <= 2))
    return float(np.sqrt(count * grid.cell) / (2 * np.pi) ** grid.dimension)


def low_block_product_check(f: SpectralField, g: SpectralField) -> float:
    """``||P_1(fg)|| / (||f|| ||g||)``."""
    if not (np.any(f.coeffs) and np.any(g.coeffs)):
        return 0.0
    nf, ng = sobolev_norm(f, 0), sobolev_norm(g, 0)
    return sobolev_norm(lp_project(product(f, g), 1), 0) / (nf * ng)


# --- Schur sums -----------------------------------------------------------


@dataclass(frozen=True)
class SchurConfig:
    n: int
    s: float
    Nmax: int = 2**20

    def __post_init__(self):
        if self.Nmax < 2**10 or self.Nmax & (self.Nmax - 1):
            raise ValueError("Nmax must be a power of two >= 2^10")


@dataclass
class SchurResult:
    case: str
    levels: list
    values: list
    running_sup: list
    bounded: bool
    sup: float
    exponent: float | None
    last_change: float
    notes: list = field(default_factory=list)

    @property
    def sup_or_exponent(self) -> float:
        return self.sup if self.bounded else self.exponent


def _dyadic(lo: float, hi: float) -> list:
    """Powers of two ``2^k`` with ``lo <= 2^k <= hi``."""
    out, k = [], 1
    while k <= hi:
        if k >= lo:
            out.append(k)
        k *= 2
    return out


def _term_I(n, s, N, N2, N1):
    return N ** (-2 + 2 * s) * N2 ** (-2 * s) * N1 ** (n - 2 * s)


def _term_II(n, s, N2, N1, N):
    return N2 ** (-2 * s) * N1 ** (-2 * s) * N ** (n - 2 + 2 * s)


def schur_values(cfg: SchurConfig, case: str):
    """Per-outer-level inner sums.

    Case I: outer ``N`` (``1 < N <= Nmax``), ``N2 in {N/2, N, 2N}``, ``1 <= N1 <= 4 N2``.
    Case II: outer ``N2``, ``N1 in {N2/2, N2, 2N2}``, ``1 < N <= 4 N1``.
    """
    n, s = cfg.n, cfg.s
    outer = _dyadic(2, cfg.Nmax)
    vals = []
    for M in outer:
        terms = []
        for mid in (M / 2, M, 2 * M):
            if mid < 1:
                continue
            if case == "I":
                terms += [_term_I(n, s, M, mid, k) for k in _dyadic(1, 4 * mid)]
            else:
                terms += [_term_II(n, s, M, mid, k) for k in _dyadic(2, 4 * mid)]
        # fsum is correctly rounded, so the value does not depend on term order
        vals.append(math.fsum(terms))
    return outer, vals


def schur_values_swapped(cfg: SchurConfig):
    """Case I re-summed with the inner loops swapped (independent order)."""
    n, s = cfg.n, cfg.s
    outer = _dyadic(2, cfg.Nmax)
    vals = []
    for M in outer:
        mids = [m for m in (M / 2, M, 2 * M) if m >= 1]
        terms = []
        for k in _dyadic(1, 4 * max(mids)):
            terms += [_term_I(n, s, M, m, k) for m in mids if k <= 4 * m]
        vals.append(math.fsum(terms))
    return outer, vals


def schur_sum(cfg: SchurConfig, case: str = "I", stable_rtol: float = 1e-3,
              fit_octaves: int = 8) -> SchurResult:
    """Bounded if the running sup moves by less than ``stable_rtol`` over the last
    two octaves; otherwise the growth exponent is fitted on the top octaves."""
    if case not in ("I", "II"):
        raise ValueError("case must be 'I' or 'II'")
    levels, vals = schur_values(cfg, case)
    running = list(np.maximum.accumulate(vals))
    change = abs(running[-1] - running[-3]) / running[-1]
    bounded = change < stable_rtol
    exponent = None
    if not bounded:
        tail = slice(-fit_octaves, None)
        exponent = float(np.polyfit(np.log(levels[tail]), np.log(vals[tail]), 1)[0])
    return SchurResult(case, levels, list(vals), running, bounded, float(running[-1]), exponent,
                       float(change))


# --- operator-norm probe --------------------------------------------------


def bilinear_ratio(f: SpectralField, g: SpectralField, s: float) -> float:
    """``||<xi>^{s-1} |xi| (fg)^|| / (||f||_{H^s} ||g||_{H^s})``."""
    nf, ng = sobolev_norm(f, s), sobolev_norm(g, s)
    if nf == 0 or ng == 0:
        return 0.0
    fg = product(f, g)
    mod = fg.grid.modulus
    weighted = SpectralField(fg.grid, fg.coeffs * japanese(mod) ** (s - 1) * mod)
    return sobolev_norm(weighted, 0) / (nf * ng)


def bilinear_ratio_probe(n: int, s: float, trials: int, rng: np.random.Generator,
                         points: int = 256, extent: float = 16 * np.pi) -> float:
    """Largest ratio over ``trials`` random pairs built from LP blocks up to
    Nyquist/4."""
    if s < (n - 2) / 2:
        raise ValueError("the estimate is only claimed for s >= (n - 2)/2")
    grid = FrequencyGrid.make(n, points, extent)
    top = max_block(grid) // 2
    levels = [1 << k for k in range(int(np.log2(top)) + 1)]
    best = 0.0
    for _ in range(trials):
        chosen = [N for N in levels if rng.random() < 0.5] or [levels[-1]]
        f = random_block_field(grid, chosen, rng)
        chosen = [N for N in levels if rng.random() < 0.5] or [levels[-1]]
        g = random_block_field(grid, chosen, rng)
        best = max(best, bilinear_ratio(f, g, s))
    return best
