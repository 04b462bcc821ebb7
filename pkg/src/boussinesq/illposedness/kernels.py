"""Second Picard iterate by direct quadrature of its convolution integral.

For data ``v0 = (0, H chi)`` the Duhamel integrand at output frequency ``xi``
and time ``s`` is

    Q(s, xi) = S(t - s, xi) F(s, xi),
    F(s, xi) = (2 pi)^-n  int  f(V(kappa), W(xi - kappa)) dkappa,

with ``V = S(s) v0`` evaluated pointwise and ``f`` the quadratic forcing
written out per frequency pair.  The ``kappa`` integral runs over the exact
intersection boxes ``B_i n (xi - B_j)`` with tensor Gauss-Legendre rules; on
each such box the integrand is a smooth trigonometric function.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ..propagators import propagator_matrix_1d, propagator_matrix_2d
from ..spectral import japanese
from ..symbols import AbcdParams, eval_dispersion, eval_h
from .data import LocalizedData, build_data
from .regimes import IllposedRegime


class QuadratureError(RuntimeError):
    """Refinement failed to reach the requested tolerance."""

    def __init__(self, message, coarse, fine):
        super().__init__(f"{message}: last two refinements {coarse!r}, {fine!r}")
        self.coarse, self.fine = coarse, fine


def gauss_legendre(order: int, lo, hi):
    """Nodes and weights of the ``order``-point rule on ``[lo, hi]`` (broadcast)."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = np.asarray(lo, float)[..., None], np.asarray(hi, float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


def _propagator(dimension: int):
    if dimension == 1:
        return lambda k, t, p: propagator_matrix_1d(k[..., 0], t, p)
    return lambda k, t, p: propagator_matrix_2d(k[..., 0], k[..., 1], t, p)


def _free_state(k: np.ndarray, s: float, p: AbcdParams, height: float) -> np.ndarray:
    """``S(s) (0, H, ..., H)`` at frequencies ``k`` (last axis = components)."""
    S = _propagator(k.shape[-1])(k, s, p)
    return height * S[..., :, 1:].sum(axis=-1)


def _pair_forcing(xi, V, W, p: AbcdParams) -> np.ndarray:
    """Integrand of the forcing for the ordered pair (V at kappa, W at xi - kappa)."""
    n = xi.shape[-1]
    k2 = np.sum(xi**2, axis=-1)
    out = np.empty(np.broadcast_shapes(V.shape, xi[..., :1].shape[:-1] + (n + 1,)), complex)
    flux = sum(xi[..., j] * V[..., 0] * W[..., j + 1] for j in range(n))
    out[..., 0] = -1j * flux / (1 + p.b * k2)
    half_u2 = 0.5 * sum(V[..., j + 1] * W[..., j + 1] for j in range(n))
    for j in range(n):
        out[..., j + 1] = -1j * xi[..., j] * half_u2 / (1 + p.d * k2)
    return out


def _intersection(box_i, box_j, xi):
    """Bounds of ``B_i n (xi - B_j)`` per node: arrays (..., n)."""
    lo = np.maximum(np.asarray(box_i.lo), xi - np.asarray(box_j.hi))
    hi = np.minimum(np.asarray(box_i.hi), xi - np.asarray(box_j.lo))
    return lo, np.maximum(hi, lo)


def forcing(xi: np.ndarray, s_time: float, data: LocalizedData, p: AbcdParams,
            order: int) -> np.ndarray:
    """``F(s, xi)`` at nodes ``xi`` (shape (..., n)); returns (..., n+1)."""
    xi = np.asarray(xi, float)
    n = xi.shape[-1]
    total = np.zeros(xi.shape[:-1] + (n + 1,), complex)
    for box_i, box_j in product(data.boxes, repeat=2):
        lo, hi = _intersection(box_i, box_j, xi)
        if not np.any(np.prod(hi - lo, axis=-1) > 0):
            continue
        nodes, weights = [], []
        for j in range(n):
            x, w = gauss_legendre(order, lo[..., j], hi[..., j])
            nodes.append(x)
            weights.append(w)
        # tensor grid over kappa: shape (..., order^n)
        if n == 1:
            kappa = nodes[0][..., None]
            wk = weights[0]
        else:
            k1, k2 = np.broadcast_arrays(nodes[0][..., :, None], nodes[1][..., None, :])
            kappa = np.stack([k1, k2], -1)
            kappa = kappa.reshape(xi.shape[:-1] + (order * order, 2))
            wk = weights[0][..., :, None] * weights[1][..., None, :]
            wk = wk.reshape(xi.shape[:-1] + (-1,))
        xib = xi[..., None, :]
        V = _free_state(kappa, s_time, p, data.height)
        W = _free_state(xib - kappa, s_time, p, data.height)
        f = _pair_forcing(xib, V, W, p)
        total += np.sum(f * wk[..., None], axis=-2)
    return total / (2 * np.pi) ** n


def duhamel_integrand(xi, s_time: float, t: float, data: LocalizedData, p: AbcdParams,
                      order: int = 16) -> np.ndarray:
    """All components of ``Q(s, xi) = S(t - s, xi) F(s, xi)``."""
    xi = np.asarray(xi, float)
    F = forcing(xi, s_time, data, p, order)
    S = _propagator(xi.shape[-1])(xi, t - s_time, p)
    return np.einsum("...ij,...j->...i", S, F)


def _as_points(xi, dimension: int) -> np.ndarray:
    xi = np.asarray(xi, float)
    if dimension == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    return xi


def q2_kernel(regime, xi, s_time: float, t: float, data: LocalizedData,
              p: AbcdParams | None = None, order: int = 8, rtol: float = 1e-6,
              max_order: int = 128, component: int = 1) -> complex:
    """``Q_2(s, xi)``: first velocity component of the Duhamel integrand.

    The ``kappa`` rule is doubled until two consecutive values agree to
    ``rtol`` (relative, or absolute when the value vanishes).
    """
    regime = IllposedRegime.parse(regime)
    p = regime.default_params if p is None else p
    regime.check_params(p)
    pt = _as_points(xi, regime.dimension)
    prev = duhamel_integrand(pt, s_time, t, data, p, order)[..., component]
    while True:
        order *= 2
        cur = duhamel_integrand(pt, s_time, t, data, p, order)[..., component]
        scale = max(abs(complex(cur)), 1e-300)
        if abs(complex(cur - prev)) <= rtol * scale or abs(complex(cur)) < 1e-300:
            return complex(cur)
        if order >= max_order:
            raise QuadratureError("q2_kernel did not converge", complex(prev), complex(cur))
        prev = cur


def q2_split_1d(xi: float, s_time: float, t: float, data: LocalizedData,
                p: AbcdParams, order: int = 32):
    """``(Q21, Q22)`` in the unnormalised form used by the lower-bound lemma:
    ``i xi/(h (1+b xi^2)) int h(x1) L2 L2 L1`` and ``i xi/(2(1+d xi^2)) int L1 L1 L1``
    with ``L1 = cos``, ``L2 = i sin``.  Their sum equals ``-2 pi`` times the
    second component of :func:`duhamel_integrand`.
    """
    if data.dimension != 1:
        raise ValueError("one-dimensional data required")
    xi = float(xi)
    phase = lambda k, tau: k * eval_dispersion(k, p, 1) * tau
    q21 = q22 = 0j
    for box_i, box_j in product(data.boxes, repeat=2):
        lo, hi = _intersection(box_i, box_j, np.array([xi]))
        if hi[0] <= lo[0]:
            continue
        k1, w = gauss_legendre(order, lo[0], hi[0])
        k2 = xi - k1
        L1 = lambda k, tau: np.cos(phase(k, tau))
        L2 = lambda k, tau: 1j * np.sin(phase(k, tau))
        uu = data.height**2
        q21 += np.sum(w * eval_h(k1, p) * L2(xi, t - s_time) * L2(k1, s_time) * L1(k2, s_time)) * uu
        q22 += np.sum(w * L1(xi, t - s_time) * L1(k1, s_time) * L1(k2, s_time)) * uu
    h = float(eval_h(xi, p))
    q21 *= 1j * xi / (h * (1 + p.b * xi**2))
    q22 *= 1j * xi / (2 * (1 + p.d * xi**2))
    return complex(q21), complex(q22)


def low_region_panels(dimension: int):
    """Rectangles covering the low-frequency target region, split at the kinks
    of the box-overlap function."""
    if dimension == 1:
        return [((-1.0,), (0.0,)), ((0.0,), (1.0,))]
    return [((a, b), (a + 1, b + 2)) for a in (-1.0, 0.0) for b in (-2.0, 0.0)]


@dataclass(frozen=True)
class LowFreqResult:
    norm: float
    certificate: float
    orders: tuple


def _low_norm(regime, data, p, t, sprime, space_order, time_order, chunk=64):
    n = regime.dimension
    ts, tw = gauss_legendre(time_order, 0.0, t)
    total = 0.0
    for lo, hi in low_region_panels(n):
        axes = [gauss_legendre(space_order, lo[j], hi[j]) for j in range(n)]
        if n == 1:
            pts = axes[0][0][:, None]
            wts = axes[0][1]
        else:
            g1, g2 = np.meshgrid(axes[0][0], axes[1][0], indexing="ij")
            pts = np.stack([g1.ravel(), g2.ravel()], -1)
            wts = np.outer(axes[0][1], axes[1][1]).ravel()
        acc = np.zeros(len(pts), complex)
        for start in range(0, len(pts), chunk):
            sl = slice(start, start + chunk)
            for s_node, s_w in zip(ts, tw):
                acc[sl] += s_w * duhamel_integrand(pts[sl], s_node, t, data, p, space_order)[..., 1]
        mod = np.sqrt(np.sum(pts**2, axis=-1))
        total += np.sum(wts * japanese(mod) ** (2 * sprime) * np.abs(acc) ** 2)
    return float(np.sqrt(total))


def a2_lowfreq_norm(regime, N: float, s: float, sprime: float = 0.0, p: AbcdParams | None = None,
                    space_order: int = 8, time_order: int = 8, rtol: float = 1e-4,
                    max_order: int = 64, t: float | None = None) -> LowFreqResult:
    """``|| <xi>^{s'} int_0^t Q_2(s, xi) ds ||_{L^2(low region)}`` with ``t`` from the
    regime's time rule.  All quadrature orders are doubled once more than needed:
    the returned certificate is the relative change of the last doubling.
    """
    regime = IllposedRegime.parse(regime)
    p = regime.default_params if p is None else p
    regime.check_params(p)
    t = regime.time(N) if t is None else t
    data = build_data(regime, N, s, with_state=False)
    prev = _low_norm(regime, data, p, t, sprime, space_order, time_order)
    while True:
        space_order *= 2
        time_order *= 2
        cur = _low_norm(regime, data, p, t, sprime, space_order, time_order)
        change = abs(cur - prev) / max(abs(cur), 1e-300)
        if change < rtol:
            return LowFreqResult(cur, change, (space_order, time_order))
        if space_order >= max_order:
            raise QuadratureError("a2_lowfreq_norm did not converge", prev, cur)
        prev = cur
