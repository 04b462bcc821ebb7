"""Sampling checks of the trigonometric lower bounds and of the 2D angle
geometry used to bound the second iterate from below."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..symbols import AbcdParams, eval_dispersion, eval_h, eval_varsigma
from .regimes import IllposedRegime


@dataclass
class LemmaReport:
    regime: str
    N: float
    samples: int
    min_lhs: float
    bound: float
    min_margin: float
    violations: int
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def lhs_1d(xi, xi1, s, t, p: AbcdParams):
    """Left-hand side of the 1D lower bound, with ``L1 = cos`` and ``L2 = i sin``
    so that the product of two ``L2`` factors is ``-sin sin``."""
    ph = lambda k, tau: k * eval_dispersion(k, p, 1) * tau
    xi2 = xi - xi1
    pref = (1 + p.d * xi**2) / (1 + p.b * xi**2) * eval_h(xi1, p) / eval_h(xi, p)
    first = -pref * np.sin(ph(xi, t - s)) * np.sin(ph(xi1, s)) * np.cos(ph(xi2, s))
    second = 0.5 * np.cos(ph(xi, t - s)) * np.cos(ph(xi1, s)) * np.cos(ph(xi2, s))
    return first + second


def _norm(v):
    return np.sqrt(np.sum(v**2, axis=-1))


def lhs_2d(xi, kappa, s, t, p: AbcdParams, prefactors: bool):
    """Left-hand side of the 2D lower bound (first factor ``J(t, xi)`` as stated).

    ``prefactors`` toggles the ``(1+d|xi|^2)/(1+b|xi|^2)`` and
    ``varsigma(|xi-kappa|)/varsigma(|xi|)`` weights of the generic case.
    """
    diff = xi - kappa
    mx, mk, md = _norm(xi), _norm(kappa), _norm(diff)
    ph = lambda m, tau: m * eval_dispersion(m, p, 2) * tau
    cos_xk = np.sum(xi * kappa, axis=-1) / (mx * mk)
    cos_theta = np.sum(-diff * kappa, axis=-1) / (md * mk)
    w = 1.0
    if prefactors:
        w = (1 + p.d * mx**2) / (1 + p.b * mx**2) * eval_varsigma(md, p) / eval_varsigma(mx, p)
    first = w * cos_xk * np.sin(ph(mx, t)) * np.sin(ph(md, s)) * np.cos(ph(mk, s))
    second = cos_theta * 0.5 * np.cos(ph(mx, t)) * np.cos(ph(md, s)) * np.cos(ph(mk, s))
    return first + second, (cos_theta - 0.5) / 16


def _uniform_in(rng, lo, hi):
    return lo + (hi - lo) * rng.random(np.shape(lo))


def sample_1d(N, T, count, rng):
    """``|xi| in [1/2, 1]``, ``xi1`` in one band with ``xi - xi1`` in the other,
    ``0 <= s <= t <= T``."""
    sign = rng.choice([-1.0, 1.0], count)
    xi = rng.choice([-1.0, 1.0], count) * rng.uniform(0.5, 1.0, count)
    # xi1 in sign*[N-1/2, N+1/2] and xi - xi1 in -sign*[N-1/2, N+1/2]
    lo = np.maximum(sign * N - 0.5, xi + sign * N - 0.5)
    hi = np.minimum(sign * N + 0.5, xi + sign * N + 0.5)
    xi1 = _uniform_in(rng, lo, hi)
    t = rng.uniform(0, T, count)
    s = t * rng.random(count)
    return xi, xi1, s, t


def sample_2d(N, T, count, rng):
    sign = rng.choice([-1.0, 1.0], count)
    r = rng.uniform(0.5, 1.0, count)
    ang = rng.uniform(0, 2 * np.pi, count)
    xi = np.stack([r * np.cos(ang), r * np.sin(ang)], -1)
    lo1 = np.maximum(sign * N - 0.5, xi[:, 0] + sign * N - 0.5)
    hi1 = np.minimum(sign * N + 0.5, xi[:, 0] + sign * N + 0.5)
    lo2 = np.maximum(-1.0, xi[:, 1] - 1.0)
    hi2 = np.minimum(1.0, xi[:, 1] + 1.0)
    kappa = np.stack([_uniform_in(rng, lo1, hi1), _uniform_in(rng, lo2, hi2)], -1)
    t = rng.uniform(0, T, count)
    s = t * rng.random(count)
    return xi, kappa, s, t


def lemma_lower_bound_check(regime, sample_count: int, rng: np.random.Generator,
                            N: float = 1e5, p: AbcdParams | None = None) -> LemmaReport:
    regime = IllposedRegime.parse(regime)
    p = regime.default_params if p is None else p
    regime.check_params(p)
    if N < 1e4:
        raise ValueError("lemma checks need N >= 1e4")
    T = regime.time(N)
    if regime.dimension == 1:
        xi, xi1, s, t = sample_1d(N, T, sample_count, rng)
        lhs = lhs_1d(xi, xi1, s, t, p)
        bound = np.full_like(lhs, 1 / 32)
        pts = {"xi": xi, "xi1": xi1, "s": s, "t": t}
    else:
        xi, kappa, s, t = sample_2d(N, T, sample_count, rng)
        # the (kappa - xi).kappa > 0 side condition holds on this sample set
        if np.any(np.sum((kappa - xi) * kappa, -1) <= 0):
            raise AssertionError("sampler left the lemma's constraint set")
        lhs, bound = lhs_2d(xi, kappa, s, t, p, prefactors=regime is IllposedRegime.GEN2D)
        pts = {"xi": xi, "kappa": kappa, "s": s, "t": t}
    margin = lhs - bound
    bad = margin < 0
    witness = None
    if bad.any():
        i = int(np.argmin(margin))
        witness = {k: np.asarray(v)[i].tolist() for k, v in pts.items()}
    return LemmaReport(regime.value, N, sample_count, float(lhs.min()), float(bound.min()),
                       float(margin.min()), int(bad.sum()), witness)


# --- geometry --------------------------------------------------------------


@dataclass
class GeometryReport:
    N: float
    samples: int
    max_cos_beta: float
    min_neg_p: float
    violations: int
    witness: dict | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def kernel_p(xi, kappa):
    """``p(xi, kappa) = ((xi - kappa)_1 + (xi - kappa)_2)/|xi - kappa|``
    times ``(kappa_1 + kappa_2)/|kappa|``."""
    diff = xi - kappa
    first = (diff[..., 0] + diff[..., 1]) / _norm(diff)
    return first * (kappa[..., 0] + kappa[..., 1]) / _norm(kappa)


def cos_beta(xi, kappa):
    diff = xi - kappa
    return np.sum(diff * kappa, axis=-1) / (_norm(diff) * _norm(kappa))


def _rectangle(N, sign):
    return np.array([sign * N - 0.5, -1.0]), np.array([sign * N + 0.5, 1.0])


def _corner_pairs(N, per_axis=9):
    """``kappa`` in one rectangle, ``xi - kappa`` in the other, on a tensor grid
    including all corners."""
    out = []
    for sign in (1.0, -1.0):
        (a, b), (c, d) = _rectangle(N, -sign), _rectangle(N, sign)
        g = lambda lo, hi: np.linspace(lo, hi, per_axis)
        k1, k2, e1, e2 = np.meshgrid(g(a[0], b[0]), g(a[1], b[1]), g(c[0], d[0]), g(c[1], d[1]),
                                     indexing="ij")
        kappa = np.stack([k1.ravel(), k2.ravel()], -1)
        eta = np.stack([e1.ravel(), e2.ravel()], -1)
        out.append((kappa, kappa + eta))
    kappa = np.concatenate([k for k, _ in out])
    xi = np.concatenate([x for _, x in out])
    return xi, kappa


def _random_pairs(N, count, rng):
    sign = rng.choice([-1.0, 1.0], count)[:, None]
    off_k = np.stack([rng.uniform(-0.5, 0.5, count), rng.uniform(-1, 1, count)], -1)
    off_e = np.stack([rng.uniform(-0.5, 0.5, count), rng.uniform(-1, 1, count)], -1)
    kappa = sign * np.array([N, 0.0]) + off_k
    eta = -sign * np.array([N, 0.0]) + off_e
    return kappa + eta, kappa


def geometry_check_2d(N: float, samples: int = 0, rng: np.random.Generator | None = None,
                      per_axis: int = 9) -> GeometryReport:
    """``cos(beta) <= -3/4`` and ``-p >= 3/4`` for opposite-box pairs.

    With ``samples == 0`` the rectangles are scanned on a tensor grid (corners
    included); otherwise ``samples`` random pairs are drawn from ``rng``.
    """
    if N <= 16:
        raise ValueError("the geometric bounds need N > 16")
    if samples:
        if rng is None:
            raise ValueError("random geometry checks need a generator")
        xi, kappa = _random_pairs(N, samples, rng)
    else:
        xi, kappa = _corner_pairs(N, per_axis)
    if np.any(np.abs(xi) > 2 + 1e-12):
        raise AssertionError("output frequency left S_L")
    cb = cos_beta(xi, kappa)
    negp = -kernel_p(xi, kappa)
    bad = (cb > -0.75) | (negp < 0.75)
    witness = None
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        witness = {"xi": xi[i].tolist(), "kappa": kappa[i].tolist()}
    return GeometryReport(N, len(xi), float(cb.max()), float(negp.min()), int(bad.sum()), witness)
