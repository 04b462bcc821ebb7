"""Scalar Fourier symbols of the linear (abcd)-Boussinesq system.

Every function here is vectorised over the frequency argument and is an even
function of it.  Parameter sets are validated once, when an
:class:`AbcdParams` is built.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

#: absolute tolerance for the equality constraints a=c, b=d
REGIME_TOL = 1e-12


class RegimeError(ValueError):
    """Parameters violate the regime they are tagged with, or the regime is
    not supported by the requested operation."""


class SymbolDomainError(ValueError):
    """A symbol was evaluated where its radicand is not positive."""


class Regime(enum.Enum):
    GENERIC = "generic"
    KDV_KDV = "kdv-kdv"
    BBM_BBM = "bbm-bbm"
    GENERIC_AB = "generic-ab"
    UNCLASSIFIED = "unclassified"


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= REGIME_TOL


def classify(a: float, b: float, c: float, d: float) -> Regime:
    """Most specific regime matched by ``(a, b, c, d)``."""
    symmetric = _close(a, c) and _close(b, d)
    if _close(a, 0) and _close(c, 0) and _close(b, 1 / 6) and _close(d, 1 / 6):
        return Regime.BBM_BBM
    if _close(a, 1) and _close(c, 1) and _close(b, 0) and _close(d, 0):
        return Regime.KDV_KDV
    if a < 0 and c < 0 and b > 0 and d > 0:
        return Regime.GENERIC
    if symmetric and b >= -REGIME_TOL:
        return Regime.GENERIC_AB
    return Regime.UNCLASSIFIED


def _regime_holds(regime: Regime, a: float, b: float, c: float, d: float) -> bool:
    if regime is Regime.GENERIC:
        return a < 0 and c < 0 and b > 0 and d > 0
    if regime is Regime.KDV_KDV:
        return _close(a, 1) and _close(c, 1) and _close(b, 0) and _close(d, 0)
    if regime is Regime.BBM_BBM:
        return _close(a, 0) and _close(c, 0) and _close(b, 1 / 6) and _close(d, 1 / 6)
    if regime is Regime.GENERIC_AB:
        return _close(a, c) and _close(b, d) and b >= -REGIME_TOL
    return True


@dataclass(frozen=True)
class AbcdParams:
    """Model coefficients together with the regime they are claimed to satisfy.

    When ``regime`` is omitted the most specific matching regime is picked.
    """

    a: float
    b: float
    c: float
    d: float
    regime: Regime | None = None

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.regime is None:
            object.__setattr__(self, "regime", classify(self.a, self.b, self.c, self.d))
        elif not _regime_holds(self.regime, self.a, self.b, self.c, self.d):
            raise RegimeError(
                f"(a,b,c,d)=({self.a},{self.b},{self.c},{self.d}) "
                f"violates the {self.regime.value} regime"
            )

    @property
    def symmetric(self) -> bool:
        """True when a=c and b=d, so that h and the 2D weight are identically 1."""
        return _close(self.a, self.c) and _close(self.b, self.d)

    def require(self, *allowed: Regime) -> None:
        if self.regime is Regime.UNCLASSIFIED:
            raise RegimeError("unclassified parameters: denominators may vanish")
        if allowed and self.regime not in allowed:
            names = ", ".join(r.value for r in allowed)
            raise RegimeError(f"regime {self.regime.value} not supported here (need {names})")


# Representative parameter sets.  The generic one comes from the physical
# derivation with theta=0, nu=2, mu=0, tau=3/2.
GENERIC = AbcdParams(-1 / 3, 1 / 6, -1 / 2, 1 / 2, Regime.GENERIC)
KDV = AbcdParams(1.0, 0.0, 1.0, 0.0, Regime.KDV_KDV)
BBM = AbcdParams(0.0, 1 / 6, 0.0, 1 / 6, Regime.BBM_BBM)


def eval_omega(xi, p: AbcdParams):
    """Return ``(omega_1, omega_2)`` at frequency ``xi``."""
    p.require()
    x2 = np.square(np.asarray(xi, dtype=float))
    w1 = (1 - p.a * x2) / (1 + p.b * x2)
    w2 = (1 - p.c * x2) / (1 + p.d * x2)
    return w1, w2


def eval_h(xi, p: AbcdParams):
    """Square root of omega_1/omega_2 (the multiplier of the 1D change of variables)."""
    if p.symmetric:
        p.require()
        return np.ones_like(np.asarray(xi, dtype=float))
    w1, w2 = eval_omega(xi, p)
    ratio = w1 / w2
    if np.any(ratio <= 0):
        bad = np.asarray(xi, dtype=float)[np.asarray(ratio <= 0)]
        raise SymbolDomainError(f"omega_1/omega_2 <= 0 at xi={bad.ravel()[:3]}")
    return np.sqrt(ratio)


def eval_sigma(xi, p: AbcdParams):
    """Non-negative square root of omega_1*omega_2."""
    w1, w2 = eval_omega(xi, p)
    prod = w1 * w2
    if np.any(prod < 0):
        bad = np.asarray(xi, dtype=float)[np.asarray(prod < 0)]
        raise SymbolDomainError(f"omega_1*omega_2 < 0 at xi={bad.ravel()[:3]}")
    return np.sqrt(prod)


def eval_dispersion(xi, p: AbcdParams, dimension: int = 1):
    """Phase symbol: the full phase of the linear flow is ``|xi| * eval_dispersion``.

    Symmetric regimes (a=c, b=d) use the signed rational ``omega_1`` so that the
    KdV-KdV symbol ``1 - xi**2`` keeps its sign; the generic regime uses the
    principal square root.  The value depends on ``|xi|`` only, so ``dimension``
    merely documents the caller.
    """
    if dimension not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    if p.symmetric:
        return eval_omega(xi, p)[0]
    return eval_sigma(xi, p)


def eval_varsigma(modulus, p: AbcdParams):
    """Weight of the 2D block matrix; identically 1 when a=c and b=d."""
    if p.symmetric:
        p.require()
        return np.ones_like(np.asarray(modulus, dtype=float))
    w1, w2 = eval_omega(modulus, p)
    rad = w1 / w2
    if np.any(rad <= 0):
        raise SymbolDomainError("negative radicand in varsigma")
    return np.sqrt(rad)


@dataclass(frozen=True)
class SigmaExpansion:
    """``sigma(xi) = leading + tilde(xi)`` with the first-order closed form of tilde."""

    leading: float
    alpha: float
    beta: float
    tilde: Callable
    first_order: Callable


def sigma_expansion(p: AbcdParams) -> SigmaExpansion:
    p.require(Regime.GENERIC)
    a, b, c, d = p.a, p.b, p.c, p.d
    leading = float(np.sqrt(a * c / (b * d)))
    alpha = -(b + d) - b * d * (a + c) / (a * c)
    beta = b * d / (a * c) - 1

    def tilde(xi):
        return eval_sigma(xi, p) - leading

    def first_order(xi):
        x2 = np.square(np.asarray(xi, dtype=float))
        return leading * (alpha * x2 + beta) / (2 * (1 + b * x2) * (1 + d * x2))

    return SigmaExpansion(leading, alpha, beta, tilde, first_order)


@dataclass(frozen=True)
class PhysicalDerivation:
    """Depth parameter ``theta``, free parameters ``nu``, ``mu`` and surface tension ``tau``."""

    theta: float
    nu: float
    mu: float
    tau: float = 0.0

    def __post_init__(self):
        if not 0 <= self.theta <= 1:
            raise ValueError("theta must lie in [0, 1]")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


def params_from_physical(pd: PhysicalDerivation) -> AbcdParams:
    """Map physical parameters to (a, b, c, d); the regime may come out unclassified."""
    t2 = pd.theta**2
    a = 0.5 * (t2 - 1 / 3) * pd.nu
    b = 0.5 * (t2 - 1 / 3) * (1 - pd.nu)
    c = 0.5 * (1 - t2) * pd.nu - pd.tau
    d = 0.5 * (1 - t2) * (1 - pd.mu)
    assert abs((a + b) - 0.5 * (t2 - 1 / 3)) <= 1e-12
    return AbcdParams(a, b, c, d)


def physical_identities(pd: PhysicalDerivation) -> dict:
    """Residuals of the parameter identities.

    ``a + b`` always matches; ``c + d`` and the total only match when
    ``mu == nu``, so they are reported as ``None`` otherwise.
    """
    p = params_from_physical(pd)
    t2 = pd.theta**2
    out = {"a+b": (p.a + p.b) - 0.5 * (t2 - 1 / 3), "c+d": None, "a+b+c+d": None}
    if pd.mu == pd.nu:
        out["c+d"] = (p.c + p.d) - (0.5 * (1 - t2) - pd.tau)
        out["a+b+c+d"] = (p.a + p.b + p.c + p.d) - (1 / 3 - pd.tau)
    return out
