"""Spectral densities and the reaction-coordinate parameter mapping.

An underdamped system-bath coupling J(w) = alpha * Gamma * w0^2 * w /
((w0^2 - w^2)^2 + Gamma^2 w^2) maps exactly onto a single collective mode of
frequency Omega = w0 coupled to the spin with lambda = sqrt(pi alpha w0 / 2),
the mode itself damped by an Ohmic residual bath of strength
gamma = Gamma / (2 pi w0). `reconstruct_sb` closes the loop: rebuilding the
original density from the mapped parameters is an algebraic identity, used
as the correctness witness for the mapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class UnderdampedSD:
    """Lorentzian-like coupling density peaked at omega0 (strength alpha, width Gamma)."""

    alpha: float
    Gamma: float
    omega0: float

    def __post_init__(self):
        if self.alpha < 0 or self.Gamma < 0 or self.omega0 <= 0:
            raise ValueError("require alpha >= 0, Gamma >= 0, omega0 > 0")


@dataclass(frozen=True)
class OhmicRcSD:
    """Residual-bath density J(w) = gamma * w * exp(-|w|/Lambda); Lambda may be inf."""

    gamma: float
    Lambda: float = math.inf

    def __post_init__(self):
        if self.gamma < 0 or not self.Lambda > 0:
            raise ValueError("require gamma >= 0 and Lambda > 0")


@dataclass(frozen=True)
class RcParams:
    """Collective-mode parameters: spin coupling lam, frequency Omega, residual bath."""

    lam: float
    Omega: float
    residual: OhmicRcSD = field(default_factory=lambda: OhmicRcSD(0.0))

    def __post_init__(self):
        if self.Omega <= 0 or self.lam < 0:
            raise ValueError("require Omega > 0 and lam >= 0")


def eval_underdamped(sd: UnderdampedSD, omega) -> float | np.ndarray:
    """Evaluate the underdamped density; poles (Gamma = 0, omega = omega0) are rejected."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be non-negative")
    if sd.Gamma == 0 and np.any(omega == sd.omega0):
        raise ZeroDivisionError("J diverges at omega = omega0 when Gamma = 0")
    num = sd.alpha * sd.Gamma * sd.omega0**2 * omega
    den = (sd.omega0**2 - omega**2) ** 2 + sd.Gamma**2 * omega**2
    out = num / den
    return float(out) if out.ndim == 0 else out


def map_to_rc(sd: UnderdampedSD) -> RcParams:
    """Extract the collective mode: gamma = Gamma/(2 pi w0), Omega = w0,
    lambda = sqrt(pi alpha w0 / 2). Valid for a residual cutoff Lambda >> Omega,
    so the residual bath defaults to the pure-Ohmic (infinite-cutoff) form."""
    gamma = sd.Gamma / (2.0 * math.pi * sd.omega0)
    lam = math.sqrt(math.pi * sd.alpha * sd.omega0 / 2.0)
    return RcParams(lam=lam, Omega=sd.omega0, residual=OhmicRcSD(gamma))


def reconstruct_sb(rc: RcParams, omega) -> float | np.ndarray:
    """Rebuild the original coupling density from mapped parameters:
    J(w) = 4 gamma Omega^2 lambda^2 w / ((Omega^2 - w^2)^2 + (2 pi gamma Omega w)^2)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be non-negative")
    gamma = rc.residual.gamma
    if gamma == 0 and np.any(omega == rc.Omega):
        raise ZeroDivisionError("reconstruction diverges at omega = Omega when gamma = 0")
    num = 4.0 * gamma * rc.Omega**2 * rc.lam**2 * omega
    den = (rc.Omega**2 - omega**2) ** 2 + (2.0 * math.pi * gamma * rc.Omega * omega) ** 2
    out = num / den
    return float(out) if out.ndim == 0 else out


def rate_factor(sd: OhmicRcSD, xi, beta: float, weighted: bool = True):
    """Bath factor entering the collective-mode rates, for scalar or array xi.

    weighted=True returns J(xi) coth(beta xi / 2), an even function of xi with
    analytic limit 2 gamma / beta at xi = 0; weighted=False returns the bare
    J(xi), extended to odd negative arguments (J(-xi) = -J(xi)). A finite
    cutoff applies as exp(-|xi|/Lambda) to keep the odd extension well defined.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    xi = np.asarray(xi, dtype=float)
    cut = np.exp(-np.abs(xi) / sd.Lambda) if np.isfinite(sd.Lambda) else 1.0
    bare = sd.gamma * xi * cut
    if not weighted:
        return float(bare) if bare.ndim == 0 else bare
    small = np.abs(xi) < 1e-9 / beta if np.isfinite(beta) else np.zeros_like(xi, bool)
    safe = np.where(small, 1.0, xi)
    if np.isinf(beta):
        out = sd.gamma * np.abs(xi) * cut   # coth -> sign(xi)
    else:
        with np.errstate(over="ignore"):
            out = sd.gamma * safe * cut / np.tanh(beta * safe / 2.0)
        out = np.where(small, 2.0 * sd.gamma / beta, out)
    return float(out) if out.ndim == 0 else out
