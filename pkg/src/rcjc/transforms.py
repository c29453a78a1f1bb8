"""Exact unitary scaffolding between the lab and multiphoton frames.

The chain is lab <-> a <-> b <-> multiphoton. The spin-displacement unitary

    T(alpha) = (1/sqrt2) [ D^dag(alpha) (|e><e| - |g><e|)
                         + D(alpha)     (|g><g| + |e><g|) ]

acts on the spin and the first mode only. The composite frame map

    Phi(t) = U_b0^dag(t) T^dag(-lam/Omega) U_a0(t)

with U_a0 = exp(+i (Delta0/2) sx t) and
U_b0 = exp(-i [(Omega - nu) n1 - (omega/2) sz] t) carries a lab state to its
multiphoton-frame image, rho_n(t) ~= Phi rho_lab(t) Phi^dag; at t = 0 it
reduces to T^dag. All maps are unitary conjugations, so trace, purity and
spectra are preserved exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .hilbert import SpaceLayout, displacement, embed, pauli
from .linalg import DensityMatrix, Operator
from .models import ModelSpec


def t_alpha(alpha: complex, layout: SpaceLayout) -> Operator:
    """Spin-conditional displacement on (spin, mode 1); identity on other modes."""
    n1 = layout.boson_dims[0]
    d = displacement(alpha, n1).data
    dd = d.conj().T
    small = np.block([[dd, d], [-dd, d]]) / math.sqrt(2)
    rest = int(np.prod(layout.boson_dims[1:])) if layout.n_modes > 1 else 1
    return Operator(np.kron(small, np.eye(rest)), layout.dims)


def u_a0(spec: ModelSpec, t: float) -> Operator:
    """exp(+i (Delta0/2) sx t) on the full layout."""
    lay = spec.layout
    sx = embed(pauli("x"), 0, lay).data
    th = spec.delta0 * t / 2.0
    return Operator(math.cos(th) * np.eye(lay.dim) + 1j * math.sin(th) * sx, lay.dims)


def _b0_diagonal(spec: ModelSpec) -> np.ndarray:
    """Diagonal of (Omega - nu) n1 - (omega/2) sz over the full layout."""
    lay = spec.layout
    n1 = lay.boson_dims[0]
    rest = int(np.prod(lay.boson_dims[1:])) if lay.n_modes > 1 else 1
    mode = (spec.rcs[0].Omega - spec.nu_tilde) * np.arange(n1, dtype=float)
    spin = -spec.omega_tilde / 2.0 * np.array([1.0, -1.0])
    return np.add.outer(np.add.outer(spin, mode), np.zeros(rest)).ravel()


def u_b0(spec: ModelSpec, t: float) -> Operator:
    """exp(-i [(Omega - nu) n1 - (omega/2) sz] t); diagonal in the product basis."""
    return Operator(np.diag(np.exp(-1j * _b0_diagonal(spec) * t)), spec.layout.dims)


class FrameMap:
    """Precomputed pieces of Phi(t) for cheap repeated evaluation."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        rc = spec.rcs[0]
        self.alpha = -rc.lam / rc.Omega
        t_op = t_alpha(self.alpha, spec.layout)
        self._tdag = t_op.dag().data
        self._tdag_sx = self._tdag @ embed(pauli("x"), 0, spec.layout).data
        self._b0 = _b0_diagonal(spec)
        self._half_delta0 = spec.delta0 / 2.0

    def phi_data(self, t: float) -> np.ndarray:
        th = self._half_delta0 * t
        core = math.cos(th) * self._tdag + 1j * math.sin(th) * self._tdag_sx
        return np.exp(1j * self._b0 * t)[:, None] * core

    def phi(self, t: float) -> Operator:
        return Operator(self.phi_data(t), self.spec.layout.dims)


def phi(spec: ModelSpec, t: float) -> Operator:
    """Frame map Phi(t) = U_b0^dag T^dag U_a0; Phi(0) = T^dag(-lam/Omega)."""
    return FrameMap(spec).phi(t)


def to_multiphoton_frame(rho: DensityMatrix, spec: ModelSpec, t: float) -> DensityMatrix:
    """Map a lab state to the multiphoton frame, Phi(t) rho Phi^dag(t)."""
    p = FrameMap(spec).phi_data(t)
    return DensityMatrix(Operator(p @ rho.data @ p.conj().T, rho.dims))


def from_multiphoton_frame(rho: DensityMatrix, spec: ModelSpec, t: float) -> DensityMatrix:
    """Inverse map, Phi^dag(t) rho Phi(t)."""
    p = FrameMap(spec).phi_data(t)
    return DensityMatrix(Operator(p.conj().T @ rho.data @ p, rho.dims))


# ---------------------------------------------------------------------------
# regression suite for the conjugation algebra
#
# The T(alpha) identities are exact only in the untruncated space; on a
# truncated mode the commutator defect at the Fock ceiling contaminates the
# top levels, decaying by roughly a factor alpha per level downward. The
# residual helpers therefore evaluate everything on a mode padded by `pad`
# extra levels and compare on the physical N-level block, which is the
# truncation-converged statement of the identities.

def _keep_block(delta: np.ndarray, n_big: int, keep: int) -> float:
    d = delta.reshape(2, n_big, 2, n_big)
    return float(np.abs(d[:, :keep, :, :keep]).max())


def conjugation_identity_residuals(alpha: float, n: int, pad: int = 8) -> dict[str, float]:
    """Max-entry residuals of the five T(alpha) conjugation identities on the
    lowest n Fock levels, computed with a pad-level buffer above them."""
    from .hilbert import ladder  # local: avoid cycles at module import

    n_big = n + pad
    lay = SpaceLayout((n_big,))
    t_op = t_alpha(alpha, lay)
    td, t_ = t_op.dag().data, t_op.data
    a, adag = ladder(n_big)
    a_f, adag_f = embed(a, 1, lay).data, embed(adag, 1, lay).data
    sx, sy, sz = (embed(pauli(k), 0, lay).data for k in "xyz")
    sp = embed(pauli("plus"), 0, lay).data
    num = adag_f @ a_f
    x = a_f + adag_f
    d2sp = embed(displacement(2 * alpha, n_big), 1, lay).data @ sp
    eye = np.eye(lay.dim)
    res = {
        "sigma_x": td @ sx @ t_ + sz,
        "sigma_y": td @ sy @ t_ - (-1j * d2sp + (-1j * d2sp).conj().T),
        "sigma_z": td @ sz @ t_ - (d2sp + d2sp.conj().T),
        "number": td @ num @ t_ - (
            num + abs(alpha) ** 2 * eye
            - sz @ (np.conj(alpha) * a_f + alpha * adag_f)
        ),
        "sigma_x_x": td @ sx @ x @ t_ - (-sz @ x + 2 * np.real(alpha) * eye),
    }
    return {k: _keep_block(v, n_big, n) for k, v in res.items()}


def hb_conjugation_residual(spec: ModelSpec, pad: int = 8,
                            times=(0.0, 1.3, 170.0)) -> float:
    """Max-entry residual of T^dag H_a T + (lam^2/Omega) = H_b on the physical
    Fock block, with the ceiling buffered by `pad` levels."""
    from .models import h_a, h_b

    if spec.layout.n_modes != 1:
        raise ValueError("the conjugation equality check is single-mode")
    n = spec.layout.boson_dims[0]
    n_big = n + pad
    big = ModelSpec(
        n_photon=spec.n_photon, sideband=spec.sideband, epsilon0=spec.epsilon0,
        nu_tilde=spec.nu_tilde, omega_tilde=spec.omega_tilde, rcs=spec.rcs,
        beta=spec.beta, layout=SpaceLayout((n_big,)), delta0=float(spec.delta0),
        drivings=spec.drivings,
    )
    rc = big.rcs[0]
    t_op = t_alpha(-rc.lam / rc.Omega, big.layout)
    shift = rc.lam**2 / rc.Omega * np.eye(big.layout.dim)
    hb = h_b(big)
    worst = 0.0
    for t in times:
        delta = t_op.dag().data @ h_a(big, t).data @ t_op.data + shift - hb(t).data
        worst = max(worst, _keep_block(delta, n_big, n))
    return worst
