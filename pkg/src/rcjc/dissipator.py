"""Eigenbasis rate operators for the damped collective mode, the resulting
master-equation dissipator, and its vectorized (Liouvillian) form.

The augmented system obeys

    drho/dt = -i [H, rho] - [x, [chi, rho]] + [x, {theta, rho}]

with x = a + a^dag of the damped mode and, in the eigenbasis H|phi_j> =
w_j|phi_j> with xi_jk = w_j - w_k,

    chi   = (pi/2) sum_jk J(xi_jk) coth(beta xi_jk / 2) x_jk |phi_j><phi_k|
    theta = (pi/2) sum_jk J(xi_jk)                      x_jk |phi_j><phi_k|.

J is extended to odd negative arguments, which makes chi Hermitian and theta
anti-Hermitian, so the right-hand side is trace-free and Hermiticity
preserving. Imaginary (principal-value) contributions to the rates are
dropped as a modeling choice, not an approximation toggle. The equation is
not of Lindblad form: positivity of rho is not guaranteed and is therefore
monitored, never enforced, during integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hilbert import SpaceLayout, embed, ladder
from .linalg import TOL, DensityMatrix, Operator, hermitian_eig
from .spectral import RcParams, rate_factor

LIOUVILLIAN_MAX_VEC = 4096


@dataclass(frozen=True)
class RateOperators:
    """Dissipator ingredients for one damped mode, in the full-space basis."""

    chi: Operator
    theta: Operator
    x: Operator

    @cached_property
    def _fused(self):
        # the increment only needs theta -+ chi acting from the left/right
        return (self.theta.data - self.chi.data, self.theta.data + self.chi.data,
                self.x.data)

    def conjugated(self, u_data: np.ndarray) -> "RateOperators":
        ud = u_data.conj().T
        dims = self.chi.dims
        return RateOperators(
            chi=Operator(u_data @ self.chi.data @ ud, dims),
            theta=Operator(u_data @ self.theta.data @ ud, dims),
            x=Operator(u_data @ self.x.data @ ud, dims),
        )


def build_rate_operators(
    h: Operator, rc_index: int, rc: RcParams, beta: float
) -> RateOperators:
    """Rate operators for the mode `rc_index` (0-based) damped by its residual bath.

    `h` is the full-space Hamiltonian that defines the eigenbasis; its factor
    list must be (spin, mode_0, mode_1, ...).
    """
    layout = SpaceLayout(h.dims[1:])
    n = layout.boson_dims[rc_index]
    a, adag = ladder(n)
    x = embed(a + adag, rc_index + 1, layout)
    w, v = hermitian_eig(h)
    vd = v.data
    x_eig = vd.conj().T @ x.data @ vd
    xi = np.subtract.outer(w, w)
    chi_eig = (math.pi / 2.0) * rate_factor(rc.residual, xi, beta, weighted=True) * x_eig
    theta_eig = (math.pi / 2.0) * rate_factor(rc.residual, xi, beta, weighted=False) * x_eig
    return RateOperators(
        chi=Operator(vd @ chi_eig @ vd.conj().T, h.dims),
        theta=Operator(vd @ theta_eig @ vd.conj().T, h.dims),
        x=x,
    )


def dissipator_action(
    x: np.ndarray, chi: np.ndarray, theta: np.ndarray, rho: np.ndarray
) -> np.ndarray:
    """-[x, [chi, rho]] + [x, {theta, rho}] on raw matrices."""
    return fused_dissipator_action(x, theta - chi, theta + chi, rho)


def fused_dissipator_action(
    x: np.ndarray, tm: np.ndarray, tp: np.ndarray, rho: np.ndarray
) -> np.ndarray:
    """Same increment with tm = theta - chi, tp = theta + chi precombined:
    [x, (theta - chi) rho + rho (theta + chi)] (hot path, 4 matmuls)."""
    inner = tm @ rho + rho @ tp
    return x @ inner - inner @ x


def apply_dissipator(rates: RateOperators, rho: DensityMatrix) -> Operator:
    """Dissipative increment for a state; trace-free and Hermitian by construction."""
    if rates.x.dims != rho.dims:
        raise ValueError(f"factor mismatch: {rates.x.dims} vs {rho.dims}")
    out = dissipator_action(rates.x.data, rates.chi.data, rates.theta.data, rho.data)
    return Operator(out, rho.dims)


def build_liouvillian(h: Operator, rates_list=()) -> np.ndarray:
    """Matrix of the full generator acting on row-major vectorized states.

    Only valid for a time-independent Hamiltonian and constant rates. Guarded
    against vectorized dimensions above LIOUVILLIAN_MAX_VEC.
    """
    d = h.dim
    if d * d > LIOUVILLIAN_MAX_VEC:
        raise MemoryError(
            f"vectorized dimension {d * d} exceeds the {LIOUVILLIAN_MAX_VEC} guard"
        )
    eye = np.eye(d)
    liou = -1j * (np.kron(h.data, eye) - np.kron(eye, h.data.T))
    for rates in rates_list:
        x, chi, theta = rates.x.data, rates.chi.data, rates.theta.data
        liou += -np.kron(x @ chi, eye) + np.kron(x, chi.T) \
            + np.kron(chi, x.T) - np.kron(eye, (chi @ x).T)
        liou += np.kron(x @ theta, eye) + np.kron(x, theta.T) \
            - np.kron(theta, x.T) - np.kron(eye, (theta @ x).T)
    return liou


def conjugate_rates(rates: RateOperators, u: Operator) -> RateOperators:
    """Transport the rate operators to a rotated frame, A -> U A U^dag."""
    defect = u.unitary_defect()
    if defect > TOL.unitary:
        raise ValueError(f"frame map not unitary: max |U^dag U - 1| = {defect:.3e}")
    return rates.conjugated(u.data)
