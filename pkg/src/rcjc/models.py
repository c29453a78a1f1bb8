"""Hamiltonian constructors for the augmented spin+mode systems and the target
multiphoton models, plus the scalar relations between them.

Conventions (hbar = 1, energies in units of the first mode frequency unless a
spec says otherwise):

  H_lab  = (Delta0/2) sx + (eps0/2) sz + Omega n1 + lam sx (a1 + a1^dag) [+ mode 2]
  H_n    = (omega_t/2) sz + nu_t n1 + g_n (s+ a1^n + h.c.)              [+ mode 2]

with the n-photon coupling g_n = eps0 / (2 n!) * (2 lam / Omega)^n and the
full |e,0> -> |g,n> transfer time tau_n = pi / (2 g_n sqrt(n!)). The
prefactor-free variant sqrt(n!)/eps0 * (Omega/2 lam)^n that sometimes appears
in the literature drops the constant pi/2; this package uses the pi-bearing
form throughout, which is the exact half Rabi period for coupling
g_n sqrt(n!).

A spin bias driven at Delta_j = +-n (nu_t - Omega) - omega_t resonantly
selects an n-boson exchange term; '+' drives sigma^+ a^n (red), '-' drives
sigma^+ (-a^dag)^n (blue).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import SpaceLayout, displacement, embed, ladder, number_op, pauli
from .linalg import Operator
from .spectral import RcParams

LAMB_DICKE_WARN = 0.3
RWA_WARN = 0.1


@dataclass(frozen=True)
class ModelSpec:
    """Validated scenario description; immutable after construction."""

    n_photon: int
    sideband: str                      # 'red' or 'blue'
    epsilon0: float
    nu_tilde: float
    omega_tilde: float
    rcs: tuple[RcParams, ...]
    beta: float
    layout: SpaceLayout
    delta0: float | str = "auto"
    drivings: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.n_photon < 1:
            raise ValueError("n_photon must be >= 1")
        if self.sideband not in ("red", "blue"):
            raise ValueError(f"sideband must be 'red' or 'blue', got {self.sideband!r}")
        if len(self.rcs) not in (1, 2):
            raise ValueError("exactly one or two reaction coordinates are supported")
        if len(self.layout.boson_dims) != len(self.rcs):
            raise ValueError("layout must carry one bosonic factor per reaction coordinate")
        if not self.beta > 0:
            raise ValueError("beta must be positive (may be inf)")
        object.__setattr__(self, "rcs", tuple(self.rcs))
        object.__setattr__(self, "drivings", tuple(tuple(d) for d in self.drivings))
        if self.delta0 == "auto":
            sign = 1.0 if self.sideband == "red" else -1.0
            val = sign * self.n_photon * (self.nu_tilde - self.rcs[0].Omega) - self.omega_tilde
            object.__setattr__(self, "delta0", val)
        elif isinstance(self.delta0, str):
            raise ValueError(f"delta0 must be a number or 'auto', got {self.delta0!r}")
        if self.lamb_dicke > LAMB_DICKE_WARN:
            warnings.warn(
                f"2*lam/Omega = {self.lamb_dicke:.3f} strains the Lamb-Dicke regime",
                stacklevel=2,
            )
        if self.rwa_ratio > RWA_WARN:
            warnings.warn(
                f"eps0 / (2|Omega - nu|) = {self.rwa_ratio:.3f} strains the "
                "rotating-wave approximation",
                stacklevel=2,
            )

    @property
    def lamb_dicke(self) -> float:
        return 2.0 * self.rcs[0].lam / self.rcs[0].Omega

    @property
    def rwa_ratio(self) -> float:
        return self.epsilon0 / (2.0 * abs(self.rcs[0].Omega - self.nu_tilde))

    def driving_terms(self):
        """All bias/driving terms as (eps_j, Delta_j, n_j, sideband) tuples.

        The j = 0 entry is the static bias at the spec's own resonance; j >= 1
        entries infer their boson order from Delta_j = +-n (nu - Omega) - omega.
        """
        out = [(self.epsilon0, float(self.delta0), self.n_photon, self.sideband)]
        base = self.nu_tilde - self.rcs[0].Omega
        for j, (eps, delta) in enumerate(self.drivings, start=1):
            ratio = (delta + self.omega_tilde) / base
            n = round(ratio)
            if n == 0 or abs(ratio - n) > 1e-6 * max(1.0, abs(n)):
                raise ValueError(
                    f"driving {j}: detuning {delta} is not resonant with an integer "
                    f"boson order (got {ratio:.6g})"
                )
            out.append((eps, delta, abs(n), "red" if n > 0 else "blue"))
        return out


def _spin_drive_matrix(spec: ModelSpec, t: float) -> np.ndarray:
    sx, sy, sz = pauli("x").data, pauli("y").data, pauli("z").data
    h = spec.delta0 / 2.0 * sx + spec.epsilon0 / 2.0 * sz
    for eps, delta in spec.drivings:
        ph = (delta - spec.delta0) * t
        h = h + eps / 2.0 * (math.cos(ph) * sz + math.sin(ph) * sy)
    return h


def h_spin_drivings(spec: ModelSpec, t: float = 0.0) -> Operator:
    """Spin-only part: (Delta0/2) sx + sum_j (eps_j/2)[cos((Dj-D0)t) sz + sin(..) sy]."""
    return Operator(_spin_drive_matrix(spec, t), (2,))


def _h_lab(spec: ModelSpec, t: float) -> Operator:
    h = embed(Operator(_spin_drive_matrix(spec, t), (2,)), 0, spec.layout)
    sx_full = embed(pauli("x"), 0, spec.layout)
    for i, rc in enumerate(spec.rcs):
        n = spec.layout.boson_dims[i]
        a, adag = ladder(n)
        h = h + rc.Omega * embed(number_op(n), i + 1, spec.layout)
        h = h + rc.lam * (sx_full @ embed(a + adag, i + 1, spec.layout))
    return h


def h_s_rc(spec: ModelSpec, t: float = 0.0) -> Operator:
    """Spin plus single collective mode in the lab frame."""
    if len(spec.rcs) != 1:
        raise ValueError("h_s_rc needs exactly one reaction coordinate")
    return _h_lab(spec, t)


def h_s_prime(spec: ModelSpec, t: float = 0.0) -> Operator:
    """Spin plus two collective modes in the lab frame."""
    if len(spec.rcs) != 2:
        raise ValueError("h_s_prime needs exactly two reaction coordinates")
    return _h_lab(spec, t)


def h_lab_frame(spec: ModelSpec, t: float = 0.0) -> Operator:
    """Lab-frame Hamiltonian for however many modes the spec carries."""
    return _h_lab(spec, t)


def h_a(spec: ModelSpec, t: float = 0.0) -> Operator:
    """Rotating-frame Hamiltonian with the sigma_x splitting removed:
    sum_k [Omega_k n_k + lam_k sx x_k] + sum_j (eps_j/2)[cos(Dj t) sz + sin(Dj t) sy].
    """
    lay = spec.layout
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    spin = np.zeros((2, 2), dtype=complex)
    for eps, delta, _, _ in spec.driving_terms():
        spin = spin + eps / 2.0 * (
            math.cos(delta * t) * sz.data + math.sin(delta * t) * sy.data
        )
    h = embed(Operator(spin, (2,)), 0, lay)
    sx_full = embed(sx, 0, lay)
    for i, rc in enumerate(spec.rcs):
        n = lay.boson_dims[i]
        a, adag = ladder(n)
        h = h + rc.Omega * embed(number_op(n), i + 1, lay)
        h = h + rc.lam * (sx_full @ embed(a + adag, i + 1, lay))
    return h


def h_b(spec: ModelSpec):
    """Factory t -> Operator for the displaced-frame Hamiltonian
    Omega n1 + sum_j (eps_j/2)[s+ exp(2 lam (a - a^dag)/Omega) e^{-i Delta_j t} + h.c.].

    Exact (no Lamb-Dicke expansion); the displacement interior is built by
    `hilbert.displacement`.
    """
    if len(spec.rcs) != 1:
        raise ValueError("h_b is defined for the single-mode layout")
    rc = spec.rcs[0]
    n1 = spec.layout.boson_dims[0]
    d_int = displacement(-2.0 * rc.lam / rc.Omega, n1)
    sp_d = embed(pauli("plus"), 0, spec.layout) @ embed(d_int, 1, spec.layout)
    num = rc.Omega * embed(number_op(n1), 1, spec.layout)
    terms = [(eps, delta) for eps, delta, _, _ in spec.driving_terms()]

    def factory(t: float) -> Operator:
        h = num
        for eps, delta in terms:
            piece = (eps / 2.0) * np.exp(-1j * delta * t) * sp_d
            h = h + piece + piece.dag()
        return h

    return factory


def _mode1_power(spec: ModelSpec, n: int) -> np.ndarray:
    n1 = spec.layout.boson_dims[0]
    if n >= n1:
        raise ValueError(f"boson order n = {n} needs Fock truncation > n (got {n1})")
    a, _ = ladder(n1)
    return np.linalg.matrix_power(a.data, n)


def h_n(spec: ModelSpec) -> Operator:
    """Target multiphoton Hamiltonian
    (omega/2) sz + nu n1 + sum_j g_j (s+ a^{n_j} + h.c.)  [red]
                         + sum_j g_j (s+ (-a^dag)^{n_j} + h.c.)  [blue]."""
    if len(spec.rcs) != 1:
        raise ValueError("h_n is defined for the single-mode layout; see h_n2")
    return _h_target(spec)


def _h_target(spec: ModelSpec) -> Operator:
    lay = spec.layout
    h = spec.omega_tilde / 2.0 * embed(pauli("z"), 0, lay)
    h = h + spec.nu_tilde * embed(number_op(lay.boson_dims[0]), 1, lay)
    sp = embed(pauli("plus"), 0, lay)
    for eps, _, n_j, side in spec.driving_terms():
        g = eps / (2.0 * math.factorial(n_j)) * spec.lamb_dicke**n_j
        an = _mode1_power(spec, n_j)
        if side == "red":
            mode = Operator(an, (lay.boson_dims[0],))
        else:
            mode = Operator((-1.0) ** n_j * an.conj().T, (lay.boson_dims[0],))
        piece = g * (sp @ embed(mode, 1, lay))
        h = h + piece + piece.dag()
    return h


def h_n2(spec: ModelSpec) -> Operator:
    """Two-mode target: h_n terms on (spin, mode 1) plus
    Omega2 n2 - lam2 sz (a2 + a2^dag)."""
    if len(spec.rcs) != 2:
        raise ValueError("h_n2 needs exactly two reaction coordinates")
    lay = spec.layout
    rc2 = spec.rcs[1]
    n2 = lay.boson_dims[1]
    a2, a2dag = ladder(n2)
    h = _h_target(spec)
    h = h + rc2.Omega * embed(number_op(n2), 2, lay)
    h = h - rc2.lam * (embed(pauli("z"), 0, lay) @ embed(a2 + a2dag, 2, lay))
    return h


def h_target_frame(spec: ModelSpec) -> Operator:
    """Target-frame Hamiltonian for however many modes the spec carries."""
    return h_n(spec) if len(spec.rcs) == 1 else h_n2(spec)


def coupling_strength(spec: ModelSpec, n: int | None = None) -> float:
    """Effective n-boson exchange coupling g_n = eps0/(2 n!) (2 lam/Omega)^n."""
    n = spec.n_photon if n is None else n
    return spec.epsilon0 / (2.0 * math.factorial(n)) * spec.lamb_dicke**n


def transfer_time(spec: ModelSpec, n: int | None = None) -> float:
    """Full |e,0> -> |g,n> population-transfer time, tau_n = pi/(2 g_n sqrt(n!))."""
    n = spec.n_photon if n is None else n
    g = coupling_strength(spec, n)
    if not g > 0:
        raise ValueError("transfer time undefined for vanishing coupling")
    return math.pi / (2.0 * g * math.sqrt(math.factorial(n)))


def validity_factor(spec: ModelSpec, n: int | None = None) -> float:
    """Dimensionless k such that the mapping stays faithful up to t ~ k tau_n:
    k = (2 lam/Omega)^n * n (Omega - nu) / (eps0 sqrt(n!))."""
    n = spec.n_photon if n is None else n
    Om = spec.rcs[0].Omega
    if not Om > spec.nu_tilde:
        raise ValueError("validity estimate assumes Omega > nu_tilde")
    return (
        spec.lamb_dicke**n
        * n
        * (Om - spec.nu_tilde)
        / (spec.epsilon0 * math.sqrt(math.factorial(n)))
    )


def validity_duration(spec: ModelSpec, n: int | None = None) -> float:
    """Absolute duration of a faithful simulation window, k * tau_n."""
    return validity_factor(spec, n) * transfer_time(spec, n)
