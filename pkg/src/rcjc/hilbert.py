"""Constructors for spins, truncated bosonic modes, composite embeddings and
canonical states.

Factor order is fixed globally: spin first, then the bosonic modes in order,
so every Hamiltonian constructor and partial trace in the package agrees.
Spin basis convention: |e> = (1,0)^T, |g> = (0,1)^T, sigma_z|e> = |e>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import TOL, DensityMatrix, NumericalGuardError, Operator, func_of_hermitian, kron


@dataclass(frozen=True)
class SpaceLayout:
    """Spin (dim 2) tensored with truncated bosonic modes of sizes N_i >= 2."""

    boson_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "boson_dims", tuple(int(n) for n in self.boson_dims))
        if not self.boson_dims or any(n < 2 for n in self.boson_dims):
            raise ValueError(f"every Fock truncation must be >= 2, got {self.boson_dims}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) + self.boson_dims

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_modes(self) -> int:
        return len(self.boson_dims)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),   # sigma^+ |g> = |e>
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def pauli(which: str) -> Operator:
    """Pauli matrix ('x', 'y', 'z') or ladder ('plus', 'minus') on the spin."""
    try:
        return Operator(_PAULI[which], (2,))
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None


def ladder(n: int):
    """Truncated annihilation/creation pair (a, a_dag) with a|m> = sqrt(m)|m-1>."""
    if n < 2:
        raise ValueError("Fock truncation must be >= 2")
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)
    return Operator(a, (n,)), Operator(a.conj().T, (n,))


def number_op(n: int) -> Operator:
    return Operator(np.diag(np.arange(n, dtype=float)).astype(complex), (n,))


def identity(layout: SpaceLayout) -> Operator:
    return Operator(np.eye(layout.dim, dtype=complex), layout.dims)


def embed(op: Operator, factor: int, layout: SpaceLayout) -> Operator:
    """Lift a single-factor operator to the full space (identity elsewhere)."""
    dims = layout.dims
    if factor < 0 or factor >= len(dims):
        raise ValueError(f"factor index {factor} out of range for {len(dims)} factors")
    if op.dim != dims[factor]:
        raise ValueError(
            f"operator dim {op.dim} does not match factor {factor} of size {dims[factor]}"
        )
    left = int(np.prod(dims[:factor])) if factor > 0 else 1
    right = int(np.prod(dims[factor + 1:])) if factor + 1 < len(dims) else 1
    data = np.kron(np.kron(np.eye(left), op.data), np.eye(right))
    return Operator(data, dims)


def thermal_occupation(beta_omega: float) -> float:
    """Mean occupation (e^{beta*Omega} - 1)^{-1}; zero in the beta -> inf limit."""
    if np.isinf(beta_omega):
        return 0.0
    return 1.0 / math.expm1(beta_omega)


def thermal_state(beta_omega: float, n: int) -> DensityMatrix:
    """Truncated thermal state with Boltzmann weights e^{-beta*Omega*m}.

    beta_omega = beta * Omega; pass inf for the exact ground state. Raises if
    the population of the top two levels exceeds the Fock-tail tolerance.
    """
    if not beta_omega > 0:
        raise ValueError("beta * Omega must be positive")
    if np.isinf(beta_omega):
        p = np.zeros(n)
        p[0] = 1.0
    else:
        p = np.exp(-beta_omega * np.arange(n))
        p /= p.sum()
    tail = float(p[-2:].sum())
    if tail > TOL.fock_tail:
        raise NumericalGuardError(
            f"thermal tail weight {tail:.3e} exceeds {TOL.fock_tail:.0e}: raise the "
            f"Fock truncation (N = {n}, beta*Omega = {beta_omega:g})"
        )
    return DensityMatrix(Operator(np.diag(p).astype(complex), (n,)))


def displacement(alpha: complex, n: int) -> Operator:
    """Displacement D(alpha) = exp(alpha a^dag - alpha* a) on a truncated mode.

    Built by exponentiating the truncated skew-Hermitian generator, so the
    result is exactly unitary in the truncated space. Requires |alpha|^2 <= N/4
    to keep truncation artifacts out of the populated block.
    """
    if abs(alpha) ** 2 > n / 4:
        raise ValueError(
            f"|alpha|^2 = {abs(alpha)**2:.3g} too large for truncation N = {n}"
        )
    a, adag = ladder(n)
    gen = alpha * adag.data - np.conj(alpha) * a.data
    herm = Operator(-1j * gen, (n,))
    return func_of_hermitian(herm, lambda w: np.exp(1j * w))


def fock_ket(n: int, m: int) -> np.ndarray:
    if not 0 <= m < n:
        raise ValueError(f"Fock index {m} out of range for truncation {n}")
    v = np.zeros(n, dtype=complex)
    v[m] = 1.0
    return v


_SPIN_KETS = {
    "e": np.array([1, 0], dtype=complex),
    "g": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
}


def spin_ket(label: str) -> np.ndarray:
    """|e>, |g> or the sigma_x eigenstates |+>, |->."""
    try:
        return _SPIN_KETS[label].copy()
    except KeyError:
        raise ValueError(f"unknown spin label {label!r}") from None


def dm_from_ket(ket: np.ndarray, dims) -> DensityMatrix:
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix(Operator(np.outer(ket, ket.conj()), tuple(dims)))


def product_state(spin_label: str, mode_states, layout: SpaceLayout) -> DensityMatrix:
    """Product state spin x modes; each mode entry is a DensityMatrix or Fock index."""
    rho = Operator(np.outer(spin_ket(spin_label), spin_ket(spin_label).conj()), (2,))
    for n, st in zip(layout.boson_dims, mode_states, strict=True):
        if isinstance(st, DensityMatrix):
            part = st.op
        else:
            k = fock_ket(n, int(st))
            part = Operator(np.outer(k, k.conj()), (n,))
        rho = kron(rho, part)
    return DensityMatrix(rho)
