"""Dense complex-matrix kernel: tensor-tagged operators, Hermitian eigentools,
Kronecker products, partial traces and the trace norm.

Everything here is a pure function of immutable inputs; operators carry an
explicit list of tensor-factor dimensions so that partial traces and
embeddings stay unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NumericalGuardError(RuntimeError):
    """A conservation or truncation guard tripped during a computation."""


@dataclass(frozen=True)
class Tolerances:
    """Central numerical tolerances. Values are defaults, overridable per call."""

    herm: float = 1e-10          # max |A - A^dag| entrywise for "Hermitian"
    trace: float = 1e-9          # |Tr rho - 1| for a valid state
    psd: float = -1e-9           # smallest admissible eigenvalue of a state
    unitary: float = 1e-8        # max |U^dag U - 1| entrywise
    eig_clip: float = 1e-10      # clip window for sqrt/log of near-zero eigenvalues
    fock_tail: float = 1e-6      # admissible population of the top two Fock levels


TOL = Tolerances()


@dataclass(frozen=True)
class Operator:
    """Square complex matrix tagged with its tensor-factor dimensions."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {data.shape}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"factor dimensions must be >= 1, got {self.dims}")
        if int(np.prod(self.dims)) != data.shape[0]:
            raise ValueError(
                f"dims product {int(np.prod(self.dims))} != matrix side {data.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def herm_defect(self) -> float:
        """Max entrywise deviation from Hermiticity."""
        return float(np.abs(self.data - self.data.conj().T).max())

    def is_hermitian(self, tol: float = TOL.herm) -> bool:
        return self.herm_defect() <= tol

    def unitary_defect(self) -> float:
        d = self.data.conj().T @ self.data - np.eye(self.dim)
        return float(np.abs(d).max())

    def __add__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        return Operator(self.data - other.data, self.dims)

    def __neg__(self) -> "Operator":
        return Operator(-self.data, self.dims)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        return Operator(self.data @ other.data, self.dims)

    def _check_compatible(self, other: "Operator"):
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.dims != self.dims:
            raise ValueError(f"factor mismatch: {self.dims} vs {other.dims}")


@dataclass(frozen=True)
class DensityMatrix:
    """Operator validated as a physical state: Hermitian, unit trace, PSD.

    `psd_floor` is the admissible negative-eigenvalue window. Freshly built
    states use the strict default; master-equation outputs may carry larger
    (recorded, never clipped) violations because the generator is not of
    Lindblad form, and are wrapped with a looser floor.
    """

    op: Operator
    psd_floor: float = TOL.psd

    def __post_init__(self):
        op = self.op
        defect = op.herm_defect()
        if defect > TOL.herm:
            raise ValueError(f"state not Hermitian: max |A - A^dag| = {defect:.3e}")
        tr = op.trace()
        if abs(tr - 1.0) > TOL.trace:
            raise ValueError(f"state trace {tr} deviates from 1 beyond {TOL.trace}")
        wmin = float(np.linalg.eigvalsh(op.data)[0])
        if wmin < self.psd_floor:
            raise ValueError(f"state has eigenvalue {wmin:.3e} below {self.psd_floor}")

    @property
    def data(self) -> np.ndarray:
        return self.op.data

    @property
    def dims(self) -> tuple[int, ...]:
        return self.op.dims


def hermitian_eig(a: Operator, tol: float = TOL.herm):
    """Eigendecomposition of a Hermitian operator.

    Returns (w, v) with w ascending and v unitary, A = v diag(w) v^dag.
    The phase of each eigenvector is fixed by making its largest-magnitude
    component real and positive, so fixtures are stable across runs.
    """
    defect = a.herm_defect()
    if defect > tol:
        raise ValueError(f"matrix not Hermitian: max |A - A^dag| = {defect:.3e}")
    w, v = np.linalg.eigh(a.data)
    v = _fix_phases(v)
    return w, Operator(v, a.dims)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    idx = np.abs(v).argmax(axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    phase = lead / np.where(np.abs(lead) == 0, 1.0, np.abs(lead))
    return v / np.where(phase == 0, 1.0, phase)


def func_of_hermitian(a: Operator, f, tol: float = TOL.herm) -> Operator:
    """Apply a scalar function to a Hermitian operator through its spectrum."""
    w, v = hermitian_eig(a, tol=tol)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape:
        fw = np.asarray([f(x) for x in w])
    bad = ~np.isfinite(fw)
    if bad.any():
        raise ValueError(
            f"function undefined on eigenvalue(s) {w[bad][:4]} (non-finite result)"
        )
    return Operator((v.data * fw) @ v.data.conj().T, a.dims)


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; factor lists concatenate."""
    return Operator(np.kron(a.data, b.data), a.dims + b.dims)


def ptrace_data(data: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace on a raw matrix. `keep` is an iterable of factor indices."""
    dims = tuple(dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    drop = [i for i in range(n) if i not in keep]
    arr = data.reshape(dims + dims)
    for i in sorted(drop, reverse=True):
        arr = np.trace(arr, axis1=i, axis2=i + arr.ndim // 2)
    side = int(np.prod([dims[i] for i in keep]))
    return arr.reshape(side, side)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out the factors not listed in `keep` (kept factors stay in order)."""
    keep = sorted(set(int(k) for k in keep))
    out = ptrace_data(rho.data, rho.dims, keep)
    dims = tuple(rho.dims[i] for i in keep)
    return DensityMatrix(Operator(out, dims))


def partial_trace_op(a: Operator, keep) -> Operator:
    """Partial trace for general (not necessarily state-valid) operators."""
    keep = sorted(set(int(k) for k in keep))
    out = ptrace_data(a.data, a.dims, keep)
    return Operator(out, tuple(a.dims[i] for i in keep))


def trace_norm(a: Operator) -> float:
    """Sum of singular values; Hermitian inputs go through the eigenvalue path."""
    if a.is_hermitian():
        return float(np.abs(np.linalg.eigvalsh(a.data)).sum())
    return float(np.linalg.svd(a.data, compute_uv=False).sum())
