"""State-comparison and information measures: fidelity, trace distance, the
trace-distance derivative used as a memory-effect witness, purity and von
Neumann entropy (in bits).
"""

from __future__ import annotations

import numpy as np

from .evolve import entropy_bits
from .linalg import TOL, DensityMatrix, trace_norm


def _clipped_sqrt(w: np.ndarray, clip: float) -> np.ndarray:
    if w.min() < -clip:
        raise ValueError(
            f"eigenvalue {w.min():.3e} below the -{clip:.0e} clip window: state too "
            "far from positive semidefinite"
        )
    return np.sqrt(np.clip(w, 0.0, None))


def fidelity(rho1: DensityMatrix, rho2: DensityMatrix, clip: float = TOL.eig_clip) -> float:
    """Uhlmann fidelity F = (Tr sqrt( sqrt(rho1) rho2 sqrt(rho1) ))^2.

    Near-zero negative eigenvalues inside [-clip, 0) are clipped to zero;
    anything below -clip raises.
    """
    w1, v1 = np.linalg.eigh(rho1.data)
    s1 = (v1 * _clipped_sqrt(w1, max(clip, -TOL.psd))) @ v1.conj().T
    inner = s1 @ rho2.data @ s1
    wm = np.linalg.eigvalsh(inner)
    f = float(_clipped_sqrt(wm, clip).sum()) ** 2
    return min(f, 1.0 + 1e-9)


def fidelity_data(a: np.ndarray, b: np.ndarray, floor: float = 1e-6) -> float:
    """Uhlmann fidelity on raw matrices, tolerating the small negative
    eigenvalues a non-Lindblad master equation can produce (they stay visible
    in the recorded min_eig channel; here they are clipped up to `floor`,
    which perturbs F by at most O(floor))."""
    w1, v1 = np.linalg.eigh((a + a.conj().T) / 2.0)
    s1 = (v1 * _clipped_sqrt(w1, floor)) @ v1.conj().T
    wm = np.linalg.eigvalsh(s1 @ b @ s1)
    f = float(_clipped_sqrt(wm, floor).sum()) ** 2
    return min(f, 1.0 + 1e-9)


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """D = (1/2) Tr |rho1 - rho2|; 0 for identical states, 1 for orthogonal ones."""
    return 0.5 * trace_norm(rho1.op - rho2.op)


def trace_distance_data(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance on raw Hermitian matrices (hot path)."""
    diff = a - b
    diff = (diff + diff.conj().T) / 2.0
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def sigma_series(t: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Time derivative of a sampled trace-distance series.

    Central differences in the interior, one-sided at the ends; requires a
    uniform grid of at least 3 points. Positive stretches of the result
    witness information flowing back toward the system.
    """
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least 3 samples to differentiate")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("sigma_series requires a uniform time grid")
    return np.gradient(d, t[1] - t[0])


def sigma_threshold(t: np.ndarray, d: np.ndarray, factor: float = 10.0) -> float:
    """Detection floor for 'sigma > 0' intervals.

    Estimates the central-difference truncation error from the median third
    difference of the samples and returns `factor` times it.
    """
    d = np.asarray(d, dtype=float)
    dt = float(t[1] - t[0])
    if len(d) < 4:
        return np.inf
    third = np.abs(np.diff(d, n=3))
    return factor * float(np.median(third)) / (6.0 * dt)


def positive_intervals(t: np.ndarray, sigma: np.ndarray, threshold: float):
    """Contiguous index ranges where sigma exceeds the threshold, as (t0, t1) pairs."""
    mask = sigma > threshold
    out = []
    start = None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        elif not m and start is not None:
            out.append((float(t[start]), float(t[i - 1])))
            start = None
    if start is not None:
        out.append((float(t[start]), float(t[-1])))
    return out


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2."""
    return float(np.sum(np.abs(rho.data) ** 2))


def vn_entropy(rho: DensityMatrix, clip: float = TOL.eig_clip) -> float:
    """von Neumann entropy -Tr[rho log2 rho] in bits, with 0 log 0 = 0."""
    w = np.linalg.eigvalsh(rho.data)
    return entropy_bits(w, clip=max(clip, -TOL.psd))
