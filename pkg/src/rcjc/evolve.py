"""Master-equation propagation.

Two engines cover the two shapes of generator that occur in practice:

* `Rk4State` / `integrate_rk4` - classic fixed-step fourth-order Runge-Kutta
  for arbitrary (possibly time-dependent) Hamiltonians and rate operators.
* `SpectralState` / `propagate_spectral` - exact propagation of constant
  generators, either through the Hamiltonian eigenbasis (no dissipation) or
  through the eigendecomposition of the vectorized Liouvillian.

The integrators never project the state back to physicality: trace drift,
Hermiticity, the smallest eigenvalue and the Fock-ceiling population are
monitored and turned into hard errors when they cross their guards, so
truncation or step-size problems surface instead of being silently absorbed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dissipator import RateOperators, build_liouvillian, fused_dissipator_action
from .hilbert import SpaceLayout
from .linalg import (
    TOL,
    DensityMatrix,
    NumericalGuardError,
    Operator,
    hermitian_eig,
    ptrace_data,
)

TRACE_DRIFT_MAX = 1e-8
COND_MAX = 1e12


@dataclass(frozen=True)
class Generator:
    """Right-hand side of the master equation: Hamiltonian plus 0..2 dissipators.

    `hamiltonian` is an Operator or a factory t -> Operator; each entry of
    `rates` is a RateOperators or a factory t -> RateOperators.
    """

    hamiltonian: object
    rates: tuple = ()

    @property
    def constant(self) -> bool:
        return isinstance(self.hamiltonian, Operator) and all(
            isinstance(r, RateOperators) for r in self.rates
        )

    def h_at(self, t: float) -> Operator:
        h = self.hamiltonian
        return h if isinstance(h, Operator) else h(t)

    def rates_at(self, t: float):
        return [r if isinstance(r, RateOperators) else r(t) for r in self.rates]

    def rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        h = self.h_at(t).data
        out = -1j * (h @ rho - rho @ h)
        for r in self.rates_at(t):
            tm, tp, x = r._fused
            out += fused_dissipator_action(x, tm, tp, rho)
        return out

    def dims(self) -> tuple[int, ...]:
        return self.h_at(0.0).dims


@dataclass
class TimeSeries:
    """Uniformly sampled observable record; every channel matches t in length."""

    t: np.ndarray
    channels: dict[str, np.ndarray]

    def __post_init__(self):
        for name, col in self.channels.items():
            if len(col) != len(self.t):
                raise ValueError(f"channel {name!r} length mismatch")
            if not np.all(np.isfinite(col)):
                raise ValueError(f"channel {name!r} contains non-finite samples")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]


class Recorder:
    """Extracts the standard observable channels from a raw state matrix."""

    def __init__(self, layout: SpaceLayout):
        self.layout = layout
        dims = layout.dims
        grids = np.indices(dims).reshape(len(dims), -1)
        self.sz_diag = 1.0 - 2.0 * grids[0]
        self.n_diags = [grids[1 + i].astype(float) for i in range(layout.n_modes)]
        self.tail_masks = [
            (grids[1 + i] >= layout.boson_dims[i] - 2) for i in range(layout.n_modes)
        ]
        self.imag_residue = 0.0

    def record(self, rho: np.ndarray) -> dict[str, float]:
        diag = np.diagonal(rho)
        pops = diag.real
        self.imag_residue = max(self.imag_residue, float(np.abs(diag.imag).max()))
        out = {}
        for i, nd in enumerate(self.n_diags):
            out[f"n{i + 1}"] = float(pops @ nd)
        out["sz"] = float(pops @ self.sz_diag)
        out["purity_total"] = float(np.sum(np.abs(rho) ** 2))
        spin = ptrace_data(rho, self.layout.dims, [0])
        ws = np.linalg.eigvalsh(spin)
        out["purity_spin"] = float(np.sum(ws**2))
        out["entropy_spin"] = entropy_bits(ws)
        out["min_eig"] = float(np.linalg.eigvalsh(rho)[0])
        out["tail"] = max(float(pops[m].sum()) for m in self.tail_masks)
        return out


def entropy_bits(eigenvalues: np.ndarray, clip: float = TOL.eig_clip) -> float:
    """Shannon entropy in bits of an eigenvalue distribution, with 0 log 0 = 0."""
    w = np.asarray(eigenvalues, dtype=float)
    if w.min() < -clip:
        raise ValueError(f"eigenvalue {w.min():.3e} below the -{clip:.0e} clip window")
    w = np.clip(w, 0.0, None)
    w = w[w > 0]
    return float(-(w @ np.log2(w)))


def _check_state(t: float, rho: np.ndarray, tail: float):
    tr = np.trace(rho)
    if not np.isfinite(rho).all():
        raise NumericalGuardError(f"non-finite state entries at t = {t:g}")
    if abs(tr - 1.0) > TRACE_DRIFT_MAX:
        raise NumericalGuardError(
            f"trace drift |Tr rho - 1| = {abs(tr - 1.0):.3e} at t = {t:g}"
        )
    if tail > TOL.fock_tail:
        raise NumericalGuardError(
            f"Fock ceiling population {tail:.3e} at t = {t:g}: raise the truncation N"
        )


def default_dt(h0: Operator, tau: float) -> float:
    """Step heuristic: resolve both the spectral spread of H and the physics
    time tau, dt = min(0.02 / spread, tau / 2000)."""
    w = np.linalg.eigvalsh(h0.data)
    spread = float(w[-1] - w[0])
    caps = [tau / 2000.0]
    if spread > 0:
        caps.append(0.02 / spread)
    dt = min(caps)
    return dt if np.isfinite(dt) else 1.0


class Rk4State:
    """Fixed-step RK4 walker; advances a raw state matrix along t = k dt."""

    def __init__(self, gen: Generator, rho0: DensityMatrix, dt: float):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.gen = gen
        self.rho = rho0.data.copy()
        self.dt = dt
        self.step_index = 0

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    def step(self):
        dt, t, rho = self.dt, self.t, self.rho
        f = self.gen.rhs
        k1 = f(t, rho)
        k2 = f(t + dt / 2.0, rho + dt / 2.0 * k1)
        k3 = f(t + dt / 2.0, rho + dt / 2.0 * k2)
        k4 = f(t + dt, rho + dt * k3)
        self.rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        self.step_index += 1

    def advance_to(self, t: float):
        target = int(round(t / self.dt))
        if target < self.step_index:
            raise ValueError("RK4 walker cannot run backwards")
        if abs(target * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not on the dt = {self.dt} step grid")
        while self.step_index < target:
            self.step()
        return self.rho


class SpectralState:
    """Exact random-access propagation of a constant generator."""

    def __init__(self, gen: Generator, rho0: DensityMatrix):
        if not gen.constant:
            raise ValueError("spectral propagation requires a constant generator")
        h = gen.hamiltonian
        self.dims = h.dims
        rates = [r for r in gen.rates if np.abs(r.chi.data).max() > 0
                 or np.abs(r.theta.data).max() > 0]
        self._rk4_fallback = None
        if not rates:
            self._mode = "unitary"
            w, v = hermitian_eig(h)
            self._w = w
            self._v = v.data
            self._rho_eig = self._v.conj().T @ rho0.data @ self._v
        else:
            self._mode = "liouvillian"
            liou = build_liouvillian(h, rates)
            lam, vmat = np.linalg.eig(liou)
            cond = np.linalg.cond(vmat)
            if cond > COND_MAX:
                warnings.warn(
                    f"Liouvillian eigenbasis condition {cond:.2e} exceeds "
                    f"{COND_MAX:.0e}; falling back to RK4",
                    stacklevel=2,
                )
                dtf = default_dt(h, np.inf)
                self._rk4_fallback = Rk4State(gen, rho0, dtf)
                return
            vec0 = rho0.data.reshape(-1)
            try:
                coeff = np.linalg.solve(vmat, vec0)
            except np.linalg.LinAlgError:
                coeff, *_ = np.linalg.lstsq(vmat, vec0, rcond=None)
            self._lam = lam
            self._vmat = vmat
            self._coeff = coeff

    def state_at(self, t: float) -> np.ndarray:
        if self._rk4_fallback is not None:
            return self._rk4_fallback.advance_to(t)
        if self._mode == "unitary":
            phase = np.exp(-1j * self._w * t)
            rho_e = (phase[:, None] * self._rho_eig) * phase.conj()[None, :]
            return self._v @ rho_e @ self._v.conj().T
        d = int(np.sqrt(self._lam.size))
        vec = self._vmat @ (np.exp(self._lam * t) * self._coeff)
        return vec.reshape(d, d)


def _make_grid(t_final: float, dt: float, record_every: int):
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    steps = max(1, round(t_final / dt))
    steps = record_every * max(1, int(np.ceil(steps / record_every)))
    dt_eff = t_final / steps
    samples = steps // record_every + 1
    t_grid = np.arange(samples) * (record_every * dt_eff)
    return t_grid, dt_eff


def integrate_rk4(
    gen: Generator,
    rho0: DensityMatrix,
    t_final: float,
    dt: float,
    record_every: int = 1,
) -> tuple[TimeSeries, DensityMatrix]:
    """Propagate with fixed-step RK4, recording every `record_every` steps.

    The requested dt is adjusted slightly so that the recording grid lands
    exactly on t_final. Guards: trace drift above 1e-8, non-finite entries,
    or a Fock-ceiling population above the tail tolerance abort the run.
    """
    t_grid, dt_eff = _make_grid(t_final, dt, record_every)
    walker = Rk4State(gen, rho0, dt_eff)
    recorder = Recorder(SpaceLayout(gen.dims()[1:]))
    rows = []
    for t in t_grid:
        rho = walker.advance_to(t)
        row = recorder.record(rho)
        _check_state(t, rho, row["tail"])
        rows.append(row)
    channels = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    final = DensityMatrix(Operator(_hermitize(walker.rho), gen.dims()), psd_floor=-1e-6)
    return TimeSeries(t_grid, channels), final


def propagate_spectral(
    gen: Generator, rho0: DensityMatrix, t_grid: np.ndarray
) -> tuple[TimeSeries, DensityMatrix]:
    """Exact propagation of a constant generator on an arbitrary time grid."""
    state = SpectralState(gen, rho0)
    recorder = Recorder(SpaceLayout(gen.dims()[1:]))
    rows = []
    rho = rho0.data
    for t in t_grid:
        rho = state.state_at(t)
        row = recorder.record(rho)
        _check_state(t, rho, row["tail"])
        rows.append(row)
    channels = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    final = DensityMatrix(Operator(_hermitize(rho), gen.dims()), psd_floor=-1e-6)
    return TimeSeries(np.asarray(t_grid, dtype=float), channels), final


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return (rho + rho.conj().T) / 2.0


def record_observables(rho: DensityMatrix, layout: SpaceLayout) -> dict[str, float]:
    """One-off channel extraction for a single state."""
    return Recorder(layout).record(rho.data)
