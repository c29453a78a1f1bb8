"""Cross-module oracle and invariant suites behind `rcjc validate`.

Each check recomputes a quantity along two independent routes (closed form vs
numerics, direct sum vs vectorized, transformed frame vs original) and
reports the measured deviation against its bound. `strict` tightens the
purely algebraic bounds tenfold and reports the margins either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipator import build_liouvillian, build_rate_operators, conjugate_rates, dissipator_action
from .evolve import Generator, Rk4State, SpectralState
from .hilbert import SpaceLayout, embed, ladder, number_op, pauli, product_state
from .linalg import DensityMatrix, Operator
from .metrics import fidelity, trace_distance
from .models import ModelSpec, h_lab_frame
from .scenarios import resolve_model
from .spectral import OhmicRcSD, RcParams, UnderdampedSD, eval_underdamped, map_to_rc, rate_factor, reconstruct_sb
from .transforms import FrameMap


@dataclass
class CheckResult:
    name: str
    measured: float
    bound: float
    strict_scalable: bool = True

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound

    @property
    def margin(self) -> float:
        return self.bound / self.measured if self.measured > 0 else math.inf


def _fig4_like_spec(n_fock=12, gamma_ratio=0.2, scale=10.0) -> ModelSpec:
    cfg_spec = resolve_model({
        **_base_cfg(), "Gamma_over_nu": gamma_ratio, "fock": [n_fock],
        "scale_energies": scale,
    })
    return cfg_spec.spec


def _base_cfg() -> dict:
    from .scenarios import load_config
    return load_config({"schema": 1, "preset": "fig2a"})


def check_spectral_roundtrip() -> CheckResult:
    grid = np.logspace(-2, 1, 100)
    worst = 0.0
    for gw in (1e-3, 1e-2, 1e-1):
        sd = UnderdampedSD(alpha=0.02 / math.pi, Gamma=gw, omega0=1.0)
        direct = eval_underdamped(sd, grid)
        rebuilt = reconstruct_sb(map_to_rc(sd), grid)
        worst = max(worst, float(np.max(np.abs(rebuilt - direct) / direct)))
    return CheckResult("spectral round trip", worst, 1e-12)


def check_rate_factor_limit() -> CheckResult:
    sd = OhmicRcSD(gamma=1e-4 / math.pi)
    worst = 0.0
    for beta in (1.0, 6.9, 100.0):
        lim = 2.0 * sd.gamma / beta
        for xi in (1e-8 / beta, -1e-8 / beta):
            worst = max(worst, abs(rate_factor(sd, xi, beta) - lim) / lim)
    return CheckResult("rate-factor zero-frequency limit", worst, 1e-6)


def check_conjugation_identities() -> CheckResult:
    from .transforms import conjugation_identity_residuals
    worst = 0.0
    for n, alpha in ((16, 0.1), (12, 0.2)):
        worst = max(worst, max(conjugation_identity_residuals(alpha, n).values()))
    return CheckResult("displacement-frame conjugation identities", worst, 1e-8)


def check_hb_conjugation() -> CheckResult:
    from .transforms import hb_conjugation_residual
    rs = resolve_model({**_base_cfg(), "fock": [16]})
    return CheckResult("displaced-frame Hamiltonian vs conjugation",
                       hb_conjugation_residual(rs.spec), 1e-8)


def check_rate_operator_bruteforce() -> CheckResult:
    spec = _fig4_like_spec(n_fock=12)
    h = h_lab_frame(spec)
    rc = spec.rcs[0]
    rates = build_rate_operators(h, 0, rc, spec.beta)
    # independent quadratic-loop implementation in the eigenbasis
    w, v = np.linalg.eigh(h.data)
    a, adag = ladder(12)
    x = embed(a + adag, 1, spec.layout).data
    d = h.dim
    chi = np.zeros((d, d), complex)
    theta = np.zeros((d, d), complex)
    for j in range(d):
        for k in range(d):
            xi = w[j] - w[k]
            xjk = v[:, j].conj() @ x @ v[:, k]
            if abs(xi) < 1e-9 / spec.beta:
                cfac = 2.0 * rc.residual.gamma / spec.beta
            else:
                cfac = rc.residual.gamma * xi / math.tanh(spec.beta * xi / 2.0)
            proj = np.outer(v[:, j], v[:, k].conj())
            chi += (math.pi / 2.0) * cfac * xjk * proj
            theta += (math.pi / 2.0) * (rc.residual.gamma * xi) * xjk * proj
    scale = max(np.abs(chi).max(), np.abs(theta).max())
    worst = max(np.abs(chi - rates.chi.data).max(),
                np.abs(theta - rates.theta.data).max()) / scale
    return CheckResult("rate operators vs brute-force eigenbasis sum", worst, 1e-12)


def check_liouvillian_consistency() -> CheckResult:
    spec = _fig4_like_spec(n_fock=6)
    h = h_lab_frame(spec)
    rates = build_rate_operators(h, 0, spec.rcs[0], spec.beta)
    liou = build_liouvillian(h, [rates])
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        m = rng.normal(size=(h.dim, h.dim)) + 1j * rng.normal(size=(h.dim, h.dim))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        direct = (-1j * (h.data @ rho - rho @ h.data)
                  + dissipator_action(rates.x.data, rates.chi.data, rates.theta.data, rho))
        via_liou = (liou @ rho.reshape(-1)).reshape(rho.shape)
        worst = max(worst, float(np.abs(direct - via_liou).max()))
    return CheckResult("vectorized generator vs direct action", worst, 1e-12)


def check_frame_covariance() -> CheckResult:
    rs = resolve_model({**_base_cfg(), "Gamma_over_nu": 0.2, "fock": [10]})
    spec = rs.spec
    h = h_lab_frame(spec)
    rates = build_rate_operators(h, 0, spec.rcs[0], spec.beta)
    fm = FrameMap(spec)
    rho = rs.rho0_lab.data
    worst = 0.0
    for t in np.linspace(0.0, 2.0 * rs.tau, 10):
        p = fm.phi_data(t)
        conj = conjugate_rates(rates, Operator(p, spec.layout.dims))
        lhs = dissipator_action(conj.x.data, conj.chi.data, conj.theta.data,
                                p @ rho @ p.conj().T)
        rhs = p @ dissipator_action(rates.x.data, rates.chi.data, rates.theta.data,
                                    rho) @ p.conj().T
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return CheckResult("dissipator frame covariance", worst, 1e-8)


def check_rk4_precession():
    # qubit precession with a spectator 2-level mode in its ground state,
    # since the layout always carries at least one bosonic factor
    lay = SpaceLayout((2,))
    gen = Generator(hamiltonian=embed(pauli("z"), 0, lay) * 0.5)
    plus = np.kron(np.array([1, 1]) / math.sqrt(2), np.array([1, 0]))
    rho0 = DensityMatrix(Operator(np.outer(plus, plus.conj()), lay.dims))
    sx = embed(pauli("x"), 0, lay).data
    errs = []
    for dt in (0.01, 0.005):
        walker = Rk4State(gen, rho0, dt)
        worst = 0.0
        for k in range(1, 11):
            rho = walker.advance_to(k * 1.0)
            worst = max(worst, abs(float(np.trace(sx @ rho).real) - math.cos(k * 1.0)))
        errs.append(worst)
    slope = math.log2(errs[0] / errs[1])
    return [
        CheckResult("RK4 qubit precession accuracy", errs[0], 1e-8, strict_scalable=False),
        CheckResult("RK4 convergence order", abs(slope - 4.0), 0.2, strict_scalable=False),
    ]


def check_dual_integrators() -> CheckResult:
    rs = resolve_model({**_base_cfg(), "Gamma_over_nu": 0.2, "fock": [8],
                        "scale_energies": 10.0, "t_final_tau": 0.2})
    gen, _ = _lab_gen(rs)
    spectral_state = SpectralState(gen, rs.rho0_lab)
    walker = Rk4State(gen, rs.rho0_lab, rs.t_final / round(rs.t_final / 5e-3))
    from .metrics import trace_distance_data
    worst = 0.0
    for t in np.linspace(0, rs.t_final, 21)[1:]:
        t_snap = walker.dt * round(t / walker.dt)
        worst = max(worst, trace_distance_data(
            walker.advance_to(t_snap), spectral_state.state_at(t_snap)))
    return CheckResult("RK4 vs spectral propagation", worst, 1e-7, strict_scalable=False)


def _lab_gen(rs):
    from .scenarios import _lab_generator
    return _lab_generator(rs)


def check_thermal_relaxation() -> CheckResult:
    """Damped mode relaxes toward n_th at rate Gamma; catches rate-sign faults."""
    n = 10
    lay = SpaceLayout((n,))
    omega, gamma_width, beta = 1.0, 5e-3, math.log(1.0 / 0.2 + 1.0)
    rc = RcParams(lam=0.0, Omega=omega, residual=OhmicRcSD(gamma_width / (2 * math.pi * omega)))
    h = embed(number_op(n), 1, lay) * omega
    rates = build_rate_operators(h, 0, rc, beta)
    gen = Generator(hamiltonian=h, rates=(rates,))
    rho0 = product_state("g", [1], lay)   # one quantum in the mode
    state = SpectralState(gen, rho0)
    n_th = 0.2
    n_op = embed(number_op(n), 1, lay).data
    t_probe = 1.5 / gamma_width
    got = float(np.trace(n_op @ state.state_at(t_probe)).real)
    expect = n_th + (1.0 - n_th) * math.exp(-gamma_width * t_probe)
    return CheckResult("damped-mode relaxation toward n_th", abs(got - expect),
                       2e-2 * expect, strict_scalable=False)


def check_generator_conservation() -> CheckResult:
    spec = _fig4_like_spec(n_fock=8)
    h = h_lab_frame(spec)
    rates = build_rate_operators(h, 0, spec.rcs[0], spec.beta)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        m = rng.normal(size=(h.dim, h.dim)) + 1j * rng.normal(size=(h.dim, h.dim))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        inc = dissipator_action(rates.x.data, rates.chi.data, rates.theta.data, rho)
        inc += -1j * (h.data @ rho - rho @ h.data)
        worst = max(worst, abs(np.trace(inc)), float(np.abs(inc - inc.conj().T).max()))
    return CheckResult("generator trace/Hermiticity preservation", worst, 1e-11)


def check_metric_bounds() -> CheckResult:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        dms = []
        for _ in range(2):
            m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            rho = m @ m.conj().T
            rho /= np.trace(rho).real
            dms.append(DensityMatrix(Operator(rho, (6,))))
        f = fidelity(dms[0], dms[1])
        d = trace_distance(dms[0], dms[1])
        worst = max(worst, (1.0 - f) - d, d - math.sqrt(max(0.0, 1.0 - f**2)))
    return CheckResult("fidelity/trace-distance inequalities", max(worst, 0.0), 1e-8,
                       strict_scalable=False)


ALL_CHECKS = [
    check_spectral_roundtrip,
    check_rate_factor_limit,
    check_conjugation_identities,
    check_hb_conjugation,
    check_rate_operator_bruteforce,
    check_liouvillian_consistency,
    check_frame_covariance,
    check_rk4_precession,
    check_dual_integrators,
    check_thermal_relaxation,
    check_generator_conservation,
    check_metric_bounds,
]


def run_all(strict: bool = False, verbose: bool = True):
    results = []
    for fn in ALL_CHECKS:
        out = fn()
        results.extend(out if isinstance(out, list) else [out])
    if strict:
        results = [
            CheckResult(r.name, r.measured, r.bound * (0.1 if r.strict_scalable else 1.0),
                        r.strict_scalable)
            for r in results
        ]
    ok = all(r.ok for r in results)
    if verbose:
        for r in results:
            status = "PASS" if r.ok else "FAIL"
            print(f"[{status}] {r.name}: measured {r.measured:.3e} "
                  f"(bound {r.bound:.3e}, margin {r.margin:.1f}x)")
        print(f"validation {'passed' if ok else 'FAILED'} "
              f"({sum(r.ok for r in results)}/{len(results)} checks)")
    return results, ok
