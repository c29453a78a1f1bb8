import math

import numpy as np
import pytest

from rcjc.dissipator import (
    LIOUVILLIAN_MAX_VEC,
    RateOperators,
    apply_dissipator,
    build_liouvillian,
    build_rate_operators,
    conjugate_rates,
    dissipator_action,
)
from rcjc.hilbert import SpaceLayout, embed, ladder, number_op, pauli
from rcjc.linalg import DensityMatrix, Operator
from rcjc.models import h_s_rc
from rcjc.spectral import OhmicRcSD, RcParams

from conftest import random_state
from test_models import make_spec


GAMMA_W = 2e-4          # spectral width Gamma
GAMMA = GAMMA_W / (2 * math.pi)
BETA = math.log(1001.0)


def damped_rc(lam=0.1):
    return RcParams(lam=lam, Omega=1.0, residual=OhmicRcSD(GAMMA))


def test_rates_vanish_without_residual_coupling():
    spec = make_spec(fock=(8,))
    rates = build_rate_operators(h_s_rc(spec), 0, spec.rcs[0], spec.beta)
    assert np.abs(rates.chi.data).max() == 0.0
    assert np.abs(rates.theta.data).max() == 0.0


def test_rates_symmetries():
    spec = make_spec(fock=(8,))
    rates = build_rate_operators(h_s_rc(spec), 0, damped_rc(), BETA)
    assert rates.chi.herm_defect() < 1e-10
    theta = rates.theta.data
    assert np.abs(theta + theta.conj().T).max() < 1e-10   # anti-Hermitian
    # in the eigenbasis with real x_jk, theta is antisymmetric
    w, v = np.linalg.eigh(h_s_rc(spec).data)
    th_eig = v.conj().T @ theta @ v
    assert np.abs(th_eig + th_eig.T).max() < 1e-10


def test_rates_uncoupled_mode_analytic():
    # lam = 0: chi = (pi/2) gamma Om coth(beta Om/2) x, theta = (pi/2) gamma Om (adag - a)
    n = 9
    lay = SpaceLayout((n,))
    h = 1.0 * embed(number_op(n), 1, lay)
    rates = build_rate_operators(h, 0, damped_rc(lam=0.0), BETA)
    a, adag = ladder(n)
    x = embed(a + adag, 1, lay).data
    coth = 1.0 / math.tanh(BETA / 2.0)
    chi_expect = (math.pi / 2) * GAMMA * coth * x
    theta_expect = (math.pi / 2) * GAMMA * embed(adag - a, 1, lay).data
    assert np.abs(rates.chi.data - chi_expect).max() < 1e-12
    assert np.abs(rates.theta.data - theta_expect).max() < 1e-12


def test_rates_bruteforce_oracle():
    # independent double loop over the numerically diagonalized eigenbasis
    spec = make_spec(fock=(12,))
    h = h_s_rc(spec)
    rc = damped_rc()
    rates = build_rate_operators(h, 0, rc, BETA)
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
            cfac = (2 * GAMMA / BETA if abs(xi) < 1e-9 / BETA
                    else GAMMA * xi / math.tanh(BETA * xi / 2))
            proj = np.outer(v[:, j], v[:, k].conj())
            chi += (math.pi / 2) * cfac * xjk * proj
            theta += (math.pi / 2) * GAMMA * xi * xjk * proj
    scale = np.abs(chi).max()
    assert np.abs(chi - rates.chi.data).max() / scale < 1e-12
    assert np.abs(theta - rates.theta.data).max() / scale < 1e-12


def test_dissipator_increment_properties(rng):
    spec = make_spec(fock=(8,))
    rates = build_rate_operators(h_s_rc(spec), 0, damped_rc(), BETA)
    for _ in range(50):
        rho = random_state(rng, spec.layout.dims)
        inc = apply_dissipator(rates, rho)
        assert abs(inc.trace()) < 1e-12
        assert inc.herm_defect() < 1e-12


def test_dissipator_zero_rates(rng):
    spec = make_spec(fock=(6,))
    rates = build_rate_operators(h_s_rc(spec), 0, spec.rcs[0], spec.beta)
    rho = random_state(rng, spec.layout.dims)
    assert np.abs(apply_dissipator(rates, rho).data).max() == 0.0


def test_dissipator_maximally_mixed_analytic():
    # lam = 0, rho = 1/(2N): increment = [x, theta]/N = (pi gamma Om / N)[a, adag]
    n = 3
    lay = SpaceLayout((n,))
    h = 1.0 * embed(number_op(n), 1, lay)
    rates = build_rate_operators(h, 0, damped_rc(lam=0.0), BETA)
    rho = DensityMatrix(Operator(np.eye(2 * n) / (2 * n), lay.dims))
    inc = apply_dissipator(rates, rho).data
    comm_trunc = np.diag([1.0, 1.0, 1.0 - n])
    expect = (math.pi * GAMMA / n) * np.kron(np.eye(2), comm_trunc)
    assert np.abs(inc - expect).max() < 1e-18
    assert abs(np.trace(inc)) < 1e-18


def test_dissipator_dimension_mismatch(rng):
    spec = make_spec(fock=(8,))
    rates = build_rate_operators(h_s_rc(spec), 0, damped_rc(), BETA)
    with pytest.raises(ValueError, match="mismatch"):
        apply_dissipator(rates, random_state(rng, (2, 6)))


def test_liouvillian_commutator_spectrum():
    h = Operator(0.5 * pauli("z").data, (2,))
    liou = build_liouvillian(h)
    w = np.sort_complex(np.linalg.eigvals(liou))
    expect = np.sort_complex(np.array([0.0, 0.0, 1j, -1j]))
    assert np.abs(w - expect).max() < 1e-12


def test_liouvillian_zero_generator():
    h = Operator(np.zeros((4, 4)), (2, 2))
    assert np.abs(build_liouvillian(h)).max() == 0.0


def test_liouvillian_matches_direct_action(rng):
    spec = make_spec(fock=(6,))
    h = h_s_rc(spec)
    rates = build_rate_operators(h, 0, damped_rc(), BETA)
    liou = build_liouvillian(h, [rates])
    for _ in range(20):
        rho = random_state(rng, spec.layout.dims).data
        direct = -1j * (h.data @ rho - rho @ h.data) + dissipator_action(
            rates.x.data, rates.chi.data, rates.theta.data, rho)
        via = (liou @ rho.reshape(-1)).reshape(rho.shape)
        assert np.abs(direct - via).max() < 1e-12


def test_liouvillian_memory_guard():
    n = LIOUVILLIAN_MAX_VEC   # 64^2 = 4096 passes, 70^2 fails
    h = Operator(np.zeros((70, 70)), (2, 35))
    with pytest.raises(MemoryError):
        build_liouvillian(h)


def test_conjugate_rates_identity_and_norms():
    spec = make_spec(fock=(8,))
    rates = build_rate_operators(h_s_rc(spec), 0, damped_rc(), BETA)
    eye = Operator(np.eye(spec.layout.dim), spec.layout.dims)
    same = conjugate_rates(rates, eye)
    assert np.abs(same.chi.data - rates.chi.data).max() == 0.0
    from rcjc.transforms import phi
    u = phi(spec, 123.4)
    rot = conjugate_rates(rates, u)
    for attr in ("chi", "theta", "x"):
        before = np.linalg.norm(getattr(rates, attr).data)
        after = np.linalg.norm(getattr(rot, attr).data)
        assert abs(before - after) < 1e-8 * max(1.0, before)


def test_conjugate_rates_rejects_non_unitary():
    spec = make_spec(fock=(6,))
    rates = build_rate_operators(h_s_rc(spec), 0, damped_rc(), BETA)
    bad = Operator(np.eye(spec.layout.dim) * 1.001, spec.layout.dims)
    with pytest.raises(ValueError, match="unitary"):
        conjugate_rates(rates, bad)


def test_frame_covariance_two_paths(rng):
    spec = make_spec(fock=(8,))
    h = h_s_rc(spec)
    rates = build_rate_operators(h, 0, damped_rc(), BETA)
    from rcjc.transforms import FrameMap
    fm = FrameMap(spec)
    rho = random_state(rng, spec.layout.dims).data
    for t in np.linspace(0.0, 5000.0, 10):
        p = fm.phi_data(t)
        rot = conjugate_rates(rates, Operator(p, spec.layout.dims))
        lhs = dissipator_action(rot.x.data, rot.chi.data, rot.theta.data,
                                p @ rho @ p.conj().T)
        rhs = p @ dissipator_action(rates.x.data, rates.chi.data,
                                    rates.theta.data, rho) @ p.conj().T
        assert np.abs(lhs - rhs).max() < 1e-8
