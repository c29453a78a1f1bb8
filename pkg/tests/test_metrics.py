import math

import numpy as np
import pytest

from rcjc.hilbert import SpaceLayout, fock_ket, spin_ket, thermal_state
from rcjc.linalg import DensityMatrix, Operator, func_of_hermitian
from rcjc.metrics import (
    fidelity,
    positive_intervals,
    purity,
    sigma_series,
    sigma_threshold,
    trace_distance,
    vn_entropy,
)

from conftest import random_hermitian, random_state


def qubit_dm(ket):
    return DensityMatrix(Operator(np.outer(ket, ket.conj()), (2,)))


def test_fidelity_reference_values(rng):
    rho = random_state(rng, (4,))
    assert abs(fidelity(rho, rho) - 1.0) < 1e-10
    e, g = qubit_dm(spin_ket("e")), qubit_dm(spin_ket("g"))
    assert fidelity(e, g) < 1e-12
    vac = DensityMatrix(Operator(
        np.outer(fock_ket(24, 0), fock_ket(24, 0)), (24,)))
    th = thermal_state(math.log(2.0), 24)          # n_th = 1
    # <0|rho_th|0> = 1/(1 + n_th), up to the 2^-24 truncation renormalization
    assert abs(fidelity(vac, th) - 0.5) < 1e-7


def test_fidelity_symmetry_and_negativity_gate(rng):
    for _ in range(10):
        r1, r2 = random_state(rng, (5,)), random_state(rng, (5,))
        assert abs(fidelity(r1, r2) - fidelity(r2, r1)) < 1e-9
    # states beyond the PSD window are rejected upstream, so feed the raw
    # eigenvalue clip: a slightly negative but admissible state passes
    w = np.array([0.6, 0.4, -0.5e-9])
    v = np.linalg.qr(random_hermitian(rng, 3))[0]
    rho = DensityMatrix(Operator((v * (w / w.sum())) @ v.conj().T, (3,)))
    assert 0.0 <= fidelity(rho, rho) <= 1.0 + 1e-9


def test_trace_distance_reference_values():
    e, g = qubit_dm(spin_ket("e")), qubit_dm(spin_ket("g"))
    assert trace_distance(e, e) == 0.0
    assert abs(trace_distance(e, g) - 1.0) < 1e-12
    plus = qubit_dm(spin_ket("+"))
    assert abs(trace_distance(plus, e) - math.sqrt(2) / 2) < 1e-12


def test_trace_distance_metric_axioms(rng):
    for _ in range(15):
        a, b, c = (random_state(rng, (4,)) for _ in range(3))
        dab, dbc, dac = (trace_distance(x, y)
                         for x, y in ((a, b), (b, c), (a, c)))
        assert dac <= dab + dbc + 1e-9
        assert abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12


def test_fuchs_van_de_graaf_bounds(rng):
    for _ in range(100):
        r1, r2 = random_state(rng, (6,)), random_state(rng, (6,))
        f = fidelity(r1, r2)
        d = trace_distance(r1, r2)
        assert 1.0 - f <= d + 1e-8
        assert d <= math.sqrt(max(0.0, 1.0 - f * f)) + 1e-8


def test_measures_unitary_invariance(rng):
    r1, r2 = random_state(rng, (6,)), random_state(rng, (6,))
    h = Operator(random_hermitian(rng, 6), (6,))
    u = func_of_hermitian(h, lambda w: np.exp(-1j * w * 0.9)).data
    r1u = DensityMatrix(Operator(u @ r1.data @ u.conj().T, (6,)))
    r2u = DensityMatrix(Operator(u @ r2.data @ u.conj().T, (6,)))
    assert abs(fidelity(r1, r2) - fidelity(r1u, r2u)) < 1e-9
    assert abs(trace_distance(r1, r2) - trace_distance(r1u, r2u)) < 1e-9


def test_sigma_series_reference_cases():
    t = np.linspace(0.0, 1.0, 11)
    assert np.abs(sigma_series(t, np.full(11, 0.3))).max() == 0.0
    assert np.abs(sigma_series(t, 2.5 * t) - 2.5).max() < 1e-12


def test_sigma_series_finite_difference_order():
    errs = []
    for m in (200, 400):
        t = np.linspace(0.0, 3.0, m + 1)
        got = sigma_series(t, np.cos(t))
        errs.append(np.abs(got[1:-1] + np.sin(t)[1:-1]).max())
    assert 3.5 < errs[0] / errs[1] < 4.5    # second-order central differences


def test_sigma_series_validation():
    with pytest.raises(ValueError, match="uniform"):
        sigma_series(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.raises(ValueError, match="3 samples"):
        sigma_series(np.array([0.0, 1.0]), np.zeros(2))


def test_sigma_of_monotone_decay_stays_nonpositive():
    t = np.linspace(0.0, 5.0, 200)
    d = np.exp(-t)
    assert sigma_series(t, d).max() <= 1e-9


def test_sigma_threshold_and_intervals():
    t = np.linspace(0.0, 10.0, 401)
    d = 0.5 + 0.1 * np.sin(t)
    sig = sigma_series(t, d)
    thr = sigma_threshold(t, d)
    assert thr < 0.05                       # well below the real derivative scale
    ivs = positive_intervals(t, sig, thr)
    assert len(ivs) == 2                    # cos > 0 on two stretches of [0, 10]
    assert ivs[0][0] == 0.0
    assert abs(ivs[0][1] - math.pi / 2) < 0.1
    assert abs(ivs[1][0] - 3 * math.pi / 2) < 0.1


def test_purity_and_entropy_reference_states():
    pure = qubit_dm(spin_ket("+"))
    assert abs(purity(pure) - 1.0) < 1e-12
    assert vn_entropy(pure) == pytest.approx(0.0, abs=1e-9)
    mixed = DensityMatrix(Operator(np.eye(2) / 2, (2,)))
    assert abs(purity(mixed) - 0.5) < 1e-12
    assert vn_entropy(mixed) == pytest.approx(1.0, rel=1e-12)


def test_entropy_half_transfer_is_one_bit():
    # halfway through a two-boson exchange the spin is maximally mixed
    from rcjc.linalg import partial_trace
    from rcjc.models import h_n, transfer_time
    from test_models import make_spec
    spec = make_spec(fock=(8,))
    h = h_n(spec)
    tau = transfer_time(spec)
    u = func_of_hermitian(h, lambda w: np.exp(-1j * w * tau / 2))
    e0 = np.kron(spin_ket("e"), fock_ket(8, 0))
    rho = u.data @ np.outer(e0, e0.conj()) @ u.data.conj().T
    spin = partial_trace(DensityMatrix(Operator(rho, spec.layout.dims)), [0])
    assert vn_entropy(spin) > 0.99
