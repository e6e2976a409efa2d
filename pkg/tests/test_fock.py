import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcdma.chaos import (CHAOTIC_PARAMS, DEFAULT_INIT_A, DEFAULT_INIT_B, REFERENCE_PARAMS, Trajectory,
                         integrate, settle)
from qcdma.errors import TruncationError
from qcdma.fock import (DensityMatrix, QubitSpec, SimConfig, StateVector, apply_amplifier,
                        apply_loss, average_coefficients, channel_params, coherent_state,
                        encode_qubit, fidelity, gaussian_oracle_moments, moments_from_rho,
                        monte_carlo_transmission, predicted_fidelity, run_single_shot,
                        sample_times, transmit_network)
from qcdma.modes import OutputCoefficients, full_network, network_transform
from qcdma.spectral import correction_factor, estimate_psd

FAST = SimConfig(dim=6, out_dim=40)
P06 = QubitSpec(0.6)


def _traj(params, init, n_samples, gap=5.0):
    s0, t0 = settle(params, init, 200)
    horizon = (n_samples * gap + 1.0) * params.drive_period
    return integrate(params, s0, horizon, t0=t0)


def _flat(n=2001, dt=0.01):
    t = dt * np.arange(n)
    z = np.zeros(n)
    return Trajectory(t=t, x=z, p=z, delta=z, theta=z.copy())


# encoding / state types

def test_encode_examples():
    assert np.allclose(encode_qubit(QubitSpec(1.0)).amplitudes, [1, 0])
    assert np.allclose(encode_qubit(QubitSpec(0.0)).amplitudes, [0, 1])
    assert np.allclose(encode_qubit(P06).amplitudes, [math.sqrt(0.6), math.sqrt(0.4)])
    assert encode_qubit(P06, 5).amplitudes.shape == (5,)


def test_type_validation():
    with pytest.raises(ValueError):
        QubitSpec(1.1)
    with pytest.raises(ValueError):
        StateVector(1, 3, np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        SimConfig(dim=2)
    with pytest.raises(ValueError):
        SimConfig(n_samples=0)


def test_state_leakage():
    s = coherent_state(1.0, 12)
    assert s.leakage() < 1e-6
    assert coherent_state(2.0, 4).leakage() > 1e-2


def test_density_csv(tmp_path):
    path = tmp_path / "rho.csv"
    encode_qubit(P06).density().to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 5


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 1), st.floats(0, 1))
def test_outputs_are_valid_states(t1, t2, p1, p2):
    for rho in run_single_shot(t1, t2, QubitSpec(p1), QubitSpec(p2), FAST):
        m = rho.matrix
        assert abs(np.trace(m).real - 1) < 1e-8
        assert np.max(np.abs(m - m.conj().T)) < 1e-10
        assert np.linalg.eigvalsh(m).min() > -1e-8


# channel primitives

def test_loss_on_coherent_state():
    alpha, T = 0.8 + 0.3j, 0.35
    out = DensityMatrix(apply_loss(coherent_state(alpha, 25).density().matrix, T))
    assert moments_from_rho(out).mean == pytest.approx(alpha * math.sqrt(T), abs=1e-10)


def test_amplifier_on_vacuum_is_thermal():
    rho = apply_amplifier(np.diag([1.0, 0.0]).astype(complex), 4.0, 120)
    diag = np.real(np.diag(rho))
    n = np.arange(120)
    assert np.allclose(diag, (3.0**n) / 4.0 ** (n + 1), atol=1e-14)


def test_unit_gain_and_loss_are_identity():
    r = encode_qubit(P06, 4).density().matrix
    assert np.allclose(apply_loss(r, 1.0), r)
    assert np.allclose(apply_amplifier(r, 1.0, 4), r)
    with pytest.raises(ValueError):
        apply_loss(r, 1.5)


def test_channel_params_of_exact_network():
    ch = channel_params(full_network(0.3, -0.8).a3)
    assert ch.G == pytest.approx(2.5)
    assert ch.T == pytest.approx(0.8)
    assert not ch.noise_floor_raised


def test_channel_params_flags_subquantum_noise():
    ch = channel_params(OutputCoefficients(1.0, 1.0, 0.0, 0.0))
    assert ch.noise_floor_raised and ch.G == pytest.approx(2.0) and ch.T == pytest.approx(1.0)


# single shot

def test_amplified_vacuum_against_gaussian_oracle():
    vac = QubitSpec(1.0)
    r3, r4 = run_single_shot(0.0, 0.0, vac, vac, SimConfig(dim=8, out_dim=120))
    oracle = gaussian_oracle_moments(network_transform(0.0, 0.0), [0, 0, 0, 0], row=0)
    assert oracle.n == pytest.approx(1.5, abs=1e-12)
    assert moments_from_rho(r3).n == pytest.approx(oracle.n, abs=1e-8)
    # thermal state with n = 1.5 has vacuum weight 1 / (1 + n)
    assert fidelity(r3, vac) == pytest.approx(1 / 2.5, abs=1e-8)
    assert fidelity(r4, vac) < 1


def test_full_crosstalk_at_zero_phase():
    a, _ = run_single_shot(0.0, 0.0, P06, QubitSpec(1.0), FAST)
    b, _ = run_single_shot(0.0, 0.0, P06, QubitSpec(0.0), FAST)
    assert np.max(np.abs(a.matrix - b.matrix)) > 1e-2


@pytest.mark.parametrize("theta", [(0.0, 0.0), (0.7, -1.9), (2.5, 4.0)])
def test_mean_field_matches_heisenberg(theta):
    cfg = SimConfig(dim=10, out_dim=80)
    alphas = (0.5 + 0.2j, -0.3 + 0.4j)
    ins = [coherent_state(a, cfg.dim) for a in alphas]
    r3, r4 = run_single_shot(*theta, *ins, cfg)
    c = full_network(*theta)
    assert moments_from_rho(r3).mean == pytest.approx(c.a3.c_sig * alphas[0] + c.a3.c_cross * alphas[1], abs=1e-6)
    assert moments_from_rho(r4).mean == pytest.approx(c.a4.c_sig * alphas[1] + c.a4.c_cross * alphas[0], abs=1e-6)


@pytest.mark.parametrize("theta", [(0.0, 0.0), (1.1, 0.4)])
def test_second_moments_match_gaussian_oracle(theta):
    cfg = SimConfig(dim=10, out_dim=100)
    alphas = [0.6, 0.3j, 0.0, 0.0]
    r3, r4 = run_single_shot(*theta, coherent_state(alphas[0], 10), coherent_state(alphas[1], 10), cfg)
    T = network_transform(*theta)
    for rho, row in ((r3, 0), (r4, 3)):
        got = moments_from_rho(rho).as_array()
        want = gaussian_oracle_moments(T, alphas, row).as_array()
        assert np.max(np.abs(got - want)) < 1e-4


@settings(max_examples=10, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(0, 1), st.floats(0, 1))
def test_schroedinger_and_coefficient_routes_agree(t1, t2, p1, p2):
    q1, q2 = QubitSpec(p1), QubitSpec(p2)
    a3, a4 = run_single_shot(t1, t2, q1, q2, FAST)
    b3, b4 = transmit_network(full_network(t1, t2), q1, q2, FAST)
    assert np.max(np.abs(a3.matrix - b3.matrix)) < 1e-10
    assert np.max(np.abs(a4.matrix - b4.matrix)) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(0, 1), st.floats(0, 1))
def test_swap_symmetry(t1, t2, p1, p2):
    q1, q2 = QubitSpec(p1), QubitSpec(p2)
    r3, r4 = run_single_shot(t1, t2, q1, q2, FAST)
    s3, s4 = run_single_shot(t2, t1, q2, q1, FAST)
    assert np.max(np.abs(r3.matrix - s4.matrix)) < 1e-10
    assert fidelity(r3, q1) == pytest.approx(fidelity(s4, q1), abs=1e-10)


def test_truncation_error():
    with pytest.raises(TruncationError):
        run_single_shot(0.0, 0.0, QubitSpec(1.0), QubitSpec(1.0), SimConfig(dim=3, out_dim=4))


def test_truncation_convergence():
    q1, q2 = P06, QubitSpec(0.4)
    th = np.linspace(0, 6, 7)
    c = average_coefficients(th, 0.5 * th)
    f8 = [fidelity(r, q) for r, q in zip(transmit_network(c, q1, q2, SimConfig(dim=8)), (q1, q2))]
    f10 = [fidelity(r, q) for r, q in zip(transmit_network(c, q1, q2, SimConfig(dim=10)), (q1, q2))]
    assert np.max(np.abs(np.subtract(f8, f10))) < 1e-3


# Monte Carlo

def test_sample_times_rules():
    cfg = SimConfig(n_samples=10, decorrelation_gap=2.0, seed=3)
    ts = sample_times(0.0, 100.0, cfg, 1.0)
    assert np.allclose(np.diff(ts), 2.0)
    assert np.array_equal(ts, sample_times(0.0, 100.0, cfg, 1.0))
    with pytest.raises(ValueError):
        sample_times(0.0, 10.0, cfg, 1.0)


@pytest.mark.parametrize("mode", ["coherent", "ensemble"])
def test_constant_phase_equals_single_shot(mode):
    cfg = SimConfig(dim=6, out_dim=40, n_samples=20, decorrelation_gap=1.0, averaging=mode)
    tr = _flat()
    r3, r4 = monte_carlo_transmission(tr, tr, P06, QubitSpec(0.4), cfg, drive_period=0.5)
    s3, s4 = run_single_shot(0.0, 0.0, P06, QubitSpec(0.4), cfg)
    assert np.max(np.abs(r3.matrix - s3.matrix)) < 1e-12
    assert np.max(np.abs(r4.matrix - s4.matrix)) < 1e-12


def test_average_is_order_independent():
    rng = np.random.default_rng(1)
    th1, th2 = rng.uniform(-5, 5, 50), rng.uniform(-5, 5, 50)
    perm = rng.permutation(50)
    a = average_coefficients(th1, th2)
    b = average_coefficients(th1[perm], th2[perm])
    for x, y in zip(list(a.rows()), list(b.rows())):
        assert abs(x[2] - y[2]) < 1e-12
    ra = sum(run_single_shot(t1, t2, P06, P06, FAST)[0].matrix for t1, t2 in zip(th1[:8], th2[:8]))
    rb = sum(run_single_shot(t1, t2, P06, P06, FAST)[0].matrix
             for t1, t2 in zip(th1[:8][::-1], th2[:8][::-1]))
    assert np.max(np.abs(ra - rb)) < 1e-12


@pytest.mark.slow
def test_chaotic_drive_restores_fidelity():
    p = CHAOTIC_PARAMS
    cfg = SimConfig(n_samples=200)
    ta, tb = _traj(p, DEFAULT_INIT_A, 200), _traj(p, DEFAULT_INIT_B, 200)
    q1, q2 = P06, QubitSpec(0.4)
    r3, r4 = monte_carlo_transmission(ta, tb, q1, q2, cfg, drive_period=p.drive_period)
    assert fidelity(r3, q1) >= 0.95
    assert fidelity(r4, q2) >= 0.95


@pytest.mark.slow
def test_hard_chaos_fidelity_near_prediction():
    p = REFERENCE_PARAMS
    ta, tb = _traj(p, DEFAULT_INIT_A, 400), _traj(p, DEFAULT_INIT_B, 400)
    q1, q2 = P06, QubitSpec(0.4)
    r3, r4 = monte_carlo_transmission(ta, tb, q1, q2, SimConfig(), drive_period=p.drive_period)
    assert fidelity(r3, q1) == pytest.approx(0.9897, abs=0.02)
    assert fidelity(r4, q2) == pytest.approx(0.9897, abs=0.02)


@pytest.mark.slow
def test_periodic_drive_fidelity_range():
    p = REFERENCE_PARAMS.with_(f_d=10.0)
    ta, tb = _traj(p, DEFAULT_INIT_A, 400), _traj(p, DEFAULT_INIT_B, 400)
    q1, q2 = P06, QubitSpec(0.4)
    r3, r4 = monte_carlo_transmission(ta, tb, q1, q2, SimConfig(), drive_period=p.drive_period)
    f1, f2 = fidelity(r3, q1), fidelity(r4, q2)
    assert 0.4 < f1 < 0.5, f"F1 = {f1:.4f}"
    assert 0.6 <= f2 <= 0.64, f"F2 = {f2:.4f}"


# fidelity helpers

def test_fidelity_examples():
    assert fidelity(encode_qubit(P06).density(), P06) == pytest.approx(1.0)
    assert fidelity(DensityMatrix(np.eye(2) / 2), QubitSpec(0.3)) == pytest.approx(0.5)
    assert fidelity(DensityMatrix(np.diag([1.0, 0.0])), P06) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        fidelity(DensityMatrix(np.eye(1)), P06)


def test_predicted_fidelity_examples():
    assert predicted_fidelity(0.0) == 1.0
    assert predicted_fidelity(0.0103) == pytest.approx(0.9897)
    assert predicted_fidelity(0.05) == pytest.approx(0.95)
    with pytest.raises(ValueError):
        predicted_fidelity(1.5)


def test_measured_M_from_chaotic_trajectory_is_small():
    # the chaotic set suppresses crosstalk well below the periodic level
    tr = _traj(CHAOTIC_PARAMS, DEFAULT_INIT_A, 200)
    assert correction_factor(estimate_psd(tr.delta, tr.dt)).M < 0.05
