"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import filecmp
import json
import math
import time

import numpy as np
import pytest

from qcdma.capacity import ChannelModel, cdma_rates, fdma_rates, single_pair_rates
from qcdma.chaos import DEFAULT_INIT_A, REFERENCE_PARAMS, integrate, settle
from qcdma.config import SCENARIOS, default_text, validate_config
from qcdma.fock import (SimConfig, coherent_state, gaussian_oracle_moments, moments_from_rho,
                        run_single_shot)
from qcdma.modes import (amplifier, beamsplitter, check_bogoliubov, compose, full_network,
                         network_transform, phase_shift)
from qcdma.scenario import run_scenario
from qcdma.spectral import (Tone, accumulate_phase, bessel_product_average, correction_factor,
                            empirical_phase_average, estimate_psd, tone_signal)

pytestmark = pytest.mark.acceptance


def report(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def _cfg(scenario, seed=0, **blocks):
    over = {"scenario": scenario, "seed": seed}
    over.update(blocks)
    return validate_config(default_text(), overrides=over)


def _rows(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return header, np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_criterion_1_network_closed_form(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for t1, t2 in rng.uniform(-math.pi, math.pi, (100, 2)):
        c = full_network(t1, t2)
        e1, e2 = np.exp(1j * t1), np.exp(1j * t2)
        a3 = np.array([1.0, np.exp(1j * (t1 - t2)), math.sqrt(6) / 2 * e1, e1 / math.sqrt(2)])
        a4 = np.array([1.0, np.exp(1j * (t2 - t1)), math.sqrt(6) / 2 * e2, -e2 / math.sqrt(2)])
        worst = max(worst, np.max(np.abs(np.array(c.a3.as_tuple()) - a3)),
                    np.max(np.abs(np.array(c.a4.as_tuple()) - a4)),
                    abs(c.a3.norm() - 1), abs(c.a4.norm() - 1))
    norm = abs(1 + 1 - 1.5 + 0.5 - 1)
    dt = time.perf_counter() - t0
    ok = worst < 1e-12 and norm < 1e-12 and dt < 1.0
    report(capsys, 1, ok, f"max coefficient error {worst:.2e}, normalization error {norm:.1e}, {dt:.2f} s")


def test_criterion_2_bogoliubov_chains(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    res, floor = [], []
    for _ in range(100):
        chain = []
        for _ in range(rng.integers(1, 11)):
            kind = rng.integers(3)
            i, j = rng.choice(4, 2, replace=False)
            if kind == 0:
                chain.append(beamsplitter(4, i, j))
            elif kind == 1:
                chain.append(amplifier(4, i, j, rng.uniform(1.0, 10.0)))
            else:
                chain.append(phase_shift(4, i, rng.uniform(-math.pi, math.pi), bool(rng.integers(2))))
        T = compose(chain)
        res.append(check_bogoliubov(T))
        floor.append(np.finfo(float).eps * max(1.0, np.max(np.abs(T.U)) ** 2))
    res, floor = np.array(res), np.array(floor)
    dt = time.perf_counter() - t0
    bad = int(np.sum(res >= 1e-12))
    ok = bad == 0 and dt < 1.0
    report(capsys, 2, ok, f"max residual {res.max():.2e}; {bad}/100 chains >= 1e-12; "
                          f"max residual / (eps |U|^2) = {np.max(res / floor):.1f}; {dt:.2f} s")


def test_criterion_3_oracle_chain(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(6):
        n = rng.integers(1, 6)
        w = rng.uniform(2.0, 20.0, n)
        tones = [Tone(A=r * wi, omega=wi, phi=ph) for r, wi, ph
                 in zip(rng.uniform(0, 0.3, n), w, rng.uniform(0, 2 * math.pi, n))]
        dt = 2 * math.pi / w.max() / 40
        t = dt * np.arange(int(5000 * 2 * math.pi / w.min() / dt))
        delta = tone_signal(tones, t)
        emp = abs(empirical_phase_average(accumulate_phase(delta, dt)))
        bes = bessel_product_average(tones)
        sqm = math.sqrt(correction_factor(estimate_psd(delta, dt)).M)
        worst = max(worst, abs(emp - bes), abs(emp - sqm), abs(bes - sqm))
    el = time.perf_counter() - t0
    report(capsys, 3, worst < 1e-2 and el < 10, f"max pairwise gap {worst:.2e} over 6 tone sets, {el:.1f} s")


def test_criterion_4_hard_chaos_M(capsys):
    t0 = time.perf_counter()
    p = REFERENCE_PARAMS
    s0, tt = settle(p, DEFAULT_INIT_A, 200)
    tr = integrate(p, s0, 2000 * p.drive_period, t0=tt)
    M = correction_factor(estimate_psd(tr.delta, tr.dt)).M
    emp = abs(empirical_phase_average(tr.theta))
    rel = abs(emp - math.sqrt(M)) / math.sqrt(M)
    el = time.perf_counter() - t0
    ok = 0.005 <= M <= 0.02 and rel < 0.1 and el < 60
    report(capsys, 4, ok, f"M = {M:.4g} (band [0.005, 0.02]), |<e^-i theta>| = {emp:.4g}, "
                          f"sqrt(M) = {math.sqrt(M):.4g}, rel gap {rel:.1%}, {el:.1f} s")


def test_criterion_5_fidelity_sweep_structure(capsys, tmp_path):
    t0 = time.perf_counter()
    cfg = _cfg("fidelity-sweep")
    run_scenario(cfg, tmp_path, threads=4)
    summary = json.loads((tmp_path / "summary.json").read_text())
    pts = summary["points"]
    el = time.perf_counter() - t0
    a = [p["value"] for p in pts if p["lam"] <= 0 and p["F1"] < 0.7 and p["F2"] < 0.7]
    b = [p["value"] for p in pts if p["lam"] > 0 and p["F1"] < 0.8 and p["F2"] < 0.8]
    c = [p["value"] for p in pts if p["F1"] >= 0.95 and p["F2"] >= 0.95]
    lam = np.array([p["lam"] for p in pts])
    F = np.array([[p["F1"], p["F2"]] for p in pts])
    ok = bool(a) and bool(b) and bool(c) and len(pts) >= 20 and el < 600
    report(capsys, 5, ok,
           f"{len(pts)} points; (a) lambda<=0 & F<0.7 at {len(a)} pts, (b) lambda>0 & F<0.8 at "
           f"{len(b)} pts, (c) F>=0.95 at {len(c)} pts; lambda in [{lam.min():.3g}, {lam.max():.3g}], "
           f"F in [{F.min():.3f}, {F.max():.3f}]; boundaries {summary['regime_boundaries']}; {el:.1f} s")


def _p0_sweep(tmp_path, dim):
    cfg = _cfg("p0-sweep", sim={"dim": dim})
    run_scenario(cfg, tmp_path, threads=4)
    _, data = _rows(tmp_path / "p0_sweep.csv")
    return data, json.loads((tmp_path / "summary.json").read_text())


def test_criterion_6_p0_sweep(capsys, tmp_path):
    t0 = time.perf_counter()
    data, summary = _p0_sweep(tmp_path, 8)
    el = time.perf_counter() - t0
    target = 1.0 - summary["M1"]
    dev = np.max(np.abs(data[:, 1:3] - target))
    best = data[int(np.argmax(np.round(data[:, 3], 12))), 0]
    ok = dev <= 0.02 and abs(best - 0.5) < 1e-9 and el < 300
    report(capsys, 6, ok, f"M = {summary['M1']:.4g}, max |F - (1 - M)| = {dev:.4f} (tol 0.02), "
                          f"argmax p0 = {best:.2f}, max Fbar = {summary['max_Fbar']:.4f}, {el:.1f} s")


def test_criterion_7_gaussian_oracle(capsys):
    t0 = time.perf_counter()
    cfg = SimConfig(dim=10, out_dim=100)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(4):
        t1, t2 = rng.uniform(-math.pi, math.pi, 2)
        al = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
        r3, _ = run_single_shot(t1, t2, coherent_state(al[0], 10), coherent_state(al[1], 10), cfg)
        want = gaussian_oracle_moments(network_transform(t1, t2), [al[0], al[1], 0, 0], row=0)
        worst = max(worst, np.max(np.abs(moments_from_rho(r3).as_array() - want.as_array())))
    el = time.perf_counter() - t0
    report(capsys, 7, worst < 1e-4 and el < 30, f"max moment error {worst:.2e} (tol 1e-4), {el:.1f} s")


def test_criterion_8_truncation(capsys, tmp_path):
    d8, _ = _p0_sweep(tmp_path / "d8", 8)
    d10, _ = _p0_sweep(tmp_path / "d10", 10)
    diff = np.max(np.abs(d8[:, 1:3] - d10[:, 1:3]))
    report(capsys, 8, diff < 1e-3, f"max fidelity change dim 8 -> 10: {diff:.2e} (tol 1e-3)")


def test_criterion_9_capacity(capsys):
    t0 = time.perf_counter()
    etas = np.linspace(0, 1, 21)
    low = etas[etas <= 0.5]
    q_zero = all(single_pair_rates(e, 1.0).quantum == 0.0 for e in low) and all(
        fdma_rates(ChannelModel(kind="FDMA", eta=e, N=N)).quantum == 0.0 for e in low for N in range(1, 9))
    c_small = [single_pair_rates(e, 1.0).classical for e in (1e-2, 1e-4, 1e-6)] + \
              [fdma_rates(ChannelModel(kind="FDMA", eta=1e-6, N=N)).classical for N in range(1, 9)]
    c_zero = max(c_small) < 0.1 and single_pair_rates(0.0, 1.0).classical == 0.0
    spread = 0.0
    for N in range(1, 9):
        for attr in ("classical", "quantum"):
            v = [getattr(cdma_rates(ChannelModel(kind="CDMA", M=0.01, N=N, eta=e)), attr)
                 for e in etas if e >= 0.1 - 1e-12]
            spread = max(spread, (max(v) - min(v)) / max(v))
    beats, grows = True, True
    for e in etas:
        for attr in ("classical", "quantum"):
            gaps = [getattr(cdma_rates(ChannelModel(kind="CDMA", N=N, eta=e)), attr)
                    - getattr(fdma_rates(ChannelModel(kind="FDMA", N=N, eta=e)), attr) for N in range(2, 9)]
            beats &= min(gaps) > 0
            grows &= bool(np.all(np.diff(gaps) > 0))
    el = time.perf_counter() - t0
    ok = q_zero and c_zero and spread < 0.1 and beats and grows and el < 5
    report(capsys, 9, ok, f"quantum zero for eta<=0.5: {q_zero}; classical->0: {c_zero}; "
                          f"CDMA eta spread {spread:.1%}; CDMA>FDMA per pair: {beats}; "
                          f"per-pair gap increasing in N: {grows}; {el:.1f} s")


def test_criterion_10_determinism(capsys, tmp_path):
    small = {"sweeps": {"fidelity-sweep": {"parameter": "f_d", "start": 30.0, "stop": 40.0, "steps": 3},
                        "p0-sweep": {"parameter": "p0", "start": 0.0, "stop": 1.0, "steps": 5}},
             "sim": {"n_samples": 100}}
    mismatched = []
    for name in SCENARIOS:
        cfg = _cfg(name, seed=11, **small)
        dirs = []
        for tag, threads in (("a", 1), ("b", 1), ("c", 4)):
            d = tmp_path / name / tag
            run_scenario(cfg, d, threads=threads)
            dirs.append(d)
        csvs = sorted(f.name for f in dirs[0].glob("*.csv"))
        for other in dirs[1:]:
            _, bad, errs = filecmp.cmpfiles(dirs[0], other, csvs, shallow=False)
            mismatched += [f"{name}/{other.name}/{f}" for f in bad + errs]
    report(capsys, 10, not mismatched,
           f"{len(SCENARIOS)} scenarios x (rerun, 4 threads): mismatched CSVs {mismatched or 'none'}")
