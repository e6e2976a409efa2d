"""Scenario runners: each writes CSVs plus a JSON summary and returns a RunManifest."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .capacity import rate_sweep, write_rate_csv
from .chaos import (DuffingParams, Trajectory, classify_regime, integrate,
                    integrate_synchronized_pair, max_lyapunov, settle, sync_error)
from .config import ScenarioConfig
from .errors import UnconvergedError
from .fock import (DensityMatrix, QubitSpec, SimConfig, average_coefficients, fidelity,
                   predicted_fidelity, sample_times, transmit_network)
from .modes import full_network
from .spectral import correction_factor, empirical_phase_average, estimate_psd

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    scenario: str
    config_hash: str
    version: str
    seed: int
    started: str
    finished: str = ""
    outputs: dict = field(default_factory=dict)

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def file_sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt(v) -> str:
    return repr(float(v))


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n")


def point_seed(seed: int, idx: int) -> int:
    """Per-sweep-point seed, independent of scheduling."""
    return int(np.random.SeedSequence([seed, idx]).generate_state(1)[0])


def _map(fn: Callable, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i, x) for i, x in enumerate(items)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(fn, i, x) for i, x in enumerate(items)]
        return [f.result() for f in futs]


def _settled(cfg: ScenarioConfig, params: DuffingParams, key: str, horizon: float) -> Trajectory:
    s0, t_end = settle(params, cfg.init(key), cfg.raw["integration"]["transient_periods"],
                       cfg.dt, cfg.bound)
    return integrate(params, s0, horizon, cfg.dt, t0=t_end, bound=cfg.bound)


def _sender_receiver(cfg: ScenarioConfig, params: DuffingParams, horizon: float):
    """Trajectories (A, B, C, D); C, D are None under perfect synchronization."""
    if cfg.raw["sim"]["receiver_sync"] == "perfect":
        return _settled(cfg, params, "a", horizon), _settled(cfg, params, "b", horizon), None, None
    n_tr = cfg.raw["integration"]["transient_periods"] * params.drive_period
    one_way = cfg.raw["sync"]["one_way"]
    out = []
    for s, r in (("a", "c"), ("b", "d")):
        ta, tb = integrate_synchronized_pair(params, cfg.init(s), cfg.init(r), n_tr + horizon,
                                             cfg.dt, one_way=one_way, bound=cfg.bound)
        k0 = int(round(n_tr / cfg.dt))
        out.append(_rebase(ta, k0, params.g_fo))
        out.append(_rebase(tb, k0, params.g_fo))
    return out[0], out[2], out[1], out[3]


def _rebase(tr: Trajectory, k0: int, g_fo: float) -> Trajectory:
    return Trajectory.from_arrays(tr.t[k0:], tr.x[k0:], tr.p[k0:], g_fo)


@dataclass
class FidelityPoint:
    value: float
    lam: float
    lyap_converged: bool
    M1: float
    M2: float
    F1: float
    F2: float
    regime: str


def _transmission_setup(cfg: ScenarioConfig, params: DuffingParams, sim: SimConfig):
    horizon = (sim.n_samples * sim.decorrelation_gap + 1.0) * params.drive_period
    A, B, C, D = _sender_receiver(cfg, params, horizon)
    spec = cfg.raw["spectrum"]
    M = []
    for tr in (A, B):
        ps = estimate_psd(tr.delta, cfg.dt, spec["segments"], spec["window"])
        M.append(correction_factor(ps).M)
    times = sample_times(A.t[0], A.t[-1], sim, params.drive_period)
    th = [tr.phase_at(times) if tr is not None else None for tr in (A, B, C, D)]
    coeffs = average_coefficients(*th, G=sim.gain) if sim.averaging == "coherent" else None
    return A, B, C, D, M, times, th, coeffs


def _transmit(cfg, sim, th, coeffs, q1, q2):
    if coeffs is not None:
        return transmit_network(coeffs, q1, q2, sim)
    acc3 = acc4 = 0.0
    t3 = th[2] if th[2] is not None else th[0]
    t4 = th[3] if th[3] is not None else th[1]
    for k in range(len(th[0])):
        r3, r4 = transmit_network(full_network(th[0][k], th[1][k], sim.gain, t3[k], t4[k]), q1, q2, sim)
        acc3 = acc3 + r3.matrix
        acc4 = acc4 + r4.matrix
    n = len(th[0])
    return DensityMatrix(acc3 / n), DensityMatrix(acc4 / n)


def _regime_label(est, M, thresholds) -> str:
    try:
        return classify_regime(est, M, thresholds).value
    except UnconvergedError:
        return "Unconverged"


def fidelity_point(cfg: ScenarioConfig, name: str, value: float, seed: int) -> FidelityPoint:
    params = cfg.duffing.with_(**{name: float(value)})
    sim = SimConfig(**{**asdict(cfg.sim), "seed": seed})
    est = max_lyapunov(params, cfg.init("a"), cfg.lyapunov)
    _, _, _, _, M, _, th, coeffs = _transmission_setup(cfg, params, sim)
    p0 = cfg.raw["sim"]["p0"]
    q1, q2 = QubitSpec(p0), QubitSpec(1.0 - p0)
    r3, r4 = _transmit(cfg, sim, th, coeffs, q1, q2)
    return FidelityPoint(value=float(value), lam=est.lam, lyap_converged=est.converged,
                         M1=M[0], M2=M[1], F1=fidelity(r3, q1), F2=fidelity(r4, q2),
                         regime=_regime_label(est, M[0], cfg.thresholds))


# individual scenarios -----------------------------------------------------------------

def _run_chaos(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    p = cfg.duffing
    horizon = cfg.raw["chaos"]["horizon_periods"] * p.natural_period
    tr = _settled(cfg, p, "a", horizon)
    k = cfg.raw["integration"]["output_stride"]
    _write_rows(out / "trajectory.csv", ["t", "x", "p", "delta", "theta"],
                zip(tr.t[::k], tr.x[::k], tr.p[::k], tr.delta[::k], tr.theta[::k]))
    est = max_lyapunov(p, cfg.init("a"), cfg.lyapunov)
    _write_rows(out / "lyapunov.csv", ["block", "lambda"], enumerate(est.history))
    summary = {"lambda": est.lam, "lambda_per_natural_period": est.per_period,
               "lambda_units": est.units, "converged": est.converged}
    _write_json(out / "summary.json", summary)
    if not est.converged:
        raise UnconvergedError(f"Lyapunov estimate did not converge (lambda = {est.lam:.4g})")
    return summary


def _run_sync(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    p = cfg.duffing
    horizon = cfg.raw["sync"]["horizon_periods"] * p.natural_period
    a, b = integrate_synchronized_pair(p, cfg.init("a"), cfg.init("b"), horizon, cfg.dt,
                                       one_way=cfg.raw["sync"]["one_way"], bound=cfg.bound)
    k = cfg.raw["integration"]["output_stride"]
    _write_rows(out / "sync.csv", ["t", "x_a", "x_b", "diff"],
                zip(a.t[::k], a.x[::k], b.x[::k], (a.x - b.x)[::k]))
    err = sync_error(a, b, (0.5 * horizon, horizon))
    summary = {"sync_error_final_half": err, "k_I": p.k_I, "one_way": cfg.raw["sync"]["one_way"]}
    _write_json(out / "summary.json", summary)
    return summary


def _run_spectrum(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    p = cfg.duffing
    spec = cfg.raw["spectrum"]
    tr = _settled(cfg, p, "a", spec["horizon_periods"] * p.drive_period)
    ps = estimate_psd(tr.delta, cfg.dt, spec["segments"], spec["window"])
    ps.to_csv(out / "psd.csv")
    cf = correction_factor(ps)
    avg = empirical_phase_average(tr.theta)
    summary = {"M": cf.M, "sqrt_M": cf.amplitude, "omega_lo": cf.omega_lo, "omega_hi": cf.omega_hi,
               "empirical_phase_average_abs": abs(avg), "psd_normalization": ps.norm_note}
    _write_json(out / "summary.json", summary)
    return summary


def _run_fidelity_sweep(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    name = cfg.raw["sweeps"]["fidelity-sweep"]["parameter"]
    if name not in DuffingParams.__dataclass_fields__ or name == "nonlinearity":
        raise ValueError(f"fidelity-sweep parameter must be a numeric oscillator field, got {name!r}")
    values = cfg.sweep("fidelity-sweep")
    pts = _map(lambda i, v: fidelity_point(cfg, name, v, point_seed(cfg.seed, i)), values, threads)
    _write_rows(out / "fidelity_sweep.csv", [name, "lambda", "M", "F1", "F2", "Fbar"],
                [(pt.value, pt.lam, pt.M1, pt.F1, pt.F2, 0.5 * (pt.F1 + pt.F2)) for pt in pts])
    summary = {"parameter": name, "points": [asdict(pt) for pt in pts],
               "regime_boundaries": _boundaries(pts)}
    _write_json(out / "summary.json", summary)
    return summary


def _boundaries(pts) -> list:
    out = []
    for a, b in zip(pts, pts[1:]):
        if a.regime != b.regime:
            out.append({"between": [a.value, b.value], "from": a.regime, "to": b.regime})
    return out


def _run_p0_sweep(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    p = cfg.duffing
    sim = cfg.sim
    _, _, _, _, M, _, th, coeffs = _transmission_setup(cfg, p, sim)
    p0s = cfg.sweep("p0-sweep")

    def one(i, p0):
        q1, q2 = QubitSpec(float(p0)), QubitSpec(1.0 - float(p0))
        r3, r4 = _transmit(cfg, sim, th, coeffs, q1, q2)
        return fidelity(r3, q1), fidelity(r4, q2)

    res = _map(one, p0s, threads)
    fbar = [0.5 * (f1 + f2) for f1, f2 in res]
    pred = predicted_fidelity(M[0])
    _write_rows(out / "p0_sweep.csv", ["p0", "F1", "F2", "Fbar", "one_minus_M"],
                [(float(p0), f1, f2, fb, pred) for p0, (f1, f2), fb in zip(p0s, res, fbar)])
    best = int(np.argmax(np.round(fbar, 12)))
    summary = {"f_d": p.f_d, "M1": M[0], "M2": M[1], "predicted_fidelity": pred,
               "argmax_p0": float(p0s[best]), "max_Fbar": fbar[best]}
    _write_json(out / "summary.json", summary)
    return summary


def _run_capacity(cfg: ScenarioConfig, out: Path, threads: int) -> dict:
    cap = cfg.raw["capacity"]
    etas = np.linspace(cap["eta"]["start"], cap["eta"]["stop"], cap["eta"]["steps"])
    rows = rate_sweep(cfg.channel, cap["N_values"], etas)
    write_rate_csv(rows, out / "rates.csv")
    summary = {"rows": len(rows), "M": cfg.channel.M, "n_mean": cfg.channel.n_mean}
    _write_json(out / "summary.json", summary)
    return summary


RUNNERS = {
    "chaos": _run_chaos,
    "sync": _run_sync,
    "spectrum": _run_spectrum,
    "fidelity-sweep": _run_fidelity_sweep,
    "p0-sweep": _run_p0_sweep,
    "capacity": _run_capacity,
}


def run_scenario(cfg: ScenarioConfig, out_dir, threads: int = 1, plots: bool = False) -> RunManifest:
    """Run ``cfg.scenario`` into ``out_dir`` and write manifest.json listing every output."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest(scenario=cfg.scenario, config_hash=cfg.digest(), version=__version__,
                      seed=cfg.seed, started=_now())
    (out / "config.json").write_text(json.dumps(cfg.raw, indent=2, sort_keys=True) + "\n")
    try:
        RUNNERS[cfg.scenario](cfg, out, max(1, int(threads)))
        if plots:
            from .plots import render
            render(cfg.scenario, out)
    finally:
        man.finished = _now()
        man.outputs = {f.name: file_sha256(f) for f in sorted(out.iterdir())
                       if f.is_file() and f.name != MANIFEST_NAME}
        man.write(out)
    return man
