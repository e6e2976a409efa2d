"""Driven, damped Duffing oscillators: trajectories, synchronization, Lyapunov exponents.

Time is measured in units of 1/omega0 so that the undriven linear oscillator has
period 2*pi. The default step is ``1e-3`` of that natural period.

Equations of motion, with the quartic term's sign pair selected by ``nonlinearity``::

    dx/dt = omega0 * p
    dp/dt = s_lin * omega0 * x + s_cub * 4 mu x**3 + f_d cos(omega_d t) - gamma p

``"softening"`` (s_lin, s_cub) = (-1, +1) is the literal Hamiltonian
``omega0 (x^2 + p^2)/2 - mu x^4``. Its potential is unbounded below, and strong
drives escape to infinity. ``"hardening"`` (-1, -1) and ``"double_well"``
(+1, -1) give bounded potentials for the same parameter set.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DivergenceError, UnconvergedError
from .spectral import accumulate_phase

TWO_PI = 2.0 * math.pi
DEFAULT_DT = TWO_PI * 1e-3
DEFAULT_BOUND = 1e6

NONLINEARITIES = {
    "softening": (-1.0, 1.0),
    "hardening": (-1.0, -1.0),
    "double_well": (1.0, -1.0),
}


@dataclass(frozen=True)
class DuffingParams:
    omega0: float = 1.0
    mu: float = 0.25
    gamma: float = 0.05
    f_d: float = 0.0
    omega_d: float = 5.0
    k_I: float = 0.1
    g_fo: float = 0.03
    nonlinearity: str = "softening"

    def __post_init__(self):
        checks = [
            ("omega0", self.omega0 > 0, "> 0"),
            ("gamma", self.gamma >= 0, ">= 0"),
            ("mu", self.mu >= 0, ">= 0"),
            ("f_d", self.f_d >= 0, ">= 0"),
            ("omega_d", self.omega_d > 0, "> 0"),
            ("k_I", self.k_I >= 0, ">= 0"),
            ("g_fo", self.g_fo >= 0, ">= 0"),
        ]
        for name, ok, rule in checks:
            val = getattr(self, name)
            if not (ok and math.isfinite(val)):
                raise ValueError(f"DuffingParams.{name} must be finite and {rule}, got {val}")
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}; "
                             f"choose from {sorted(NONLINEARITIES)}")

    @property
    def signs(self) -> tuple[float, float]:
        return NONLINEARITIES[self.nonlinearity]

    @property
    def drive_period(self) -> float:
        return TWO_PI / self.omega_d

    @property
    def natural_period(self) -> float:
        return TWO_PI / self.omega0

    def with_(self, **kw) -> "DuffingParams":
        return replace(self, **kw)

    def _kernel_args(self):
        s_lin, s_cub = self.signs
        return (self.omega0, s_lin, s_cub, self.mu, self.gamma, self.f_d, self.omega_d)


# Reference parameter set (hardening sign, so the potential stays bounded).
REFERENCE_PARAMS = DuffingParams(omega0=1.0, mu=0.25, gamma=0.05, f_d=36.0, omega_d=5.0,
                             k_I=0.1, g_fo=0.03, nonlinearity="hardening")

# A set that is robustly chaotic (lambda ~ 0.12 per unit time) with the same mu, gamma.
CHAOTIC_PARAMS = DuffingParams(omega0=1.0, mu=0.25, gamma=0.05, f_d=30.0, omega_d=0.8,
                               k_I=0.1, g_fo=0.45, nonlinearity="hardening")


@dataclass(frozen=True)
class OscState:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise DivergenceError(f"non-finite oscillator state ({self.x}, {self.p})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p])


DEFAULT_INIT_A = OscState(0.1, 0.0)
DEFAULT_INIT_B = OscState(0.11, 0.0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    delta: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        n = self.t.size
        for name in ("x", "p", "delta", "theta"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"Trajectory.{name} length mismatch")
        if n >= 2:
            steps = np.diff(self.t)
            if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(self.t[-1])):
                raise ValueError("Trajectory time grid is not uniform")
        if n and self.theta[0] != 0.0:
            raise ValueError("Trajectory.theta must start at 0")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def __len__(self):
        return self.t.size

    @property
    def final_state(self) -> OscState:
        return OscState(float(self.x[-1]), float(self.p[-1]))

    def window(self, t_start: float, t_end: float) -> np.ndarray:
        return (self.t >= t_start) & (self.t <= t_end)

    def phase_at(self, times) -> np.ndarray:
        """Linear interpolation of theta at arbitrary times on the grid span."""
        times = np.asarray(times, dtype=float)
        if np.any(times < self.t[0]) or np.any(times > self.t[-1]):
            raise ValueError("requested times outside the trajectory")
        return np.interp(times, self.t, self.theta)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "p", "delta", "theta"])
            for row in zip(self.t, self.x, self.p, self.delta, self.theta):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_arrays(cls, t, x, p, g_fo) -> "Trajectory":
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        delta = g_fo * x
        theta = accumulate_phase(delta, float(t[1] - t[0])) if t.size > 1 else np.zeros_like(x)
        return cls(t=t, x=x, p=np.asarray(p, dtype=float), delta=delta, theta=theta)


def eom_derivative(s: OscState, params: DuffingParams, t: float = 0.0) -> tuple[float, float]:
    """Right-hand side (dx/dt, dp/dt) at state ``s`` and time ``t``."""
    w0, s_lin, s_cub, mu, gam, fd, wd = params._kernel_args()
    dx = w0 * s.p
    dp = s_lin * w0 * s.x + s_cub * 4.0 * mu * s.x**3 + fd * math.cos(wd * t) - gam * s.p
    return dx, dp


def energy(state, params: DuffingParams):
    """Hamiltonian of the undriven, undamped system; works on scalars or arrays."""
    x, p = (state.x, state.p) if isinstance(state, OscState) else state
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    s_lin, s_cub = params.signs
    return 0.5 * params.omega0 * p**2 - 0.5 * s_lin * params.omega0 * x**2 - s_cub * params.mu * x**4


def _steps(horizon: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not horizon >= dt * (1 - 1e-12):
        raise ValueError(f"horizon {horizon} shorter than dt {dt}")
    return int(round(horizon / dt))


def integrate(params: DuffingParams, init: OscState, horizon: float, dt: float = DEFAULT_DT,
              t0: float = 0.0, bound: float = DEFAULT_BOUND) -> Trajectory:
    """Fixed-step RK4 trajectory on ``t0 + k dt``, k = 0..round(horizon/dt).

    Raises DivergenceError once |x| or |p| exceeds ``bound``.
    """
    n = _steps(horizon, dt)
    xs, ps, n_ok = _kernels.rk4_single(float(init.x), float(init.p), float(t0), float(dt), n,
                                       *params._kernel_args(), float(bound))
    if n_ok < n + 1:
        raise DivergenceError(f"oscillator diverged at t = {t0 + (n_ok - 1) * dt:.6g}",
                              t=t0 + (n_ok - 1) * dt)
    t = t0 + dt * np.arange(n + 1)
    return Trajectory.from_arrays(t, xs, ps, params.g_fo)


def settle(params: DuffingParams, init: OscState, n_drive_periods: float = 200.0,
           dt: float = DEFAULT_DT, bound: float = DEFAULT_BOUND) -> tuple[OscState, float]:
    """Run the transient and return (state, t_end) for continuing integration."""
    horizon = n_drive_periods * params.drive_period
    n = _steps(horizon, dt)
    xs, ps, n_ok = _kernels.rk4_single(float(init.x), float(init.p), 0.0, float(dt), n,
                                       *params._kernel_args(), float(bound))
    if n_ok < n + 1:
        raise DivergenceError("oscillator diverged during transient", t=(n_ok - 1) * dt)
    return OscState(float(xs[-1]), float(ps[-1])), n * dt


def integrate_synchronized_pair(params: DuffingParams, init_a: OscState, init_b: OscState,
                                horizon: float, dt: float = DEFAULT_DT, t0: float = 0.0,
                                one_way: bool = False, bound: float = DEFAULT_BOUND,
                                ) -> tuple[Trajectory, Trajectory]:
    """Two oscillators coupled by the potential k_I (x_a - x_b)^2 / 2.

    With ``one_way`` only b feels the coupling (drive-response).
    """
    n = _steps(horizon, dt)
    xa, pa, xb, pb, n_ok = _kernels.rk4_pair(
        float(init_a.x), float(init_a.p), float(init_b.x), float(init_b.p), float(t0), float(dt), n,
        *params._kernel_args(), float(params.k_I), bool(one_way), float(bound))
    if n_ok < n + 1:
        raise DivergenceError(f"coupled pair diverged at t = {t0 + (n_ok - 1) * dt:.6g}",
                              t=t0 + (n_ok - 1) * dt)
    t = t0 + dt * np.arange(n + 1)
    return (Trajectory.from_arrays(t, xa, pa, params.g_fo),
            Trajectory.from_arrays(t, xb, pb, params.g_fo))


def sync_error(a: Trajectory, b: Trajectory, window: Optional[tuple[float, float]] = None) -> float:
    """RMS(x_a - x_b) / RMS(x_a) over ``window`` (whole run if None)."""
    if a.t.shape != b.t.shape or not np.array_equal(a.t, b.t):
        raise ValueError("trajectories do not share a time grid")
    sel = slice(None) if window is None else a.window(*window)
    xa = a.x[sel]
    if xa.size == 0:
        raise ValueError("empty sync window")
    ref = math.sqrt(float(np.mean(xa**2)))
    if ref == 0.0:
        raise ValueError("reference trajectory has zero RMS")
    return math.sqrt(float(np.mean((xa - b.x[sel]) ** 2))) / ref


@dataclass(frozen=True)
class LyapunovSettings:
    transient: float = 400.0
    renorm_interval: float = 1.0
    horizon: float = 4000.0
    dt: float = DEFAULT_DT
    tail_fraction: float = 0.1
    rel_tol: float = 0.05
    bound: float = DEFAULT_BOUND

    def __post_init__(self):
        if not (self.dt > 0 and self.renorm_interval >= self.dt and self.horizon >= self.renorm_interval):
            raise ValueError("need dt > 0, renorm_interval >= dt, horizon >= renorm_interval")
        if self.transient < 0:
            raise ValueError("transient must be >= 0")
        if not 0 < self.tail_fraction <= 1:
            raise ValueError("tail_fraction must be in (0, 1]")


@dataclass(frozen=True, eq=False)
class LyapunovEstimate:
    lam: float
    history: np.ndarray
    converged: bool
    units: str = "per unit time, time in 1/omega0"
    period: float = TWO_PI

    @property
    def per_period(self) -> float:
        """Exponent per natural period 2*pi/omega0."""
        return self.lam * self.period


def _history_converged(hist: np.ndarray, tail_fraction: float, rel_tol: float) -> bool:
    if hist.size < 10:
        return False
    tail = hist[-max(2, int(math.ceil(tail_fraction * hist.size))):]
    final = hist[-1]
    if final == 0.0 or not np.all(np.isfinite(tail)):
        return False
    return bool(float(tail.max() - tail.min()) / abs(float(final)) < rel_tol)


def max_lyapunov(params: DuffingParams, init: OscState = DEFAULT_INIT_A,
                 settings: LyapunovSettings = LyapunovSettings()) -> LyapunovEstimate:
    """Largest Lyapunov exponent from the variational equations (Benettin renormalization).

    Converged means the spread of the running estimate over the final
    ``tail_fraction`` of the history is below ``rel_tol`` of its final value.
    """
    s = settings
    block = max(1, int(round(s.renorm_interval / s.dt)))
    n_blocks = max(1, int(round(s.horizon / (block * s.dt))))
    n_tr = int(round(s.transient / s.dt))
    hist, ok = _kernels.rk4_tangent(float(init.x), float(init.p), 0.0, float(s.dt), n_tr, n_blocks,
                                    block, *params._kernel_args(), float(s.bound))
    if not ok:
        raise DivergenceError("oscillator diverged during Lyapunov estimation")
    hist = np.asarray(hist)
    lam = float(hist[-1])
    return LyapunovEstimate(lam=lam, history=hist,
                            converged=_history_converged(hist, s.tail_fraction, s.rel_tol),
                            period=params.natural_period)


class Regime(enum.Enum):
    PERIODIC = "Periodic"
    SOFT_CHAOS = "SoftChaos"
    HARD_CHAOS = "HardChaos"


@dataclass(frozen=True)
class RegimeThresholds:
    lambda0: float = 1e-3
    M_h: float = 0.05


def classify_regime(estimate: LyapunovEstimate, M: float,
                    thresholds: RegimeThresholds = RegimeThresholds()) -> Regime:
    if not estimate.converged:
        raise UnconvergedError(f"Lyapunov estimate not converged (lambda = {estimate.lam:.4g})")
    if not 0.0 < M <= 1.0:
        raise ValueError(f"M must be in (0, 1], got {M}")
    if estimate.lam <= thresholds.lambda0:
        return Regime.PERIODIC
    return Regime.SOFT_CHAOS if M >= thresholds.M_h else Regime.HARD_CHAOS


def detect_period(traj: Trajectory, drive_period: float, max_multiple: int = 16,
                  n_check: int = 48, rtol: float = 1e-3) -> Optional[int]:
    """Smallest k such that the stroboscopic map at the drive period repeats after k steps.

    Uses the last ``n_check + max_multiple`` drive periods of the trajectory.
    Returns None when no period up to ``max_multiple`` is found.
    """
    need = n_check + max_multiple
    t_end = traj.t[-1]
    times = t_end - drive_period * np.arange(need)[::-1]
    if times[0] < traj.t[0]:
        raise ValueError("trajectory too short for period detection")
    xs = np.interp(times, traj.t, traj.x)
    ps = np.interp(times, traj.t, traj.p)
    scale = max(float(np.ptp(traj.x[traj.t >= times[0]])), 1e-12)
    for k in range(1, max_multiple + 1):
        dx = xs[k:] - xs[:-k]
        dp = ps[k:] - ps[:-k]
        if float(np.max(np.hypot(dx, dp))) < rtol * scale:
            return k
    return None
