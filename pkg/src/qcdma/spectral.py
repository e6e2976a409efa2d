"""Power spectra of the frequency-shift signal and the chaotic correction factor.

PSD convention used throughout: one-sided density over angular frequency with

    <delta^2> = pi * integral S(omega) d omega

so a single tone ``A cos(w1 t + phi)`` carries ``A**2 / (2 pi)`` of banded
area at ``w1``. Under this normalization the correction factor

    M = exp(-pi * integral_{lo}^{hi} S(omega) / omega**2 d omega)

equals ``exp(-sum A**2 / (2 w**2))`` for a sum of tones, i.e. the square of the
small-argument Bessel-product average.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import signal, special
from scipy.integrate import cumulative_trapezoid, trapezoid

NORM_NOTE = "one-sided; <delta^2> = pi * int S(omega) domega"


@dataclass(frozen=True)
class PowerSpectrum:
    omega: np.ndarray
    density: np.ndarray
    norm_note: str = NORM_NOTE

    def __post_init__(self):
        if self.omega.shape != self.density.shape:
            raise ValueError("omega and density must have the same shape")
        if np.any(self.density < 0):
            raise ValueError("PSD must be non-negative")

    def band_power(self, lo: float, hi: float) -> float:
        """pi * int_lo^hi S d omega, i.e. the mean-square content of the band."""
        return np.pi * _band_integral(self.omega, self.density, lo, hi)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["omega", "density"])
            for om, s in zip(self.omega, self.density):
                w.writerow([repr(float(om)), repr(float(s))])


@dataclass(frozen=True)
class Tone:
    A: float
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("tone amplitude must be >= 0")
        if not self.omega > 0:
            raise ValueError("tone frequency must be > 0")


@dataclass(frozen=True)
class CorrectionFactor:
    M: float
    omega_lo: float
    omega_hi: float

    def __post_init__(self):
        if not 0.0 < self.M <= 1.0:
            raise ValueError(f"correction factor out of (0, 1]: {self.M}")

    @property
    def amplitude(self) -> float:
        """Predicted magnitude of the time-averaged phase factor, sqrt(M)."""
        return float(np.sqrt(self.M))


def tone_signal(tones: Sequence[Tone], t: np.ndarray) -> np.ndarray:
    """Sum of cosines ``A cos(omega t + phi)`` sampled on ``t``."""
    out = np.zeros_like(np.asarray(t, dtype=float))
    for tone in tones:
        out += tone.A * np.cos(tone.omega * t + tone.phi)
    return out


def estimate_psd(series, dt: float, segments: int = 8, window: str = "hann") -> PowerSpectrum:
    """Averaged-periodogram PSD in the package normalization.

    The series is split into ``segments`` non-overlapping tapered blocks
    (Welch with zero overlap); the mean is removed per block.
    """
    x = np.asarray(series, dtype=float)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if segments < 1 or x.size < 2 * segments:
        raise ValueError(f"series of length {x.size} too short for {segments} segments")
    nperseg = x.size // segments
    f, pxx = signal.welch(
        x, fs=1.0 / dt, window=window, nperseg=nperseg, noverlap=0,
        detrend="constant", scaling="density", return_onesided=True,
    )
    # welch: int P df = var. With d omega = 2 pi df: S = P / (2 pi^2).
    return PowerSpectrum(omega=2.0 * np.pi * f, density=pxx / (2.0 * np.pi**2))


def default_band(spectrum: PowerSpectrum, rel_floor: float = 1e-6) -> tuple[float, float]:
    """Band covering every positive grid frequency where S exceeds rel_floor * peak.

    The edges are padded by one bin (clamped to the positive grid) so the
    trapezoidal rule gives the outermost above-floor bins their full weight.
    """
    om, s = spectrum.omega, spectrum.density
    pos_idx = np.nonzero(om > 0)[0]
    peak = s[pos_idx].max() if pos_idx.size else 0.0
    if peak <= 0:
        return float(om[pos_idx[0]]), float(om[-1])
    idx = pos_idx[s[pos_idx] > rel_floor * peak]
    lo = max(idx[0] - 1, pos_idx[0])
    hi = min(idx[-1] + 1, om.size - 1)
    return float(om[lo]), float(om[hi])


def _band_integral(omega, values, lo, hi):
    # exact integral of the piecewise-linear interpolant, so bands are additive
    if hi < lo:
        raise ValueError("band upper edge below lower edge")
    inner = (omega > lo) & (omega < hi)
    xs = np.concatenate(([lo], omega[inner], [hi]))
    ys = np.interp(xs, omega, values)
    return float(trapezoid(ys, xs))


def correction_factor(spectrum: PowerSpectrum, omega_lo: float | None = None,
                      omega_hi: float | None = None) -> CorrectionFactor:
    """M = exp(-pi int S/omega^2 d omega) over [omega_lo, omega_hi]."""
    if omega_lo is None or omega_hi is None:
        lo_d, hi_d = default_band(spectrum)
        omega_lo = lo_d if omega_lo is None else omega_lo
        omega_hi = hi_d if omega_hi is None else omega_hi
    om = spectrum.omega
    first_pos = om[om > 0][0]
    if not (0 < omega_lo < omega_hi) and not (0 < omega_lo == omega_hi):
        raise ValueError(f"invalid band [{omega_lo}, {omega_hi}]")
    if omega_lo < first_pos or omega_hi > om[-1]:
        raise ValueError(f"band [{omega_lo}, {omega_hi}] outside grid [{first_pos}, {om[-1]}]")
    pos = om > 0
    weight = np.zeros_like(spectrum.density)
    weight[pos] = spectrum.density[pos] / om[pos] ** 2
    integral = _band_integral(om[pos], weight[pos], omega_lo, omega_hi)
    return CorrectionFactor(M=float(np.exp(-np.pi * integral)), omega_lo=float(omega_lo),
                            omega_hi=float(omega_hi))


def accumulate_phase(delta, dt: float) -> np.ndarray:
    """Trapezoidal running integral of delta with theta[0] = 0."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    d = np.asarray(delta, dtype=float)
    if d.size == 0:
        return d.copy()
    return cumulative_trapezoid(d, dx=dt, initial=0.0)


def empirical_phase_average(theta) -> complex:
    """Arithmetic mean of exp(-i theta) over the samples."""
    th = np.asarray(theta, dtype=float)
    if th.size == 0:
        raise ValueError("empty phase series")
    return complex(np.mean(np.exp(-1j * th)))


def bessel_product_average(tones: Iterable[Tone]) -> float:
    """prod_alpha J0(A_alpha / omega_alpha), the resonant term of the phase average."""
    out = 1.0
    for tone in tones:
        if not tone.omega > 0:
            raise ValueError("zero tone frequency")
        out *= float(special.j0(tone.A / tone.omega))
    return out


def read_psd_csv(path) -> PowerSpectrum:
    rows = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    return PowerSpectrum(omega=rows[:, 0], density=rows[:, 1])
