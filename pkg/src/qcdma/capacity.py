"""Per-use classical and quantum rate bounds for single-pair, FDMA and CDMA links.

All channels are phase-insensitive Gaussian channels with an input energy
constraint of ``n_mean`` photons per use. Rates are in bits (qubits) per use.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np


class ChannelKind(enum.Enum):
    SINGLE = "Single"
    FDMA = "FDMA"
    CDMA = "CDMA"


@dataclass(frozen=True)
class CDMANoiseTerms:
    """Switches for the three additive-noise contributions of the CDMA model."""
    crosstalk: bool = True
    amplifier: bool = True
    loss: bool = True


@dataclass(frozen=True)
class ChannelModel:
    kind: ChannelKind = ChannelKind.SINGLE
    eta: float = 1.0
    n_mean: float = 1.0
    N: int = 1
    M: float = 0.01
    bw_ratio: float = 0.2
    gain: float = 4.0
    amp_floor: float = 1.0
    split_energy: bool = True
    profile: str = "lorentzian"
    terms: CDMANoiseTerms = CDMANoiseTerms()

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ChannelKind(self.kind))
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if not self.n_mean >= 0:
            raise ValueError("n_mean must be >= 0")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be an integer >= 1")
        if not 0.0 < self.M <= 1.0:
            raise ValueError("M must be in (0, 1]")
        if not self.bw_ratio > 0:
            raise ValueError("bw_ratio must be > 0")
        if not self.gain >= 1:
            raise ValueError("gain must be >= 1")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")

    def with_(self, **kw) -> "ChannelModel":
        return replace(self, **kw)


@dataclass(frozen=True)
class RateResult:
    classical: float
    quantum: float
    N: int = 1

    def __post_init__(self):
        if self.classical < -1e-12 or self.quantum < -1e-12:
            raise ValueError("rates must be non-negative")
        if self.quantum > self.classical + 1e-12:
            raise ValueError("quantum rate exceeds classical rate")

    @property
    def aggregate_classical(self) -> float:
        return self.N * self.classical

    @property
    def aggregate_quantum(self) -> float:
        return self.N * self.quantum


def thermal_entropy(x: float) -> float:
    """g(x) = (x+1) log2(x+1) - x log2 x, the entropy of a thermal state with mean x."""
    if x < 0:
        raise ValueError(f"mean photon number must be >= 0, got {x}")
    if x == 0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def single_pair_rates(eta: float, n_mean: float) -> RateResult:
    """Pure-loss channel: Holevo g(eta n) and coherent information g(eta n) - g((1-eta) n)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must be in [0, 1]")
    c = thermal_entropy(eta * n_mean)
    q = max(0.0, c - thermal_entropy((1.0 - eta) * n_mean))
    return RateResult(classical=c, quantum=q)


def _lorentzian(offset, width):
    return 1.0 / (1.0 + (2.0 * offset / width) ** 2)


def _gaussian(offset, width):
    return np.exp(-4.0 * math.log(2.0) * (offset / width) ** 2)


PROFILES = {"lorentzian": _lorentzian, "gaussian": _gaussian}


def fdma_offsets(N: int, bw_ratio: float) -> np.ndarray:
    """User centers relative to the line center, one full width apart (units of omega)."""
    return (np.arange(N) - (N - 1) / 2.0) * bw_ratio


def max_fdma_users(bw_ratio: float) -> int:
    """Largest N with (N - 1) bw_ratio / 2 < 1, so every user sits at a positive frequency."""
    return max(1, int(math.ceil(2.0 / bw_ratio - 1e-12)))


def fdma_rates(model: ChannelModel) -> RateResult:
    """Users one bandwidth apart around the center; user k sees eta * L(offset_k).

    Per-pair rates are averaged over users.
    """
    if model.kind is not ChannelKind.FDMA:
        raise ValueError("fdma_rates needs an FDMA model")
    N = int(model.N)
    if N > max_fdma_users(model.bw_ratio):
        raise ValueError(f"{N} users do not fit: at spacing {model.bw_ratio} at most "
                         f"{max_fdma_users(model.bw_ratio)} users lie inside (0, 2 omega)")
    offsets = fdma_offsets(N, model.bw_ratio)
    etas = model.eta * PROFILES[model.profile](offsets, model.bw_ratio)
    n_user = model.n_mean / N if model.split_energy else model.n_mean
    rates = [single_pair_rates(float(e), n_user) for e in etas]
    return RateResult(classical=float(np.mean([r.classical for r in rates])),
                      quantum=float(np.mean([r.quantum for r in rates])), N=N)


def cdma_noise(model: ChannelModel) -> float:
    """Additive noise photons seen by one pair.

    crosstalk (N-1) M n_pair from the other users' residual coherent terms;
    amplifier M (G-1)/2 * amp_floor, the averaged amplifier-noise coefficient
    (3M/2 at G = 4) times the vacuum floor; loss M (1-eta) n_pair, since only the
    residual narrowband part of the signal sees the frequency-selective loss.
    """
    n_pair = model.n_mean
    t = model.terms
    noise = 0.0
    if t.crosstalk:
        noise += (model.N - 1) * model.M * n_pair
    if t.amplifier:
        noise += model.M * (model.gain - 1.0) / 2.0 * model.amp_floor
    if t.loss:
        noise += model.M * (1.0 - model.eta) * n_pair
    return noise


def additive_noise_rates(n_mean: float, noise: float) -> RateResult:
    """Classical additive-noise channel with signal n_mean and thermal noise ``noise``.

    Classical: g(n + N) - g(N). Quantum: coherent information of a thermal input
    purified by a reference mode, from the symplectic eigenvalues of the
    output two-mode covariance matrix.
    """
    if noise < 0 or n_mean < 0:
        raise ValueError("photon numbers must be >= 0")
    c = thermal_entropy(n_mean + noise) - thermal_entropy(noise)
    if noise == 0:
        return RateResult(classical=c, quantum=c)
    V = 2.0 * n_mean + 1.0
    a = V + 2.0 * noise
    b = V
    cc = math.sqrt(V * V - 1.0)
    root = math.sqrt((a + b) ** 2 - 4.0 * cc * cc)
    nu_p = 0.5 * (root + (a - b))
    nu_m = 0.5 * (root - (a - b))

    def h(nu):
        return thermal_entropy(max(0.0, (nu - 1.0) / 2.0))

    q = max(0.0, thermal_entropy(n_mean + noise) - h(nu_p) - h(nu_m))
    return RateResult(classical=c, quantum=min(q, c))


def cdma_rates(model: ChannelModel) -> RateResult:
    """Per-pair rates with unit signal coefficient and the additive noise of ``cdma_noise``."""
    if model.kind is not ChannelKind.CDMA:
        raise ValueError("cdma_rates needs a CDMA model")
    r = additive_noise_rates(model.n_mean, cdma_noise(model))
    return RateResult(classical=r.classical, quantum=r.quantum, N=int(model.N))


def rates(model: ChannelModel) -> RateResult:
    if model.kind is ChannelKind.SINGLE:
        return single_pair_rates(model.eta, model.n_mean)
    if model.kind is ChannelKind.FDMA:
        return fdma_rates(model)
    return cdma_rates(model)


@dataclass(frozen=True)
class RateRow:
    kind: str
    N: int
    eta: float
    classical_rate: float
    quantum_rate: float


def rate_sweep(base: ChannelModel, Ns: Iterable[int], etas: Iterable[float],
               kinds: Sequence[ChannelKind] = (ChannelKind.SINGLE, ChannelKind.FDMA, ChannelKind.CDMA),
               ) -> list[RateRow]:
    """Cartesian sweep over kind, N and eta. Single-pair rows use N = 1 only."""
    Ns = list(Ns)
    etas = [float(e) for e in etas]
    rows = []
    for kind in kinds:
        for N in ([1] if kind is ChannelKind.SINGLE else Ns):
            for eta in etas:
                r = rates(base.with_(kind=kind, N=N, eta=eta))
                rows.append(RateRow(kind.value, N, eta, r.classical, r.quantum))
    return rows


def write_rate_csv(rows: Sequence[RateRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "N", "eta", "classical_rate", "quantum_rate"])
        for r in rows:
            w.writerow([r.kind, r.N, repr(r.eta), repr(r.classical_rate), repr(r.quantum_rate)])
