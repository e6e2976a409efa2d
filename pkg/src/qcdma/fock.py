"""Truncated Fock-space transmission of photonic qubits through the chaotic network.

Qubits are carried as ``sqrt(p)|0> + sqrt(1-p)|1>`` in each sender's field mode.
The network is simulated in the Schroedinger picture. Passive two-mode stages
are exact unitaries on the product space. The amplifier and the vacuum-port
splitter act on a single mode, so they are applied as their Kraus channels
(quantum-limited amplifier, pure loss). That avoids carrying the ancillas.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .errors import TruncationError
from .modes import (DEFAULT_GAIN, ModeTransform, NetworkCoefficients, OutputCoefficients,
                    full_network)

AVERAGING_MODES = ("coherent", "ensemble")


@dataclass(frozen=True)
class QubitSpec:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"qubit weight p must be in [0, 1], got {self.p}")

    def amplitudes(self) -> np.ndarray:
        return np.array([math.sqrt(self.p), math.sqrt(1.0 - self.p)], dtype=complex)


@dataclass(frozen=True)
class SimConfig:
    """Truncation and sampling settings.

    ``dim`` truncates the inputs and the two-mode interference stage. Amplified
    outputs need more room: ``out_dim`` levels are kept for rho3, rho4, and
    the amplifier is evaluated on ``mid_dim`` (default 4 * out_dim) levels.
    """
    dim: int = 8
    n_samples: int = 400
    decorrelation_gap: float = 5.0
    seed: int = 0
    out_dim: int = 80
    mid_dim: Optional[int] = None
    max_leakage: float = 1e-2
    averaging: str = "coherent"
    gain: float = DEFAULT_GAIN

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("dim must be >= 3")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not self.decorrelation_gap > 0:
            raise ValueError("decorrelation_gap must be > 0")
        if self.out_dim < self.dim:
            raise ValueError("out_dim must be >= dim")
        if self.mid_dim is not None and self.mid_dim < self.out_dim:
            raise ValueError("mid_dim must be >= out_dim")
        if self.averaging not in AVERAGING_MODES:
            raise ValueError(f"averaging must be one of {AVERAGING_MODES}")
        if not self.gain >= 1:
            raise ValueError("gain must be >= 1")

    @property
    def amp_dim(self) -> int:
        return self.mid_dim if self.mid_dim is not None else 4 * self.out_dim


@dataclass(frozen=True, eq=False)
class StateVector:
    n_modes: int
    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.dim**self.n_modes,):
            raise ValueError("amplitude vector length must be dim ** n_modes")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-10:
            raise ValueError("state vector is not normalized")

    def leakage(self) -> float:
        """Largest top-level population over the modes."""
        probs = np.abs(self.amplitudes.reshape((self.dim,) * self.n_modes)) ** 2
        worst = 0.0
        for m in range(self.n_modes):
            worst = max(worst, float(np.take(probs, self.dim - 1, axis=m).sum()))
        return worst

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if abs(np.trace(m).real - 1.0) > 1e-8:
            raise ValueError(f"trace {np.trace(m).real} != 1")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -1e-8:
            raise ValueError("density matrix has negative eigenvalues")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def top_population(self) -> float:
        return float(self.matrix[-1, -1].real)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "re", "im"])
            for (r, c), v in np.ndenumerate(self.matrix):
                w.writerow([r, c, repr(float(v.real)), repr(float(v.imag))])


StateLike = Union[QubitSpec, StateVector, DensityMatrix, np.ndarray]


def encode_qubit(q: QubitSpec, dim: int = 2) -> StateVector:
    """sqrt(p)|0> + sqrt(1-p)|1> in a single mode truncated at ``dim``."""
    if dim < 2:
        raise ValueError("need at least two Fock levels")
    amps = np.zeros(dim, dtype=complex)
    amps[:2] = q.amplitudes()
    return StateVector(1, dim, amps)


def coherent_state(alpha: complex, dim: int) -> StateVector:
    """Truncated coherent state, renormalized on the kept levels."""
    n = np.arange(dim)
    logmag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    amps = np.exp(logmag - 0.5 * abs(alpha) ** 2) * np.exp(1j * np.angle(alpha) * n)
    amps = amps / np.linalg.norm(amps)
    return StateVector(1, dim, amps)


def _as_rho(s: StateLike, dim: int) -> np.ndarray:
    if isinstance(s, QubitSpec):
        v = encode_qubit(s, dim).amplitudes
        return np.outer(v, v.conj())
    if isinstance(s, StateVector):
        if s.n_modes != 1:
            raise ValueError("expected a single-mode state")
        m = np.outer(s.amplitudes, s.amplitudes.conj())
    elif isinstance(s, DensityMatrix):
        m = s.matrix
    else:
        m = np.asarray(s, dtype=complex)
    if m.shape[0] > dim:
        raise ValueError(f"input state of dimension {m.shape[0]} exceeds dim = {dim}")
    out = np.zeros((dim, dim), dtype=complex)
    out[: m.shape[0], : m.shape[0]] = m
    return out


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def apply_loss(rho: np.ndarray, T: float, out_dim: Optional[int] = None) -> np.ndarray:
    """Pure-loss channel of transmissivity T.

    Kraus: A_k |n> = sqrt(C(n,k) T^(n-k) (1-T)^k) |n-k>.
    """
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {T}")
    d = rho.shape[0]
    out_dim = d if out_dim is None else out_dim
    out = np.zeros((out_dim, out_dim), dtype=complex)
    if T == 1.0:
        m = min(d, out_dim)
        out[:m, :m] = rho[:m, :m]
        return out
    n = np.arange(d)
    for k in range(d):
        src = n[k: k + out_dim]
        if T == 0.0:
            c = np.where(src == k, 1.0, 0.0)
        else:
            logc = 0.5 * (_log_binom(src, k) + (src - k) * math.log(T)
                          + (k * math.log1p(-T) if k else 0.0))
            c = np.exp(logc)
        dst = src - k
        out[np.ix_(dst, dst)] += c[:, None] * rho[np.ix_(src, src)] * c[None, :]
    return out


def apply_amplifier(rho: np.ndarray, G: float, out_dim: int) -> np.ndarray:
    """Quantum-limited phase-insensitive amplifier of gain G (vacuum idler traced out).

    Kraus: A_k |n> = sqrt(C(n+k,k)) G^(-(n+1)/2) ((G-1)/G)^(k/2) |n+k>.
    """
    if not G >= 1.0:
        raise ValueError(f"gain must be >= 1, got {G}")
    d = rho.shape[0]
    out = np.zeros((out_dim, out_dim), dtype=complex)
    if G == 1.0:
        m = min(d, out_dim)
        out[:m, :m] = rho[:m, :m]
        return out
    n = np.arange(d)
    log_r = math.log((G - 1.0) / G)
    for k in range(out_dim):
        src = n[n + k < out_dim]
        if src.size == 0:
            break
        logc = 0.5 * (_log_binom(src + k, k) - (src + 1) * math.log(G) + k * log_r)
        c = np.exp(logc)
        dst = src + k
        out[np.ix_(dst, dst)] += c[:, None] * rho[np.ix_(src, src)] * c[None, :]
    return out


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def passive_unitary(W: np.ndarray, dim: int) -> np.ndarray:
    """Schroedinger unitary on two truncated modes with U^dagger a_i U = sum_j W_ij a_j.

    Built as exp(-i sum H_ij a_i^dagger a_j) with exp(-iH) = W. Number conserving,
    so it is exact on the subspace of total photon number below ``dim``.
    """
    W = np.asarray(W, dtype=complex)
    if W.shape != (2, 2) or np.max(np.abs(W @ W.conj().T - np.eye(2))) > 1e-12:
        raise ValueError("W must be a 2x2 unitary")
    T, Z = linalg.schur(W, output="complex")
    H = Z @ np.diag(1j * np.log(np.diag(T))) @ Z.conj().T
    a = _ladder(dim)
    eye = np.eye(dim)
    ops = (np.kron(a, eye), np.kron(eye, a))
    gen = sum(H[i, j] * ops[i].conj().T @ ops[j] for i in range(2) for j in range(2))
    return linalg.expm(-1j * gen)


def _phase(rho: np.ndarray, theta: float) -> np.ndarray:
    """rho -> U rho U^dagger with U = exp(-i theta n), i.e. a -> a exp(-i theta)."""
    ph = np.exp(-1j * theta * np.arange(rho.shape[0]))
    return ph[:, None] * rho * ph[None, :].conj()


def _ptrace_second(rho12: np.ndarray, dim: int) -> np.ndarray:
    return np.einsum("ijkj->ik", rho12.reshape(dim, dim, dim, dim))


def _finish(rho: np.ndarray, cfg: SimConfig) -> DensityMatrix:
    rho = 0.5 * (rho + rho.conj().T)
    leak = 1.0 - float(np.trace(rho).real)
    if leak > cfg.max_leakage:
        raise TruncationError(f"truncation drops {leak:.3g} of the population "
                              f"(limit {cfg.max_leakage}); raise out_dim")
    return DensityMatrix(rho / np.trace(rho).real)


def run_single_shot(theta1: float, theta2: float, q1: StateLike, q2: StateLike,
                    cfg: SimConfig = SimConfig(), theta3: Optional[float] = None,
                    theta4: Optional[float] = None) -> tuple[DensityMatrix, DensityMatrix]:
    """Received states (rho3, rho4) for fixed chaotic phases.

    Stage order: encode phases, BS1 on (a1, a2), discard a6, amplify a5,
    split against vacuum at BS2, decode phases. Both BS2 outputs see the same
    loss-1/2 marginal channel; they differ only in the decoding phase.
    """
    theta3 = theta1 if theta3 is None else theta3
    theta4 = theta2 if theta4 is None else theta4
    d = cfg.dim
    r1 = _phase(_as_rho(q1, d), theta1)
    r2 = _phase(_as_rho(q2, d), theta2)
    h = 1.0 / math.sqrt(2.0)
    U = passive_unitary(np.array([[h, h], [h, -h]]), d)
    r56 = U @ np.kron(r1, r2) @ U.conj().T
    r5 = _ptrace_second(r56, d)
    r7 = apply_amplifier(r5, cfg.gain, cfg.amp_dim)
    r_half = apply_loss(r7, 0.5, cfg.out_dim)
    rho3 = _phase(r_half, -theta3)
    rho4 = _phase(r_half, -theta4)
    return _finish(rho3, cfg), _finish(rho4, cfg)


@dataclass(frozen=True)
class ChannelParams:
    """Single-output Gaussian channel: mix, loss T, then quantum-limited gain G."""
    W: np.ndarray
    T: float
    G: float
    noise_floor_raised: bool


def channel_params(c: OutputCoefficients) -> ChannelParams:
    """Decompose a_out = c_sig a_own + c_cross a_other + c_amp b^dagger + vacuum terms.

    The output is sqrt(G T) u + sqrt(G - 1) b^dagger + sqrt(G (1 - T)) v with
    u the normalized combination of the two signal modes. Vacuum terms, c_bs
    included, are completed so the map preserves commutators. If the given
    amplifier term is below the quantum limit (|c_amp|^2 < |c_sig|^2 + |c_cross|^2 - 1),
    the minimum physical noise is used instead and flagged.
    """
    c1, c2 = complex(c.c_sig), complex(c.c_cross)
    s2 = abs(c1) ** 2 + abs(c2) ** 2
    if s2 == 0.0:
        W = np.eye(2, dtype=complex)
    else:
        nrm = math.sqrt(s2)
        W = np.array([[c1, c2], [-c2.conjugate(), c1.conjugate()]]) / nrm
    G = 1.0 + abs(complex(c.c_amp)) ** 2
    raised = False
    if s2 > G * (1.0 + 1e-12):
        G, raised = s2, True
    T = min(1.0, s2 / G)
    return ChannelParams(W=W, T=T, G=G, noise_floor_raised=raised)


def transmit_coefficients(own: StateLike, other: StateLike, c: OutputCoefficients,
                          cfg: SimConfig = SimConfig()) -> DensityMatrix:
    """Output state of one receiver given its Heisenberg coefficients.

    ``own`` is the sender the receiver is paired with (coefficient c_sig).
    """
    ch = channel_params(c)
    d = cfg.dim
    r12 = np.kron(_as_rho(own, d), _as_rho(other, d))
    U = passive_unitary(ch.W, d)
    ru = _ptrace_second(U @ r12 @ U.conj().T, d)
    rho = apply_amplifier(apply_loss(ru, ch.T), ch.G, cfg.out_dim)
    return _finish(rho, cfg)


def transmit_network(coeffs: NetworkCoefficients, q1: StateLike, q2: StateLike,
                     cfg: SimConfig = SimConfig()) -> tuple[DensityMatrix, DensityMatrix]:
    return (transmit_coefficients(q1, q2, coeffs.a3, cfg),
            transmit_coefficients(q2, q1, coeffs.a4, cfg))


def sample_times(t_start: float, t_end: float, cfg: SimConfig, drive_period: float) -> np.ndarray:
    """Sampling instants spaced by the decorrelation gap, with a seeded start offset."""
    gap = cfg.decorrelation_gap * drive_period
    offset = np.random.default_rng(cfg.seed).uniform(0.0, gap)
    times = t_start + offset + gap * np.arange(cfg.n_samples)
    if times[-1] > t_end:
        raise ValueError(f"trajectory too short: need t up to {times[-1]:.6g}, have {t_end:.6g} "
                         f"for {cfg.n_samples} samples every {gap:.6g}")
    return times


def average_coefficients(thetas1, thetas2, thetas3=None, thetas4=None,
                         G: float = DEFAULT_GAIN) -> NetworkCoefficients:
    """Sample mean of the instantaneous network coefficients."""
    thetas3 = thetas1 if thetas3 is None else thetas3
    thetas4 = thetas2 if thetas4 is None else thetas4
    acc = np.zeros((2, 4), dtype=complex)
    for t1, t2, t3, t4 in zip(thetas1, thetas2, thetas3, thetas4):
        c = full_network(t1, t2, G, t3, t4)
        acc[0] += c.a3.as_tuple()
        acc[1] += c.a4.as_tuple()
    acc /= len(thetas1)
    return NetworkCoefficients(OutputCoefficients(*acc[0]), OutputCoefficients(*acc[1]))


def monte_carlo_transmission(trajA, trajB, q1: StateLike, q2: StateLike,
                             cfg: SimConfig = SimConfig(), drive_period: float = 2 * math.pi / 5.0,
                             trajC=None, trajD=None) -> tuple[DensityMatrix, DensityMatrix]:
    """Phase-averaged received states (rho3, rho4).

    Phases are read from the sender trajectories at ``cfg.n_samples`` instants
    spaced by ``cfg.decorrelation_gap`` drive periods. Receiver trajectories
    ``trajC``, ``trajD`` default to perfect synchronization.

    ``averaging="coherent"`` averages the Heisenberg coefficients over the
    samples and transmits through the resulting channel (the receiver keeps
    only the phase-coherent part of each term). ``"ensemble"`` averages the
    single-shot density matrices.
    """
    t_start = max(trajA.t[0], trajB.t[0])
    t_end = min(trajA.t[-1], trajB.t[-1])
    times = sample_times(t_start, t_end, cfg, drive_period)
    th1, th2 = trajA.phase_at(times), trajB.phase_at(times)
    th3 = trajC.phase_at(times) if trajC is not None else th1
    th4 = trajD.phase_at(times) if trajD is not None else th2
    if cfg.averaging == "coherent":
        return transmit_network(average_coefficients(th1, th2, th3, th4, cfg.gain), q1, q2, cfg)
    acc3 = np.zeros((cfg.out_dim, cfg.out_dim), dtype=complex)
    acc4 = np.zeros_like(acc3)
    for k in range(times.size):
        r3, r4 = transmit_network(full_network(th1[k], th2[k], cfg.gain, th3[k], th4[k]), q1, q2, cfg)
        acc3 += r3.matrix
        acc4 += r4.matrix
    return DensityMatrix(acc3 / times.size), DensityMatrix(acc4 / times.size)


def fidelity(rho: DensityMatrix, q: Union[QubitSpec, StateVector]) -> float:
    """<phi|rho|phi> for a pure target state embedded in rho's Fock space."""
    if isinstance(q, QubitSpec):
        v = q.amplitudes()
    else:
        v = q.amplitudes
    if v.size > rho.dim:
        raise ValueError(f"target of dimension {v.size} does not fit in rho of dimension {rho.dim}")
    block = rho.matrix[: v.size, : v.size]
    return float(min(1.0, max(0.0, np.real(v.conj() @ block @ v))))


def predicted_fidelity(M: float, q1: Optional[QubitSpec] = None, q2: Optional[QubitSpec] = None) -> float:
    """First-order estimate 1 - M from the averaged channel (independent of the qubits)."""
    if not 0.0 <= M <= 1.0:
        raise ValueError(f"M must be in [0, 1], got {M}")
    return 1.0 - M


@dataclass(frozen=True)
class Moments:
    mean: complex
    n: float
    aa: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.mean.real, self.mean.imag, self.n, self.aa.real, self.aa.imag])


def moments_from_rho(rho: DensityMatrix) -> Moments:
    """<a>, <a^dagger a>, <a a> of a single-mode density matrix."""
    a = _ladder(rho.dim)
    m = rho.matrix
    return Moments(mean=complex(np.trace(m @ a)), n=float(np.trace(m @ a.conj().T @ a).real),
                   aa=complex(np.trace(m @ a @ a)))


def gaussian_oracle_moments(T: ModeTransform, alphas: Sequence[complex], row: int) -> Moments:
    """Moments of output ``row`` for coherent inputs via covariance-matrix propagation.

    Quadratures x = (a + a^dagger)/sqrt2, p = (a - a^dagger)/(i sqrt2); vacuum
    covariance I/2. Rectangular transforms are handled by their row block.
    """
    alphas = np.asarray(alphas, dtype=complex)
    n_in = T.U.shape[1]
    if alphas.shape != (n_in,):
        raise ValueError("one amplitude per input mode required")
    S = T.symplectic()
    r_in = math.sqrt(2.0) * np.concatenate([alphas.real, alphas.imag])
    r_out = S @ r_in
    cov = 0.5 * S @ S.T
    n_out = T.U.shape[0]
    ix, ip = row, n_out + row
    mx, mp = r_out[ix], r_out[ip]
    vxx, vpp, vxp = cov[ix, ix], cov[ip, ip], cov[ix, ip]
    mean = (mx + 1j * mp) / math.sqrt(2.0)
    n = 0.5 * (vxx + vpp - 1.0) + abs(mean) ** 2
    aa = 0.5 * (vxx - vpp + 2j * vxp) + mean**2
    return Moments(mean=complex(mean), n=float(n), aa=complex(aa))
