"""Heisenberg-picture linear mode algebra of the two-pair network.

A transform maps the vector of annihilation operators as ``a_out = U a + V a^dagger``.
Commutators are preserved iff ``U U^H - V V^H = I`` and ``U V^T = V U^T``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DEFAULT_GAIN = 4.0
NETWORK_LABELS = ("a1", "a2", "aLA", "aBS")


@dataclass(frozen=True, eq=False)
class ModeTransform:
    U: np.ndarray
    V: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        V = np.asarray(self.V, dtype=complex)
        if U.ndim != 2 or U.shape != V.shape:
            raise ValueError("U and V must be matrices of equal shape")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"m{i}" for i in range(U.shape[1])))
        elif len(self.labels) != U.shape[1]:
            raise ValueError("labels must name every input mode")

    @property
    def n_modes(self) -> int:
        return self.U.shape[1]

    def apply_means(self, alpha) -> np.ndarray:
        """Output means <a_out> given input coherent amplitudes ``alpha``."""
        alpha = np.asarray(alpha, dtype=complex)
        return self.U @ alpha + self.V @ alpha.conj()

    def symplectic(self) -> np.ndarray:
        """Real quadrature matrix S acting on (x_1..x_n, p_1..p_n), a = (x + i p)/sqrt(2)."""
        A = self.U + self.V
        B = self.U - self.V
        return np.block([[A.real, -B.imag], [A.imag, B.real]])


def identity(n_modes: int, labels: Sequence[str] = ()) -> ModeTransform:
    return ModeTransform(np.eye(n_modes, dtype=complex), np.zeros((n_modes, n_modes), complex),
                         tuple(labels))


def _check_index(n_modes, *idx):
    for i in idx:
        if not 0 <= i < n_modes:
            raise IndexError(f"mode index {i} out of range for {n_modes} modes")


def beamsplitter(n_modes: int, i: int, j: int) -> ModeTransform:
    """50:50 splitter: a_i -> (a_i + a_j)/sqrt2, a_j -> (a_i - a_j)/sqrt2."""
    _check_index(n_modes, i, j)
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    U = np.eye(n_modes, dtype=complex)
    h = 1.0 / math.sqrt(2.0)
    U[i, i] = U[i, j] = U[j, i] = h
    U[j, j] = -h
    return ModeTransform(U, np.zeros_like(U))


def amplifier(n_modes: int, signal_idx: int, ancilla_idx: int, G: float = DEFAULT_GAIN) -> ModeTransform:
    """Phase-insensitive gain G dilated as a two-mode squeezer on (signal, ancilla)."""
    _check_index(n_modes, signal_idx, ancilla_idx)
    if signal_idx == ancilla_idx:
        raise ValueError("signal and ancilla must differ")
    if not G >= 1.0:
        raise ValueError(f"gain must be >= 1, got {G}")
    U = np.eye(n_modes, dtype=complex)
    V = np.zeros_like(U)
    c, s = math.sqrt(G), math.sqrt(G - 1.0)
    U[signal_idx, signal_idx] = U[ancilla_idx, ancilla_idx] = c
    V[signal_idx, ancilla_idx] = V[ancilla_idx, signal_idx] = s
    return ModeTransform(U, V)


def phase_shift(n_modes: int, i: int, theta: float, decode: bool = False) -> ModeTransform:
    """a_i -> a_i exp(-i theta), or exp(+i theta) with ``decode``."""
    _check_index(n_modes, i)
    U = np.eye(n_modes, dtype=complex)
    U[i, i] = np.exp((1j if decode else -1j) * theta)
    return ModeTransform(U, np.zeros_like(U))


def compose(transforms: Sequence[ModeTransform]) -> ModeTransform:
    """Transform obtained by applying ``transforms`` in order (first element acts first)."""
    if not transforms:
        raise ValueError("nothing to compose")
    out = transforms[0]
    for t in transforms[1:]:
        if t.U.shape[1] != out.U.shape[0]:
            raise ValueError(f"dimension mismatch: {out.U.shape} then {t.U.shape}")
        U = t.U @ out.U + t.V @ out.V.conj()
        V = t.U @ out.V + t.V @ out.U.conj()
        out = ModeTransform(U, V, transforms[0].labels)
    return out


def check_bogoliubov(t: ModeTransform) -> float:
    """max |U U^H - V V^H - I|."""
    R = t.U @ t.U.conj().T - t.V @ t.V.conj().T - np.eye(t.U.shape[0])
    return float(np.max(np.abs(R)))


@dataclass(frozen=True)
class OutputCoefficients:
    c_sig: complex
    c_cross: complex
    c_amp: complex
    c_bs: complex

    def norm(self) -> float:
        """|c_sig|^2 + |c_cross|^2 - |c_amp|^2 + |c_bs|^2."""
        return (abs(self.c_sig) ** 2 + abs(self.c_cross) ** 2 - abs(self.c_amp) ** 2
                + abs(self.c_bs) ** 2)

    def as_tuple(self):
        return (self.c_sig, self.c_cross, self.c_amp, self.c_bs)


@dataclass(frozen=True)
class NetworkCoefficients:
    """Coefficients of a3 and a4 on (own signal, other signal, aLA^dagger, aBS).

    For a3 the own signal is a1; for a4 it is a2.
    """
    a3: OutputCoefficients
    a4: OutputCoefficients

    def to_transform(self) -> ModeTransform:
        """Rectangular 2x4 map on (a1, a2, aLA, aBS) for moment propagation."""
        U = np.zeros((2, 4), complex)
        V = np.zeros((2, 4), complex)
        U[0, 0], U[0, 1], V[0, 2], U[0, 3] = self.a3.c_sig, self.a3.c_cross, self.a3.c_amp, self.a3.c_bs
        U[1, 1], U[1, 0], V[1, 2], U[1, 3] = self.a4.c_sig, self.a4.c_cross, self.a4.c_amp, self.a4.c_bs
        return ModeTransform(U, V, NETWORK_LABELS)

    def rows(self):
        for name, c in (("a3", self.a3), ("a4", self.a4)):
            for term, v in zip(("sig", "cross", "amp", "bs"), c.as_tuple()):
                yield name, term, complex(v)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["output_mode", "term", "re", "im"])
            for name, term, v in self.rows():
                w.writerow([name, term, repr(v.real), repr(v.imag)])


def network_transform(theta1: float, theta2: float, G: float = DEFAULT_GAIN,
                      theta3: Optional[float] = None, theta4: Optional[float] = None) -> ModeTransform:
    """Full 4-mode map: encode, BS(a1,a2), amplifier(signal, LA), BS(signal, BS port), decode.

    Decoding phases default to perfect synchronization (theta3 = theta1, theta4 = theta2).
    Output rows 0 and 3 are a3 and a4.
    """
    theta3 = theta1 if theta3 is None else theta3
    theta4 = theta2 if theta4 is None else theta4
    T = compose([
        phase_shift(4, 0, theta1),
        phase_shift(4, 1, theta2),
        beamsplitter(4, 0, 1),
        amplifier(4, 0, 2, G),
        beamsplitter(4, 0, 3),
        phase_shift(4, 0, theta3, decode=True),
        phase_shift(4, 3, theta4, decode=True),
    ])
    return ModeTransform(T.U, T.V, NETWORK_LABELS)


def coefficients_from_transform(T: ModeTransform) -> NetworkCoefficients:
    U, V = T.U, T.V
    return NetworkCoefficients(
        a3=OutputCoefficients(U[0, 0], U[0, 1], V[0, 2], U[0, 3]),
        a4=OutputCoefficients(U[3, 1], U[3, 0], V[3, 2], U[3, 3]),
    )


def full_network(theta1: float, theta2: float, G: float = DEFAULT_GAIN,
                 theta3: Optional[float] = None, theta4: Optional[float] = None) -> NetworkCoefficients:
    """Coefficients of a3, a4 for instantaneous chaotic phases theta1, theta2."""
    return coefficients_from_transform(network_transform(theta1, theta2, G, theta3, theta4))


def averaged_network(M1: float, M2: float, variant: str = "symmetric") -> NetworkCoefficients:
    """Coefficients after averaging over the chaotic phases (G = 4).

    ``variant="symmetric"`` weights a4's noise terms by M2; ``"asymmetric"``
    keeps M1 on a4's amplifier term and M2 on its vacuum term.
    """
    for name, m in (("M1", M1), ("M2", M2)):
        if not 0.0 <= m <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {m}")
    if variant not in ("symmetric", "asymmetric"):
        raise ValueError(f"unknown variant {variant!r}")
    cross = math.sqrt(M1 * M2)
    a3 = OutputCoefficients(1.0, cross, math.sqrt(1.5 * M1), math.sqrt(0.5 * M1))
    m_amp4 = M2 if variant == "symmetric" else M1
    a4 = OutputCoefficients(1.0, cross, math.sqrt(1.5 * m_amp4), -math.sqrt(0.5 * M2))
    return NetworkCoefficients(a3=a3, a4=a4)
