"""Chaotic spread-spectrum multiple access for bosonic quantum channels.

Submodules: chaos (Duffing dynamics), spectral (PSD and correction factor),
modes (Heisenberg network algebra), fock (truncated Fock transmission),
capacity (rate models), config / scenario / cli (experiment runner).
"""

__version__ = "0.1.0"

from .errors import DivergenceError, TruncationError, UnconvergedError
from .chaos import (DuffingParams, LyapunovEstimate, LyapunovSettings, OscState, Regime,
                    RegimeThresholds, Trajectory, classify_regime, eom_derivative, integrate,
                    integrate_synchronized_pair, max_lyapunov, sync_error)
from .spectral import (CorrectionFactor, PowerSpectrum, Tone, accumulate_phase,
                       bessel_product_average, correction_factor, empirical_phase_average,
                       estimate_psd)
from .modes import (ModeTransform, NetworkCoefficients, amplifier, averaged_network, beamsplitter,
                    check_bogoliubov, compose, full_network, phase_shift)
from .fock import (DensityMatrix, QubitSpec, SimConfig, StateVector, encode_qubit, fidelity,
                   monte_carlo_transmission, predicted_fidelity, run_single_shot)
from .capacity import (ChannelKind, ChannelModel, RateResult, cdma_rates, fdma_rates, rate_sweep,
                       single_pair_rates, thermal_entropy)
from .config import ScenarioConfig, validate_config
from .scenario import RunManifest, run_scenario
