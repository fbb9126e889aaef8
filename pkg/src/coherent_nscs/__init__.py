"""Coherent nonlinear single Compton scattering by one- and two-electron wave packets."""

__version__ = "0.1.0"

from .classical import ClassicalEmitter, classical_point_spectrum, ensemble_classical_spectrum
from .coherence import chi_prime, chi_tilde, diagonalize_T, omega_c, omega_q
from .laser import LaserPulse
from .quantum import (
    IntegrationConfig,
    SpectrumPoint,
    distinguishable_spectrum,
    quantum_spectrum,
    single_electron_spectrum,
)
from .wavepackets import GaussianPacket, PauliForbiddenError

__all__ = [
    "ClassicalEmitter",
    "GaussianPacket",
    "IntegrationConfig",
    "LaserPulse",
    "PauliForbiddenError",
    "SpectrumPoint",
    "chi_prime",
    "chi_tilde",
    "classical_point_spectrum",
    "diagonalize_T",
    "distinguishable_spectrum",
    "ensemble_classical_spectrum",
    "omega_c",
    "omega_q",
    "quantum_spectrum",
    "single_electron_spectrum",
]
