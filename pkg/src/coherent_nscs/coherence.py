"""Closed-form coherence diagnostics for two-electron emission.

omega_c    classical upper frequency for coherent emission (phase spread)
omega_q    quantum upper frequency (recoil versus momentum spread)
chi_prime  average quantum nonlinearity parameter
chi_tilde  invariant recoil-versus-spread parameter from the covariance T
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .kinematics import E_CHARGE, M_E, METRIC, minus, on_shell

# coherent while the phase difference stays below pi/5: |1 + e^{i theta}|^2 >= 3.6
COHERENCE_PHASE = np.pi / 5


class DegenerateCovarianceError(ValueError):
    pass


class LorentzDiagonalizationError(RuntimeError):
    pass


class ValidityWarning(UserWarning):
    """Estimate used outside the ultrarelativistic head-on regime it assumes."""


def default_direction(mean_momentum, xi, mass=M_E):
    """Typical observation direction -(m xi/2 eps, 0, 1), normalized."""
    eps = on_shell(np.asarray(mean_momentum, dtype=float))[0]
    n = -np.array([mass * xi / (2 * eps), 0.0, 1.0])
    return n / np.linalg.norm(n)


def _null(direction):
    return np.concatenate([[1.0], np.asarray(direction, dtype=float)])


def position_phase_spread(mean_momentum, shift, direction):
    """Delta Phi(0): moduli of the components of [(n'p)/p_- z - n'] . r' summed."""
    p = on_shell(np.asarray(mean_momentum, dtype=float))
    nn = _null(direction)
    coef = (nn[0] * p[0] - nn[1:] @ p[1:]) / minus(p)
    c = coef * np.array([0.0, 0.0, 1.0]) - nn[1:]
    return float(np.sum(np.abs(c * np.asarray(shift, dtype=float))))


def mean_transverse_square(mean_momentum, direction, pulse, samples=4096):
    """Pulse average of P_perp(phi)^2, P_perp offset by the n'-projection."""
    p = on_shell(np.asarray(mean_momentum, dtype=float))
    nn = _null(direction)
    offset = p[1:3] - minus(p) * nn[1:3] / minus(nn)
    phi = (np.arange(samples) + 0.5) * pulse.phi_end / samples
    perp = offset - E_CHARGE * pulse.amplitude[1:3] * pulse.psi(phi)[:, None]
    return float(np.mean(np.sum(perp**2, axis=1)))


@dataclass(frozen=True)
class CutoffEstimate:
    value: float
    unbounded: bool
    terms: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def omega_c(mean_momentum, sigma_perp, sigma_par, shift, direction, pulse, phase_duration=2 * np.pi, threshold=COHERENCE_PHASE):
    """Classical coherence cutoff.

    ``phase_duration`` is the effective laser phase omega*phi_T over which the
    two trajectories accumulate their phase difference.  Momentum spreads
    enter through sigma_perp (transverse) and sigma_par (energy).
    """
    p = on_shell(np.asarray(mean_momentum, dtype=float))
    eps = p[0]
    if eps < 10 * M_E or minus(p) < 1.5 * eps:
        warnings.warn("omega_c assumes an ultrarelativistic electron moving against the laser", ValidityWarning, stacklevel=2)
    nn = _null(direction)
    n_minus = minus(nn)
    p_perp2 = mean_transverse_square(mean_momentum, direction, pulse)
    d_perp2 = 2 * np.sqrt(p_perp2) * sigma_perp + sigma_perp**2
    terms = {
        "transverse": d_perp2 / (4 * eps**2),
        "energy": (sigma_par / eps) * (M_E**2 + p_perp2) / (2 * eps**2),
        "position": 2 * pulse.omega * position_phase_spread(mean_momentum, shift, direction) / (n_minus * phase_duration),
    }
    bracket = sum(terms.values())
    scale = 2 * threshold * pulse.omega / (n_minus * phase_duration)
    if bracket <= 0:
        return CutoffEstimate(np.inf, True, terms)
    return CutoffEstimate(scale / bracket, False, terms)


def omega_q(sigma_perp, sigma_par, mean_energy, xi, mass=M_E):
    """Quantum cutoff min{sigma_perp eps/(m xi), sigma_par}."""
    if sigma_perp <= 0 or sigma_par <= 0:
        raise ValueError("widths must be positive")
    candidates = [sigma_par]
    if xi > 0:
        candidates.append(sigma_perp * mean_energy / (mass * xi))
    return float(min(candidates))


def omega_q_direction(sigma, direction):
    """min_i sigma_i/|n'_i| for a photon along ``direction``."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("widths must be positive")
    n = np.abs(np.asarray(direction, dtype=float))
    with np.errstate(divide="ignore"):
        return float(np.min(np.where(n > 0, sigma / n, np.inf)))


def chi_prime(mean_momentum, pulse, mass=M_E):
    """(k p) xi / m^2 with k = omega n."""
    p = on_shell(np.asarray(mean_momentum, dtype=float), mass)
    return float(pulse.omega * minus(p) * pulse.xi / mass**2)


def xi_for_chi(chi, mean_momentum, omega, mass=M_E):
    """Intensity parameter giving quantum parameter ``chi`` for this momentum."""
    p = on_shell(np.asarray(mean_momentum, dtype=float), mass)
    return float(chi * mass**2 / (omega * minus(p)))


# hbar*c in eV*m and the elementary charge in C, for the intensity conversion
HBAR_C = 1.973269804e-7
ELEMENTARY_CHARGE = 1.602176634e-19
SPEED_OF_LIGHT = 2.99792458e8


def xi_from_intensity(intensity_w_cm2, omega, mass=M_E):
    """xi for a linearly polarized peak intensity I = E^2/(8 pi) (Gaussian units)."""
    i_si = intensity_w_cm2 * 1e4
    # J/(m^2 s) -> eV^4 with hbar = c = 1
    i_nat = i_si / SPEED_OF_LIGHT / ELEMENTARY_CHARGE * HBAR_C**3
    field_ = np.sqrt(8 * np.pi * i_nat)
    return float(abs(E_CHARGE) * field_ / (mass * omega))


def _as_matrix(t):
    t = np.asarray(t, dtype=float)
    if t.shape != (4, 4):
        raise ValueError("covariance tensor must be 4x4")
    return 0.5 * (t + t.T)


def chi_tilde(t, k):
    """sqrt(k^T T^{-1} k) for contravariant k and T^{mu nu}."""
    t = _as_matrix(t)
    k = np.asarray(k, dtype=float)
    try:
        c = linalg.cho_factor(t)
    except linalg.LinAlgError as exc:
        raise DegenerateCovarianceError("covariance tensor is singular or not positive definite") from exc
    val = k @ linalg.cho_solve(c, k)
    return float(np.sqrt(max(val, 0.0)))


def diagonalize_T(t, tol=1e-10):
    """Lorentz matrix L and variances with L T L^T = diag(Sigma^2).

    Solved as the generalized symmetric problem eta y = mu T y: the
    T-orthonormal eigenvectors rescaled by 1/sqrt|mu| are eta-orthonormal
    with exactly one timelike vector, and the variances are 1/|mu|.
    """
    t = _as_matrix(t)
    try:
        mu, y = linalg.eigh(METRIC, t)
    except linalg.LinAlgError as exc:
        raise DegenerateCovarianceError("covariance tensor is not positive definite") from exc
    if np.sum(mu > 0) != 1 or np.any(mu == 0):
        raise LorentzDiagonalizationError("no Lorentz frame diagonalizes T")
    y = y / np.sqrt(np.abs(mu))
    time_idx = int(np.argmax(mu))
    space = [i for i in range(4) if i != time_idx]
    # keep spatial axes closest to the original ones
    order = [time_idx]
    remaining = list(space)
    for axis in range(1, 4):
        j = max(remaining, key=lambda c: abs(y[axis, c]))
        order.append(j)
        remaining.remove(j)
    y = y[:, order]
    lam = y.T.copy()
    for i in range(4):
        if lam[i, i] < 0:
            lam[i] *= -1
    for _ in range(3):
        err = lam @ METRIC @ lam.T @ METRIC - np.eye(4)
        lam = (np.eye(4) - 0.5 * err) @ lam
    if not np.allclose(lam @ METRIC @ lam.T, METRIC, atol=tol, rtol=0):
        raise LorentzDiagonalizationError("Lorentz condition not met after refinement")
    tt = lam @ t @ lam.T
    return lam, np.diag(tt).copy()


@dataclass
class CoherenceReport:
    omega_c: float
    omega_c_unbounded: bool
    omega_q: float
    chi_prime: float
    chi_tilde: dict
    variances: list
    boost: list
    condition_number: float

    def as_dict(self):
        return {
            "omega_c_eV": self.omega_c,
            "omega_c_unbounded": self.omega_c_unbounded,
            "omega_q_eV": self.omega_q,
            "chi_prime": self.chi_prime,
            "chi_tilde": self.chi_tilde,
            "variances": self.variances,
            "boost": self.boost,
            "condition_number": self.condition_number,
        }


def coherence_report(packet, shift, pulse, photon_energies=(1.0, 10.0, 100.0), phase_duration=2 * np.pi):
    """Estimators for a pair of packets with the statistics of ``packet``."""
    from .wavepackets import covariance_tensor

    direction = default_direction(packet.mu, pulse.xi)
    sig = packet.sig
    sigma_perp = float(np.sqrt(0.5 * (sig[0] ** 2 + sig[1] ** 2)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        oc = omega_c(packet.mu, sigma_perp, sig[2], shift, direction, pulse, phase_duration)
    eps = on_shell(packet.mu)[0]
    t = covariance_tensor(packet).matrix
    chis = {}
    variances, boost = [], []
    try:
        lam, var = diagonalize_T(t)
        variances, boost = var.tolist(), lam.tolist()
        for w in photon_energies:
            chis[f"{w:g}"] = chi_tilde(t, w * _null(direction))
    except (DegenerateCovarianceError, LorentzDiagonalizationError):
        pass
    return CoherenceReport(
        omega_c=float(oc.value),
        omega_c_unbounded=oc.unbounded,
        omega_q=omega_q(sigma_perp, sig[2], eps, pulse.xi),
        chi_prime=chi_prime(packet.mu, pulse),
        chi_tilde=chis,
        variances=variances,
        boost=boost,
        condition_number=float(np.linalg.cond(t)),
    )
