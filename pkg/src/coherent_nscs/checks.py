"""Fast invariant suite behind ``coherent-nscs --check``."""

import numpy as np

from .classical import (
    ClassicalEmitter,
    acceleration_form_vector,
    coherence_phase,
    coherence_phase_transverse,
    radiation_vectors,
)
from .coherence import chi_tilde, diagonalize_T
from .kinematics import METRIC, M_E, boost_matrix, dot, on_shell
from .laser import LaserPulse
from .volkov import recoil_momentum, ward_ratio
from .wavepackets import (
    GaussianPacket,
    PauliForbiddenError,
    covariance_tensor,
    overlap,
    overlap_Nij,
    overlap_quadrature,
)


def sample_kinematics(rng, count, energy=10e6, max_angle=None, omega_range=(1.0, 1e4)):
    """Random (p, p', k') obeying light-front conservation.

    Final electrons move roughly along -z with energy near ``energy``;
    photons are emitted inside a cone of ``max_angle`` around -z.
    """
    if max_angle is None:
        max_angle = 20 * M_E / energy
    pp3 = np.column_stack(
        [
            rng.normal(0, 0.5 * M_E, count),
            rng.normal(0, 0.5 * M_E, count),
            -energy * rng.uniform(0.5, 1.5, count),
        ]
    )
    pp = on_shell(pp3)
    theta = max_angle * np.sqrt(rng.uniform(0, 1, count))
    phi = rng.uniform(0, 2 * np.pi, count)
    omega = np.exp(rng.uniform(*np.log(omega_range), count))
    n = np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), -np.cos(theta)])
    k = omega[:, None] * np.column_stack([np.ones(count), n])
    p = recoil_momentum(pp, k)
    return p, pp, k


def _ward(rng):
    worst = 0.0
    for xi in (0.1, 1.0, 5.0):
        pulse = LaserPulse(1.55, xi)
        p, pp, k = sample_kinematics(rng, 20)
        worst = max(worst, float(np.max(ward_ratio(p, pp, k, pulse))))
    return worst < 1e-8, f"max suppression ratio {worst:.2e}"


def _overlap():
    a = GaussianPacket.from_widths((0, 0, -2e6), 3e4, 2e4, (1e-5, 0, 2e-5))
    b = GaussianPacket.from_widths((1e4, 0, -2.01e6), 2e4, 3e4, (0, 3e-5, 0))
    exact = overlap(a, b)
    quad = overlap_quadrature(a, b)
    rel = abs(exact - quad) / abs(quad)
    return rel < 1e-8, f"closed form vs quadrature rel. diff {rel:.1e}"


def _phase_identity():
    pulse = LaserPulse(1.55, 5.0)
    em = ClassicalEmitter((2e5, -1e5, -1e7), (1e-2, 1e-2, 1e-3))
    n = np.array([0.1, 0.03, -1.0])
    n /= np.linalg.norm(n)
    phi = np.linspace(0, pulse.phi_end, 9)
    diff = np.max(np.abs(coherence_phase(em, pulse, n[None], phi) - coherence_phase_transverse(em, pulse, n[None], phi)))
    return diff < 1e-10, f"max phase difference {diff:.1e} eV^-1"


def _radiation_forms():
    pulse = LaserPulse(1.55, 2.0)
    p = on_shell(np.array([1e5, 0.0, -5e6]))
    n = np.array([0.05, -0.08, -1.0])
    n /= np.linalg.norm(n)
    worst = 0.0
    for omega in (3.0, 300.0):
        vel = radiation_vectors(p, n[None], omega, pulse)[0] * omega / 1j
        acc = acceleration_form_vector(p, n, omega, pulse)
        worst = max(worst, float(np.linalg.norm(vel - acc) / np.linalg.norm(acc)))
    return worst < 1e-8, f"velocity vs acceleration form rel. diff {worst:.1e}"


def _chi_invariance(rng):
    pk = GaussianPacket.from_widths((0, 0, -1e6), 3e5, 1e5)
    t = covariance_tensor(pk).matrix
    k = np.array([2e5, 3e4, -1e4, -1.9e5])
    ref = chi_tilde(t, k)
    worst = 0.0
    for _ in range(20):
        b = boost_matrix(rng.normal(size=3) * 0.7)
        worst = max(worst, abs(chi_tilde(b @ t @ b.T, b @ k) / ref - 1))
    lam, _ = diagonalize_T(t)
    eta_err = float(np.max(np.abs(lam @ METRIC @ lam.T - METRIC)))
    return worst < 1e-9 and eta_err < 1e-10, f"max chi~ change {worst:.1e}, Lorentz residual {eta_err:.1e}"


def _pauli():
    a = GaussianPacket.from_widths((0, 0, -1e7), 31, 0.62, spin=1)
    try:
        overlap_Nij(a, a)
    except PauliForbiddenError:
        return True, "identical packets with equal spins rejected"
    return False, "N = 0 not detected"


def _recoil(rng):
    _, pp, k = sample_kinematics(rng, 50)
    q = recoil_momentum(pp, k)
    err = float(np.max(np.abs(dot(q, q) / M_E**2 - 1)))
    return err < 1e-6, f"max |q^2/m^2 - 1| {err:.1e}"


def run_checks(out=print):
    rng = np.random.default_rng(2024)
    checks = [
        ("gauge invariance of the reduced amplitude", lambda: _ward(rng)),
        ("packet overlap closed form", _overlap),
        ("coherence phase, two routes", _phase_identity),
        ("velocity and acceleration radiation forms", _radiation_forms),
        ("chi-tilde Lorentz invariance", lambda: _chi_invariance(rng)),
        ("Pauli-forbidden state detection", _pauli),
        ("recoil momentum on shell", lambda: _recoil(rng)),
    ]
    ok = True
    for name, fn in checks:
        passed, detail = fn()
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return ok
