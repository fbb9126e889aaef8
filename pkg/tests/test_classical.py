import numpy as np
import pytest

from coherent_nscs.classical import (
    ClassicalEmitter,
    acceleration_form_vector,
    classical_point_spectrum,
    coherence_phase,
    coherence_phase_transverse,
    ensemble_classical_spectrum,
    radiation_vectors,
)
from coherent_nscs.kinematics import ALPHA, E_CHARGE, N_LASER, minus, on_shell
from coherent_nscs.laser import LaserPulse, composite_gauss, kinetic_momentum, momentum_coefficients
from coherent_nscs.quantum import IntegrationConfig, single_electron_spectrum
from coherent_nscs.wavepackets import GaussianPacket

PULSE = LaserPulse(1.55, 1.0)
CFG = IntegrationConfig(phi_count=16, cone_panels=2, outer_panels=1, outer_phi_count=8, nodes_per_cycle=16)
P3 = (0.0, 0.0, -2e6)


def _larmor_energy(p, pulse, n_panels=400):
    """Total radiated energy from the Larmor-Lienard power along the orbit."""
    phi, w = composite_gauss(0, pulse.phi_end, n_panels)
    pi = kinetic_momentum(p, pulse, phi)
    c1, c2 = momentum_coefficients(p, pulse)
    psi = pulse.psi(phi)[:, None]
    dpi = pulse.dpsi(phi)[:, None] * (-E_CHARGE * pulse.amplitude + N_LASER * (c1 + 2 * c2 * psi))
    beta = pi[:, 1:] / pi[:, :1]
    dphi_dt = minus(pi) / pi[:, 0]
    bdot = (dpi[:, 1:] * pi[:, :1] - pi[:, 1:] * dpi[:, :1]) / pi[:, :1] ** 2 * dphi_dt[:, None]
    gamma2 = 1 / (1 - np.sum(beta**2, axis=1))
    power = 2 / 3 * ALPHA * gamma2**3 * (np.sum(bdot**2, axis=1) - np.sum(np.cross(beta, bdot) ** 2, axis=1))
    return float(np.sum(w * power / dphi_dt))


def test_total_energy_matches_larmor():
    pulse = LaserPulse(1.55, 0.05)
    p3 = np.array([0.0, 0.0, -3e5])
    cfg = IntegrationConfig(theta_cone=np.pi, cone_panels=8, phi_count=16, outer_panels=0)
    x, w = composite_gauss(0.0, 12.0, 24)
    spectrum = np.array([pt.value for pt in classical_point_spectrum([ClassicalEmitter(p3)], pulse, x, cfg)])
    assert np.sum(w * spectrum) == pytest.approx(_larmor_energy(on_shell(p3), pulse), rel=1e-3)


def test_identical_emitters_radiate_four_times():
    one = classical_point_spectrum([ClassicalEmitter(P3)], PULSE, [3.0, 300.0], CFG)
    two = classical_point_spectrum([ClassicalEmitter(P3), ClassicalEmitter(P3)], PULSE, [3.0, 300.0], CFG)
    for a, b in zip(one, two):
        assert b.value == pytest.approx(4 * a.value, rel=1e-12)


def test_phase_routes_agree():
    em = ClassicalEmitter((2e5, -1e5, -1e7), (1e-2, 1e-2, 1e-3))
    pulse = LaserPulse(1.55, 5.0)
    n = np.array([0.1, 0.03, -1.0])
    n /= np.linalg.norm(n)
    phi = np.linspace(0, pulse.phi_end, 7)
    a = coherence_phase(em, pulse, n[None], phi)
    b = coherence_phase_transverse(em, pulse, n[None], phi)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("omega", [3.0, 300.0, 3e3])
def test_velocity_form_matches_acceleration_form(omega):
    p = on_shell(np.array([1e5, 0.0, -5e6]))
    pulse = LaserPulse(1.55, 2.0)
    n = np.array([0.05, -0.08, -1.0])
    n /= np.linalg.norm(n)
    vel = radiation_vectors(p, n[None], omega, pulse)[0] * omega / 1j
    acc = acceleration_form_vector(p, n, omega, pulse)
    assert np.linalg.norm(vel - acc) < 1e-7 * np.linalg.norm(acc)


def test_radiation_vector_is_transverse(rng):
    p = on_shell(np.array([0.0, 0.0, -2e6]))
    n = rng.normal(size=(20, 3)) * 0.2 + [0, 0, -1]
    n /= np.linalg.norm(n, axis=1)[:, None]
    vec = radiation_vectors(p, n, 30.0, PULSE)
    assert np.max(np.abs(np.sum(vec * n, axis=1))) < 1e-12 * np.max(np.abs(vec))


def test_ensemble_with_narrow_packets_is_point_spectrum():
    pk = GaussianPacket.from_widths(P3, 1e-3, 1e-3, spin=1)
    pair = (pk, pk.with_(shift=(0.01, 0.0, 0.0), spin=-1))
    ens = ensemble_classical_spectrum(pair, PULSE, [30.0], 3, 5, CFG)[0]
    point = classical_point_spectrum([ClassicalEmitter(P3), ClassicalEmitter(P3, (0.01, 0.0, 0.0))], PULSE, [30.0], CFG)[0]
    assert ens.value == pytest.approx(point.value, rel=1e-6)


def test_ensemble_independent_of_worker_count():
    pk = GaussianPacket.from_widths(P3, 300.0, 30.0, spin=1)
    pair = (pk, pk.with_(shift=(0.01, 0.0, 0.0), spin=-1))
    a = ensemble_classical_spectrum(pair, PULSE, [30.0], 4, 11, CFG, workers=1)[0]
    b = ensemble_classical_spectrum(pair, PULSE, [30.0], 4, 11, CFG, workers=2)[0]
    assert a.value == b.value and a.error == b.error


def test_single_electron_matches_quantum_at_small_chi():
    pk = GaussianPacket.from_widths(P3, 300.0, 30.0)
    q = single_electron_spectrum(pk, PULSE, [10.0], CFG)[0]
    c = classical_point_spectrum([ClassicalEmitter(P3)], PULSE, [10.0], CFG)[0]
    assert c.value == pytest.approx(q.value, rel=1e-3)


def test_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        classical_point_spectrum([ClassicalEmitter(P3)], PULSE, [0.0], CFG)
