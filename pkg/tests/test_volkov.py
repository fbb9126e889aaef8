import numpy as np
import pytest

from coherent_nscs.checks import sample_kinematics
from coherent_nscs.kinematics import M_E, N_LASER, dot, from_light_cone, minus, on_shell
from coherent_nscs.laser import LaserPulse
from coherent_nscs.volkov import (
    ContractViolation,
    DegenerateKinematicsError,
    master_integrals,
    phase_coefficients,
    phase_integrals,
    recoil_momentum,
    reduced_amplitudes,
    ward_ratio,
)


@pytest.mark.parametrize("xi", [0.1, 1.0, 5.0])
def test_ward_identity(xi, rng):
    pulse = LaserPulse(1.55, xi)
    p, pp, k = sample_kinematics(rng, 30)
    assert np.max(ward_ratio(p, pp, k, pulse)) < 1e-8


def test_recoil_momentum_closed_form_matches_light_cone(rng):
    _, pp, k = sample_kinematics(rng, 40)
    q = recoil_momentum(pp, k)
    ref = from_light_cone(pp[:, 1:3] + k[:, 1:3], minus(pp) + minus(k))
    assert np.allclose(q, ref, rtol=1e-12, atol=1e-12 * np.abs(q).max())
    assert np.all(minus(q) > 0)


def test_regularized_b0_equals_full_line_integral(fig2_pulse):
    # int_{-inf}^{inf} e^{i Psi} = pulse part + tails (1 - e^{i Psi_end})/(i lam)
    pulse = fig2_pulse
    p, pp, k = sample_kinematics(np.random.default_rng(3), 4, omega_range=(5.0, 50.0))
    lam, a, b = phase_coefficients(p, pp, k, pulse)
    b0, _, _ = master_integrals(lam, a, b, pulse, nodes_per_cycle=64)
    inner = phase_integrals(lam, a, b, pulse, lambda n: np.ones((n.phi.size, 1)), 64)[:, 0]
    psi_end = lam * pulse.phi_end + a * pulse.integrals.total1 + b * pulse.integrals.total2
    full = inner + (1 - np.exp(1j * psi_end)) / (1j * lam)
    assert np.allclose(b0, full, rtol=1e-9, atol=1e-9 * np.abs(full).max())


def test_zero_field_amplitude_vanishes(rng):
    pulse = LaserPulse(1.55, 0.0)
    p, pp, k = sample_kinematics(rng, 5)
    assert np.max(np.abs(reduced_amplitudes(p, pp, k, pulse))) == 0.0


def test_zero_lambda_rejected(fig2_pulse):
    with pytest.raises(DegenerateKinematicsError):
        master_integrals(np.array([0.0]), 0.0, 0.0, fig2_pulse)


def test_conservation_violation_rejected(fig2_pulse, rng):
    p, pp, k = sample_kinematics(rng, 2)
    with pytest.raises(ContractViolation):
        reduced_amplitudes(p * 1.01, pp, k, fig2_pulse)


def test_spin_sum_independent_of_basis(fig2_pulse, rng):
    p, pp, k = sample_kinematics(rng, 6)
    a = np.sum(np.abs(reduced_amplitudes(p, pp, k, fig2_pulse, basis="rest-z")) ** 2, axis=(1, 2, 3))
    b = np.sum(np.abs(reduced_amplitudes(p, pp, k, fig2_pulse, basis="helicity")) ** 2, axis=(1, 2, 3))
    assert np.allclose(a, b, rtol=1e-10)


def test_amplitude_converges_with_phase_resolution(fig2_pulse, rng):
    p, pp, k = sample_kinematics(rng, 6, omega_range=(10.0, 1e3))
    coarse = reduced_amplitudes(p, pp, k, fig2_pulse)
    fine = reduced_amplitudes(p, pp, k, fig2_pulse, nodes_per_cycle=128, min_panels=128)
    assert np.allclose(coarse, fine, rtol=1e-7, atol=1e-9 * np.abs(fine).max())
