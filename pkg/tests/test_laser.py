import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from coherent_nscs.kinematics import M_E, dot, on_shell
from coherent_nscs.laser import (
    ENVELOPES,
    LaserPulse,
    envelope_sin4,
    kinetic_momentum,
    trajectory,
    velocity,
)


def test_sin4_support_and_zero_area(fig2_pulse):
    assert fig2_pulse.phi_end == pytest.approx(4 * np.pi / 1.55)
    assert envelope_sin4(-0.1, 1.55) == 0.0
    assert envelope_sin4(fig2_pulse.phi_end + 0.1, 1.55) == 0.0
    assert abs(fig2_pulse.integrals.total1) < 1e-12


def test_cumulative_integrals_match_quad(fig2_pulse):
    for phi in (0.3, 2.0, 5.5, fig2_pulse.phi_end):
        i1, i2 = fig2_pulse.integrals(phi)
        r1 = quad(fig2_pulse.psi, 0, phi, limit=200)[0]
        r2 = quad(lambda x: fig2_pulse.psi(x) ** 2, 0, phi, limit=200)[0]
        assert i1 == pytest.approx(r1, abs=1e-10)
        assert i2 == pytest.approx(r2, abs=1e-10)


def test_unknown_envelope_lists_registry():
    with pytest.raises(ValueError, match="sin4"):
        LaserPulse(1.55, 1.0, envelope="triangle")
    assert "flattop" in ENVELOPES


@given(st.floats(-3e5, 3e5), st.floats(-5e7, -1e6), st.floats(0.0, 8.0))
@settings(max_examples=40, deadline=None)
def test_kinetic_momentum_on_shell(px, pz, phi):
    pulse = LaserPulse(1.55, 5.0)
    p = on_shell(np.array([px, 0.0, pz]))
    pi = kinetic_momentum(p, pulse, np.array(phi))
    assert dot(pi, pi) == pytest.approx(M_E**2, rel=1e-6)


def test_trajectory_derivative_is_velocity_over_p_minus(fig2_pulse):
    p = on_shell(np.array([1e4, 0.0, -1e7]))
    phi = np.linspace(0.5, 7.5, 9)
    h = 1e-5
    dx = (trajectory(p, np.zeros(4), fig2_pulse, phi + h) - trajectory(p, np.zeros(4), fig2_pulse, phi - h)) / (2 * h)
    pi = kinetic_momentum(p, fig2_pulse, phi)
    assert np.allclose(dx, pi / (p[0] - p[3]), rtol=1e-6, atol=1e-12)
    assert np.all(np.linalg.norm(velocity(p, fig2_pulse, phi), axis=-1) < 1)


def test_free_motion_after_pulse(fig2_pulse):
    p = on_shell(np.array([0.0, 0.0, -1e7]))
    pi = kinetic_momentum(p, fig2_pulse, np.array([fig2_pulse.phi_end + 1.0]))
    assert np.allclose(pi[0], p)
