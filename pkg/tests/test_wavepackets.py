import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_nscs.kinematics import on_shell
from coherent_nscs.wavepackets import (
    GaussianPacket,
    PauliForbiddenError,
    covariance_tensor,
    hermite_nodes,
    overlap,
    overlap_Nij,
    overlap_quadrature,
    sample_momentum,
    substream,
)

widths = st.floats(5e3, 5e4)
offsets = st.floats(-3e4, 3e4)
shifts = st.floats(-5e-5, 5e-5)


@given(widths, widths, widths, widths, offsets, offsets, shifts, shifts)
@settings(max_examples=25, deadline=None)
def test_overlap_closed_form_matches_quadrature(s1, s2, s3, s4, dx, dz, rx, rz):
    a = GaussianPacket.from_widths((0, 0, -2e6), s1, s2, (rx, 0, 0))
    b = GaussianPacket.from_widths((dx, 0, -2e6 + dz), s3, s4, (0, 0, rz))
    exact = overlap(a, b)
    quad = overlap_quadrature(a, b)
    assert abs(exact - quad) <= 1e-7 * abs(a.norm0)


def test_self_overlap_is_norm():
    a = GaussianPacket.from_widths((0, 0, -1e7), 31, 0.62, scale=2.0)
    assert overlap(a, a) == pytest.approx(a.norm0)


def test_normalization_equal_and_opposite_spins():
    a = GaussianPacket.from_widths((0, 0, -1e7), 31, 0.62, spin=1)
    b = a.with_(shift=(1e-2, 1e-2, 1e-3))
    same = overlap_Nij(a, b)
    assert same.n21 / same.n12 == pytest.approx(np.exp(-(31**2) * 2e-4 - 0.62**2 * 1e-6), rel=1e-12)
    opposite = overlap_Nij(a, b.with_(spin=-1))
    assert opposite.n == opposite.n12


def test_pauli_forbidden():
    a = GaussianPacket.from_widths((0, 0, -1e7), 31, 0.62)
    with pytest.raises(PauliForbiddenError):
        overlap_Nij(a, a)


def test_hermite_nodes_integrate_moments():
    nodes, w = hermite_nodes(np.array([1.0, 2.0, 3.0]), np.array([0.5, 1.0, 2.0]), 4)
    assert w.sum() == pytest.approx(1.0)
    assert np.allclose(w @ nodes, [1, 2, 3])
    assert np.allclose(w @ (nodes - [1, 2, 3]) ** 2, [0.25, 1, 4])


def test_covariance_matches_sampling():
    pk = GaussianPacket.from_widths((0, 0, -1e6), 3e5, 1e5)
    t = covariance_tensor(pk).matrix
    x = sample_momentum(pk, 400000, seed=7)
    p = on_shell(x)
    ref = np.cov(p.T)
    assert np.allclose(t, ref, rtol=0.02, atol=0.02 * np.abs(ref).max())


def test_substreams_are_reproducible_and_distinct():
    a = substream(5, 3).standard_normal(4)
    b = substream(5, 3).standard_normal(4)
    c = substream(5, 4).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_invalid_packets():
    with pytest.raises(ValueError):
        GaussianPacket((0, 0), (1, 1, 1))
    with pytest.raises(ValueError):
        GaussianPacket((0, 0, 0), (1, 1, 1), spin=0)
