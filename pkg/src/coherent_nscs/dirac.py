"""Dirac matrices, free spinors and photon polarization vectors.

Standard (Dirac) representation.  Spinors are normalized to u-bar u = 2m and
spin is quantized along z in the particle rest frame unless the helicity
basis is requested.
"""

import numpy as np

from .kinematics import M_E

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

GAMMA = np.zeros((4, 4, 4), dtype=complex)
GAMMA[0] = np.diag([1, 1, -1, -1])
for _i in range(3):
    GAMMA[_i + 1, :2, 2:] = SIGMA[_i]
    GAMMA[_i + 1, 2:, :2] = -SIGMA[_i]

SPIN_LABELS = (+1, -1)


class DegenerateDirectionError(ValueError):
    pass


def slash(a):
    """a-slash = gamma^mu a_mu for four-vector(s) a (complex allowed)."""
    a = np.asarray(a)
    a_low = a * np.array([1, -1, -1, -1])
    return np.tensordot(a_low, GAMMA, axes=([-1], [0]))


def bar(u):
    """Dirac adjoint of spinor(s) along the last axis."""
    return np.conj(u) @ GAMMA[0]


def _two_spinors(p3, basis):
    n = p3.shape[:-1]
    chi = np.zeros(n + (2, 2), dtype=complex)
    if basis == "rest-z":
        chi[..., 0, 0] = 1.0
        chi[..., 1, 1] = 1.0
        return chi
    if basis != "helicity":
        raise ValueError(f"unknown spin basis {basis!r}")
    pn = np.linalg.norm(p3, axis=-1)
    safe = np.where(pn > 0, pn, 1.0)
    th = np.arccos(np.clip(np.where(pn > 0, p3[..., 2] / safe, 1.0), -1, 1))
    ph = np.arctan2(p3[..., 1], p3[..., 0])
    c, s = np.cos(th / 2), np.sin(th / 2)
    chi[..., 0, 0] = c
    chi[..., 0, 1] = np.exp(1j * ph) * s
    chi[..., 1, 0] = -np.exp(-1j * ph) * s
    chi[..., 1, 1] = c
    return chi


def spinors(p, mass=M_E, basis="rest-z"):
    """Positive-energy spinors u_s(p) for s = +, -; shape p.shape[:-1] + (2, 4)."""
    p = np.asarray(p, dtype=float)
    eps = p[..., 0]
    p3 = p[..., 1:]
    chi = _two_spinors(p3, basis)
    sp = np.einsum("...i,ijk->...jk", p3, SIGMA)
    lower_ = np.einsum("...jk,...sk->...sj", sp, chi)
    norm = np.sqrt(eps + mass)[..., None, None]
    return np.concatenate([norm * chi, lower_ / norm], axis=-1)


def spinor_u(p, s, mass=M_E, basis="rest-z"):
    return spinors(p, mass, basis)[..., SPIN_LABELS.index(s), :]


def sandwich(ubar, gamma, u):
    """ubar Gamma u for a 4x4 matrix Gamma."""
    return ubar @ gamma @ u


def polarization_basis(k):
    """Two real transverse polarization four-vectors for photon momentum k.

    Built from the photon direction and the x axis by Gram-Schmidt, falling
    back to the y axis within 1e-6 rad of x.  Returns shape k.shape[:-1] + (2, 4).
    """
    k = np.asarray(k, dtype=float)
    if np.any(k[..., 0] <= 0):
        raise DegenerateDirectionError("photon energy must be positive")
    n = k[..., 1:] / np.linalg.norm(k[..., 1:], axis=-1, keepdims=True)
    ref = np.zeros_like(n)
    near_x = np.linalg.norm(np.cross(n, [1.0, 0.0, 0.0]), axis=-1) < 1e-6
    ref[..., 0] = np.where(near_x, 0.0, 1.0)
    ref[..., 1] = np.where(near_x, 1.0, 0.0)
    e1 = ref - np.sum(ref * n, axis=-1, keepdims=True) * n
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(n, e1)
    out = np.zeros(k.shape[:-1] + (2, 4))
    out[..., 0, 1:] = e1
    out[..., 1, 1:] = e2
    return out
