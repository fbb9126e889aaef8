"""Minkowski four-vectors, light-cone components and Lorentz boosts.

Four-vectors are plain numpy arrays whose last axis holds ``(t, x, y, z)``.
Natural units (hbar = c = 1) with energies in eV are used throughout; the
metric is diag(+1, -1, -1, -1).
"""

import numpy as np

# electron mass in eV and fine-structure constant
M_E = 0.510998950e6
ALPHA = 1.0 / 137.035999
# electron charge in Gaussian natural units, e**2 = alpha, e < 0
E_CHARGE = -np.sqrt(ALPHA)
# critical field m^2/|e| in eV^2
E_CRIT = M_E**2 / abs(E_CHARGE)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
# laser propagation four-vector n = k/omega
N_LASER = np.array([1.0, 0.0, 0.0, 1.0])


def four(t, x, y, z):
    return np.array([t, x, y, z], dtype=float)


def dot(a, b):
    """Minkowski product (ab), broadcasting over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]


def minus(a):
    """Light-cone minus component a_- = a_t - a_z, equal to (n a)."""
    a = np.asarray(a)
    return a[..., 0] - a[..., 3]


def plus(a):
    a = np.asarray(a)
    return a[..., 0] + a[..., 3]


def lower(a):
    """Covariant components a_mu."""
    a = np.array(a, copy=True)
    a[..., 1:] *= -1
    return a


def on_shell(p3, mass=M_E):
    """Four-momentum (eps, p) with eps = sqrt(m^2 + |p|^2)."""
    p3 = np.asarray(p3, dtype=float)
    eps = np.sqrt(mass**2 + np.sum(p3**2, axis=-1))
    return np.concatenate([eps[..., None], p3], axis=-1)


def from_light_cone(p_perp, p_minus, mass=M_E):
    """On-shell four-momentum from transverse components and p_-.

    Uses p_+ = (m^2 + p_perp^2)/p_-; p_- must be positive.
    """
    p_perp = np.asarray(p_perp, dtype=float)
    p_minus = np.asarray(p_minus, dtype=float)
    if np.any(p_minus <= 0):
        raise ValueError("light-cone minus component must be positive")
    p_plus = (mass**2 + np.sum(p_perp**2, axis=-1)) / p_minus
    t = 0.5 * (p_plus + p_minus)
    z = 0.5 * (p_plus - p_minus)
    return np.concatenate([t[..., None], p_perp, z[..., None]], axis=-1)


def energy_shift(p3, p3_ref, mass=M_E):
    """eps(p) - eps(p_ref) without cancellation for nearby momenta."""
    p3 = np.asarray(p3, dtype=float)
    p3_ref = np.asarray(p3_ref, dtype=float)
    e = np.sqrt(mass**2 + np.sum(p3**2, axis=-1))
    e0 = np.sqrt(mass**2 + np.sum(p3_ref**2, axis=-1))
    return np.sum((p3 - p3_ref) * (p3 + p3_ref), axis=-1) / (e + e0)


def boost_matrix(rapidity):
    """Pure boost Lambda^mu_nu for a rapidity three-vector.

    The boost direction is rapidity/|rapidity| and cosh|y| is the Lorentz
    factor.  A zero vector yields the identity.
    """
    y = np.asarray(rapidity, dtype=float)
    eta = np.linalg.norm(y)
    lam = np.eye(4)
    if eta == 0.0:
        return lam
    nhat = y / eta
    ch, sh = np.cosh(eta), np.sinh(eta)
    lam[0, 0] = ch
    lam[0, 1:] = sh * nhat
    lam[1:, 0] = sh * nhat
    lam[1:, 1:] += (ch - 1.0) * np.outer(nhat, nhat)
    return lam


def boost(v, rapidity):
    """Apply a pure boost to four-vector(s) v."""
    return np.asarray(v, dtype=float) @ boost_matrix(rapidity).T


def rotation_matrix(axis, angle):
    """Spatial rotation embedded in a 4x4 Lorentz matrix (Rodrigues)."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    r = np.eye(3) + np.sin(angle) * kx + (1 - np.cos(angle)) * kx @ kx
    out = np.eye(4)
    out[1:, 1:] = r
    return out


def is_lorentz(lam, tol=1e-10):
    return np.allclose(lam @ METRIC @ lam.T, METRIC, atol=tol, rtol=0)
