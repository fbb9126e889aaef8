"""Pulsed plane wave: envelopes, four-potential, classical electron motion.

The wave propagates along +z and is linearly polarized along x.  The
light-cone time is phi = t - z and the potential is A^mu psi_L(phi) with
A^mu = (0, -E/omega, 0, 0).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .kinematics import E_CHARGE, M_E, N_LASER, dot, minus


class InvalidKinematicsError(ValueError):
    pass


# -- envelopes ---------------------------------------------------------------
# Each envelope works in the dimensionless laser phase x = omega*phi and
# returns (psi, dpsi/dx).  Support is [0, x_end].


def _sin4(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 4 * np.pi)
    s, c = np.sin(x / 4), np.cos(x / 4)
    val = np.where(inside, s**4 * np.sin(x), 0.0)
    der = np.where(inside, s**3 * c * np.sin(x) + s**4 * np.cos(x), 0.0)
    return val, der


def _flattop(x, ramp_cycles=1.0, flat_cycles=2.0):
    x = np.asarray(x, dtype=float)
    r = 2 * np.pi * ramp_cycles
    f = 2 * np.pi * flat_cycles
    end = 2 * r + f
    # sin^4 ramps keep psi smooth to third order at the edges
    u = np.clip(np.where(x < r + f / 2, x / r, (end - x) / r), 0.0, 1.0)
    g = np.sin(0.5 * np.pi * u) ** 4
    dg_du = 2 * np.pi * np.sin(0.5 * np.pi * u) ** 3 * np.cos(0.5 * np.pi * u)
    du_dx = np.where(x < r + f / 2, 1.0 / r, -1.0 / r)
    dg = np.where((u > 0) & (u < 1), dg_du * du_dx, 0.0)
    inside = (x > 0) & (x < end)
    val = np.where(inside, g * np.sin(x), 0.0)
    der = np.where(inside, dg * np.sin(x) + g * np.cos(x), 0.0)
    return val, der


def _sin4_end():
    return 4 * np.pi


def _flattop_end(ramp_cycles=1.0, flat_cycles=2.0):
    return 2 * np.pi * (2 * ramp_cycles + flat_cycles)


ENVELOPES = {
    "sin4": (_sin4, _sin4_end),
    "flattop": (_flattop, _flattop_end),
}


def envelope_sin4(phi, omega):
    """sin^4(omega phi/4) sin(omega phi) on 0 <= omega phi <= 4 pi, else 0."""
    return _sin4(omega * np.asarray(phi, dtype=float))[0]


# -- Gauss-Legendre panels ---------------------------------------------------

GL_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


def composite_gauss(a, b, n_panels, order=GL_ORDER):
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    if order == GL_ORDER:
        x, w = _GL_X, _GL_W
    else:
        x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class PhaseNodes:
    """Envelope data tabulated on a composite Gauss-Legendre grid."""

    phi: np.ndarray
    weight: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    i1: np.ndarray
    i2: np.ndarray


class EnvelopeIntegrals:
    """Cumulative integrals I1 = int_0^phi psi and I2 = int_0^phi psi^2.

    Tabulated on a uniform grid and interpolated with cubic Hermite
    polynomials whose slopes are the exact integrands.
    """

    def __init__(self, psi_func, phi_end, n_grid):
        self.phi_end = phi_end
        grid = np.linspace(0.0, phi_end, n_grid + 1)
        x, w = np.polynomial.legendre.leggauss(6)
        half = 0.5 * np.diff(grid)
        mid = 0.5 * (grid[1:] + grid[:-1])
        pts = mid[:, None] + half[:, None] * x
        vals = psi_func(pts)
        seg1 = np.sum(vals * w, axis=1) * half
        seg2 = np.sum(vals**2 * w, axis=1) * half
        i1 = np.concatenate([[0.0], np.cumsum(seg1)])
        i2 = np.concatenate([[0.0], np.cumsum(seg2)])
        psi_grid = psi_func(grid)
        self._i1 = CubicHermiteSpline(grid, i1, psi_grid)
        self._i2 = CubicHermiteSpline(grid, i2, psi_grid**2)
        self.total1 = i1[-1]
        self.total2 = i2[-1]

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        inside = np.clip(phi, 0.0, self.phi_end)
        return self._i1(inside), self._i2(inside)


@dataclass(frozen=True)
class LaserPulse:
    """Linearly polarized plane-wave pulse.

    ``omega`` is the central frequency in eV, ``xi`` the classical intensity
    parameter |e|E/(m omega).
    """

    omega: float
    xi: float
    envelope: str = "sin4"
    envelope_params: dict = field(default_factory=dict)
    grid_per_cycle: int = 2**14

    def __post_init__(self):
        if self.envelope not in ENVELOPES:
            raise ValueError(
                f"unknown envelope {self.envelope!r}; registered: {sorted(ENVELOPES)}"
            )
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.xi < 0:
            raise ValueError("xi must be non-negative")

    def __hash__(self):
        return hash((self.omega, self.xi, self.envelope, tuple(sorted(self.envelope_params.items()))))

    @property
    def field_amplitude(self):
        """Peak field E = xi m omega/|e| in eV^2."""
        return self.xi * M_E * self.omega / abs(E_CHARGE)

    @property
    def amplitude(self):
        """Four-potential amplitude (0, -E/omega, 0, 0)."""
        return np.array([0.0, -self.field_amplitude / self.omega, 0.0, 0.0])

    @cached_property
    def phi_end(self):
        _, end = ENVELOPES[self.envelope]
        return end(**self.envelope_params) / self.omega

    @property
    def cycles(self):
        return self.omega * self.phi_end / (2 * np.pi)

    def psi(self, phi):
        f, _ = ENVELOPES[self.envelope]
        return f(self.omega * np.asarray(phi, dtype=float), **self.envelope_params)[0]

    def dpsi(self, phi):
        f, _ = ENVELOPES[self.envelope]
        return self.omega * f(self.omega * np.asarray(phi, dtype=float), **self.envelope_params)[1]

    @cached_property
    def integrals(self):
        n = int(np.ceil(self.grid_per_cycle * self.cycles))
        return EnvelopeIntegrals(self.psi, self.phi_end, n)

    @cached_property
    def psi_max(self):
        x = np.linspace(0, self.phi_end, 20001)
        return float(np.max(np.abs(self.psi(x))))

    @cached_property
    def _node_cache(self):
        return {}

    def nodes(self, n_panels):
        """Envelope tables on ``n_panels`` Gauss-Legendre panels over the support."""
        cache = self._node_cache
        if n_panels not in cache:
            phi, w = composite_gauss(0.0, self.phi_end, n_panels)
            i1, i2 = self.integrals(phi)
            cache[n_panels] = PhaseNodes(phi, w, self.psi(phi), self.dpsi(phi), i1, i2)
        return cache[n_panels]


def _check_minus(p):
    pm = minus(p)
    if np.any(pm <= 0):
        raise InvalidKinematicsError("p_- must be positive for motion in the plane wave")
    return pm


def momentum_coefficients(p, pulse):
    """Coefficients (c1, c2) of n^mu psi and n^mu psi^2 in the kinetic momentum."""
    pm = _check_minus(p)
    amp = pulse.amplitude
    c1 = E_CHARGE * dot(p, amp) / pm
    c2 = -(E_CHARGE**2) * dot(amp, amp) / (2 * pm)
    return c1, c2


def kinetic_momentum(p, pulse, phi):
    """Kinetic four-momentum pi^mu(phi) of an electron with asymptotic momentum p.

    ``p`` is a single four-vector; ``phi`` may be an array, giving shape
    phi.shape + (4,).
    """
    p = np.asarray(p, dtype=float)
    c1, c2 = momentum_coefficients(p, pulse)
    psi = np.asarray(pulse.psi(phi))[..., None]
    return p - E_CHARGE * pulse.amplitude * psi + N_LASER * (c1 * psi + c2 * psi**2)


def trajectory(p, x0, pulse, phi):
    """Position four-vector x^mu(phi) = x0 + int_0^phi pi(phi')/p_- dphi'.

    ``x0`` is the four-position at light-cone time phi = 0.  The integral is
    evaluated in closed form through the cached envelope integrals.
    """
    p = np.asarray(p, dtype=float)
    pm = _check_minus(p)
    c1, c2 = momentum_coefficients(p, pulse)
    phi = np.asarray(phi, dtype=float)
    i1, i2 = pulse.integrals(phi)
    i1 = i1[..., None]
    i2 = i2[..., None]
    disp = p * phi[..., None] - E_CHARGE * pulse.amplitude * i1 + N_LASER * (c1 * i1 + c2 * i2)
    return np.asarray(x0, dtype=float) + disp / pm


def velocity(p, pulse, phi):
    pi = kinetic_momentum(p, pulse, phi)
    return pi[..., 1:] / pi[..., :1]
