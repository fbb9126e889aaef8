"""Gaussian momentum-space wave packets.

A packet amplitude is rho(p) = c sqrt(2 eps(p) G(p)) exp(-i p.r) where G is
a normalized 3D Gaussian density, so rho^2/2eps is Gaussian in the plain
d^3p measure.  The relativistic measure is d^3p / ((2 pi)^3 2 eps).
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .kinematics import M_E, energy_shift, on_shell

TWO_PI3 = (2 * np.pi) ** 3


class PauliForbiddenError(ValueError):
    """Equal spins and identical packets: the antisymmetrized state vanishes."""


@dataclass(frozen=True)
class GaussianPacket:
    mean: tuple
    sigma: tuple
    shift: tuple = (0.0, 0.0, 0.0)
    spin: int = 1
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "sigma", tuple(float(v) for v in self.sigma))
        object.__setattr__(self, "shift", tuple(float(v) for v in self.shift))
        if len(self.mean) != 3 or len(self.sigma) != 3 or len(self.shift) != 3:
            raise ValueError("mean, sigma and shift must be three-vectors")
        if min(self.sigma) < 0:
            raise ValueError("widths must be non-negative")
        if self.spin not in (1, -1):
            raise ValueError("spin label must be +1 or -1")

    @classmethod
    def from_widths(cls, mean, sigma_perp, sigma_par, shift=(0.0, 0.0, 0.0), spin=1, scale=1.0):
        return cls(mean, (sigma_perp, sigma_perp, sigma_par), shift, spin, scale)

    @property
    def mu(self):
        return np.array(self.mean)

    @property
    def sig(self):
        return np.array(self.sigma)

    @property
    def r(self):
        return np.array(self.shift)

    @property
    def norm0(self):
        """N0 = int d^3p/(2pi)^3 rho^2/2eps."""
        return self.scale**2 / TWO_PI3

    def log_density(self, p3):
        s = self.sig
        z = (np.asarray(p3) - self.mu) / s
        return -0.5 * np.sum(z**2, axis=-1) - np.sum(np.log(s)) - 1.5 * np.log(2 * np.pi)

    def density(self, p3):
        return np.exp(self.log_density(p3))

    def rho(self, p3):
        p3 = np.asarray(p3, dtype=float)
        eps = on_shell(p3)[..., 0]
        return self.scale * np.sqrt(2 * eps * self.density(p3)) * np.exp(-1j * p3 @ self.r)

    def with_(self, **kw):
        d = dict(mean=self.mean, sigma=self.sigma, shift=self.shift, spin=self.spin, scale=self.scale)
        d.update(kw)
        return GaussianPacket(**d)


@dataclass(frozen=True)
class OverlapNormalization:
    n12: float
    n21: float
    same_spin: bool

    @property
    def n(self):
        return self.n12 - (self.n21 if self.same_spin else 0.0)


def overlap(pa, pb):
    """Closed form of int dmu rho_a rho_b^* (complex)."""
    sa, sb = pa.sig, pb.sig
    lam = 1 / sa**2 + 1 / sb**2
    center = (pa.mu / sa**2 + pb.mu / sb**2) / lam
    dr = pa.r - pb.r
    gauss = np.exp(-((pa.mu - pb.mu) ** 2) / (4 * (sa**2 + sb**2)))
    amp = np.sqrt(2 / (lam * sa * sb))
    val = np.prod(amp * gauss * np.exp(-(dr**2) / lam))
    return pa.scale * pb.scale * val * np.exp(-1j * center @ dr) / TWO_PI3


def overlap_Nij(p1, p2, tol=1e-12):
    """Normalization N = N12 - delta_{s1 s2} N21 of the two-electron state."""
    n12 = p1.norm0 * p2.norm0
    n21 = float(abs(overlap(p1, p2)) ** 2)
    res = OverlapNormalization(n12, n21, p1.spin == p2.spin)
    if res.same_spin and res.n <= tol * n12:
        raise PauliForbiddenError(
            "Pauli-forbidden: identical packets with equal spins, the anti-symmetrized state vanishes (N = 0)"
        )
    return res


def overlap_quadrature(pa, pb, order=48, half_width=8.0):
    """int dmu rho_a rho_b^* by tensor Gauss-Legendre on a box (oracle)."""
    # the integrand sqrt(Ga Gb) is a Gaussian with the product width
    prec = 1 / pa.sig**2 + 1 / pb.sig**2
    center = (pa.mu / pa.sig**2 + pb.mu / pb.sig**2) / prec
    width = np.sqrt(2 / prec)
    lo, hi = center - half_width * width, center + half_width * width
    x, w = np.polynomial.legendre.leggauss(order)
    axes = [0.5 * (hi[i] - lo[i]) * x + 0.5 * (hi[i] + lo[i]) for i in range(3)]
    wts = [0.5 * (hi[i] - lo[i]) * w for i in range(3)]
    g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    ww = np.einsum("i,j,k->ijk", *wts).ravel()
    eps = on_shell(g)[..., 0]
    f = pa.rho(g) * np.conj(pb.rho(g)) / (2 * eps * TWO_PI3)
    return np.sum(ww * f)


def hermite_nodes(center, sigma, order):
    """Tensor Gauss-Hermite nodes for a Gaussian weight of given center/width.

    ``center`` may carry leading batch axes (..., 3); weights sum to one.
    Returns (nodes (..., order^3, 3), weights (order^3,)).
    """
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / np.sqrt(2 * np.pi)
    grid = np.array(list(product(x, repeat=3)))
    wts = np.prod(np.array(list(product(w, repeat=3))), axis=1)
    center = np.asarray(center, dtype=float)
    nodes = center[..., None, :] + grid * np.asarray(sigma)
    return nodes, wts


def gaussian_log_density(p3, center, sigma):
    sigma = np.asarray(sigma)
    z = (np.asarray(p3) - np.asarray(center)) / sigma
    return -0.5 * np.sum(z**2, axis=-1) - np.sum(np.log(sigma)) - 1.5 * np.log(2 * np.pi)


@dataclass(frozen=True)
class CovarianceTensor:
    matrix: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def covariance_tensor(packet, order=12):
    """T^{mu nu} = <<p^mu p^nu>> - <<p^mu>><<p^nu>> over rho^2/2eps.

    Energies enter as differences from the mean-momentum energy so that the
    small energy variance is not lost to cancellation.
    """
    if min(packet.sigma) == 0:
        raise ValueError("zero-width packet has singular covariance")
    nodes, w = hermite_nodes(packet.mu, packet.sig, order)
    de = energy_shift(nodes, packet.mu)
    v = np.concatenate([de[:, None], nodes - packet.mu], axis=1)
    m1 = w @ v
    dv = v - m1
    t = np.einsum("n,ni,nj->ij", w, dv, dv)
    mean = m1.copy()
    mean[0] += on_shell(packet.mu)[0]
    mean[1:] += packet.mu
    return CovarianceTensor(0.5 * (t + t.T), mean)


def substream(seed, index):
    """Independent reproducible generator for work unit ``index``."""
    ss = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_momentum(packet, count, seed, stream=0):
    """``count`` momenta from the Gaussian rho^2/2eps, shape (count, 3)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = substream(seed, stream)
    return packet.mu + rng.standard_normal((count, 3)) * packet.sig


def mean_energy(packet):
    return float(np.sqrt(M_E**2 + np.sum(packet.mu**2)))
