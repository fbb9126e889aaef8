"""Solid-angle quadrature around the backward (-z) emission cone.

Directions are n' = (sin t cos f, sin t sin f, -cos t).  The polar angle uses
Gauss-Kronrod (7, 15) panels, dense inside the cone t < theta_cone and coarse
outside; the azimuth uses the periodic trapezoid rule.  Both rules carry an
embedded lower-order companion used for the error estimate.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Kronrod 15-point nodes on [0, 1] (symmetric) and weights; every second
# node (starting at index 1) is a 7-point Gauss node.
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)


def kronrod15():
    """Nodes on [-1, 1] with Kronrod and embedded Gauss weights."""
    x = np.concatenate([-_XGK[:-1], _XGK[::-1]])
    wk = np.concatenate([_WGK[:-1], _WGK[::-1]])
    wg_half = np.zeros(8)
    wg_half[1::2] = _WG
    wg = np.concatenate([wg_half[:-1], wg_half[::-1]])
    return x, wk, wg


def _panels(a, b, n):
    x, wk, wg = kronrod15()
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * wk).ravel(), (half * wg).ravel()


@dataclass(frozen=True)
class AngularGrid:
    theta_cone: float
    cone_panels: int = 4
    phi_count: int = 64
    outer_panels: int = 2
    outer_phi_count: int = 16

    def __post_init__(self):
        if not 0 < self.theta_cone <= np.pi:
            raise ValueError("theta_cone must lie in (0, pi]")
        if self.phi_count % 2 or self.outer_phi_count % 2:
            raise ValueError("azimuthal counts must be even")

    @cached_property
    def _rules(self):
        blocks = [(0.0, self.theta_cone, self.cone_panels, self.phi_count)]
        if self.theta_cone < np.pi and self.outer_panels > 0:
            blocks.append((self.theta_cone, np.pi, self.outer_panels, self.outer_phi_count))
        dirs, wk, wg, wh = [], [], [], []
        for a, b, npan, nphi in blocks:
            th, tk, tg = _panels(a, b, npan)
            ph = 2 * np.pi * np.arange(nphi) / nphi
            fk = np.full(nphi, 2 * np.pi / nphi)
            fh = np.where(np.arange(nphi) % 2 == 0, 4 * np.pi / nphi, 0.0)
            T, P = np.meshgrid(th, ph, indexing="ij")
            s = np.sin(T)
            dirs.append(np.stack([s * np.cos(P), s * np.sin(P), -np.cos(T)], axis=-1).reshape(-1, 3))
            wk.append((tk[:, None] * s * fk[None, :]).ravel())
            wg.append((tg[:, None] * s * fk[None, :]).ravel())
            wh.append((tk[:, None] * s * fh[None, :]).ravel())
        return np.concatenate(dirs), np.concatenate(wk), np.concatenate(wg), np.concatenate(wh)

    @property
    def directions(self):
        return self._rules[0]

    @property
    def weights(self):
        return self._rules[1]

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        """Integral and error estimate for per-direction values (last axis)."""
        _, wk, wg, wh = self._rules
        total = values @ wk
        d_theta = np.abs(total - values @ wg)
        d_phi = np.abs(total - values @ wh)
        scale = np.maximum(np.abs(total), np.finfo(float).tiny)
        # quadpack-style damping of the raw Kronrod-Gauss difference; the
        # periodic trapezoid error squares under doubling
        e_theta = np.minimum(d_theta, scale * (200 * d_theta / scale) ** 1.5)
        e_phi = np.minimum(d_phi, d_phi**2 / scale)
        return total, np.hypot(e_theta, e_phi)


def cone_angle(mean_momentum, xi, mass, factor=1.5):
    """Default cone half-angle covering the transverse excursion m(1+xi)/eps."""
    eps = np.sqrt(mass**2 + np.sum(np.asarray(mean_momentum) ** 2))
    return float(min(np.pi, factor * mass * (1 + xi) / eps + 4 * mass / eps))
