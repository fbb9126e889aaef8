"""Reduced single-electron emission amplitude between Volkov states.

For an electron with initial momentum p, final momentum p' and emitted
photon k' the light-front conservation laws leave a single phase integral

    M = ubar(p') [G0 B0 + G1 B1 + G2 B2] u(p),
    B_n = int dphi psi^n exp(i (lam phi + a I1 + b I2)),

where G0 = eps*-slash and G1, G2 are the field-dependent vertex corrections.
B0 is fixed through lam B0 + a B1 + b B2 = 0, which removes the
non-integrable tails of a compactly supported pulse.
"""

import numpy as np

from . import dirac
from .kinematics import E_CHARGE, N_LASER, dot, minus, plus
from .laser import GL_ORDER


class ContractViolation(ValueError):
    pass


class DegenerateKinematicsError(ValueError):
    pass


def light_front_dot(a, b):
    """(ab) from light-cone components; avoids t/z cancellations."""
    return 0.5 * (plus(a) * minus(b) + minus(a) * plus(b)) - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]


def phase_coefficients(p, pp, k, pulse):
    """Slope lam and coefficients (a, b) of I1, I2 in the Volkov phase.

    ``p`` is the initial electron, ``pp`` the final electron, ``k`` the photon.
    """
    p = np.asarray(p, dtype=float)
    pp = np.asarray(pp, dtype=float)
    k = np.asarray(k, dtype=float)
    pm, ppm, km = minus(p), minus(pp), minus(k)
    lam = light_front_dot(k, pp) / pm
    amp = pulse.amplitude
    a = E_CHARGE * (dot(pp, amp) / ppm - dot(p, amp) / pm)
    b = 0.5 * E_CHARGE**2 * dot(amp, amp) * (-km / (pm * ppm))
    return lam, a, b


def panels_for(lam, a, b, pulse, nodes_per_cycle=32, min_panels=32):
    """Power-of-two panel count resolving the local phase oscillation."""
    rate = np.abs(lam) + np.abs(a) * pulse.psi_max + np.abs(b) * pulse.psi_max**2
    cycles = rate * pulse.phi_end / (2 * np.pi)
    need = np.maximum(min_panels, np.ceil(cycles * nodes_per_cycle / GL_ORDER))
    return (2 ** np.ceil(np.log2(need))).astype(np.int64)


def phase_integrals(lam, a, b, pulse, weights_fn, nodes_per_cycle=32, min_panels=32, chunk_elems=2**22):
    """Integrate weights_fn(nodes) * exp(i Psi) over the pulse for each phase.

    ``weights_fn(nodes)`` returns an array (n_nodes, m) of real integrand
    factors; the result has shape (len(lam), m).  Shared by the quantum
    master integrals and the classical radiation integral.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    a = np.broadcast_to(a, lam.shape).astype(float)
    b = np.broadcast_to(b, lam.shape).astype(float)
    levels = panels_for(lam, a, b, pulse, nodes_per_cycle, min_panels)
    out = None
    for level in np.unique(levels):
        nodes = pulse.nodes(int(level))
        factors = weights_fn(nodes) * nodes.weight[:, None]
        if out is None:
            out = np.zeros((lam.size, factors.shape[1]), dtype=complex)
        idx = np.nonzero(levels == level)[0]
        step = max(1, chunk_elems // nodes.phi.size)
        for s in range(0, idx.size, step):
            sel = idx[s : s + step]
            psi_phase = lam[sel, None] * nodes.phi + a[sel, None] * nodes.i1 + b[sel, None] * nodes.i2
            out[sel] = np.exp(1j * psi_phase) @ factors
    return out


def master_integrals(lam, a, b, pulse, nodes_per_cycle=32, min_panels=32):
    """(B0, B1, B2) for arrays of phase coefficients."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam == 0):
        raise DegenerateKinematicsError("lam = 0: forward/soft-photon kinematics excluded")
    res = phase_integrals(
        lam, a, b, pulse, lambda n: np.stack([n.psi, n.psi**2], axis=1), nodes_per_cycle, min_panels
    )
    b1, b2 = res[:, 0], res[:, 1]
    b0 = -(np.broadcast_to(a, lam.shape) * b1 + np.broadcast_to(b, lam.shape) * b2) / lam
    return b0, b1, b2


def recoil_momentum(pp, k):
    """Initial momentum q fixed by light-front conservation from (p', k').

    q = p' + k' - (k'p')/(p'_- + k'_-) n.
    """
    pp = np.asarray(pp, dtype=float)
    k = np.asarray(k, dtype=float)
    qm = minus(pp) + minus(k)
    coef = light_front_dot(k, pp) / qm
    return pp + k - coef[..., None] * N_LASER


def _bilinear(left, right):
    # left (N, 2, 4) row spinors, right (N, 2, 4) column spinors
    return np.einsum("iab,mbc,isc->iasm", left, dirac.GAMMA, right, optimize=True)


def _check_conservation(p, pp, k, rtol=1e-9):
    scale = np.abs(p[..., 0])
    dperp = np.abs(p[..., 1:3] - pp[..., 1:3] - k[..., 1:3]).max(axis=-1)
    dminus = np.abs(minus(p) - minus(pp) - minus(k))
    if np.any(dperp > rtol * scale) or np.any(dminus > rtol * scale):
        raise ContractViolation("initial momentum violates light-front conservation")


def reduced_amplitudes(
    p, pp, k, pulse, polarizations=None, basis="rest-z", nodes_per_cycle=32, min_panels=32, return_parts=False
):
    """Amplitudes M[i, s', l', s] for batches of (p, p', k').

    ``polarizations`` overrides the photon vectors (shape (N, L, 4)); by
    default the two transverse real vectors of ``dirac.polarization_basis``.
    With ``return_parts`` the sandwiches g_n and integrals B_n are returned
    instead of their sum.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    pp = np.atleast_2d(np.asarray(pp, dtype=float))
    k = np.atleast_2d(np.asarray(k, dtype=float))
    _check_conservation(p, pp, k)
    if polarizations is None:
        polarizations = dirac.polarization_basis(k)
    eps_low = np.conj(np.asarray(polarizations)) * np.array([1, -1, -1, -1])

    lam, a, b = phase_coefficients(p, pp, k, pulse)
    b0, b1, b2 = master_integrals(lam, a, b, pulse, nodes_per_cycle, min_panels)

    left = dirac.bar(dirac.spinors(pp, basis=basis))
    right = dirac.spinors(p, basis=basis)
    a_slash = dirac.slash(pulse.amplitude)
    n_slash = dirac.slash(N_LASER)
    pmat = a_slash @ n_slash
    qmat = n_slash @ a_slash
    left_p = left @ pmat
    right_q = right @ qmat.T

    cf = (E_CHARGE / (2 * minus(pp)))[:, None, None, None]
    ci = (E_CHARGE / (2 * minus(p)))[:, None, None, None]

    def contract(bil):
        # (N, s', s, mu) x (N, l', mu) -> (N, s', l', s)
        return np.einsum("iasm,ilm->ials", bil, eps_low)

    g0 = contract(_bilinear(left, right))
    g1 = cf * contract(_bilinear(left_p, right)) + ci * contract(_bilinear(left, right_q))
    g2 = cf * ci * contract(_bilinear(left_p, right_q))
    if return_parts:
        return (g0, g1, g2), (b0, b1, b2)
    bb = lambda x: x[:, None, None, None]  # noqa: E731
    return g0 * bb(b0) + g1 * bb(b1) + g2 * bb(b2)


def reduced_amplitude(p, pp, k, s, s_final, l, pulse, basis="rest-z"):
    """Single amplitude M_{s' l', s}(p', k'; p)."""
    m = reduced_amplitudes(p, pp, k, pulse, basis=basis)[0]
    i = dirac.SPIN_LABELS.index
    return m[i(s_final), l, i(s)]


def ward_ratio(p, pp, k, pulse, basis="rest-z"):
    """|M(eps -> n')| over the sum of its individual term magnitudes.

    n' = k'/omega' replaces the polarization; gauge invariance requires the
    three terms to cancel.
    """
    p = np.atleast_2d(p)
    pp = np.atleast_2d(pp)
    k = np.atleast_2d(np.asarray(k, dtype=float))
    nvec = (k / k[:, :1])[:, None, :]
    (g0, g1, g2), (b0, b1, b2) = reduced_amplitudes(p, pp, k, pulse, polarizations=nvec, basis=basis, return_parts=True)
    bb = lambda x: x[:, None, None, None]  # noqa: E731
    t0, t1, t2 = g0 * bb(b0), g1 * bb(b1), g2 * bb(b2)
    total = np.abs(t0 + t1 + t2)
    scale = np.abs(t0) + np.abs(t1) + np.abs(t2)
    return np.max(total, axis=(1, 2, 3)) / np.max(scale, axis=(1, 2, 3))
