"""Two-electron emission spectrum in strong-field QED.

The two-electron amplitude is S = C (T1 + T2 - T3 - T4) where each term is a
product of a function of the first final momentum and a function of the
second:

    T1 = rho1(q(x)) A_{s1'}(x; s1) * rho2(y) d(s2', s2)      electron 1 emits
    T2 = rho1(x) d(s1', s1) * rho2(q(y)) A_{s2'}(y; s2)      electron 2 emits
    T3 = rho2(x) d(s1', s2) * rho1(q(y)) A_{s2'}(y; s1)      exchange of T1
    T4 = rho2(q(x)) A_{s1'}(x; s2) * rho1(y) d(s2', s1)      exchange of T2

with A = M/(2 q_-).  The six-dimensional final-momentum integral of |S|^2
therefore reduces to 4x4 Gram matrices of three-dimensional integrals, each
computed by Gauss-Hermite quadrature centred on the Gaussian factor it
contains.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import volkov
from .angular import AngularGrid, cone_angle
from .kinematics import ALPHA, M_E, from_light_cone, minus, on_shell
from .wavepackets import (
    TWO_PI3,
    gaussian_log_density,
    hermite_nodes,
    overlap,
    overlap_Nij,
    substream,
)

SPINS = (1, -1)
_SIGN = (1, 1, -1, -1)
# (kind, packet index, spin source) of the x- and y-factors of T1..T4;
# spin source 0 -> s1, 1 -> s2
_X_FACTORS = (("A", 0, 0), ("R", 0, 0), ("R", 1, 1), ("A", 1, 1))
_Y_FACTORS = (("R", 1, 1), ("A", 1, 1), ("A", 0, 0), ("R", 0, 0))
CHANNELS = ("direct1", "direct2", "interference", "exchange")
_CHANNEL_OF = {}
for _k in range(4):
    for _l in range(4):
        if (_k, _l) in ((0, 0), (2, 2)):
            _CHANNEL_OF[_k, _l] = "direct1"
        elif (_k, _l) in ((1, 1), (3, 3)):
            _CHANNEL_OF[_k, _l] = "direct2"
        elif (_k, _l) in ((0, 1), (1, 0), (2, 3), (3, 2)):
            _CHANNEL_OF[_k, _l] = "interference"
        else:
            _CHANNEL_OF[_k, _l] = "exchange"


@dataclass(frozen=True)
class IntegrationConfig:
    gh_order: int = 3
    theta_cone: float = None
    cone_factor: float = 1.5
    cone_panels: int = 4
    phi_count: int = 64
    outer_panels: int = 2
    outer_phi_count: int = 16
    nodes_per_cycle: int = 32
    min_panels: int = 32
    spin_basis: str = "rest-z"
    tolerance: float = 0.05
    chunk: int = 16384

    def grid(self, packets, pulse):
        theta = self.theta_cone
        if theta is None:
            theta = cone_angle(packets[0].mu, pulse.xi, M_E, self.cone_factor)
        return AngularGrid(theta, self.cone_panels, self.phi_count, self.outer_panels, self.outer_phi_count)


@dataclass
class SpectrumPoint:
    omega: float
    value: float
    error: float
    channels: dict = field(default_factory=dict)
    channel_errors: dict = field(default_factory=dict)
    flagged: bool = False


def photon_momenta(omega, directions):
    directions = np.asarray(directions, dtype=float)
    return omega * np.concatenate([np.ones(directions.shape[:-1] + (1,)), directions], axis=-1)


def emission_amplitudes(pp3, k, pulse, cfg):
    """A = M/(2 q_-) for final momenta pp3 (N, 3) and photons k (N, 4).

    Returns (A[i, s', l', s], q, pp) with q the recoil-fixed initial momentum.
    """
    pp = on_shell(pp3)
    q = volkov.recoil_momentum(pp, k)
    out = np.empty((len(pp), 2, 2, 2), dtype=complex)
    for s in range(0, len(pp), cfg.chunk):
        sl = slice(s, s + cfg.chunk)
        out[sl] = volkov.reduced_amplitudes(
            q[sl], pp[sl], k[sl], pulse, basis=cfg.spin_basis,
            nodes_per_cycle=cfg.nodes_per_cycle, min_panels=cfg.min_panels,
        )
    return out / (2 * minus(q))[:, None, None, None], q, pp


def term_factors(x3, y3, k, final_spins, pol, packets, pulse, spins, cfg=IntegrationConfig()):
    """Pointwise x- and y-factors of T1..T4, each of shape (4, N).

    ``final_spins`` = (s1', s2') and ``spins`` = (s1, s2) are +-1 labels,
    ``pol`` the photon polarization index.
    """
    ax, qx, _ = emission_amplitudes(np.atleast_2d(x3), k, pulse, cfg)
    ay, qy, _ = emission_amplitudes(np.atleast_2d(y3), k, pulse, cfg)
    fin = [SPINS.index(s) for s in final_spins]
    ini = [SPINS.index(s) for s in spins]

    def factor(desc, pts, q, amp, final):
        kind, a, src = desc
        pk = packets[a]
        if kind == "A":
            return pk.rho(q[:, 1:]) * amp[:, final, pol, ini[src]]
        return pk.rho(pts) * (final == ini[src])

    fx = np.array([factor(d, np.atleast_2d(x3), qx, ax, fin[0]) for d in _X_FACTORS])
    fy = np.array([factor(d, np.atleast_2d(y3), qy, ay, fin[1]) for d in _Y_FACTORS])
    return fx, fy


def amplitude_S12(x3, y3, k, final_spins, pol, packets, pulse, spins=None, cfg=IntegrationConfig()):
    """S12 = C [T1 + T2] with |C|^2 = 4 pi alpha/N, for final momenta x, y.

    Vectorized over the leading axis of ``x3``, ``y3`` and ``k``.
    """
    if spins is None:
        spins = (packets[0].spin, packets[1].spin)
    norm = overlap_Nij(packets[0].with_(spin=spins[0]), packets[1].with_(spin=spins[1])).n
    fx, fy = term_factors(x3, y3, k, final_spins, pol, packets, pulse, spins, cfg)
    return 1j * np.sqrt(4 * np.pi * ALPHA / norm) * (fx[0] * fy[0] + fx[1] * fy[1])


def amplitude_S21(x3, y3, k, final_spins, pol, packets, pulse, spins=None, cfg=IntegrationConfig()):
    """Exchange amplitude: S12 with p1' <-> p2' and s1' <-> s2' (hence q1 <-> q2)."""
    return amplitude_S12(y3, x3, k, final_spins[::-1], pol, packets, pulse, spins, cfg)


def _product_center(ca, sa, cb, sb):
    wa, wb = 1 / sa**2, 1 / sb**2
    return (ca * wa + cb * wb) / (wa + wb), np.sqrt(2 / (wa + wb))


def _rho_factor(packet, mag_point, phase_point):
    """Pieces of rho = scale sqrt(2 eps G) exp(-i p.r): (log|.| , phase)."""
    eps = on_shell(mag_point)[..., 0]
    logmag = np.log(packet.scale) + 0.5 * (np.log(2 * eps) + packet.log_density(mag_point))
    return logmag, -(phase_point @ packet.r)


class _DirectionBlock:
    """Per-direction Gram ingredients K_AA, K_AR and overlaps for one omega'."""

    def __init__(self, packets, pulse, k, cfg, recoil="full"):
        self.packets = packets
        self.k = k
        n_dir = len(k)
        shifts = []
        for pk in packets:
            p0 = np.broadcast_to(on_shell(pk.mu), (n_dir, 4))
            q0 = volkov.recoil_momentum(p0, k)
            shifts.append(q0[:, 1:] - p0[:, 1:] if recoil == "full" else np.zeros((n_dir, 3)))
        self.k_aa = {}
        self.k_ar = {}
        sets = {}
        for a in range(2):
            for b in range(2):
                pa, pb = packets[a], packets[b]
                ca, cs = _product_center(pa.mu - shifts[a], pa.sig, pb.mu - shifts[b], pb.sig)
                sets[("AA", a, b)] = (ca, cs)
                ca, cs = _product_center(pa.mu - shifts[a], pa.sig, np.broadcast_to(pb.mu, (n_dir, 3)), pb.sig)
                sets[("AR", a, b)] = (ca, cs)
        evaluated = []
        for key, (center, sig) in sets.items():
            reuse = None
            for prev_center, prev_sig, data in evaluated:
                if np.array_equal(prev_sig, sig) and np.array_equal(prev_center, center):
                    reuse = data
                    break
            if reuse is None:
                nodes, w = hermite_nodes(center, sig, cfg.gh_order)
                n_nodes = nodes.shape[1]
                kk = np.repeat(k, n_nodes, axis=0)
                amp, q, pp = emission_amplitudes(nodes.reshape(-1, 3), kk, pulse, cfg)
                # log of (node density / quadrature weight): dividing by it turns the
                # weighted sum into a plain integral
                logw = gaussian_log_density(nodes, center[:, None, :], sig) - np.log(w)[None, :]
                reuse = dict(
                    amp=amp.reshape(n_dir, n_nodes, 2, 2, 2),
                    q3=q[:, 1:].reshape(n_dir, n_nodes, 3),
                    p3=nodes,
                    eps=pp[:, 0].reshape(n_dir, n_nodes),
                    logw=logw,
                    k=kk.reshape(n_dir, n_nodes, 4),
                )
                evaluated.append((center, sig, reuse))
            kind, a, b = key
            if kind == "AA":
                self.k_aa[a, b] = self._integral_aa(reuse, packets[a], packets[b], recoil)
            else:
                self.k_ar[a, b] = self._integral_ar(reuse, packets[a], packets[b], recoil)
        self.overlaps = {(a, b): overlap(packets[a], packets[b]) for a in range(2) for b in range(2)}

    @staticmethod
    def _q_points(data, recoil):
        if recoil == "full":
            return data["q3"], data["q3"]
        # recoil neglected in |rho|, kept to linear order in the phase
        p3, k = data["p3"], data["k"]
        pp4 = on_shell(p3)
        coef = volkov.light_front_dot(k, pp4) / minus(pp4)
        lin = k[..., 1:].copy()
        lin[..., 2] -= coef
        return p3, p3 + lin

    def _integral_aa(self, data, pa, pb, recoil):
        mag, ph = self._q_points(data, recoil)
        la, fa = _rho_factor(pa, mag, ph)
        lb, fb = _rho_factor(pb, mag, ph)
        f = np.exp(la + lb - data["logw"] + 1j * (fa - fb)) / (TWO_PI3 * 2 * data["eps"])
        amp = data["amp"]
        return np.einsum("dn,dnals,dnalt->dlast", f, amp, np.conj(amp), optimize=True)

    def _integral_ar(self, data, pa, pb, recoil):
        mag, ph = self._q_points(data, recoil)
        la, fa = _rho_factor(pa, mag, ph)
        lb, fb = _rho_factor(pb, data["p3"], data["p3"])
        f = np.exp(la + lb - data["logw"] + 1j * (fa - fb)) / (TWO_PI3 * 2 * data["eps"])
        return np.einsum("dn,dnals->dlas", f, data["amp"], optimize=True)

    def gram(self, fx, gx, spins, sigma, pol):
        """int dmu f g^* for factor descriptors at final spin ``sigma``."""
        fk, fa, fsrc = fx
        gk, ga, gsrc = gx
        fs = SPINS.index(spins[fsrc])
        gs = SPINS.index(spins[gsrc])
        if fk == "A" and gk == "A":
            return self.k_aa[fa, ga][:, pol, sigma, fs, gs]
        if fk == "A":
            return (sigma == gs) * self.k_ar[fa, ga][:, pol, sigma, fs]
        if gk == "A":
            return (sigma == fs) * np.conj(self.k_ar[ga, fa][:, pol, sigma, gs])
        return np.full(len(self.k), (sigma == fs) * (sigma == gs) * self.overlaps[fa, ga])

    def channels(self, spins, terms=range(4)):
        """Per-direction sum over final spins and polarization, by channel."""
        out = {c: np.zeros(len(self.k)) for c in CHANNELS}
        for s1p in range(2):
            for s2p in range(2):
                for pol in range(2):
                    gx = {}
                    gy = {}
                    for kk in terms:
                        for ll in terms:
                            gx[kk, ll] = self.gram(_X_FACTORS[kk], _X_FACTORS[ll], spins, s1p, pol)
                            gy[kk, ll] = self.gram(_Y_FACTORS[kk], _Y_FACTORS[ll], spins, s2p, pol)
                    for kk in terms:
                        for ll in terms:
                            val = _SIGN[kk] * _SIGN[ll] * gx[kk, ll] * gy[kk, ll]
                            out[_CHANNEL_OF[kk, ll]] += val.real
        return out


def _spin_assignments(packets, spin_mode):
    if spin_mode == "resolved":
        return [(packets[0].spin, packets[1].spin)]
    if spin_mode == "summed":
        return [(a, b) for a in SPINS for b in SPINS]
    raise ValueError(f"unknown spin mode {spin_mode!r}")


def _finish(omega, grid, per_dir, tol):
    channels, errs = {}, {}
    for c, v in per_dir.items():
        channels[c], errs[c] = (float(x) for x in grid.integrate(v))
    total_dir = sum(per_dir.values())
    total, err = (float(x) for x in grid.integrate(total_dir))
    flagged = bool(err > tol * abs(total)) or total < -3 * err
    return SpectrumPoint(omega, total, err, channels, errs, flagged)


def _two_electron(packets, pulse, omegas, cfg, spin_mode, distinguishable, recoil):
    packets = tuple(packets)
    assignments = _spin_assignments(packets, spin_mode)
    norms = []
    for s1, s2 in assignments:
        norms.append(overlap_Nij(packets[0].with_(spin=s1), packets[1].with_(spin=s2)))
    grid = cfg.grid(packets, pulse)
    points = []
    for omega in np.atleast_1d(omegas):
        if omega <= 0:
            raise ValueError("omega' must be positive")
        k = photon_momenta(omega, grid.directions)
        block = _DirectionBlock(packets, pulse, k, cfg, recoil)
        per_dir = {c: np.zeros(len(grid)) for c in CHANNELS}
        for spins, norm in zip(assignments, norms):
            if distinguishable:
                part = block.channels(spins, terms=range(2))
                pref = 2 * omega**2 / 4 * 4 * np.pi * ALPHA / norm.n12 / TWO_PI3
            else:
                part = block.channels(spins)
                pref = omega**2 / 4 * 4 * np.pi * ALPHA / norm.n / TWO_PI3
            for c in CHANNELS:
                per_dir[c] += pref * part[c] / len(assignments)
        points.append(_finish(float(omega), grid, per_dir, cfg.tolerance))
    return points


def quantum_spectrum(packets, pulse, omegas, cfg=IntegrationConfig(), spin_mode="summed", recoil="full"):
    """dE_Q/domega' of the anti-symmetrized two-electron state.

    ``spin_mode="summed"`` averages over the four initial spin assignments as
    the two-electron spectrum formula prescribes; ``"resolved"`` uses the spins
    carried by the packets.  ``recoil="neglected"`` replaces rho(q) by rho(p')
    keeping the recoil only linearly in the translation phase (the classical
    correspondence).
    """
    return _two_electron(packets, pulse, omegas, cfg, spin_mode, False, recoil)


def distinguishable_spectrum(packets, pulse, omegas, cfg=IntegrationConfig(), spin_mode="summed"):
    """Spectrum with |S|^2 -> 2 (N/N12) |S12|^2 (no exchange)."""
    return _two_electron(packets, pulse, omegas, cfg, spin_mode, True, "full")


def single_electron_spectrum(packet, pulse, omegas, cfg=IntegrationConfig()):
    """Spin-averaged one-electron spectrum averaged over rho^2/2eps."""
    grid = cfg.grid((packet,), pulse)
    nodes, w = hermite_nodes(packet.mu, packet.sig, cfg.gh_order)
    n_nodes = len(w)
    q = on_shell(nodes)
    points = []
    for omega in np.atleast_1d(omegas):
        k = photon_momenta(omega, grid.directions)
        kk = np.repeat(k, n_nodes, axis=0)
        qq = np.tile(q, (len(k), 1))
        ppm = minus(qq) - minus(kk)
        ok = ppm > 0
        vals = np.zeros(len(kk))
        if np.any(ok):
            pp = from_light_cone(qq[ok, 1:3] - kk[ok, 1:3], ppm[ok])
            m2 = np.empty(int(ok.sum()))
            for s in range(0, len(pp), cfg.chunk):
                sl = slice(s, s + cfg.chunk)
                m = volkov.reduced_amplitudes(
                    qq[ok][sl], pp[sl], kk[ok][sl], pulse, basis=cfg.spin_basis,
                    nodes_per_cycle=cfg.nodes_per_cycle, min_panels=cfg.min_panels,
                )
                m2[sl] = 0.5 * np.sum(np.abs(m) ** 2, axis=(1, 2, 3))
            vals[ok] = m2 / (minus(qq[ok]) * ppm[ok])
        per_dir = ALPHA * omega**2 / (16 * np.pi**2) * (vals.reshape(len(k), n_nodes) @ w)
        total, err = (float(x) for x in grid.integrate(per_dir))
        points.append(
            SpectrumPoint(float(omega), total, err, {"direct1": total}, {"direct1": err}, bool(err > cfg.tolerance * abs(total)))
        )
    return points


def brute_force_spectrum(packets, pulse, omega, samples, seed, cfg=IntegrationConfig(), spin_mode="summed", batch=4096):
    """Direct Monte Carlo of the full 8D integral of |S|^2 (test oracle).

    Directions are drawn from a cone/sphere mixture and each final momentum
    from a mixture of the packet Gaussians centred at the packet mean and at
    the recoil-shifted mean.  No factorization is used.
    Returns (value, standard error).
    """
    packets = tuple(packets)
    assignments = _spin_assignments(packets, spin_mode)
    norms = [overlap_Nij(packets[0].with_(spin=a), packets[1].with_(spin=b)).n for a, b in assignments]
    theta_c = cfg.grid(packets, pulse).theta_cone
    cap = 2 * np.pi * (1 - np.cos(theta_c))
    rng = substream(seed, 0)
    sums = []
    done = 0
    while done < samples:
        nb = min(batch, samples - done)
        done += nb
        # directions: half from the cap, half from the full sphere
        in_cap = rng.random(nb) < 0.5
        u = rng.random(nb)
        cos_t = np.where(in_cap, 1 - u * (1 - np.cos(theta_c)), 1 - 2 * u)
        phi = 2 * np.pi * rng.random(nb)
        sin_t = np.sqrt(np.clip(1 - cos_t**2, 0, None))
        dirs = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), -cos_t], axis=1)
        dens_dir = 0.5 * (cos_t >= np.cos(theta_c)) / cap + 0.5 / (4 * np.pi)
        k = photon_momenta(omega, dirs)
        comps = []
        for pk in packets:
            p0 = np.broadcast_to(on_shell(pk.mu), (nb, 4))
            shift = volkov.recoil_momentum(p0, k)[:, 1:] - p0[:, 1:]
            comps.append((np.broadcast_to(pk.mu, (nb, 3)), pk.sig))
            comps.append((pk.mu - shift, pk.sig))
        finals = []
        for _ in range(2):
            pick = rng.integers(0, len(comps), nb)
            z = rng.standard_normal((nb, 3))
            x = np.empty((nb, 3))
            for c, (mu, sig) in enumerate(comps):
                sel = pick == c
                x[sel] = mu[sel] + z[sel] * sig
            logq = np.logaddexp.reduce(
                [gaussian_log_density(x, mu, sig) for mu, sig in comps], axis=0
            ) - np.log(len(comps))
            amp, q, pp = emission_amplitudes(x, k, pulse, cfg)
            finals.append((x, amp, q, pp, logq))
        (x, ax, qx, ppx, lx), (y, ay, qy, ppy, ly) = finals

        def rho(pk, pts):
            return pk.rho(pts)

        r1x, r2x = rho(packets[0], x), rho(packets[1], x)
        r1y, r2y = rho(packets[0], y), rho(packets[1], y)
        r1qx, r2qx = rho(packets[0], qx[:, 1:]), rho(packets[1], qx[:, 1:])
        r1qy, r2qy = rho(packets[0], qy[:, 1:]), rho(packets[1], qy[:, 1:])
        meas = 1 / (TWO_PI3 * 2 * ppx[:, 0]) / (TWO_PI3 * 2 * ppy[:, 0])
        weight = meas / (dens_dir * np.exp(lx + ly))
        acc = np.zeros(nb)
        for (s1, s2), norm in zip(assignments, norms):
            i1, i2 = SPINS.index(s1), SPINS.index(s2)
            for a in range(2):
                for b in range(2):
                    for pol in range(2):
                        t1 = r1qx * ax[:, a, pol, i1] * r2y * (b == i2)
                        t2 = r1x * (a == i1) * r2qy * ay[:, b, pol, i2]
                        t3 = r2x * (a == i2) * r1qy * ay[:, b, pol, i1]
                        t4 = r2qx * ax[:, a, pol, i2] * r1y * (b == i1)
                        acc += np.abs(t1 + t2 - t3 - t4) ** 2 * 4 * np.pi * ALPHA / norm / len(assignments)
        sums.append(acc * weight)
    vals = np.concatenate(sums) * omega**2 / 4 / TWO_PI3
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(len(vals)))
