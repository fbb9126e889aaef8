"""Classical radiation of one or two electrons crossing the pulse.

The frequency-domain radiation amplitude of an emitter is evaluated in the
velocity form

    dE/domega' dOmega = (alpha omega'^2 / 4 pi^2) |n' x (n' x sum_j J_j)|^2,
    J_j = int dphi pi_j(phi)/p_- exp(i omega' (n'x_j(phi))),

where pi/p_- is a quadratic polynomial in the envelope, so J reduces to the
same three phase integrals B0, B1, B2 as the quantum amplitude.  B0 is fixed
by the phase identity lam B0 + a B1 + b B2 = 0, which is the integration by
parts turning this form into the acceleration (Lienard-Wiechert) form with
its compactly supported integrand.  ``acceleration_form_vector`` evaluates
the latter directly and serves as the check.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import volkov
from .angular import AngularGrid
from .kinematics import ALPHA, E_CHARGE, M_E, N_LASER, dot, minus, on_shell
from .laser import composite_gauss, kinetic_momentum, momentum_coefficients, trajectory
from .quantum import CHANNELS, IntegrationConfig, SpectrumPoint
from .wavepackets import substream


@dataclass(frozen=True)
class ClassicalEmitter:
    """Electron with initial momentum ``momentum`` (3-vector) at ``position`` when t = 0."""

    momentum: tuple
    position: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "momentum", tuple(float(v) for v in self.momentum))
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        if minus(self.p4) <= 0:
            raise ValueError("emitter must have p_- > 0")

    @property
    def p4(self):
        return on_shell(np.array(self.momentum))

    @property
    def r(self):
        return np.array(self.position)


def _null_directions(directions):
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    return np.concatenate([np.ones((len(directions), 1)), directions], axis=1)


def phase_coefficients(p, directions, pulse):
    """(lam, a, b) per unit omega' of (n'x(phi)) = lam phi + a I1 + b I2 + const."""
    nn = _null_directions(directions)
    pm = minus(p)
    c1, c2 = momentum_coefficients(p, pulse)
    nn_n = dot(nn, N_LASER)
    lam = dot(nn, p) / pm
    a = (-E_CHARGE * dot(nn, pulse.amplitude) + nn_n * c1) / pm
    b = nn_n * c2 / pm
    return lam, a, b


def initial_phase(emitter, directions):
    """Phi(0) = [(n'p)/p_- z - n'] . r for free motion up to the pulse front."""
    nn = _null_directions(directions)
    p = emitter.p4
    coef = dot(nn, p) / minus(p)
    return coef * emitter.r[2] - nn[:, 1:] @ emitter.r


def coherence_phase(emitter, pulse, direction, phi):
    """Phi(phi) from the closed-form light-cone integrals of the motion."""
    lam, a, b = (v[0] for v in phase_coefficients(emitter.p4, direction, pulse))
    i1, i2 = pulse.integrals(phi)
    return initial_phase(emitter, direction)[0] + lam * np.asarray(phi) + a * i1 + b * i2


def coherence_phase_transverse(emitter, pulse, direction, phi, panels_per_cycle=64):
    """Phi(phi) from Phi(0) + (n'_-/2) int [m^2 + P_perp(phi)^2]/p_-^2.

    P_perp is the transverse kinetic momentum offset by p_- n'_perp/n'_-;
    evaluated by Gauss-Legendre quadrature on [0, phi] as an independent route.
    """
    nn = _null_directions(direction)[0]
    p = emitter.p4
    pm = minus(p)
    nm = minus(nn)
    offset = p[1:3] - pm * nn[1:3] / nm
    out = []
    for upper in np.atleast_1d(phi):
        n_panels = max(8, int(np.ceil(panels_per_cycle * upper * pulse.omega / (2 * np.pi))))
        x, w = composite_gauss(0.0, float(upper), n_panels)
        perp = offset - E_CHARGE * pulse.amplitude[1:3] * pulse.psi(x)[:, None]
        out.append(0.5 * nm * np.sum(w * (M_E**2 + np.sum(perp**2, axis=1))) / pm**2)
    return initial_phase(emitter, direction)[0] + np.array(out)


def radiation_vectors(p, directions, omega, pulse, cfg=IntegrationConfig()):
    """n' x (n' x J) for one electron of momentum p, phase origin at phi = 0."""
    directions = np.atleast_2d(directions)
    lam, a, b = phase_coefficients(p, directions, pulse)
    b0, b1, b2 = volkov.master_integrals(
        omega * lam, omega * a, omega * b, pulse, cfg.nodes_per_cycle, cfg.min_panels
    )
    c1, c2 = momentum_coefficients(p, pulse)
    vec = (
        np.outer(b0, p[1:])
        - E_CHARGE * np.outer(b1, pulse.amplitude[1:])
        + np.outer(c1 * b1 + c2 * b2, N_LASER[1:])
    ) / minus(p)
    return np.cross(directions, np.cross(directions, vec))


def acceleration_form_vector(p, direction, omega, pulse, n_panels=None):
    """int dphi n' x [(n'-beta) x dbeta/dphi]/(1-n'.beta)^2 e^{i omega' (n'x)} (oracle)."""
    direction = np.asarray(direction, dtype=float)
    if n_panels is None:
        lam, a, b = phase_coefficients(p, direction[None], pulse)
        n_panels = int(volkov.panels_for(omega * lam, omega * a, omega * b, pulse, 64, 64)[0])
    phi, w = composite_gauss(0.0, pulse.phi_end, n_panels)
    pi = kinetic_momentum(p, pulse, phi)
    c1, c2 = momentum_coefficients(p, pulse)
    psi = pulse.psi(phi)[:, None]
    dpi = pulse.dpsi(phi)[:, None] * (-E_CHARGE * pulse.amplitude + N_LASER * (c1 + 2 * c2 * psi))
    beta = pi[:, 1:] / pi[:, :1]
    dbeta = (dpi[:, 1:] * pi[:, :1] - pi[:, 1:] * dpi[:, :1]) / pi[:, :1] ** 2
    num = np.cross(direction, np.cross(direction - beta, dbeta))
    den = (1 - beta @ direction) ** 2
    x = trajectory(p, np.zeros(4), pulse, phi)
    phase = omega * (x[:, 0] - x[:, 1:] @ direction)
    return np.sum((w / den)[:, None] * num * np.exp(1j * phase)[:, None], axis=0)


def _emitter_amplitudes(emitters, directions, omega, pulse, cfg):
    out = []
    for em in emitters:
        vec = radiation_vectors(em.p4, directions, omega, pulse, cfg)
        out.append(vec * np.exp(1j * omega * initial_phase(em, directions))[:, None])
    return out


def _channels_per_direction(amps, omega):
    pref = ALPHA * omega**2 / (4 * np.pi**2)
    ch = {c: None for c in CHANNELS}
    ch["direct1"] = pref * np.sum(np.abs(amps[0]) ** 2, axis=1)
    if len(amps) > 1:
        ch["direct2"] = pref * np.sum(np.abs(amps[1]) ** 2, axis=1)
        ch["interference"] = pref * 2 * np.sum(amps[0] * np.conj(amps[1]), axis=1).real
    else:
        ch["direct2"] = np.zeros_like(ch["direct1"])
        ch["interference"] = np.zeros_like(ch["direct1"])
    ch["exchange"] = np.zeros_like(ch["direct1"])
    return ch


def _grid(cfg, mean, pulse):
    from .angular import cone_angle

    theta = cfg.theta_cone if cfg.theta_cone is not None else cone_angle(mean, pulse.xi, M_E, cfg.cone_factor)
    return AngularGrid(theta, cfg.cone_panels, cfg.phi_count, cfg.outer_panels, cfg.outer_phi_count)


def _integrated_channels(emitters, pulse, omegas, cfg, grid):
    """Angular-integrated channels and their quadrature errors per omega'."""
    vals = np.zeros((len(omegas), len(CHANNELS)))
    errs = np.zeros_like(vals)
    for i, omega in enumerate(omegas):
        per_dir = _channels_per_direction(_emitter_amplitudes(emitters, grid.directions, omega, pulse, cfg), omega)
        for j, c in enumerate(CHANNELS):
            vals[i, j], errs[i, j] = grid.integrate(per_dir[c])
    return vals, errs


def classical_point_spectrum(emitters, pulse, omegas, cfg=IntegrationConfig()):
    """Coherent spectrum of fixed emitters (amplitudes summed before squaring)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas <= 0):
        raise ValueError("omega' must be positive")
    grid = _grid(cfg, emitters[0].momentum, pulse)
    vals, errs = _integrated_channels(emitters, pulse, omegas, cfg, grid)
    points = []
    for i, omega in enumerate(omegas):
        total = float(vals[i].sum())
        err = float(np.sqrt(np.sum(errs[i] ** 2)))
        points.append(
            SpectrumPoint(
                float(omega), total, err,
                dict(zip(CHANNELS, map(float, vals[i]))),
                dict(zip(CHANNELS, map(float, errs[i]))),
                bool(err > cfg.tolerance * abs(total)),
            )
        )
    return points


def _ensemble_sample(args):
    index, packets, pulse, omegas, cfg, seed, grid = args
    rng = substream(seed, index)
    emitters = []
    for pk in packets:
        p3 = pk.mu + rng.standard_normal(3) * pk.sig
        emitters.append(ClassicalEmitter(p3, pk.shift))
    vals, _ = _integrated_channels(emitters, pulse, omegas, cfg, grid)
    return vals


def ensemble_classical_spectrum(packets, pulse, omegas, samples, seed, cfg=IntegrationConfig(), workers=1):
    """Monte Carlo average of the coherent spectrum over the packet momenta.

    Momenta are drawn from rho^2/2eps (a Gaussian) with one Philox substream
    per sample, so results do not depend on the worker count.  The direct1
    channel is the single-electron reference of the first packet.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas <= 0):
        raise ValueError("omega' must be positive")
    if samples < 2:
        raise ValueError("need at least two samples for an error estimate")
    packets = tuple(packets)
    grid = _grid(cfg, packets[0].mu, pulse)
    jobs = [(i, packets, pulse, omegas, cfg, seed, grid) for i in range(samples)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_ensemble_sample, jobs))
    else:
        results = [_ensemble_sample(j) for j in jobs]
    data = np.stack(results)  # (samples, omegas, channels)
    mean = data.mean(axis=0)
    sem = data.std(axis=0, ddof=1) / np.sqrt(samples)
    tot = data.sum(axis=2)
    tot_sem = tot.std(axis=0, ddof=1) / np.sqrt(samples)
    points = []
    for i, omega in enumerate(omegas):
        total = float(mean[i].sum())
        points.append(
            SpectrumPoint(
                float(omega), total, float(tot_sem[i]),
                dict(zip(CHANNELS, map(float, mean[i]))),
                dict(zip(CHANNELS, map(float, sem[i]))),
                bool(tot_sem[i] > cfg.tolerance * abs(total)),
            )
        )
    return points
