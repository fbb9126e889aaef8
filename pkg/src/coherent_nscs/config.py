"""Run configuration: YAML schema, validation and resolution into engine objects."""

import copy
import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .laser import ENVELOPES, LaserPulse
from .quantum import IntegrationConfig
from .wavepackets import GaussianPacket, PauliForbiddenError, overlap_Nij

CURVES = ("quantum", "classical", "single", "distinguishable")

DEFAULTS = {
    "laser": {"envelope": "sin4", "envelope_params": {}},
    "spectrum": {"scale": "log"},
    "integration": {
        "samples": 16,
        "gh_order": 3,
        "theta_cone": None,
        "cone_factor": 1.5,
        "cone_panels": 4,
        "phi_count": 64,
        "outer_panels": 2,
        "outer_phi_count": 16,
        "nodes_per_cycle": 32,
        "tolerance": 0.05,
        "workers": 1,
        "spin_mode": "resolved",
        "spin_basis": "rest-z",
    },
    "outputs": {"curves": list(CURVES), "csv": "spectrum.csv", "report": "report.json"},
}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads 1e5 / 1.0e-3 style floats (YAML 1.2)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


class ConfigError(ValueError):
    """All validation problems of a configuration, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class RunConfig:
    raw: dict
    pulse: LaserPulse
    packets: tuple
    omegas: np.ndarray
    integration: IntegrationConfig
    samples: int
    seed: int
    workers: int
    spin_mode: str
    curves: tuple
    csv_name: str
    report_name: str

    @property
    def digest(self):
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _merge(defaults, given):
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _number(errors, where, value, positive=True, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{where}: expected a number, got {value!r}")
        return None
    if not np.isfinite(value):
        errors.append(f"{where}: must be finite")
        return None
    if positive and (value < 0 or (value == 0 and not allow_zero)):
        errors.append(f"{where}: must be {'non-negative' if allow_zero else 'positive'}, got {value!r}")
        return None
    return float(value)


def _vector(errors, where, value):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        errors.append(f"{where}: expected a list of three numbers")
        return None
    out = [_number(errors, f"{where}[{i}]", v, positive=False) for i, v in enumerate(value)]
    return None if any(v is None for v in out) else out


def _require(errors, block, name, key):
    if key not in block or block[key] is None:
        errors.append(f"{name}.{key}: missing")
        return False
    return True


def validate(raw):
    """Resolve a raw mapping into a RunConfig or raise ConfigError."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a mapping"])
    for key in raw:
        if key not in ("laser", "packets", "spectrum", "integration", "outputs"):
            errors.append(f"{key}: unknown section")
    cfg = _merge(DEFAULTS, raw)

    laser = cfg["laser"]
    omega = _number(errors, "laser.omega", laser["omega"]) if _require(errors, laser, "laser", "omega") else None
    xi = _number(errors, "laser.xi", laser["xi"], allow_zero=True) if _require(errors, laser, "laser", "xi") else None
    if laser["envelope"] not in ENVELOPES:
        errors.append(f"laser.envelope: unknown envelope {laser['envelope']!r}; registered: {', '.join(sorted(ENVELOPES))}")

    packets = cfg.get("packets")
    resolved_packets = []
    if not isinstance(packets, list) or len(packets) != 2:
        errors.append("packets: expected a list of two packet blocks")
        packets = []
    for i, pk in enumerate(packets):
        name = f"packets[{i}]"
        if not isinstance(pk, dict):
            errors.append(f"{name}: expected a mapping")
            continue
        mean = _vector(errors, f"{name}.mean", pk["mean"]) if _require(errors, pk, name, "mean") else None
        sp = _number(errors, f"{name}.sigma_perp", pk["sigma_perp"]) if _require(errors, pk, name, "sigma_perp") else None
        sl = _number(errors, f"{name}.sigma_par", pk["sigma_par"]) if _require(errors, pk, name, "sigma_par") else None
        shift = _vector(errors, f"{name}.shift", pk.get("shift", [0.0, 0.0, 0.0]))
        spin = pk.get("spin", 1)
        if spin not in (1, -1):
            errors.append(f"{name}.spin: must be +1 or -1, got {spin!r}")
        if mean is not None and mean[2] - np.sqrt(sum(v * v for v in mean) + 0.510998950e6**2) >= 0:
            errors.append(f"{name}.mean: electron must have p_- > 0")
        if None not in (mean, sp, sl, shift) and spin in (1, -1):
            resolved_packets.append(GaussianPacket.from_widths(mean, sp, sl, shift, spin))

    spec = cfg.get("spectrum", {})
    omegas = None
    if all(_require(errors, spec, "spectrum", k) for k in ("min", "max", "count")):
        lo = _number(errors, "spectrum.min", spec["min"])
        hi = _number(errors, "spectrum.max", spec["max"])
        count = spec["count"]
        if not isinstance(count, int) or count < 1:
            errors.append("spectrum.count: must be a positive integer")
        elif lo is not None and hi is not None:
            if hi < lo:
                errors.append("spectrum.max: must not be below spectrum.min")
            elif spec["scale"] == "log":
                omegas = np.geomspace(lo, hi, count)
            elif spec["scale"] == "linear":
                omegas = np.linspace(lo, hi, count)
            else:
                errors.append(f"spectrum.scale: expected 'log' or 'linear', got {spec['scale']!r}")

    integ = cfg["integration"]
    if not _require(errors, integ, "integration", "seed"):
        seed = None
    elif not isinstance(integ["seed"], int) or integ["seed"] < 0:
        errors.append("integration.seed: must be a non-negative integer")
        seed = None
    else:
        seed = integ["seed"]
    for key in ("samples", "gh_order", "cone_panels", "phi_count", "outer_phi_count", "nodes_per_cycle", "workers"):
        if not isinstance(integ[key], int) or integ[key] < 1:
            errors.append(f"integration.{key}: must be a positive integer")
    if not isinstance(integ["outer_panels"], int) or integ["outer_panels"] < 0:
        errors.append("integration.outer_panels: must be a non-negative integer")
    for key in ("phi_count", "outer_phi_count"):
        if isinstance(integ[key], int) and integ[key] % 2:
            errors.append(f"integration.{key}: must be even")
    if isinstance(integ["samples"], int) and integ["samples"] == 1:
        errors.append("integration.samples: need at least two samples for an error estimate")
    _number(errors, "integration.tolerance", integ["tolerance"])
    _number(errors, "integration.cone_factor", integ["cone_factor"])
    if integ["theta_cone"] is not None:
        th = _number(errors, "integration.theta_cone", integ["theta_cone"])
        if th is not None and th > np.pi:
            errors.append("integration.theta_cone: must not exceed pi")
    if integ["spin_mode"] not in ("resolved", "summed"):
        errors.append(f"integration.spin_mode: expected 'resolved' or 'summed', got {integ['spin_mode']!r}")
    if integ["spin_basis"] not in ("rest-z", "helicity"):
        errors.append(f"integration.spin_basis: expected 'rest-z' or 'helicity', got {integ['spin_basis']!r}")

    out = cfg["outputs"]
    curves = out.get("curves", [])
    if not isinstance(curves, list) or not curves:
        errors.append("outputs.curves: expected a non-empty list")
        curves = []
    for c in curves:
        if c not in CURVES:
            errors.append(f"outputs.curves: unknown curve {c!r}; available: {', '.join(CURVES)}")

    if len(resolved_packets) == 2 and integ["spin_mode"] in ("resolved", "summed"):
        a, b = resolved_packets
        pairs = [(a.spin, b.spin)] if integ["spin_mode"] == "resolved" else [(1, 1), (-1, -1)]
        for s1, s2 in pairs:
            try:
                overlap_Nij(a.with_(spin=s1), b.with_(spin=s2))
            except PauliForbiddenError as exc:
                errors.append(f"packets: {exc}")
                break

    if errors:
        raise ConfigError(errors)

    pulse = LaserPulse(omega, xi, laser["envelope"], dict(laser["envelope_params"]))
    integration = IntegrationConfig(
        gh_order=integ["gh_order"],
        theta_cone=integ["theta_cone"],
        cone_factor=float(integ["cone_factor"]),
        cone_panels=integ["cone_panels"],
        phi_count=integ["phi_count"],
        outer_panels=integ["outer_panels"],
        outer_phi_count=integ["outer_phi_count"],
        nodes_per_cycle=integ["nodes_per_cycle"],
        spin_basis=integ["spin_basis"],
        tolerance=float(integ["tolerance"]),
    )
    return RunConfig(
        raw=cfg,
        pulse=pulse,
        packets=tuple(resolved_packets),
        omegas=omegas,
        integration=integration,
        samples=integ["samples"],
        seed=seed,
        workers=integ["workers"],
        spin_mode=integ["spin_mode"],
        curves=tuple(c for c in CURVES if c in curves),
        csv_name=out["csv"],
        report_name=out["report"],
    )


def load_config(path, overrides=None):
    """Read and validate a YAML run configuration.

    ``overrides`` maps integration keys (samples, seed, workers) to values
    replacing those in the file.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with path.open() as fh:
        raw = yaml.load(fh, Loader=_Loader) or {}
    if overrides:
        raw = copy.deepcopy(raw)
        block = raw.setdefault("integration", {})
        block.update({k: v for k, v in overrides.items() if v is not None})
    return validate(raw)


def preset_path(name):
    """Path of a bundled preset (fig2, fig3a ... fig3d)."""
    path = Path(__file__).parent / "presets" / f"{name}.yaml"
    if not path.exists():
        available = sorted(p.stem for p in path.parent.glob("*.yaml"))
        raise FileNotFoundError(f"no preset {name!r}; available: {', '.join(available)}")
    return path
