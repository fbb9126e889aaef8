"""Command-line runner: config -> spectra CSV + JSON report."""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .classical import ensemble_classical_spectrum
from .coherence import coherence_report
from .config import ConfigError, load_config, preset_path
from .quantum import distinguishable_spectrum, quantum_spectrum, single_electron_spectrum

CSV_COLUMNS = (
    "omega_prime_eV",
    "dE_quantum",
    "err_quantum",
    "dE_classical_avg",
    "err_classical",
    "dE_single",
    "err_single",
    "dE_distinguishable",
    "err_distinguishable",
)
_CURVE_COLUMNS = {
    "quantum": ("dE_quantum", "err_quantum"),
    "classical": ("dE_classical_avg", "err_classical"),
    "single": ("dE_single", "err_single"),
    "distinguishable": ("dE_distinguishable", "err_distinguishable"),
}


@dataclass
class RunReport:
    curves: dict
    coherence: dict
    provenance: dict
    flagged: list

    @property
    def ok(self):
        return not self.flagged


def _quantum_point(args):
    curve, packets, pulse, omega, integ, spin_mode = args
    if curve == "quantum":
        return quantum_spectrum(packets, pulse, [omega], integ, spin_mode)[0]
    if curve == "distinguishable":
        return distinguishable_spectrum(packets, pulse, [omega], integ, spin_mode)[0]
    return single_electron_spectrum(packets[0], pulse, [omega], integ)[0]


def _point_dict(pt):
    return {
        "omega_prime_eV": pt.omega,
        "value": pt.value,
        "error": pt.error,
        "channels": pt.channels,
        "channel_errors": pt.channel_errors,
        "flagged": pt.flagged,
    }


def run(config, out_dir, log=print):
    """Compute every requested curve and write the CSV and JSON report."""
    start = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    omegas = [float(w) for w in config.omegas]
    curves = {}

    jobs = []
    for curve in ("quantum", "single", "distinguishable"):
        if curve in config.curves:
            for w in omegas:
                jobs.append((curve, config.packets, config.pulse, w, config.integration, config.spin_mode))
    if jobs:
        log(f"quantum engine: {len(jobs)} grid points on {config.workers} worker(s)")
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_quantum_point, jobs))
        else:
            results = [_quantum_point(j) for j in jobs]
        for job, pt in zip(jobs, results):
            curves.setdefault(job[0], []).append(pt)
    if "classical" in config.curves:
        log(f"classical ensemble: {config.samples} samples")
        curves["classical"] = ensemble_classical_spectrum(
            config.packets, config.pulse, omegas, config.samples, config.seed, config.integration, config.workers
        )

    columns = {name: [""] * len(omegas) for name in CSV_COLUMNS}
    columns["omega_prime_eV"] = [repr(w) for w in omegas]
    for curve, pts in curves.items():
        val_col, err_col = _CURVE_COLUMNS[curve]
        columns[val_col] = [repr(float(p.value)) for p in pts]
        columns[err_col] = [repr(float(p.error)) for p in pts]
    lines = [",".join(CSV_COLUMNS)]
    for i in range(len(omegas)):
        lines.append(",".join(columns[c][i] for c in CSV_COLUMNS))
    (out_dir / config.csv_name).write_text("\n".join(lines) + "\n")

    flagged = [
        {"curve": curve, "omega_prime_eV": p.omega} for curve, pts in curves.items() for p in pts if p.flagged
    ]
    pk = config.packets[0]
    coherence = coherence_report(pk, config.packets[1].r - pk.r, config.pulse).as_dict()
    provenance = {
        "config_sha256": config.digest,
        "code_version": __version__,
        "seed": config.seed,
        "workers": config.workers,
        "wall_time_s": time.perf_counter() - start,
    }
    report = RunReport({c: [_point_dict(p) for p in pts] for c, pts in curves.items()}, coherence, provenance, flagged)
    payload = {
        "config": config.raw,
        "provenance": provenance,
        "coherence": coherence,
        "curves": report.curves,
        "flagged": flagged,
    }
    (out_dir / config.report_name).write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return report


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _resolve(path_or_preset):
    path = Path(path_or_preset)
    if path.exists():
        return path
    return preset_path(path_or_preset)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="coherent-nscs",
        description="Two-electron nonlinear Compton spectra: quantum, classical and coherence estimators.",
    )
    parser.add_argument("config", nargs="?", help="YAML config file or preset name (fig2, fig3a-d)")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--samples", type=int, help="override classical ensemble sample count")
    parser.add_argument("--seed", type=int, help="override the random seed")
    parser.add_argument("--workers", type=int, help="override the worker count")
    parser.add_argument("--check", action="store_true", help="run the fast invariant suite and exit")
    args = parser.parse_args(argv)

    if args.check:
        from .checks import run_checks

        return 0 if run_checks() else 1
    if args.config is None:
        parser.error("a config file or preset name is required unless --check is given")
    try:
        config = load_config(_resolve(args.config), {"samples": args.samples, "seed": args.seed, "workers": args.workers})
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def log(msg):
        print(msg, file=sys.stderr)

    try:
        report = run(config, args.out, log)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    print(f"wrote {out / config.csv_name} and {out / config.report_name}")
    if not report.ok:
        print(f"{len(report.flagged)} grid point(s) flagged as not converged", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
