"""Command-line front end: scenario configs, sweep orchestration, CSV output.

Every command loads a scenario config (a JSON file or one of the shipped
presets "bulk" / "nanocrystal"), applies per-command numeric overrides,
writes CSV data files, and drops a run manifest next to the main output.
Exit codes: 0 success, 2 validation error (the message names the offending
key), 1 runtime error.
"""

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .csvio import read_columns, write_columns
from .exceptions import ValidationError
from .geometry import NVOrientation, RotationScan, lab_to_nv, rotate_about_axis, rotation_scan_frequencies, unit
from .fitting import (
    DataSeries,
    fit_exponential,
    fit_lorentzian_dips,
    fit_piecewise_decay,
    fit_zeeman,
)
from .hamiltonian import SpinParams
from .rates import MicrowaveDrive, RateParams
from .sequence import (
    DecayHistogram,
    LaserPulse,
    MwPulse,
    PsExcitation,
    PulseSequence,
    Readout,
    Wait,
    rabi_curve,
    run_sequence,
    sequence_from_json,
)
from .spectra import OdmrDriveTemplate, lac_scan, odmr_spectrum, zeeman_scan

_SPIN_KEYS = {"d_zfs", "e_strain", "g_factor"}
_RATE_KEYS = {"pump_rate", "gamma_rad", "k_isc_0", "k_isc_1", "gamma_s", "branch_0"}
_DRIVE_KEYS = {"gs_rabi_mhz", "gs_fwhm_mhz", "es_rabi_mhz", "es_fwhm_mhz"}
_FIELD_KEYS_VECTOR = {"vector"}
_FIELD_KEYS_ANGULAR = {"magnitude", "axis", "misalignment_deg"}
_TOP_KEYS = {"gs_params", "es_params", "rate_params", "nv_orientation", "field", "drive", "output_dir"}


@dataclass
class ScenarioConfig:
    """Fully validated scenario: spin parameters, rates, geometry, drives."""

    gs_params: SpinParams
    es_params: SpinParams
    rate_params: RateParams
    orientation: NVOrientation
    field_spec: dict
    drive: OdmrDriveTemplate
    output_dir: Optional[str] = None

    def to_dict(self) -> dict:
        doc = {
            "gs_params": {
                "d_zfs": self.gs_params.d_zfs,
                "e_strain": self.gs_params.e_strain,
                "g_factor": self.gs_params.g_factor,
            },
            "es_params": {
                "d_zfs": self.es_params.d_zfs,
                "e_strain": self.es_params.e_strain,
                "g_factor": self.es_params.g_factor,
            },
            "rate_params": {
                "pump_rate": self.rate_params.pump_rate,
                "gamma_rad": self.rate_params.gamma_rad,
                "k_isc_0": self.rate_params.k_isc_0,
                "k_isc_1": self.rate_params.k_isc_1,
                "gamma_s": self.rate_params.gamma_s,
                "branch_0": self.rate_params.branch_0,
            },
            "nv_orientation": [float(v) for v in np.round(self.orientation.axis * np.sqrt(3.0), 12)],
            "field": dict(self.field_spec),
            "drive": {
                "gs_rabi_mhz": self.drive.gs_rabi,
                "gs_fwhm_mhz": self.drive.gs_fwhm,
                "es_rabi_mhz": self.drive.es_rabi,
                "es_fwhm_mhz": self.drive.es_fwhm,
            },
        }
        if self.output_dir is not None:
            doc["output_dir"] = self.output_dir
        return doc

    def b_lab(self) -> np.ndarray:
        spec = self.field_spec
        if "vector" in spec:
            return np.asarray(spec["vector"], dtype=float)
        direction = unit(spec["axis"])
        tilt = float(spec.get("misalignment_deg", 0.0))
        if tilt != 0.0:
            ref = np.array([1.0, -1.0, 0.0])
            perp = ref - np.dot(ref, direction) * direction
            if np.linalg.norm(perp) < 1e-9:
                ref = np.array([1.0, 0.0, -1.0])
                perp = ref - np.dot(ref, direction) * direction
            perp /= np.linalg.norm(perp)
            direction = rotate_about_axis(direction, perp, tilt)
        return float(spec["magnitude"]) * direction

    def b_nv(self) -> np.ndarray:
        return lab_to_nv(self.b_lab(), self.orientation)


def _reject_unknown(doc: dict, allowed: set, where: str):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ValidationError(f"{where}.{unknown[0]}: unknown key")


def _section(doc: dict, key: str, allowed: set) -> dict:
    section = doc.get(key, {})
    if not isinstance(section, dict):
        raise ValidationError(f"{key}: must be an object")
    _reject_unknown(section, allowed, key)
    return section


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Validate a config document and fill defaults for missing sections."""
    if not isinstance(doc, dict):
        raise ValidationError("config root must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "config")

    def spin(section_name, defaults):
        section = _section(doc, section_name, _SPIN_KEYS)
        merged = dict(defaults)
        merged.update(section)
        try:
            return SpinParams(**merged)
        except ValueError as exc:
            raise ValidationError(f"{section_name}: {exc}") from None

    gs = spin("gs_params", {"d_zfs": 2870.0, "e_strain": 0.0, "g_factor": 2.0028})
    es = spin("es_params", {"d_zfs": 1423.0, "e_strain": 0.0, "g_factor": 2.01})

    rate_section = _section(doc, "rate_params", _RATE_KEYS)
    try:
        rates = RateParams(**rate_section)
    except ValueError as exc:
        raise ValidationError(f"rate_params: {exc}") from None

    axis = doc.get("nv_orientation", [1, 1, 1])
    try:
        orientation = NVOrientation(axis=np.asarray(axis, dtype=float))
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"nv_orientation: {exc}") from None

    field = doc.get("field", {"vector": [0.0, 0.0, 0.0]})
    if not isinstance(field, dict):
        raise ValidationError("field: must be an object")
    if "vector" in field:
        _reject_unknown(field, _FIELD_KEYS_VECTOR, "field")
        vec = np.asarray(field["vector"], dtype=float)
        if vec.shape != (3,) or not np.isfinite(vec).all():
            raise ValidationError("field.vector: must be 3 finite numbers")
        field_spec = {"vector": [float(v) for v in vec]}
    else:
        _reject_unknown(field, _FIELD_KEYS_ANGULAR, "field")
        if "magnitude" not in field or "axis" not in field:
            raise ValidationError("field: needs either vector or magnitude+axis")
        mag = float(field["magnitude"])
        if not np.isfinite(mag) or mag < 0:
            raise ValidationError("field.magnitude: must be a finite non-negative number")
        ax = np.asarray(field["axis"], dtype=float)
        if ax.shape != (3,) or not np.isfinite(ax).all() or np.linalg.norm(ax) == 0:
            raise ValidationError("field.axis: must be a nonzero 3-vector")
        field_spec = {
            "magnitude": mag,
            "axis": [float(v) for v in ax],
            "misalignment_deg": float(field.get("misalignment_deg", 0.0)),
        }

    defaults = OdmrDriveTemplate()
    drive_section = _section(doc, "drive", _DRIVE_KEYS)
    drive = OdmrDriveTemplate(
        gs_rabi=float(drive_section.get("gs_rabi_mhz", defaults.gs_rabi)),
        gs_fwhm=float(drive_section.get("gs_fwhm_mhz", defaults.gs_fwhm)),
        es_rabi=float(drive_section.get("es_rabi_mhz", defaults.es_rabi)),
        es_fwhm=float(drive_section.get("es_fwhm_mhz", defaults.es_fwhm)),
    )
    if min(drive.gs_fwhm, drive.es_fwhm) <= 0:
        raise ValidationError("drive: linewidths must be > 0")
    if min(drive.gs_rabi, drive.es_rabi) < 0:
        raise ValidationError("drive: rabi frequencies must be >= 0")

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ValidationError("output_dir: must be a string")

    return ScenarioConfig(
        gs_params=gs,
        es_params=es,
        rate_params=rates,
        orientation=orientation,
        field_spec=field_spec,
        drive=drive,
        output_dir=output_dir,
    )


def load_config(path_or_name) -> ScenarioConfig:
    """Load a config from a JSON file or a shipped preset name.

    A plain name (with or without .json) that is not a file on disk is
    looked up among the packaged presets.
    """
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    else:
        name = path.name.removesuffix(".json")
        preset = resources.files("nvspin").joinpath("presets", f"{name}.json")
        if not preset.is_file():
            raise ValidationError(
                f"config {path_or_name!r}: not a file and not a shipped preset"
            )
        text = preset.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path_or_name!r}: invalid JSON ({exc})") from None
    return config_from_dict(doc)


def config_hash(config: ScenarioConfig, seed: int) -> str:
    payload = json.dumps(
        {"config": config.to_dict(), "seed": seed}, sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def emit_outputs(config: ScenarioConfig, seed: int, outputs: dict, manifest_path) -> dict:
    """Write CSV outputs plus the run manifest; returns the manifest dict.

    outputs maps path -> (header tuple, column list). The manifest records
    the config hash (identical config+seed give an identical hash), seed,
    tool version, a timestamp, and the produced files.
    """
    for path, (header, columns) in outputs.items():
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_columns(path, header, columns)
    manifest = {
        "config_hash": config_hash(config, seed),
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": [str(p) for p in outputs],
    }
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def _out_path(args, default_name: str, config: ScenarioConfig) -> Path:
    if args.out is not None:
        return Path(args.out)
    base = Path(config.output_dir) if config.output_dir else Path(".")
    return base / default_name


def _print_fit_report(title: str, results) -> None:
    print(title)
    for result in results if isinstance(results, list) else [results]:
        status = "converged" if result.converged else "NOT converged"
        print(f"  [{status} after {result.iterations} iterations, residual norm {result.residual_norm:.6g}]")
        for name, value in result.parameters.items():
            err = result.std_errors.get(name, float("nan"))
            print(f"  {name} = {value:.10g} +/- {err:.3g}")
        for w in result.warnings:
            print(f"  warning: {w}")


def _fit_report_rows(results) -> tuple:
    names, values, errors = [], [], []
    for i, result in enumerate(results if isinstance(results, list) else [results]):
        prefix = f"dip{i}_" if isinstance(results, list) and len(results) > 1 else ""
        for name, value in result.parameters.items():
            names.append(prefix + name)
            values.append(value)
            errors.append(result.std_errors.get(name, float("nan")))
    return names, values, errors


def _cmd_spectrum(args, config: ScenarioConfig) -> int:
    if args.b is not None:
        b_nv = np.array([0.0, 0.0, args.b])
    else:
        b_nv = config.b_nv()
    grid = np.linspace(args.fmin, args.fmax, args.steps)
    spec = odmr_spectrum(
        config.gs_params, config.es_params, config.rate_params, config.drive, b_nv, grid
    )
    out = _out_path(args, "spectrum.csv", config)
    emit_outputs(
        config,
        args.seed,
        {out: (("frequency_mhz", "pl_normalized"), [spec.frequency_grid, spec.pl])},
        out.with_suffix(".manifest.json"),
    )
    centers = ", ".join(f"{c:.2f}" for c in spec.dip_centers)
    print(f"wrote {out} ({grid.size} points); detected dips at [{centers}] MHz")
    if spec.lac_flagged:
        print("note: grid overlaps a level anti-crossing region (omega_- below a drive linewidth)")
    return 0


def _cmd_zeeman(args, config: ScenarioConfig) -> int:
    params = config.es_params if args.manifold == "es" else config.gs_params
    grid = np.linspace(args.bmin, args.bmax, args.steps)
    rows = zeeman_scan(params, grid)
    arr = np.array(rows)
    out = _out_path(args, "zeeman.csv", config)
    emit_outputs(
        config,
        args.seed,
        {out: (("b_gauss", "omega_minus_mhz", "omega_plus_mhz"), [arr[:, 0], arr[:, 1], arr[:, 2]])},
        out.with_suffix(".manifest.json"),
    )
    print(f"wrote {out} ({grid.size} points, {args.manifold} manifold)")
    return 0


def _cmd_rotation(args, config: ScenarioConfig) -> int:
    params = config.es_params if args.manifold == "es" else config.gs_params
    scan = RotationScan(
        rotation_axis=np.array([float(v) for v in args.rotation_axis.split(",")]),
        b_magnitude=args.b,
        angle_grid=np.linspace(args.amin, args.amax, args.steps),
    )
    initial = np.array([float(v) for v in args.initial.split(",")])
    rows = rotation_scan_frequencies(scan, initial, params, config.orientation)
    arr = np.array(rows)
    out = _out_path(args, "rotation.csv", config)
    emit_outputs(
        config,
        args.seed,
        {out: (("angle_deg", "omega_minus_mhz", "omega_plus_mhz"), [arr[:, 0], arr[:, 1], arr[:, 2]])},
        out.with_suffix(".manifest.json"),
    )
    print(f"wrote {out} ({arr.shape[0]} angles, {args.manifold} manifold)")
    return 0


def _decay_sequence(args) -> PulseSequence:
    segments = [LaserPulse(args.polarize_ns), Wait(args.wait_ns)]
    if args.pi_gs:
        segments.append(
            MwPulse(target_manifold="ground", target_transition="0,-1", pi_pulse=True, fidelity=args.fidelity)
        )
    segments.append(PsExcitation(p_exc=1.0))
    segments.append(Readout(window_ns=args.window, bin_ns=args.bin))
    if args.pi_es_at is not None:
        segments.append(Wait(args.pi_es_at))
        segments.append(
            MwPulse(target_manifold="excited", target_transition="0,-1", pi_pulse=True, fidelity=args.fidelity)
        )
    return PulseSequence(segments=tuple(segments))


def _run_histogram(args, config: ScenarioConfig, seq: PulseSequence):
    mode = "montecarlo" if args.mode == "mc" else "expected"
    return run_sequence(
        seq,
        config.rate_params,
        config.gs_params,
        config.es_params,
        config.b_nv(),
        mode=mode,
        seed=args.seed,
        shots=args.shots,
    )


def _write_histogram(args, config: ScenarioConfig, hist: DecayHistogram, final, default_name: str) -> Path:
    out = _out_path(args, default_name, config)
    pops_path = out.with_name(out.stem + "_final_populations.csv")
    emit_outputs(
        config,
        args.seed,
        {
            out: (("t_ns", "pl"), [hist.bin_centers(), hist.counts]),
            pops_path: (
                ("level", "population"),
                [np.arange(final.p.size), final.p],
            ),
        },
        out.with_suffix(".manifest.json"),
    )
    if hist.warning:
        print(f"warning: {hist.warning}")
    print(f"wrote {out} ({hist.counts.size} bins, mode {hist.mode})")
    return out


def _cmd_decay(args, config: ScenarioConfig) -> int:
    hist, final = _run_histogram(args, config, _decay_sequence(args))
    _write_histogram(args, config, hist, final, "decay.csv")
    return 0


def _cmd_run_sequence(args, config: ScenarioConfig) -> int:
    seq = sequence_from_json(args.sequence)
    hist, final = _run_histogram(args, config, seq)
    _write_histogram(args, config, hist, final, "sequence.csv")
    return 0


def _cmd_rabi(args, config: ScenarioConfig) -> int:
    drive = MicrowaveDrive(
        frequency=args.detuning,
        rabi_frequency=args.rabi,
        linewidth_fwhm=10.0,
    )
    t = np.linspace(0.0, args.tmax, args.steps)
    prob = rabi_curve(drive, 0.0, t)
    out = _out_path(args, "rabi.csv", config)
    emit_outputs(
        config,
        args.seed,
        {out: (("t_ns", "probability"), [t, prob])},
        out.with_suffix(".manifest.json"),
    )
    print(f"wrote {out} ({t.size} points)")
    return 0


def _cmd_lac(args, config: ScenarioConfig) -> int:
    grid = np.linspace(args.bmin, args.bmax, args.steps)
    scan = lac_scan(
        config.gs_params,
        config.es_params,
        config.rate_params,
        grid,
        args.misalignment,
    )
    out = _out_path(args, "lac.csv", config)
    emit_outputs(
        config,
        args.seed,
        {out: (("b_gauss", "pl_normalized"), [scan.b_grid, scan.pl])},
        out.with_suffix(".manifest.json"),
    )
    if scan.trivially_flat:
        print("note: no mixing channel (zero misalignment and zero strain); PL is flat")
    print(f"wrote {out} ({grid.size} points)")
    return 0


def _write_fit_csv(args, config: ScenarioConfig, results, default_name: str) -> None:
    names, values, errors = _fit_report_rows(results)
    out = _out_path(args, default_name, config)
    emit_outputs(
        config,
        args.seed,
        {out: (("parameter", "value", "std_error"), [np.array(names, dtype=object), np.array(values), np.array(errors)])},
        out.with_suffix(".manifest.json"),
    )
    print(f"wrote {out}")


def _cmd_fit_zeeman(args, config: ScenarioConfig) -> int:
    header, cols = read_columns(args.data)
    if header[:3] != ["b_gauss", "omega_mhz", "branch"]:
        raise ValidationError(
            f"{args.data}: expected header b_gauss,omega_mhz,branch"
        )
    result = fit_zeeman(DataSeries(x=cols[0], y=cols[1]), cols[2])
    _print_fit_report("Zeeman line fit (omega = D +/- g*mu*B):", result)
    _write_fit_csv(args, config, result, "fit_zeeman.csv")
    return 0


def _cmd_fit_decay(args, config: ScenarioConfig) -> int:
    _, cols = read_columns(args.data, expected_header=("t_ns", "pl"))
    t, counts = cols
    widths = np.diff(t)
    width = float(widths[0]) if widths.size else 1.0
    edges = np.concatenate([[t[0] - width / 2.0], t + width / 2.0])
    hist = DecayHistogram(bin_edges=edges, counts=counts, mode=args.weights)
    if args.break_at is not None:
        result = fit_piecewise_decay(hist, args.break_at)
        _print_fit_report(f"Piecewise exponential fit (break at {args.break_at} ns):", result)
    else:
        result = fit_exponential(hist, (edges[0], edges[-1]))
        _print_fit_report("Single exponential fit:", result)
    _write_fit_csv(args, config, result, "fit_decay.csv")
    return 0


def _cmd_fit_spectrum(args, config: ScenarioConfig) -> int:
    _, cols = read_columns(args.data, expected_header=("frequency_mhz", "pl_normalized"))

    class _Series:
        frequency_grid = cols[0]
        pl = cols[1]

    centers = [float(v) for v in args.centers.split(",")]
    results = fit_lorentzian_dips(_Series(), len(centers), centers)
    _print_fit_report(f"Lorentzian dip fit ({len(centers)} dips):", results)
    _write_fit_csv(args, config, results, "fit_spectrum.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvspin",
        description="NV-center spin physics: ODMR spectra, photodynamics, and fits.",
    )
    parser.add_argument("--version", action="version", version=f"nvspin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default="bulk", help="config JSON path or preset name (bulk, nanocrystal)")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=("expected", "mc"), default="expected")
        p.add_argument("--shots", type=int, default=1_000_000)

    p = sub.add_parser("spectrum", help="cw ODMR spectrum (PL vs drive frequency)")
    common(p)
    p.add_argument("--b", type=float, default=None, help="override: axial field in gauss")
    p.add_argument("--fmin", type=float, default=1000.0)
    p.add_argument("--fmax", type=float, default=3100.0)
    p.add_argument("--steps", type=int, default=2101)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("zeeman", help="transition frequencies vs axial field")
    common(p)
    p.add_argument("--manifold", choices=("gs", "es"), default="es")
    p.add_argument("--bmin", type=float, default=0.0)
    p.add_argument("--bmax", type=float, default=600.0)
    p.add_argument("--steps", type=int, default=121)
    p.set_defaults(func=_cmd_zeeman)

    p = sub.add_parser("rotation", help="transition frequencies vs field rotation angle")
    common(p)
    p.add_argument("--manifold", choices=("gs", "es"), default="es")
    p.add_argument("--rotation-axis", default="1,-1,0", help="crystal-frame rotation axis")
    p.add_argument("--initial", default="1,1,1", help="initial field direction (crystal frame)")
    p.add_argument("--b", type=float, default=92.0, help="field magnitude in gauss")
    p.add_argument("--amin", type=float, default=0.0)
    p.add_argument("--amax", type=float, default=360.0)
    p.add_argument("--steps", type=int, default=181)
    p.set_defaults(func=_cmd_rotation)

    p = sub.add_parser("decay", help="spin-selective fluorescence decay histogram")
    common(p)
    p.add_argument("--pi-gs", action="store_true", help="apply a ground-state pi pulse before excitation")
    p.add_argument("--pi-es-at", type=float, default=None, help="excited-state pi pulse at this time (ns) into the readout")
    p.add_argument("--fidelity", type=float, default=1.0)
    p.add_argument("--polarize-ns", type=float, default=3000.0)
    p.add_argument("--wait-ns", type=float, default=1000.0)
    p.add_argument("--window", type=float, default=100.0)
    p.add_argument("--bin", type=float, default=0.5)
    p.set_defaults(func=_cmd_decay)

    p = sub.add_parser("rabi", help="coherent two-level nutation curve")
    common(p)
    p.add_argument("--rabi", type=float, default=200.0, help="Rabi frequency in MHz")
    p.add_argument("--detuning", type=float, default=0.0, help="detuning in MHz")
    p.add_argument("--tmax", type=float, default=20.0)
    p.add_argument("--steps", type=int, default=401)
    p.set_defaults(func=_cmd_rabi)

    p = sub.add_parser("lac", help="PL vs field magnitude through the anti-crossings")
    common(p)
    p.add_argument("--bmin", type=float, default=0.0)
    p.add_argument("--bmax", type=float, default=1200.0)
    p.add_argument("--steps", type=int, default=601)
    p.add_argument("--misalignment", type=float, default=2.0, help="field tilt from the NV axis in degrees")
    p.set_defaults(func=_cmd_lac)

    p = sub.add_parser("fit-zeeman", help="fit D and g to (b_gauss, omega_mhz, branch) data")
    common(p)
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_fit_zeeman)

    p = sub.add_parser("fit-decay", help="fit exponential lifetime(s) to (t_ns, pl) data")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--break-at", type=float, default=None, help="piecewise fit break time in ns")
    p.add_argument("--weights", choices=("expected", "montecarlo"), default="expected")
    p.set_defaults(func=_cmd_fit_decay)

    p = sub.add_parser("fit-spectrum", help="fit Lorentzian dips to (frequency_mhz, pl_normalized) data")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--centers", required=True, help="comma-separated initial dip centers in MHz")
    p.set_defaults(func=_cmd_fit_spectrum)

    p = sub.add_parser("run-sequence", help="run a pulse sequence from a JSON file")
    common(p)
    p.add_argument("--sequence", required=True, help="sequence JSON path")
    p.set_defaults(func=_cmd_run_sequence)

    return parser


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except (ValidationError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
