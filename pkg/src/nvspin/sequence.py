"""Pulse-sequence engine driving the seven-level rate model.

A sequence is an ordered list of segments: laser pulses and waits evolve
the populations under the matching generator, microwave pulses perform an
instantaneous fidelity-weighted population exchange between their two
targeted sublevels, a ps-excitation segment promotes ground population to
the excited state spin-conservingly, and one optional readout segment
records the photoluminescence decay into a histogram.

Segments listed after the readout execute inside its window (offset by the
durations of the segments between them and the readout), which is how a
mid-decay microwave pulse is expressed; any remaining window is free decay.
Initial populations are the thermal ground state (1/3 in each sublevel).
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .exceptions import ValidationError
from .hamiltonian import SpinParams, esr_frequencies
from .rates import (
    EVOLVE_ABS_TOL,
    N_LEVELS,
    LevelPopulations,
    MicrowaveDrive,
    RateParams,
    TransitionContext,
    rate_matrix,
    sanitize_populations,
)
from ._kernels import rk45_linear

READOUT_MAX_STEP_NS = 0.1


def rabi_curve(drive: MicrowaveDrive, transition_frequency: float, t_grid_ns):
    """Coherent two-level transfer probability versus pulse duration.

    P(t) = Omega^2/(Omega^2 + Delta^2) * sin^2(pi * sqrt(Omega^2 + Delta^2) * t)
    with Omega the Rabi frequency and Delta the detuning from the
    transition, both MHz, t in ns (one MHz * ns cycle = 1e-3 turns). A
    200 MHz drive on resonance completes a 2*pi rotation in 5 ns.
    """
    t = np.asarray(t_grid_ns, dtype=float)
    omega = drive.rabi_frequency
    delta = drive.frequency - transition_frequency
    omega_eff_sq = omega * omega + delta * delta
    if omega_eff_sq == 0.0:
        return np.zeros_like(t)
    amplitude = omega * omega / omega_eff_sq
    phase = np.pi * np.sqrt(omega_eff_sq) * t * 1e-3
    return amplitude * np.sin(phase) ** 2


@dataclass(frozen=True)
class LaserPulse:
    duration_ns: float

    def __post_init__(self):
        if self.duration_ns < 0:
            raise ValidationError("laser duration_ns must be >= 0")


@dataclass(frozen=True)
class Wait:
    duration_ns: float

    def __post_init__(self):
        if self.duration_ns < 0:
            raise ValidationError("wait duration_ns must be >= 0")


@dataclass(frozen=True)
class MwPulse:
    """Microwave pulse on one spin transition.

    Either pi_pulse=True (population exchange with the given fidelity) or a
    duration plus Rabi frequency, in which case the exchanged fraction is
    fidelity times the coherent two-level transfer probability; frequency
    defaults to resonance with the targeted transition.
    """

    target_manifold: str = "ground"
    target_transition: str = "0,-1"
    fidelity: float = 1.0
    pi_pulse: bool = False
    duration_ns: Optional[float] = None
    rabi_frequency: Optional[float] = None
    frequency: Optional[float] = None
    linewidth_fwhm: float = 10.0

    def __post_init__(self):
        if self.target_manifold not in ("ground", "excited"):
            raise ValidationError(f"unknown mw manifold {self.target_manifold!r}")
        if self.target_transition not in ("0,-1", "0,+1"):
            raise ValidationError(f"unknown mw transition {self.target_transition!r}")
        if not 0.0 <= self.fidelity <= 1.0:
            raise ValidationError("mw fidelity must lie in [0, 1]")
        if self.pi_pulse == (self.duration_ns is not None):
            raise ValidationError("mw pulse needs exactly one of pi=true or duration_ns")
        if self.duration_ns is not None:
            if self.duration_ns < 0:
                raise ValidationError("mw duration_ns must be >= 0")
            if self.rabi_frequency is None:
                raise ValidationError("mw pulse with duration_ns needs rabi_frequency_mhz")

    def level_pair(self) -> tuple:
        base = 0 if self.target_manifold == "ground" else 3
        partner = 2 if self.target_transition == "0,-1" else 1
        return base, base + partner

    def transfer_probability(self, transition_frequency: float) -> float:
        if self.pi_pulse:
            return self.fidelity
        drive = MicrowaveDrive(
            frequency=self.frequency if self.frequency is not None else transition_frequency,
            rabi_frequency=self.rabi_frequency,
            linewidth_fwhm=self.linewidth_fwhm,
            target_manifold=self.target_manifold,
            target_transition=self.target_transition,
        )
        return self.fidelity * float(
            rabi_curve(drive, transition_frequency, self.duration_ns)
        )


@dataclass(frozen=True)
class PsExcitation:
    """Instantaneous spin-conserving promotion of ground population."""

    p_exc: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p_exc <= 1.0:
            raise ValidationError("ps p_exc must lie in [0, 1]")


@dataclass(frozen=True)
class Readout:
    window_ns: float
    bin_ns: float

    def __post_init__(self):
        if self.window_ns <= 0:
            raise ValidationError("readout window_ns must be > 0")
        if self.bin_ns <= 0 or self.bin_ns > self.window_ns:
            raise ValidationError("readout bin_ns must lie in (0, window_ns]")


Segment = Union[LaserPulse, Wait, MwPulse, PsExcitation, Readout]


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        readout_idx = [i for i, s in enumerate(segs) if isinstance(s, Readout)]
        if len(readout_idx) > 1:
            raise ValidationError("a sequence may contain at most one readout")
        if readout_idx:
            readout = segs[readout_idx[0]]
            inner = segs[readout_idx[0] + 1 :]
            inner_time = sum(
                s.duration_ns for s in inner if isinstance(s, (LaserPulse, Wait))
            )
            if inner_time > readout.window_ns + 1e-9:
                raise ValidationError(
                    "segments after the readout exceed the readout window"
                )

    def readout(self) -> Optional[Readout]:
        for s in self.segments:
            if isinstance(s, Readout):
                return s
        return None


@dataclass
class DecayHistogram:
    """Photon histogram from one readout window.

    In expected mode counts are per-shot expected photons per bin; in
    Monte Carlo mode they are seeded Poisson counts over `shots` shots.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    mode: str = "expected"
    shots: Optional[int] = None
    seed: Optional[int] = None
    warning: Optional[str] = None

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def _augmented_generator(gen: np.ndarray, rp: RateParams) -> np.ndarray:
    aug = np.zeros((N_LEVELS + 1, N_LEVELS + 1))
    aug[:N_LEVELS, :N_LEVELS] = gen
    aug[N_LEVELS, 3:6] = rp.gamma_rad
    return aug


def _apply_exchange(p: np.ndarray, pair: tuple, q: float) -> None:
    a, b = pair
    pa, pb = p[a], p[b]
    p[a] = (1.0 - q) * pa + q * pb
    p[b] = q * pa + (1.0 - q) * pb


def _apply_ps(p: np.ndarray, p_exc: float) -> None:
    for k in range(3):
        moved = p_exc * p[k]
        p[k] -= moved
        p[3 + k] += moved


class _ReadoutRecorder:
    """Accumulates the photon counter at bin edges while time advances."""

    def __init__(self, readout: Readout, p: np.ndarray, rp: RateParams):
        n_bins = int(math.floor(readout.window_ns / readout.bin_ns + 1e-9))
        n_bins = max(n_bins, 1)
        self.edges = np.arange(n_bins + 1) * readout.bin_ns
        self.window = self.edges[-1]
        self.rp = rp
        self.t = 0.0
        self.state = np.zeros(N_LEVELS + 1)
        self.state[:N_LEVELS] = p
        self.edge_counts = np.zeros(n_bins + 1)
        self.next_edge = 1

    def populations(self) -> np.ndarray:
        return self.state[:N_LEVELS]

    def advance(self, duration: float, gen: np.ndarray) -> None:
        aug = _augmented_generator(gen, self.rp)
        target = min(self.t + duration, self.window)
        while self.t < target - 1e-12:
            t_stop = target
            if self.next_edge < len(self.edges):
                t_stop = min(t_stop, self.edges[self.next_edge])
            self.state = rk45_linear(
                aug, self.state, t_stop - self.t, EVOLVE_ABS_TOL, READOUT_MAX_STEP_NS
            )
            self.t = t_stop
            while (
                self.next_edge < len(self.edges)
                and self.t >= self.edges[self.next_edge] - 1e-12
            ):
                self.edge_counts[self.next_edge] = self.state[N_LEVELS]
                self.next_edge += 1

    def finish(self) -> np.ndarray:
        while self.next_edge < len(self.edges):
            self.edge_counts[self.next_edge] = self.state[N_LEVELS]
            self.next_edge += 1
        return np.diff(self.edge_counts)


def run_sequence(
    seq: PulseSequence,
    rp: RateParams,
    gs_params: SpinParams,
    es_params: SpinParams,
    b_nv,
    mode: str = "expected",
    seed: Optional[int] = None,
    shots: Optional[int] = None,
):
    """Execute a pulse sequence and return (DecayHistogram, final populations).

    The field is given in the NV frame and fixes the transition frequencies
    microwave segments are referenced against. mode "expected" produces the
    deterministic per-shot histogram; mode "montecarlo" draws seeded Poisson
    counts for the requested number of shots.
    """
    if mode not in ("expected", "montecarlo"):
        raise ValidationError(f"unknown mode {mode!r}")
    if mode == "montecarlo":
        if shots is None or shots < 1:
            raise ValidationError("montecarlo mode needs shots >= 1")

    ctx = TransitionContext(
        ground=esr_frequencies(gs_params, b_nv),
        excited=esr_frequencies(es_params, b_nv),
    )
    gen_on = rate_matrix(rp, laser_on=True)
    gen_off = rate_matrix(rp, laser_on=False)

    p = LevelPopulations.ground_thermal().p.copy()
    segments = list(seq.segments)
    histogram = DecayHistogram(
        bin_edges=np.zeros(1), counts=np.zeros(0), mode=mode, warning="no readout segment"
    )

    i = 0
    while i < len(segments):
        seg = segments[i]
        if isinstance(seg, LaserPulse):
            p = rk45_linear(gen_on, p, seg.duration_ns, EVOLVE_ABS_TOL, np.inf)
        elif isinstance(seg, Wait):
            p = rk45_linear(gen_off, p, seg.duration_ns, EVOLVE_ABS_TOL, np.inf)
        elif isinstance(seg, MwPulse):
            f0 = _pulse_frequency(ctx, seg)
            _apply_exchange(p, seg.level_pair(), seg.transfer_probability(f0))
        elif isinstance(seg, PsExcitation):
            _apply_ps(p, seg.p_exc)
        elif isinstance(seg, Readout):
            recorder = _ReadoutRecorder(seg, p, rp)
            for inner in segments[i + 1 :]:
                if isinstance(inner, LaserPulse):
                    recorder.advance(inner.duration_ns, gen_on)
                elif isinstance(inner, Wait):
                    recorder.advance(inner.duration_ns, gen_off)
                elif isinstance(inner, MwPulse):
                    f0 = _pulse_frequency(ctx, inner)
                    _apply_exchange(
                        recorder.populations(),
                        inner.level_pair(),
                        inner.transfer_probability(f0),
                    )
                elif isinstance(inner, PsExcitation):
                    _apply_ps(recorder.populations(), inner.p_exc)
            recorder.advance(recorder.window - recorder.t, gen_off)
            counts = recorder.finish()
            warning = None
            if counts.sum() < 1e-12:
                warning = "histogram is empty: no excitation before readout"
            histogram = DecayHistogram(
                bin_edges=recorder.edges,
                counts=counts,
                mode=mode,
                warning=warning,
            )
            p = recorder.populations().copy()
            break
        i += 1

    if mode == "montecarlo" and histogram.counts.size:
        rng = np.random.default_rng(seed)
        histogram = DecayHistogram(
            bin_edges=histogram.bin_edges,
            counts=rng.poisson(shots * np.clip(histogram.counts, 0.0, None)),
            mode=mode,
            shots=shots,
            seed=seed,
            warning=histogram.warning,
        )

    return histogram, LevelPopulations(sanitize_populations(p))


def _pulse_frequency(ctx: TransitionContext, pulse: MwPulse) -> float:
    pair = ctx.ground if pulse.target_manifold == "ground" else ctx.excited
    return pair.omega_minus if pulse.target_transition == "0,-1" else pair.omega_plus


_SEGMENT_KEYS = {
    "laser": {"duration_ns"},
    "wait": {"duration_ns"},
    "mw": {
        "manifold",
        "transition",
        "pi",
        "duration_ns",
        "fidelity",
        "rabi_frequency_mhz",
        "frequency_mhz",
        "linewidth_fwhm_mhz",
    },
    "ps": {"p_exc"},
    "readout": {"window_ns", "bin_ns"},
}


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ValidationError(f"{where}: missing required key {key!r}")
    return doc[key]


def sequence_from_dict(doc: dict) -> PulseSequence:
    """Build a PulseSequence from the documented JSON structure.

    Top level is {"segments": [...]}; each segment carries a "type" of
    laser | wait | mw | ps | readout plus the fields named in the README.
    Unknown keys are rejected with the offending path in the message.
    """
    if not isinstance(doc, dict):
        raise ValidationError("sequence document must be a JSON object")
    unknown = set(doc) - {"segments"}
    if unknown:
        raise ValidationError(f"unknown top-level key {sorted(unknown)[0]!r}")
    raw = _require(doc, "segments", "sequence")
    if not isinstance(raw, list):
        raise ValidationError("segments: must be a list")

    segments = []
    for i, entry in enumerate(raw):
        where = f"segments[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: must be an object")
        seg_type = _require(entry, "type", where)
        if seg_type not in _SEGMENT_KEYS:
            raise ValidationError(f"{where}.type: unknown segment type {seg_type!r}")
        unknown = set(entry) - _SEGMENT_KEYS[seg_type] - {"type"}
        if unknown:
            raise ValidationError(f"{where}.{sorted(unknown)[0]}: unknown key")
        try:
            if seg_type == "laser":
                segments.append(LaserPulse(float(_require(entry, "duration_ns", where))))
            elif seg_type == "wait":
                segments.append(Wait(float(_require(entry, "duration_ns", where))))
            elif seg_type == "ps":
                segments.append(PsExcitation(float(entry.get("p_exc", 1.0))))
            elif seg_type == "readout":
                segments.append(
                    Readout(
                        window_ns=float(_require(entry, "window_ns", where)),
                        bin_ns=float(_require(entry, "bin_ns", where)),
                    )
                )
            else:
                duration = entry.get("duration_ns")
                rabi = entry.get("rabi_frequency_mhz")
                freq = entry.get("frequency_mhz")
                segments.append(
                    MwPulse(
                        target_manifold=entry.get("manifold", "ground"),
                        target_transition=entry.get("transition", "0,-1"),
                        fidelity=float(entry.get("fidelity", 1.0)),
                        pi_pulse=bool(entry.get("pi", False)),
                        duration_ns=None if duration is None else float(duration),
                        rabi_frequency=None if rabi is None else float(rabi),
                        frequency=None if freq is None else float(freq),
                        linewidth_fwhm=float(entry.get("linewidth_fwhm_mhz", 10.0)),
                    )
                )
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    return PulseSequence(segments=tuple(segments))


def sequence_from_json(path) -> PulseSequence:
    """Load a pulse sequence from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON in {path}: {exc}") from None
    return sequence_from_dict(doc)
