"""Optical gate, classical power detection and single-photon counting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .propagation import FieldTrace, photon_energy

DETECTOR_KINDS = ("classical", "single_photon")


@dataclass(frozen=True)
class GateSpec:
    """Acousto-optic gate: open ``open_duration`` seconds, starting
    ``open_delay`` after the end of the excitation pulse."""

    open_delay: float = 130e-9
    open_duration: float = 1e-6
    extinction_db: float = 60.0

    def __post_init__(self):
        if self.open_delay < 0 or self.open_duration < 0:
            raise ValueError("gate delay and duration must be >= 0")
        if not self.extinction_db >= 0:
            raise ValueError("extinction_db must be >= 0")

    @property
    def closed_amplitude(self) -> float:
        if math.isinf(self.extinction_db):
            return 0.0
        return 10.0 ** (-self.extinction_db / 20.0)


@dataclass(frozen=True)
class DetectorSpec:
    """Detector model.

    Single-photon: quantum ``efficiency``, dark-click probability
    ``dark_prob`` per ``window``; the counting window opens ``window_delay``
    after the pulse end. Classical: additive ``noise_floor`` (W) with
    gaussian fluctuations of ``noise_rms`` (W) per sample.
    """

    kind: str = "single_photon"
    efficiency: float = 0.10
    dark_prob: float = 0.012
    window: float = 100e-9
    window_delay: float = 1e-6
    noise_floor: float = 0.0
    noise_rms: float = 0.0

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ValueError(f"detector kind must be one of {DETECTOR_KINDS}")
        if not (0 <= self.efficiency <= 1 and 0 <= self.dark_prob <= 1):
            raise ValueError("efficiency and dark_prob must lie in [0, 1]")
        if self.window <= 0 or self.window_delay < 0:
            raise ValueError("window must be positive and window_delay >= 0")
        if self.noise_floor < 0 or self.noise_rms < 0:
            raise ValueError("noise levels must be >= 0")


@dataclass
class DetectionRecord:
    """Per-shot outcomes at one or more phase settings.

    ``values`` holds click flags (single-photon) or noise-subtracted signal
    areas in joules (classical).
    """

    shot_index: np.ndarray
    phase: np.ndarray
    values: np.ndarray
    kind: str


def _window_slice(trace: FieldTrace, start: float, duration: float) -> slice:
    i = trace.index_at(start)
    n = int(round(duration / trace.dt))
    if i < 0 or i + n > trace.samples.size or start < trace.t0 - 1e-15:
        raise ValueError("window lies outside the trace")
    return slice(i, i + n)


def gate(trace: FieldTrace, gate: GateSpec, pulse_end: float) -> FieldTrace:
    """Attenuate everything outside the open window by ``extinction_db``."""
    start = pulse_end + gate.open_delay
    window = _window_slice(trace, start, gate.open_duration)
    if gate.extinction_db == 0:
        return trace.with_samples(trace.samples.copy())
    factor = np.full(trace.samples.size, gate.closed_amplitude)
    factor[window] = 1.0
    return trace.with_samples(trace.samples * factor)


def mean_photons_in_window(trace: FieldTrace, start: float, window: float) -> float:
    """Photon number ``sum |a|^2 dt`` over ``[start, start + window)``."""
    return float(np.sum(trace.flux[_window_slice(trace, start, window)]) * trace.dt)


def click_probability(mu, det: DetectorSpec):
    """Probability of at least one click for coherent light of mean photon number ``mu``.

    ``P = 1 - (1 - dark_prob) * exp(-efficiency * mu)``
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0):
        raise ValueError("mean photon number must be >= 0")
    p = 1.0 - (1.0 - det.dark_prob) * np.exp(-det.efficiency * mu)
    return float(p) if p.ndim == 0 else p


def photons_from_click_probability(p, det: DetectorSpec):
    """Invert :func:`click_probability`: mean photon number before the detector."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        mu = -np.log((1.0 - p) / (1.0 - det.dark_prob)) / det.efficiency
    return float(mu) if mu.ndim == 0 else mu


def sample_clicks(mu_per_shot, det: DetectorSpec, rng: np.random.Generator) -> np.ndarray:
    """One Bernoulli draw per shot."""
    p = np.atleast_1d(click_probability(mu_per_shot, det))
    return rng.random(p.size) < p


def monte_carlo_clicks(mu_per_shot, det: DetectorSpec, n_shots: int, rng: np.random.Generator) -> int:
    """Number of shots that click.

    A scalar ``mu_per_shot`` gives a single binomial draw; an array of
    length ``n_shots`` draws each shot with its own mean photon number.
    """
    if np.ndim(mu_per_shot) == 0:
        return int(rng.binomial(n_shots, click_probability(mu_per_shot, det)))
    mu = np.asarray(mu_per_shot, dtype=float)
    if mu.size != n_shots:
        raise ValueError("mu_per_shot length does not match n_shots")
    return int(np.count_nonzero(sample_clicks(mu, det, rng)))


def classical_readout(trace: FieldTrace, det: DetectorSpec, rng: np.random.Generator) -> np.ndarray:
    """Detected power (W) per sample: radiometric power plus the noise floor."""
    if det.kind != "classical":
        raise ValueError("classical_readout needs a classical detector")
    power = trace.flux * photon_energy(trace.wavelength) + det.noise_floor
    if det.noise_rms > 0:
        power = power + det.noise_rms * rng.standard_normal(power.size)
    return power
