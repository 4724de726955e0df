"""
Fiber Mach-Zehnder network.

Beam-splitter convention: a splitter of power ratio ``r`` maps arm
amplitudes ``(a1, a2)`` to output ports

    detected = sqrt(r)*a1 + 1j*sqrt(1 - r)*a2
    other    = 1j*sqrt(1 - r)*a1 + sqrt(r)*a2

which is unitary. With equal arms and ``r = 0.5`` the detected port is
bright when arm 2 lags arm 1 by ``pi/2`` (arm-2 phase ``-pi/2``) and dark
at ``+pi/2``. The input splitter applies plain ``sqrt(r)``, ``sqrt(1-r)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .propagation import FieldTrace

#: arm-2 phase that puts equal arms at constructive interference in the detected port
CONSTRUCTIVE_PHASE = -math.pi / 2


@dataclass(frozen=True)
class InterferometerSpec:
    """Splitters, losses, piezo phase, cooler phase noise, polarization.

    ``arm_loss_db`` is the total insertion loss of each arm; the fraction
    ``input_loss_fraction`` of it (in dB) sits before the waveguide and the
    rest after. ``phase`` is the piezo setting applied to arm 2.
    ``polarization_factor`` is the amplitude projection of each arm onto the
    polarizer axis.
    """

    split_ratio_in: float = 0.5
    split_ratio_out: float = 0.5
    arm_loss_db: tuple[float, float] = (14.0, 14.0)
    input_loss_fraction: float = 0.5
    post_loss_db: float = 8.0
    phase: float = 0.0
    phase_noise_sigma: float = 0.0
    polarization_factor: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        for name in ("split_ratio_in", "split_ratio_out"):
            r = getattr(self, name)
            # r = 1 is allowed for single-arm bookkeeping; 0 < r is required
            if not 0 < r <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        object.__setattr__(self, "arm_loss_db", tuple(float(x) for x in self.arm_loss_db))
        object.__setattr__(
            self, "polarization_factor", tuple(float(x) for x in self.polarization_factor)
        )
        if len(self.arm_loss_db) != 2 or min(self.arm_loss_db) < 0 or self.post_loss_db < 0:
            raise ValueError("losses must be >= 0 dB (two arm values)")
        if not 0 <= self.input_loss_fraction <= 1:
            raise ValueError("input_loss_fraction must lie in [0, 1]")
        if len(self.polarization_factor) != 2 or not all(
            0 <= p <= 1 for p in self.polarization_factor
        ):
            raise ValueError("polarization factors must lie in [0, 1]")
        if self.phase_noise_sigma < 0:
            raise ValueError("phase_noise_sigma must be >= 0")

    def input_loss_db(self, arm: int) -> float:
        return self.arm_loss_db[arm] * self.input_loss_fraction

    def output_loss_db(self, arm: int) -> float:
        return self.arm_loss_db[arm] * (1 - self.input_loss_fraction)


@dataclass(frozen=True)
class ShotPhase:
    """Arm-2 phase for one repetition: piezo setting plus cooler noise."""

    deterministic: float
    noise: float

    @property
    def total(self) -> float:
        return self.deterministic + self.noise


def db_to_amplitude(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 20.0)


def split(trace: FieldTrace, spec: InterferometerSpec) -> tuple[FieldTrace, FieldTrace]:
    r = spec.split_ratio_in
    return (
        trace.with_samples(math.sqrt(r) * trace.samples),
        trace.with_samples(math.sqrt(1 - r) * trace.samples),
    )


def apply_arm(
    trace: FieldTrace, loss_db: float, phase: float = 0.0, polarization_factor: float = 1.0
) -> FieldTrace:
    """Scale the amplitude by ``10**(-loss_db/20) * polarization_factor * exp(1j*phase)``."""
    if loss_db == 0 and phase == 0 and polarization_factor == 1:
        return trace.with_samples(trace.samples.copy())
    factor = db_to_amplitude(loss_db) * polarization_factor * np.exp(1j * phase)
    return trace.with_samples(factor * trace.samples)


def combine_amplitudes(a1, a2, r: float = 0.5):
    """Both output ports for arrays ``a1``, ``a2`` (broadcasting)."""
    t, c = math.sqrt(r), math.sqrt(1 - r)
    return t * a1 + 1j * c * a2, 1j * c * a1 + t * a2


def combine_ports(
    arm1: FieldTrace, arm2: FieldTrace, spec: InterferometerSpec
) -> tuple[FieldTrace, FieldTrace]:
    if not arm1.same_time_base(arm2):
        raise ValueError("arm traces do not share a time base")
    det, other = combine_amplitudes(arm1.samples, arm2.samples, spec.split_ratio_out)
    return arm1.with_samples(det), arm1.with_samples(other)


def combine(arm1: FieldTrace, arm2: FieldTrace, spec: InterferometerSpec) -> FieldTrace:
    """Detected output port of the second splitter."""
    return combine_ports(arm1, arm2, spec)[0]


def sample_shot_phase(spec: InterferometerSpec, rng: np.random.Generator) -> ShotPhase:
    if spec.phase_noise_sigma == 0:
        return ShotPhase(spec.phase, 0.0)
    return ShotPhase(spec.phase, float(rng.normal(0.0, spec.phase_noise_sigma)))


def sample_shot_phases(
    spec: InterferometerSpec, rng: np.random.Generator, n_shots: int
) -> np.ndarray:
    """Total arm-2 phases for ``n_shots`` repetitions."""
    if spec.phase_noise_sigma == 0:
        return np.full(n_shots, float(spec.phase))
    return spec.phase + rng.normal(0.0, spec.phase_noise_sigma, size=n_shots)


def calibrate_phase_noise(target_visibility: float) -> float:
    """Gaussian phase-noise width that reduces visibility to ``target_visibility``.

    Inverts ``V = exp(-sigma**2 / 2)``.
    """
    if not 0 < target_visibility <= 1:
        raise ValueError("target visibility must lie in (0, 1]")
    if target_visibility == 1:
        return 0.0
    return math.sqrt(-2.0 * math.log(target_visibility))


def with_polarization(spec: InterferometerSpec, factors) -> InterferometerSpec:
    return replace(spec, polarization_factor=tuple(factors))
