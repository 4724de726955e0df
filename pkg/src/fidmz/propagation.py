"""
One-dimensional Maxwell-Bloch propagation in the retarded frame.

The field envelope ``a(t)`` is carried in photon-flux units
(``|a|**2`` = photons/s). Inside a medium the Rabi frequency is
``Omega = flux_to_rabi * a`` and, with ``zeta = z / L``,

    dOmega/dzeta = (gain / 2) * sum_k g_k * sigma_k,    sigma = v + 1j*u

``gain`` is fixed by the optical depth: for weak light on a flat line much
wider than the pulse spectrum this reproduces ``exp(-optical_depth)`` power
transmission. The z derivative is discretised first-order upwind on
``n_slices`` slices; since the retarded frame makes the field an algebraic
function of the slice coherences at each instant, the whole slice x class
system is advanced together by RK4 in time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants

from .errors import NumericalError
from .medium import (
    BlochEnsembleState,
    DetuningGrid,
    MediumSpec,
    _derivs,
    check_step,
    stability_limit,
)

DEFAULT_WAVELENGTH = 1532e-9
DEFAULT_SLICES = 64


def photon_energy(wavelength: float) -> float:
    """Photon energy h*c/lambda in joules."""
    return constants.h * constants.c / wavelength


@dataclass(frozen=True)
class FieldTrace:
    """Uniformly sampled complex envelope.

    ``samples[k]`` is the amplitude at ``t0 + k*dt``; ``|samples|**2`` is the
    photon flux in photons/s. ``wavelength`` (m) converts flux to power and
    ``carrier_detuning`` (Hz) is the laser offset from the atomic line centre.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0
    wavelength: float = DEFAULT_WAVELENGTH
    carrier_detuning: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        a = np.asarray(self.samples, dtype=complex)
        if a.ndim != 1:
            raise ValueError("samples must be 1-D")
        object.__setattr__(self, "samples", a)

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.samples.size - 1)

    @property
    def flux(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def power(self) -> np.ndarray:
        """Instantaneous power in watts."""
        return self.flux * photon_energy(self.wavelength)

    def energy(self) -> float:
        """Photon number ``sum |a|^2 dt``."""
        return float(np.sum(self.flux) * self.dt)

    def with_samples(self, samples) -> FieldTrace:
        return replace(self, samples=np.asarray(samples, dtype=complex))

    def same_time_base(self, other: FieldTrace) -> bool:
        return (
            self.samples.size == other.samples.size
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
            and math.isclose(self.t0, other.t0, rel_tol=1e-12, abs_tol=1e-15)
        )

    def index_at(self, t: float) -> int:
        """Index of the first sample at or after ``t``."""
        return int(math.ceil((t - self.t0) / self.dt - 1e-9))


@dataclass(frozen=True)
class PulseSpec:
    """Excitation pulse.

    For ``shape='square'`` the pulse occupies ``[0, duration)``. For
    ``shape='gaussian'`` ``duration`` is the intensity FWHM and the pulse is
    centred at ``2.5*duration`` inside a window ``[0, 5*duration)``, which
    holds all but ~1e-8 of its energy.
    """

    shape: str = "square"
    duration: float = 2e-6
    peak_power: float = 2e-3
    carrier_wavelength: float = DEFAULT_WAVELENGTH
    carrier_detuning: float = 0.0

    def __post_init__(self):
        if self.shape not in ("square", "gaussian"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not self.peak_power >= 0:
            raise ValueError("peak_power must be >= 0")

    @property
    def end_time(self) -> float:
        return self.duration if self.shape == "square" else 5 * self.duration

    @property
    def effective_duration(self) -> float:
        if self.shape == "square":
            return self.duration
        return self.duration * math.sqrt(math.pi / (4 * math.log(2)))

    @property
    def bandwidth(self) -> float:
        """Spectral width scale in Hz (inverse duration)."""
        return 1.0 / self.duration

    @property
    def peak_flux(self) -> float:
        return self.peak_power / photon_energy(self.carrier_wavelength)

    def photon_number(self) -> float:
        return self.peak_power * self.effective_duration / photon_energy(self.carrier_wavelength)


def render_pulse(spec: PulseSpec, dt: float, pre_pad: float, post_pad: float) -> FieldTrace:
    """Sample ``spec`` on a uniform grid with zero-field padding either side."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if pre_pad < 0 or post_pad < 0:
        raise ValueError("pads must be >= 0")
    n_pre = int(round(pre_pad / dt))
    n_pulse = int(round(spec.end_time / dt))
    if abs(n_pulse * dt - spec.end_time) > dt:
        raise ValueError("dt does not resolve the pulse duration")
    n_post = int(round(post_pad / dt))
    t0 = -n_pre * dt
    t = t0 + dt * np.arange(n_pre + n_pulse + n_post)
    amp = math.sqrt(spec.peak_flux)
    if spec.shape == "square":
        a = np.where((t >= -1e-6 * dt) & (np.arange(t.size) < n_pre + n_pulse), amp, 0.0)
    else:
        centre = 2.5 * spec.duration
        s = spec.duration / (2 * math.sqrt(2 * math.log(2)))
        a = amp * np.exp(-0.25 * ((t - centre) / s) ** 2)
        a[(t < 0) | (np.arange(t.size) >= n_pre + n_pulse)] = 0.0
    return FieldTrace(a.astype(complex), dt, t0, spec.carrier_wavelength, spec.carrier_detuning)


@dataclass(frozen=True)
class CouplingCalibration:
    """Conversion constants between the field trace and the Bloch equations.

    ``flux_to_rabi`` maps sqrt(photons/s) to rad/s; ``gain`` (rad/s) is the
    coefficient of the normalised-length field equation, fixed so that the
    weak-field transmission through ``depth`` is ``exp(-depth)``.
    """

    flux_to_rabi: float
    gain: float
    depth: float


def calibrate_coupling(
    medium: MediumSpec,
    grid: DetuningGrid,
    wavelength: float = DEFAULT_WAVELENGTH,
    carrier_detuning: float = 0.0,
) -> CouplingCalibration:
    omega = 2 * math.pi * constants.c / wavelength
    e_per_sqrt_flux = math.sqrt(
        2 * constants.hbar * omega
        / (medium.refractive_index * constants.epsilon_0 * constants.c * medium.mode_area)
    )
    kappa = medium.dipole_moment / constants.hbar * e_per_sqrt_flux
    depth = medium.depth_at(carrier_detuning)
    # weak-field amplitude absorption on a flat line: pi * rho(0) * gain / 2 = depth / 2
    gain = depth / (math.pi * grid.density_at_zero)
    return CouplingCalibration(kappa, gain, depth)


def propagate(
    trace: FieldTrace,
    medium: MediumSpec,
    grid: DetuningGrid,
    n_slices: int = DEFAULT_SLICES,
    *,
    calibration: CouplingCalibration | None = None,
    linear_background: bool = True,
) -> tuple[FieldTrace, BlochEnsembleState]:
    """Send ``trace`` through ``medium``.

    With ``linear_background`` (the default) the weak-field response of the
    whole line, which for a line much broader than the pulse spectrum is an
    instantaneous amplitude attenuation ``exp(-depth/2)``, is applied
    analytically slice by slice, and the grid classes contribute only their
    excess over a linear twin driven by the same local field. Atoms far from
    the carrier stay linear, so the grid need only cover the strongly driven
    slice of the line and its edges do not ring. With
    ``linear_background=False`` the grid carries the full response itself.

    Returns the transmitted field (same time base) and the Bloch state of
    every slice x class at the end of the trace, shape ``(n_slices, n_classes)``.
    """
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1")
    cal = calibration or calibrate_coupling(medium, grid, trace.wavelength, trace.carrier_detuning)
    state = BlochEnsembleState.ground(grid, n_slices)
    if cal.gain == 0 or cal.flux_to_rabi == 0:
        return trace.with_samples(trace.samples.copy()), state

    dt = trace.dt
    kappa = cal.flux_to_rabi
    drive = kappa * trace.samples
    check_step(dt, grid.max_detuning, float(np.max(np.abs(drive), initial=0.0)))

    coef = (0.5 * cal.gain / n_slices) * grid.weights
    delta = grid.detunings
    g2, g1 = 1.0 / medium.t2, 1.0 / medium.t1
    lin_rate = -(1j * delta + g2)

    # amplitude attenuation per slice from the analytic linear background
    att = 0.5 * cal.depth / n_slices if linear_background else 0.0
    grow = np.exp(att * np.arange(1, n_slices + 1))
    decay_in = np.exp(-att * np.arange(n_slices))
    exit_weight = np.exp(-att * (n_slices - 1 - np.arange(n_slices)))
    exit_in = math.exp(-att * n_slices)

    def sources(u, v, sl):
        sigma = v + 1j * u
        if linear_background:
            sigma = sigma - sl
        return sigma @ coef

    def local_drive(src, omega_in):
        # field entering slice s: attenuated input plus upwind sum of slices j < s
        acc = np.concatenate(([0.0], np.cumsum(grow * src)[:-1]))
        return (decay_in * (omega_in + acc))[:, None]

    def deriv(u, v, w, sl, omega_in):
        om = local_drive(sources(u, v, sl), omega_in)
        du, dv, dw = _derivs(u, v, w, om.real, om.imag, delta, g2, g1)
        dsl = lin_rate * sl - om if linear_background else 0.0
        return du, dv, dw, dsl

    u, v, w = state.u, state.v, state.w
    sl = np.zeros(state.shape, dtype=complex) if linear_background else 0.0
    n = drive.size
    emitted = np.zeros(n, dtype=complex)
    nz = np.nonzero(drive)[0]
    first = int(nz[0]) if nz.size else n
    h2 = 0.5 * dt
    s6 = dt / 6.0
    for k in range(max(first - 1, 0), n - 1):
        om0, om1 = drive[k], drive[k + 1]
        omm = 0.5 * (om0 + om1)
        k1 = deriv(u, v, w, sl, om0)
        k2 = deriv(u + h2 * k1[0], v + h2 * k1[1], w + h2 * k1[2], sl + h2 * k1[3], omm)
        k3 = deriv(u + h2 * k2[0], v + h2 * k2[1], w + h2 * k2[2], sl + h2 * k2[3], omm)
        k4 = deriv(u + dt * k3[0], v + dt * k3[1], w + dt * k3[2], sl + dt * k3[3], om1)
        u = u + s6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        v = v + s6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        w = w + s6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        sl = sl + s6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
        emitted[k + 1] = exit_weight @ sources(u, v, sl)

    if not (np.all(np.isfinite(emitted)) and np.all(np.isfinite(w))):
        raise NumericalError("non-finite values in Maxwell-Bloch integration")
    # transmitted = attenuated input + emission of the grid classes, in flux units
    if linear_background:
        out = exit_in * trace.samples + emitted / kappa
    else:
        out = trace.samples + emitted / kappa
    peak = float(np.max(np.abs(kappa * out), initial=0.0))
    if dt > stability_limit(grid.max_detuning, max(peak, np.max(np.abs(drive)))) * (1 + 1e-9):
        raise NumericalError("field inside the medium exceeded the stability guard")
    return trace.with_samples(out), BlochEnsembleState(u, v, w)


def extract_fid(output: FieldTrace, pulse_end: float) -> FieldTrace:
    """Part of ``output`` strictly after ``pulse_end``."""
    if not (output.t0 <= pulse_end < output.t_end):
        raise ValueError("pulse_end lies outside the trace")
    k = int(math.floor((pulse_end - output.t0) / output.dt + 1e-9)) + 1
    return replace(output, samples=output.samples[k:].copy(), t0=output.t0 + k * output.dt)


def fid_decay_time(fid: FieldTrace) -> float:
    """1/e decay time of ``|a|^2``.

    Least-squares fit of ``log|a|^2`` against time from the intensity maximum
    down to the first sample below a tenth of it.
    """
    intensity = fid.flux
    if not np.any(intensity > 0):
        raise ValueError("FID trace carries no energy")
    k0 = int(np.argmax(intensity))
    peak = intensity[k0]
    below = np.nonzero(intensity[k0:] < 0.1 * peak)[0]
    k1 = k0 + (int(below[0]) if below.size else intensity.size - k0)
    if k1 - k0 < 3:
        raise ValueError("too few samples in the first decade of decay")
    t = fid.dt * np.arange(k1 - k0)
    slope, _ = np.polyfit(t, np.log(intensity[k0:k1]), 1)
    if not slope < 0:
        raise ValueError("trace does not decay; cannot fit a decay time")
    return -1.0 / slope
