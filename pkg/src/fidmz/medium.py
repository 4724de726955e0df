"""
Two-level ensemble dynamics.

Bloch-vector convention used throughout the package (and by every test):

    du/dt = -Delta*v + Omega_i*w - u/T2
    dv/dt =  Delta*u + Omega_r*w - v/T2
    dw/dt = -(Omega_r*v + Omega_i*u) - (w + 1)/T1

with the complex Rabi frequency ``Omega = Omega_r + 1j*Omega_i`` and the
detuning ``Delta`` of an atom class from the laser carrier (rad/s). The
vector r = (u, v, w) rotates about (-Omega_r, Omega_i, Delta); the complex
coherence ``sigma = v + 1j*u`` therefore obeys

    dsigma/dt = -(1j*Delta + 1/T2)*sigma + Omega*w

so a phase applied to the drive is carried linearly into ``sigma``. The
ground state is (0, 0, -1) and a resonant pi/2 pulse leaves v = -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StabilityError

#: fraction of the stability guard used when a step is chosen automatically
DEFAULT_STEP_FRACTION = 0.5

PROFILES = ("flat", "gaussian", "lorentzian")


@dataclass(frozen=True)
class DetuningGrid:
    """Discretised slice of the inhomogeneous line.

    Attributes
    ----------
    detunings : ndarray
        Angular frequency offsets from the laser carrier (rad/s), ascending.
    weights : ndarray
        Spectral weights, non-negative, summing to one.
    profile : str
        Name of the line shape the weights were drawn from.
    """

    detunings: np.ndarray
    weights: np.ndarray
    profile: str = "flat"

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        g = np.asarray(self.weights, dtype=float)
        if d.ndim != 1 or d.shape != g.shape:
            raise ValueError("detunings and weights must be 1-D arrays of equal length")
        if np.any(np.diff(d) <= 0):
            raise ValueError("detunings must be strictly increasing")
        if np.any(g < 0) or abs(g.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")
        d.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "weights", g)

    @property
    def n_classes(self) -> int:
        return self.detunings.size

    @property
    def spacing(self) -> float:
        """Grid spacing in rad/s (uniform grids only)."""
        return float(self.detunings[1] - self.detunings[0])

    @property
    def span(self) -> float:
        """Full width ``max - min`` in rad/s."""
        return float(self.detunings[-1] - self.detunings[0])

    @property
    def max_detuning(self) -> float:
        return float(np.max(np.abs(self.detunings)))

    @property
    def density_at_zero(self) -> float:
        """Spectral weight density at the carrier, per rad/s.

        The weight of the centre class divided by the grid spacing, i.e. the
        value the discrete weights approximate for the continuous line shape.
        """
        centre = self.n_classes // 2
        return float(self.weights[centre] / self.spacing)

    @property
    def revival_time(self) -> float:
        """Time after which a uniform comb of classes rephases (2*pi/spacing)."""
        return 2 * np.pi / self.spacing


def _profile_weights(profile: str, detunings: np.ndarray, width: float) -> np.ndarray:
    if profile == "flat":
        w = np.ones_like(detunings)
    elif profile == "gaussian":
        s = width / (2 * math.sqrt(2 * math.log(2)))
        w = np.exp(-0.5 * (detunings / s) ** 2)
    elif profile == "lorentzian":
        hw = width / 2
        w = hw**2 / (detunings**2 + hw**2)
    else:
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    return w / w.sum()


def make_detuning_grid(
    profile: str,
    span: float,
    n_classes: int,
    *,
    fwhm: float | None = None,
    pulse_bandwidth: float | None = None,
) -> DetuningGrid:
    """Build a symmetric, uniformly spaced detuning grid.

    Parameters
    ----------
    profile : {'flat', 'gaussian', 'lorentzian'}
        Line shape sampled onto the grid.
    span : float
        Full width of the grid in Hz; the outermost classes sit at ``±span/2``.
    n_classes : int
        Number of classes; odd and at least 3 so that zero detuning is a grid point.
    fwhm : float, optional
        Width (Hz) of the gaussian/lorentzian profile. Defaults to ``span/2``.
    pulse_bandwidth : float, optional
        Bandwidth (Hz) of the excitation pulse. When given, the grid must cover
        at least five bandwidths on either side of the carrier.
    """
    if not span > 0:
        raise ValueError("span must be positive")
    if int(n_classes) != n_classes or n_classes < 3 or n_classes % 2 == 0:
        raise ValueError("n_classes must be an odd integer >= 3")
    if pulse_bandwidth is not None and span < 10 * pulse_bandwidth:
        raise ValueError(
            f"grid span {span:.3g} Hz does not cover ±5 pulse bandwidths "
            f"({pulse_bandwidth:.3g} Hz)"
        )
    detunings = 2 * np.pi * np.linspace(-span / 2, span / 2, int(n_classes))
    width = 2 * np.pi * (fwhm if fwhm is not None else span / 2)
    weights = _profile_weights(profile, detunings, width)
    if profile != "flat":
        # mirror to make the symmetry exact to the last bit
        weights = 0.5 * (weights + weights[::-1])
        weights = weights / weights.sum()
    return DetuningGrid(detunings, weights, profile)


@dataclass(frozen=True)
class MediumSpec:
    """One doped waveguide.

    ``optical_depth`` is the on-resonance power absorption exponent of the
    laser-addressed line (transmission ``exp(-optical_depth)`` for weak light).
    ``dipole_moment`` (C m), ``mode_area`` (m^2) and ``refractive_index`` set
    the conversion from photon flux to Rabi frequency.
    """

    optical_depth: float = 2.0
    t1: float = 2e-3
    t2: float = 10e-6
    length: float = 0.02
    inhomogeneous_fwhm: float = 250e9
    label: str = "waveguide"
    dipole_moment: float = 1.0e-32
    mode_area: float = 5.0e-11
    refractive_index: float = 2.2

    def __post_init__(self):
        if not self.optical_depth >= 0:
            raise ValueError("optical_depth must be >= 0")
        if not (self.t1 > 0 and self.t2 > 0):
            raise ValueError("t1 and t2 must be positive")
        if self.t2 > 2 * self.t1:
            raise ValueError("t2 cannot exceed 2*t1")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if not (self.dipole_moment >= 0 and self.mode_area > 0 and self.refractive_index > 0):
            raise ValueError("dipole_moment >= 0, mode_area > 0 and refractive_index > 0 required")

    def depth_at(self, carrier_detuning: float) -> float:
        """Optical depth seen by a laser detuned (Hz) from the line centre.

        The inhomogeneous line is taken as gaussian with ``inhomogeneous_fwhm``.
        """
        if carrier_detuning == 0:
            return self.optical_depth
        s = self.inhomogeneous_fwhm / (2 * math.sqrt(2 * math.log(2)))
        return self.optical_depth * math.exp(-0.5 * (carrier_detuning / s) ** 2)


@dataclass
class BlochEnsembleState:
    """Bloch components, one triple per detuning class.

    Arrays share a shape ``(..., n_classes)``; a leading axis indexes spatial
    slices when the state belongs to a propagation run.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if not (self.u.shape == self.v.shape == self.w.shape):
            raise ValueError("u, v, w must share a shape")

    @classmethod
    def ground(cls, grid: DetuningGrid, n_slices: int | None = None) -> BlochEnsembleState:
        shape = (grid.n_classes,) if n_slices is None else (n_slices, grid.n_classes)
        return cls(np.zeros(shape), np.zeros(shape), -np.ones(shape))

    @property
    def shape(self):
        return self.u.shape

    def norm(self) -> np.ndarray:
        return np.sqrt(self.u**2 + self.v**2 + self.w**2)

    @property
    def coherence(self) -> np.ndarray:
        """Complex coherence ``v + 1j*u``."""
        return self.v + 1j * self.u

    def copy(self) -> BlochEnsembleState:
        return BlochEnsembleState(self.u.copy(), self.v.copy(), self.w.copy())


def _rates(medium: MediumSpec) -> tuple[float, float]:
    return 1.0 / medium.t2, 1.0 / medium.t1


def stability_limit(max_detuning: float, max_rabi: float) -> float:
    """Largest admissible step: 1 / (20 * max(|Delta|, |Omega|))."""
    fastest = max(abs(max_detuning), abs(max_rabi))
    if fastest == 0:
        return math.inf
    return 1.0 / (20.0 * fastest)


def check_step(dt: float, max_detuning: float, max_rabi: float) -> None:
    if not dt > 0:
        raise StabilityError("time step must be positive")
    limit = stability_limit(max_detuning, max_rabi)
    # tolerate round-off from callers that step exactly at the limit
    if dt > limit * (1 + 1e-9):
        raise StabilityError(
            f"dt = {dt:.3g} s exceeds the stability guard {limit:.3g} s "
            f"(|Delta|max = {max_detuning:.3g}, |Omega|max = {max_rabi:.3g} rad/s)"
        )


def _derivs(u, v, w, om_r, om_i, delta, g2, g1):
    du = -delta * v + om_i * w - g2 * u
    dv = delta * u + om_r * w - g2 * v
    dw = -(om_r * v + om_i * u) - g1 * (w + 1.0)
    return du, dv, dw


def rk4_step(u, v, w, rabi0, rabi_mid, rabi1, dt, delta, g2, g1):
    """One classical RK4 step with the drive sampled at start, middle and end.

    Drives are complex and broadcast against the state arrays.
    """
    r0r, r0i = np.real(rabi0), np.imag(rabi0)
    rmr, rmi = np.real(rabi_mid), np.imag(rabi_mid)
    r1r, r1i = np.real(rabi1), np.imag(rabi1)
    h2 = 0.5 * dt
    k1 = _derivs(u, v, w, r0r, r0i, delta, g2, g1)
    k2 = _derivs(u + h2 * k1[0], v + h2 * k1[1], w + h2 * k1[2], rmr, rmi, delta, g2, g1)
    k3 = _derivs(u + h2 * k2[0], v + h2 * k2[1], w + h2 * k2[2], rmr, rmi, delta, g2, g1)
    k4 = _derivs(u + dt * k3[0], v + dt * k3[1], w + dt * k3[2], r1r, r1i, delta, g2, g1)
    s = dt / 6.0
    return (
        u + s * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        v + s * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        w + s * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
    )


def bloch_step(
    state: BlochEnsembleState,
    rabi: complex,
    dt: float,
    grid: DetuningGrid,
    medium: MediumSpec,
) -> BlochEnsembleState:
    """Advance ``state`` by one RK4 step under a drive held constant over ``dt``.

    ``rabi`` may be a complex scalar or an array broadcastable against the
    leading (slice) axes of the state, e.g. shape ``(n_slices, 1)``.
    """
    if state.shape[-1] != grid.n_classes:
        raise ValueError(
            f"state has {state.shape[-1]} classes but the grid has {grid.n_classes}"
        )
    rabi = np.asarray(rabi, dtype=complex)
    check_step(dt, grid.max_detuning, float(np.max(np.abs(rabi))) if rabi.size else 0.0)
    g2, g1 = _rates(medium)
    u, v, w = rk4_step(state.u, state.v, state.w, rabi, rabi, rabi, dt, grid.detunings, g2, g1)
    return BlochEnsembleState(u, v, w)


def rabi_oracle(rabi: complex, detuning: float, t: float) -> tuple[float, float, float]:
    """Closed-form Bloch vector at time ``t`` under constant drive, from ground.

    Relaxation-free. The vector rotates by ``Omega_g * t`` about
    ``(-Omega_r, Omega_i, Delta) / Omega_g`` with
    ``Omega_g = sqrt(|Omega|^2 + Delta^2)``; for real ``Omega`` this gives
    ``w = -1 + (Omega/Omega_g)^2 (1 - cos(Omega_g t))``.
    """
    rabi = complex(rabi)
    axis = np.array([-rabi.real, rabi.imag, float(detuning)])
    omega_g = float(np.linalg.norm(axis))
    r0 = np.array([0.0, 0.0, -1.0])
    if omega_g == 0:
        return (0.0, 0.0, -1.0)
    n = axis / omega_g
    c, s = math.cos(omega_g * t), math.sin(omega_g * t)
    r = r0 * c + np.cross(n, r0) * s + n * np.dot(n, r0) * (1 - c)
    return float(r[0]), float(r[1]), float(r[2])
