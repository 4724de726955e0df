"""Fringe and visibility analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


def mandel_visibility(n_atoms: float, theta: float) -> float:
    """Fringe visibility for spontaneous emission from two ``n_atoms`` ensembles
    prepared by pulses of area ``theta``.

    ``V = N cos^2(theta/2) / (1 + (N - 1) cos^2(theta/2))``
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if not 0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    c2 = math.cos(theta / 2) ** 2
    if theta == math.pi:
        c2 = 0.0
    return n_atoms * c2 / (1 + (n_atoms - 1) * c2)


def two_beam_visibility(i1: float, i2: float) -> float:
    """Contrast of two fully coherent beams of intensities ``i1`` and ``i2``."""
    if i1 < 0 or i2 < 0:
        raise ValueError("intensities must be >= 0")
    if i1 == 0 and i2 == 0:
        raise ValueError("at least one intensity must be positive")
    return 2 * math.sqrt(i1 * i2) / (i1 + i2)


@dataclass
class FringeScan:
    phases: np.ndarray
    values: np.ndarray
    value_errors: np.ndarray | None = None
    noise_level: float = 0.0
    n_shots: np.ndarray | None = None

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.value_errors is not None:
            self.value_errors = np.asarray(self.value_errors, dtype=float)
            if self.value_errors.shape != self.values.shape:
                raise ValueError("value_errors must match values")
        if self.phases.shape != self.values.shape:
            raise ValueError("phases and values must have equal lengths")


@dataclass
class FringeFit:
    """Least-squares ``offset + amplitude*cos(phase - phase_origin)``."""

    amplitude: float
    offset: float
    phase_origin: float
    visibility: float
    visibility_stderr: float
    amplitude_stderr: float = 0.0
    offset_stderr: float = 0.0
    phase_origin_stderr: float = 0.0

    def model(self, phases) -> np.ndarray:
        return self.offset + self.amplitude * np.cos(np.asarray(phases) - self.phase_origin)


def fit_fringe(scan: FringeScan) -> FringeFit:
    """Fit a fixed-period (2*pi) sinusoid to ``scan``.

    Linear least squares in ``(offset, a, b)`` for
    ``offset + a*cos(phi) + b*sin(phi)``; parameter covariance from the
    residual variance, propagated to the amplitude, phase and visibility.
    """
    phi, y = scan.phases, scan.values
    if phi.size < 6:
        raise ValueError("need at least 6 scan points")
    if np.ptp(phi) < 2 * math.pi - 1e-9:
        raise ValueError("scan must span at least 2*pi")
    X = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    c, a, b = coef
    resid = y - X @ coef
    dof = phi.size - 3
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)

    amp = math.hypot(a, b)
    if not c > 0:
        raise ValueError("fringe offset must be positive")
    if amp == 0 or np.all(y == y[0]):
        # flat data: no fringe, phase undefined
        v_err = math.sqrt(max(cov[1, 1], cov[2, 2])) / c
        return FringeFit(0.0, float(c), 0.0, 0.0, v_err, math.sqrt(cov[1, 1]), math.sqrt(cov[0, 0]), math.inf)
    # gradients of amplitude and phase wrt (c, a, b)
    g_amp = np.array([0.0, a / amp, b / amp])
    g_phase = np.array([0.0, -b / amp**2, a / amp**2])
    vis = amp / c
    g_vis = np.array([-amp / c**2, a / (amp * c), b / (amp * c)])
    return FringeFit(
        amplitude=amp,
        offset=float(c),
        phase_origin=math.atan2(b, a),
        visibility=vis,
        visibility_stderr=math.sqrt(float(g_vis @ cov @ g_vis)),
        amplitude_stderr=math.sqrt(float(g_amp @ cov @ g_amp)),
        offset_stderr=math.sqrt(float(cov[0, 0])),
        phase_origin_stderr=math.sqrt(float(g_phase @ cov @ g_phase)),
    )


def net_visibility(fit: FringeFit, noise_level: float) -> float:
    """Visibility after subtracting a detector noise level from the offset."""
    if noise_level >= fit.offset:
        raise ValueError("noise level must lie below the fringe offset")
    return fit.amplitude / (fit.offset - noise_level)


def net_visibility_stderr(fit: FringeFit, noise_level: float) -> float:
    base = fit.offset - noise_level
    va = fit.amplitude_stderr / base
    vc = fit.amplitude * fit.offset_stderr / base**2
    return math.hypot(va, vc)


def bootstrap_visibility_stderr(
    scan: FringeScan, rng: np.random.Generator, n_resamples: int = 500
) -> float:
    """Parametric bootstrap: refit after redrawing each point from N(value, error)."""
    if scan.value_errors is None:
        raise ValueError("bootstrap needs value_errors")
    vis = np.empty(n_resamples)
    for k in range(n_resamples):
        y = scan.values + scan.value_errors * rng.standard_normal(scan.values.size)
        vis[k] = fit_fringe(FringeScan(scan.phases, y)).visibility
    return float(np.std(vis, ddof=1))


def scaling_exponent(pulse_energies, fid_energies) -> tuple[float, float]:
    """Log-log slope of FID energy against pulse energy, with its standard error."""
    x = np.asarray(pulse_energies, dtype=float)
    y = np.asarray(fid_energies, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("need at least 3 paired values")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("energies must be strictly positive")
    res = stats.linregress(np.log(x), np.log(y))
    return float(res.slope), float(res.stderr)
