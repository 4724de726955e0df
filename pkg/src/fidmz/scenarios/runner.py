"""Scenario pipeline: pulse -> two media -> interferometer -> gate -> detector -> fit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import optimize

from ..analysis import (
    FringeFit,
    FringeScan,
    fit_fringe,
    net_visibility,
    net_visibility_stderr,
    two_beam_visibility,
)
from ..detection import (
    DetectorSpec,
    classical_readout,
    click_probability,
    photons_from_click_probability,
)
from ..errors import ConfigError
from ..interferometer import apply_arm, calibrate_phase_noise, combine, db_to_amplitude, split
from ..medium import MediumSpec, make_detuning_grid, stability_limit
from ..propagation import (
    FieldTrace,
    PulseSpec,
    calibrate_coupling,
    extract_fid,
    fid_decay_time,
    photon_energy,
    propagate,
    render_pulse,
)
from .config import ScenarioConfig, load_config

# experimental reference values
REF_HIGH_VISIBILITY = (0.93, 0.015)
REF_LOW_VISIBILITY = (0.95, 0.05)
REF_LOW_VISIBILITY_FLOOR = 0.90
REF_DECAY_TIME = 150e-9
DECAY_BAND = (75e-9, 300e-9)
REF_PHOTONS_HIGH = 4e10
REF_PHOTONS_LOW = 2e8
REF_FID_PEAK_POWER = 90e-9
REF_FID_PHOTONS_PER_100NS = 7e4
REF_CLICK_PROBABILITY = 0.30
REF_PHOTONS_PER_WINDOW = 3.0
REF_DARK_PROB = 0.012
REF_SINGLE_ARM_RATIO = (0.25, 0.03)
REF_CW_VISIBILITY = (0.92, 0.01)
CW_NOISELESS_FLOOR = 0.999


@dataclass(frozen=True)
class Anchor:
    """One comparison with an experimental reference value. ``passed`` is None for report-only entries."""

    name: str
    measured: float
    target: str
    tolerance: str
    passed: bool | None

    def line(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "REPORT"}[self.passed]
        return f"{status:6s} {self.name}: measured={self.measured:.6g} target={self.target} tolerance={self.tolerance}"


@dataclass
class ScenarioResult:
    name: str
    kind: str
    scan: FringeScan
    fit: FringeFit
    net_visibility: float
    net_visibility_stderr: float
    value_unit: str
    traces: dict = field(default_factory=dict)  # label -> (times, values, column name)
    anchors: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def anchors_ok(self) -> bool:
        return all(a.passed is not False for a in self.anchors)


@dataclass
class ArmOptics:
    """Deterministic optics of one configuration.

    ``arm1``/``arm2`` are the fields arriving at the output splitter (arm 2
    without the piezo phase). ``gate_factor`` is the gate amplitude per
    sample and ``post`` the amplitude factor between output and detector.
    """

    arm1: FieldTrace
    arm2: FieldTrace
    pulse: PulseSpec
    pulse_end: float
    gate_factor: np.ndarray
    post: float
    window: slice
    balance: tuple[float, float]
    waveguide_photons: tuple[float, float]


# -- optics ---------------------------------------------------------------------


def _pulse_spec(cfg: ScenarioConfig) -> PulseSpec:
    p = cfg.pulse
    return PulseSpec(p.shape, p.duration, p.peak_power, p.carrier_wavelength, cfg.carrier_detuning)


def effective_media(cfg: ScenarioConfig) -> list[MediumSpec]:
    """Media with the single-arm control's T2 reduction applied when ``kind == single_arm``."""
    media = list(cfg.media)
    if cfg.kind == "single_arm":
        arms = (0, 1) if cfg.control.both_arms else (cfg.control.arm,)
        for k in arms:
            media[k] = replace(media[k], t2=media[k].t2 / cfg.control.t2_reduction)
    if cfg.kind == "cw_calibration":
        media = [replace(m, optical_depth=0.0) for m in media]
    return media


def _grid(cfg: ScenarioConfig, pulse: PulseSpec, trace_length: float):
    nm = cfg.numerics
    span = nm.span_factor * pulse.bandwidth
    n = nm.n_classes
    if n == 0:
        # keep the comb revival 1/spacing beyond 1.5 trace lengths
        n = int(math.ceil(1.5 * trace_length * span)) + 1
        n += 1 - n % 2
        n = max(n, 3)
    return make_detuning_grid(nm.profile, span, n, pulse_bandwidth=pulse.bandwidth)


def _measure_slice(cfg: ScenarioConfig, trace: FieldTrace, pulse_end: float) -> slice:
    """Samples integrated into one fringe value."""
    if cfg.kind == "cw_calibration":
        start, length = 0.0, cfg.pulse.duration
    elif cfg.detector.kind == "classical":
        start, length = pulse_end + cfg.gate.open_delay, cfg.gate.open_duration
    else:
        start, length = pulse_end + cfg.detector.window_delay, cfg.detector.window
    i = trace.index_at(start)
    n = int(round(length / trace.dt))
    if i < 0 or i + n > len(trace):
        raise ConfigError("measurement window lies outside the simulated trace; increase numerics.post_pad")
    return slice(i, i + n)


def simulate_optics(cfg: ScenarioConfig, balance: tuple[float, float] | None = None) -> ArmOptics:
    """Propagate the pulse through both arms and return the fields at the output splitter.

    ``balance`` fixes the extra polarizer projections instead of deriving
    them from ``cfg.balance_arms`` (used to carry a reference setting over
    to a control run).
    """
    pulse = _pulse_spec(cfg)
    nm = cfg.numerics
    ifm = cfg.interferometer
    media = effective_media(cfg)
    trace_length = nm.pre_pad + pulse.end_time + nm.post_pad
    grid = _grid(cfg, pulse, trace_length)

    # step from the stability guard at the strongest drive and fastest decay
    rates = [grid.max_detuning]
    for k, m in enumerate(media):
        cal = calibrate_coupling(m, grid, pulse.carrier_wavelength, pulse.carrier_detuning)
        r = ifm.split_ratio_in if k == 0 else 1 - ifm.split_ratio_in
        flux = pulse.peak_flux * r * db_to_amplitude(ifm.input_loss_db(k)) ** 2
        rates.append(cal.flux_to_rabi * math.sqrt(flux))
        if cal.depth > 0:
            rates.append(1.0 / m.t2)
    dt = nm.step_fraction * stability_limit(max(rates), 0.0)
    dt = pulse.end_time / math.ceil(pulse.end_time / dt)

    source = render_pulse(pulse, dt, nm.pre_pad, nm.post_pad)
    into = split(source, ifm)
    outs, inside = [], []
    for k, m in enumerate(media):
        a = apply_arm(into[k], ifm.input_loss_db(k))
        inside.append(a.energy())
        out, _ = propagate(a, m, grid, nm.n_slices)
        outs.append(apply_arm(out, ifm.output_loss_db(k), 0.0, ifm.polarization_factor[k]))

    pulse_end = pulse.end_time
    if cfg.kind == "cw_calibration":
        gate_factor = np.ones(len(source))
    else:
        g = cfg.gate
        gate_factor = np.full(len(source), g.closed_amplitude)
        i = source.index_at(pulse_end + g.open_delay)
        gate_factor[i : i + int(round(g.open_duration / dt))] = 1.0
    window = _measure_slice(cfg, source, pulse_end)

    if balance is None:
        balance = (1.0, 1.0)
        r = ifm.split_ratio_out
        e = [f * float(np.sum(np.abs(o.samples[window] * gate_factor[window]) ** 2))
             for f, o in zip((r, 1 - r), outs)]
        if cfg.balance_arms and min(e) > 0:
            # scale the brighter arm's polarizer projection to equalize the window energies
            bright = int(np.argmax(e))
            balance = [1.0, 1.0]
            balance[bright] = math.sqrt(min(e) / max(e))
            balance = tuple(balance)
    outs = [o.with_samples(o.samples * b) for o, b in zip(outs, balance)]
    return ArmOptics(
        outs[0], outs[1], pulse, pulse_end, gate_factor,
        db_to_amplitude(ifm.post_loss_db), window, balance, tuple(inside),
    )


def fringe_coefficients(opt: ArmOptics, r: float) -> tuple[float, complex]:
    """``Q(phi) = A + Re(B exp(i phi))``: detected photons in the window versus arm-2 phase."""
    w = opt.window
    g = opt.gate_factor[w] * opt.post
    a1 = opt.arm1.samples[w] * g
    a2 = opt.arm2.samples[w] * g
    dt = opt.arm1.dt
    A = dt * (r * np.sum(np.abs(a1) ** 2) + (1 - r) * np.sum(np.abs(a2) ** 2))
    # |sqrt(r) a1 + i sqrt(1-r) a2 e^{i phi}|^2 cross term
    B = dt * 2 * math.sqrt(r * (1 - r)) * np.sum(np.conj(a1) * 1j * a2)
    return float(A), complex(B)


def detected_trace(opt: ArmOptics, cfg: ScenarioConfig, phase: float, gated: bool = True) -> FieldTrace:
    arm2 = apply_arm(opt.arm2, 0.0, phase)
    out = combine(opt.arm1, arm2, cfg.interferometer)
    factor = opt.post * (opt.gate_factor if gated else 1.0)
    return out.with_samples(out.samples * factor)


# -- shot statistics ------------------------------------------------------------


def scan_phases(cfg: ScenarioConfig) -> np.ndarray:
    s = cfg.scan
    return s.start + s.span * np.arange(s.points) / (s.points - 1)


_STREAM_TAGS = {"fringe": 0, "cw_calibration": 0, "single_arm": 2}


def _point_streams(seed: int, n: int, kind: str = "fringe") -> list[np.random.Generator]:
    # one independent stream per phase point; order of evaluation is irrelevant.
    # A control run gets streams distinct from its reference run.
    root = np.random.SeedSequence([seed, _STREAM_TAGS[kind]])
    return [np.random.default_rng(s) for s in root.spawn(n)]


def _mean_click_probability(scale: float, A: float, B: complex, phase: float, det: DetectorSpec, sigma: float) -> float:
    """Click probability at ``phase`` averaged over gaussian phase noise (Gauss-Hermite)."""
    x, wts = np.polynomial.hermite_e.hermegauss(64)
    mu = scale * (A + np.real(B * np.exp(1j * (phase + sigma * x))))
    return float(np.sum(wts * click_probability(np.maximum(mu, 0.0), det)) / np.sum(wts))


def calibrate_flux_scale(A: float, B: complex, det: DetectorSpec, sigma: float, target: float) -> float:
    """Flux scale putting the mean constructive click probability at ``target``."""
    if A <= 0:
        raise ConfigError("no signal in the detection window; cannot calibrate the click probability")
    phase = -np.angle(B) if B != 0 else 0.0

    def f(log_s):
        return _mean_click_probability(math.exp(log_s), A, B, phase, det, sigma) - target

    lo, hi = -80.0, 80.0
    if f(lo) > 0 or f(hi) < 0:
        raise ConfigError("click-probability target unreachable")
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def _reference_scale(cfg: ScenarioConfig) -> float:
    ref_cfg = load_config(cfg.calibration.reference)
    ref_cfg = replace(ref_cfg, kind="fringe")
    return _flux_scale(ref_cfg, simulate_optics(ref_cfg))


def _flux_scale(cfg: ScenarioConfig, opt: ArmOptics) -> float:
    cal = cfg.calibration
    if cal.reference:
        return _reference_scale(cfg)
    if cal.target_click_probability is None:
        return cal.flux_scale
    A, B = fringe_coefficients(opt, cfg.interferometer.split_ratio_out)
    return calibrate_flux_scale(
        A, B, cfg.detector, cfg.interferometer.phase_noise_sigma, cal.target_click_probability
    )


def shot_values(cfg, opt, A, B, scale, phases, extra=None):
    """Per-point mean, stderr and raw shot arrays for the configured detector."""
    n = cfg.scan.shots_per_point
    sigma = cfg.interferometer.phase_noise_sigma
    det = cfg.detector
    hv = photon_energy(opt.arm1.wavelength)
    means, errs = [], []
    for phi, rng in zip(phases, _point_streams(cfg.seed, len(phases), cfg.kind)):
        noise = rng.normal(0.0, sigma, n) if sigma > 0 else np.zeros(n)
        q = A + np.real(B * np.exp(1j * (phi + noise)))
        if det.kind == "single_photon" and cfg.kind != "cw_calibration":
            mu = np.maximum(scale * q, 0.0)
            vals = (rng.random(n) < click_probability(mu, det)).astype(float)
        elif cfg.kind == "cw_calibration":
            # mean detected power over the cw window
            vals = q * hv / (opt.window.stop - opt.window.start) / opt.arm1.dt
        else:
            vals = _classical_areas(q * scale, det, opt, extra, rng, hv)
        means.append(vals.mean())
        errs.append(vals.std(ddof=1) / math.sqrt(n) if n > 1 else 0.0)
    return np.array(means), np.array(errs)


def _classical_areas(q, det, opt, noise, rng, hv):
    """Gated signal areas (J) with the pre-gate baseline subtracted shot by shot."""
    floor, rms, n_base = noise
    dt = opt.arm1.dt
    n_win = opt.window.stop - opt.window.start
    size = q.size
    area = q * hv + floor * n_win * dt
    baseline = np.full(size, floor)
    if rms > 0:
        area = area + rms * dt * math.sqrt(n_win) * rng.standard_normal(size)
        baseline = baseline + rms / math.sqrt(n_base) * rng.standard_normal(size)
    return area - baseline * n_win * dt


def _classical_noise(cfg: ScenarioConfig, opt: ArmOptics, peak_power: float) -> tuple[float, float, int]:
    cal, det = cfg.calibration, cfg.detector
    floor = det.noise_floor if cal.noise_floor_fraction is None else cal.noise_floor_fraction * peak_power
    rms = det.noise_rms if cal.noise_rms_fraction is None else cal.noise_rms_fraction * peak_power
    n_base = max(int(round(cfg.gate.open_delay / opt.arm1.dt)), 1)
    return floor, rms, n_base


# -- scenarios ------------------------------------------------------------------


def _fit(phases, means, errs, n_shots, noise_level=0.0):
    scan = FringeScan(phases, means, errs, noise_level, np.full(len(phases), n_shots))
    fit = fit_fringe(scan)
    return scan, fit


def _fringe(cfg: ScenarioConfig, opt: ArmOptics | None = None, scale: float | None = None) -> ScenarioResult:
    opt = opt or simulate_optics(cfg)
    r = cfg.interferometer.split_ratio_out
    A, B = fringe_coefficients(opt, r)
    det = cfg.detector
    single = det.kind == "single_photon"
    if scale is None:
        scale = _flux_scale(cfg, opt) if single else 1.0
    phases = scan_phases(cfg)
    constructive = float(-np.angle(B)) if B != 0 else 0.0
    hv = photon_energy(opt.arm1.wavelength)

    con = detected_trace(opt, cfg, constructive)
    des = detected_trace(opt, cfg, constructive + math.pi)
    summary = {
        "flux_scale": scale,
        "constructive_phase_rad": constructive,
        "grid_dt_s": opt.arm1.dt,
        "balance_factors": opt.balance,
        "waveguide_input_photons": opt.waveguide_photons,
        "window_photons_constructive": A + abs(B),
        "window_photons_destructive": A - abs(B),
        "noiseless_visibility": abs(B) / A if A > 0 else 0.0,
    }
    traces = {}
    if single:
        noise = None
        means, errs = shot_values(cfg, opt, A, B, scale, phases)
        scan, fit = _fit(phases, means, errs, cfg.scan.shots_per_point, det.dark_prob)
        net = net_visibility(fit, det.dark_prob) if fit.offset > det.dark_prob else 0.0
        net_err = net_visibility_stderr(fit, det.dark_prob) if fit.offset > det.dark_prob else math.inf
        unit = "click_probability"
        for label, tr in (("constructive", con), ("destructive", des)):
            traces[label] = (tr.times, scale * tr.flux, "photon_flux")
        mu_con = scale * (A + abs(B))
        sigma = cfg.interferometer.phase_noise_sigma
        summary.update(
            {
                "mu_constructive_noiseless": mu_con,
                "click_probability_constructive_mean": _mean_click_probability(scale, A, B, constructive, det, sigma),
                "click_probability_destructive_mean": _mean_click_probability(scale, A, B, constructive + math.pi, det, sigma),
            }
        )
    else:
        peak = float(np.max(con.power))
        noise = _classical_noise(cfg, opt, peak)
        means, errs = shot_values(cfg, opt, A, B, 1.0, phases, noise)
        scan, fit = _fit(phases, means, errs, cfg.scan.shots_per_point)
        net, net_err = fit.visibility, fit.visibility_stderr
        unit = "signal_area_J"
        det_cl = replace(det, kind="classical", noise_floor=noise[0], noise_rms=noise[1])
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
        for label, tr in (("constructive", con), ("destructive", des)):
            traces[label] = (tr.times, classical_readout(tr, det_cl, rng), "power_w")
        summary.update({"noise_floor_w": noise[0], "noise_rms_w": noise[1], "peak_power_constructive_w": peak})
        try:
            summary["decay_time_s"] = fid_decay_time(extract_fid(con, opt.pulse_end + cfg.gate.open_delay))
        except ValueError:
            summary["decay_time_s"] = math.nan

    # pulse-end-relative times, as plotted after the excitation pulse
    traces = {k: (t - opt.pulse_end, v, c) for k, (t, v, c) in traces.items()}
    summary["photons_per_pulse"] = opt.pulse.photon_number()
    res = ScenarioResult(cfg.name, cfg.kind, scan, fit, net, net_err, unit, traces, [], summary)
    res.anchors = _anchors(cfg, res, opt, hv, con)
    return res


def _anchors(cfg: ScenarioConfig, res: ScenarioResult, opt: ArmOptics, hv: float, con: FieldTrace) -> list[Anchor]:
    s = res.summary
    out = []
    on_resonance = abs(cfg.carrier_detuning) == 0
    if cfg.detector.kind == "classical" and on_resonance:
        out.append(Anchor("photons per pulse", s["photons_per_pulse"], f"{REF_PHOTONS_HIGH:.3g}", "order of magnitude", None))
        tau = s["decay_time_s"]
        out.append(Anchor("FID 1/e decay time (s)", tau, f"~{REF_DECAY_TIME:.3g}", f"[{DECAY_BAND[0]:.3g}, {DECAY_BAND[1]:.3g}]", bool(DECAY_BAND[0] <= tau <= DECAY_BAND[1])))
        v, tol = REF_HIGH_VISIBILITY
        out.append(Anchor("signal-area fringe visibility", res.net_visibility, f"{v}", f"±{tol}", bool(abs(res.net_visibility - v) <= tol)))
        peak_noiseless = float(np.max(con.power))
        out.append(Anchor("FID peak power at detector, constructive (W)", peak_noiseless, f"{REF_FID_PEAK_POWER:.3g}", "order of magnitude", None))
        i = con.index_at(opt.pulse_end + cfg.gate.open_delay)
        per100 = float(np.sum(con.flux[i : i + int(round(100e-9 / con.dt))]) * con.dt)
        out.append(Anchor("FID photons per 100 ns at gate opening", per100, f"{REF_FID_PHOTONS_PER_100NS:.3g}", "order of magnitude", None))
    elif cfg.detector.kind == "single_photon" and cfg.kind == "fringe" and on_resonance:
        out.append(Anchor("photons per pulse", s["photons_per_pulse"], f"{REF_PHOTONS_LOW:.3g}", "order of magnitude", None))
        p = s["click_probability_constructive_mean"]
        out.append(Anchor("constructive click probability (calibrated)", p, f"{REF_CLICK_PROBABILITY}", "±0.01", bool(abs(p - REF_CLICK_PROBABILITY) <= 0.01)))
        out.append(Anchor("dark click probability", cfg.detector.dark_prob, f"{REF_DARK_PROB}", "exact", cfg.detector.dark_prob == REF_DARK_PROB))
        mu = photons_from_click_probability(p, cfg.detector)
        out.append(Anchor("photons per window in front of detector, constructive", float(mu), f"{REF_PHOTONS_PER_WINDOW}", "report", None))
        net = res.net_visibility
        v, tol = REF_LOW_VISIBILITY
        ok = net >= REF_LOW_VISIBILITY_FLOOR and abs(net - v) <= tol + 2 * res.net_visibility_stderr
        out.append(Anchor("net click-probability fringe visibility", net, f"{v} (>= {REF_LOW_VISIBILITY_FLOOR})", f"±{tol}", bool(ok)))
        out.append(Anchor("detector-path flux scale (model -> detector)", s["flux_scale"], "1", "order of magnitude", None))
    elif cfg.detector.kind == "single_photon" and not on_resonance:
        z = _dark_z(res, cfg.detector.dark_prob)
        s["dark_z_score"] = z
        out.append(Anchor("off-resonance click rate minus dark rate (z-score)", z, "0", "|z| <= 3", bool(abs(z) <= 3)))
    return out


def _dark_z(res: ScenarioResult, dark: float) -> float:
    n = float(np.sum(res.scan.n_shots))
    rate = float(np.sum(res.scan.values * res.scan.n_shots)) / n
    return (rate - dark) / math.sqrt(dark * (1 - dark) / n)


def run_control_single_arm(config: ScenarioConfig) -> ScenarioResult:
    """One arm's T2 divided by ``control.t2_reduction``; compared to the two-arm reference.

    The reference is the same configuration with ``kind = fringe``; its flux
    scale is reused so both runs share the detector path.
    """
    if config.kind != "single_arm":
        config = replace(config, kind="single_arm")
    if config.control.t2_reduction < 100:
        raise ConfigError("control.t2_reduction: the single-arm control needs >= 100x")
    ref_cfg = replace(config, kind="fringe", calibration=replace(config.calibration, reference=None))
    ref_opt = simulate_optics(ref_cfg)
    scale = _flux_scale(ref_cfg, ref_opt) if config.detector.kind == "single_photon" else 1.0
    ref = _fringe(ref_cfg, ref_opt, scale)
    ctl_cfg = replace(config, calibration=replace(config.calibration, reference=None, target_click_probability=None))
    res = _fringe(ctl_cfg, simulate_optics(ctl_cfg, ref_opt.balance), scale)

    det = config.detector
    s = res.summary
    s["reference_visibility"] = ref.net_visibility
    if det.kind == "single_photon":
        p_ref = ref.summary["click_probability_constructive_mean"]
        # the control has no fringe; take the scan mean as its constructive-phase level
        p_ctl = float(np.mean(res.scan.values))
        raw = p_ctl / p_ref
        net = (p_ctl - det.dark_prob) / (p_ref - det.dark_prob)
        mu_ratio = photons_from_click_probability(p_ctl, det) / photons_from_click_probability(p_ref, det)
        s.update({
            "reference_constructive_click_probability": p_ref,
            "control_click_probability": p_ctl,
            "ratio_raw": raw,
            "ratio_dark_subtracted": net,
            "ratio_photon_number": mu_ratio,
        })
        ratio = net
    else:
        ratio = (res.fit.offset) / (ref.fit.offset + ref.fit.amplitude)
        s["ratio_area"] = ratio
    fit = res.fit
    anchors = []
    if config.control.both_arms:
        z = _dark_z(res, det.dark_prob)
        s["dark_z_score"] = z
        anchors.append(Anchor("both arms T2-shortened: click rate minus dark (z-score)", z, "0", "|z| <= 3", bool(abs(z) <= 3)))
    else:
        v, tol = REF_SINGLE_ARM_RATIO
        anchors.append(Anchor("single-arm / two-arm constructive signal (dark subtracted)", ratio, f"{v}", f"±{tol}", bool(abs(ratio - v) <= tol)))
        anchors.append(Anchor("single-arm fringe visibility / stderr", fit.visibility / fit.visibility_stderr if fit.visibility_stderr > 0 else math.inf, "0", "< 3", bool(fit.visibility < 3 * fit.visibility_stderr)))
    res.anchors = anchors
    return res


def run_cw_calibration(config: ScenarioConfig) -> ScenarioResult:
    """Off-resonance cw fringes with and without phase noise, plus a polarization check."""
    if config.kind != "cw_calibration":
        config = replace(config, kind="cw_calibration")
    opt = simulate_optics(config)
    r = config.interferometer.split_ratio_out
    A, B = fringe_coefficients(opt, r)
    phases = scan_phases(config)
    n = config.scan.shots_per_point
    results = {}
    for label, sigma in (("noiseless", 0.0), ("phase_noise", config.interferometer.phase_noise_sigma)):
        c = replace(config, interferometer=replace(config.interferometer, phase_noise_sigma=sigma))
        means, errs = shot_values(c, opt, A, B, 1.0, phases)
        results[label] = _fit(phases, means, errs, n)
    # polarization cross-check: noiseless fringe with unequal projections
    pf = config.cw.polarization_check
    pol_cfg = replace(
        config,
        interferometer=replace(config.interferometer, polarization_factor=tuple(pf), phase_noise_sigma=0.0),
    )
    pol_opt = simulate_optics(pol_cfg)
    Ap, Bp = fringe_coefficients(pol_opt, r)
    _, pol_fit = _fit(phases, *shot_values(pol_cfg, pol_opt, Ap, Bp, 1.0, phases), n)
    w = pol_opt.window
    i1 = r * float(np.sum(np.abs(pol_opt.arm1.samples[w]) ** 2))
    i2 = (1 - r) * float(np.sum(np.abs(pol_opt.arm2.samples[w]) ** 2))
    tbv = two_beam_visibility(i1, i2)

    scan, fit = results["phase_noise"]
    v0 = results["noiseless"][1].visibility
    s = {
        "visibility_noiseless": v0,
        "visibility_phase_noise": fit.visibility,
        "visibility_phase_noise_stderr": fit.visibility_stderr,
        "phase_noise_sigma_rad": config.interferometer.phase_noise_sigma,
        "expected_exp_minus_sigma2_over_2": math.exp(-config.interferometer.phase_noise_sigma ** 2 / 2),
        "calibrated_sigma_for_0.92": calibrate_phase_noise(0.92),
        "polarization_factors": tuple(pf),
        "visibility_polarization": pol_fit.visibility,
        "two_beam_visibility_polarization": tbv,
        "total_shots": int(n * len(phases)),
    }
    hv = photon_energy(opt.arm1.wavelength)
    constructive = float(-np.angle(B)) if B != 0 else 0.0
    traces = {}
    for label, ph in (("constructive", constructive), ("destructive", constructive + math.pi)):
        tr = detected_trace(opt, config, ph)
        traces[label] = (tr.times, tr.flux * hv, "power_w")
    v, tol = REF_CW_VISIBILITY
    anchors = [
        Anchor("cw visibility without phase noise", v0, f">= {CW_NOISELESS_FLOOR}", "floor", bool(v0 >= CW_NOISELESS_FLOOR)),
        Anchor("cw visibility with phase noise", fit.visibility, f"{v}", f"±{tol}", bool(abs(fit.visibility - v) <= tol)),
        Anchor("cw polarization check: fit vs two-beam visibility", abs(pol_fit.visibility - tbv), "0", "<= 1e-3", bool(abs(pol_fit.visibility - tbv) <= 1e-3)),
    ]
    return ScenarioResult(config.name, config.kind, scan, fit, fit.visibility, fit.visibility_stderr, "power_W", traces, anchors, s)


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Run ``config`` and return its result (nothing is written; see :func:`write_result`)."""
    if config.kind == "single_arm":
        return run_control_single_arm(config)
    if config.kind == "cw_calibration":
        return run_cw_calibration(config)
    opt = simulate_optics(config)
    return _fringe(config, opt)


# -- output ---------------------------------------------------------------------


def _num(x) -> str:
    return repr(float(x))


def write_result(result: ScenarioResult, out_dir) -> Path:
    """Write fringe.csv, trace_*.csv, fit.txt and anchors.txt into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sc = result.scan
    lines = ["phase_rad,mean_value,stderr,n_shots"]
    for p, v, e, n in zip(sc.phases, sc.values, sc.value_errors, sc.n_shots):
        lines.append(f"{_num(p)},{_num(v)},{_num(e)},{int(n)}")
    (out / "fringe.csv").write_text("\n".join(lines) + "\n")
    for label, (t, vals, col) in result.traces.items():
        rows = [f"time_s,{col}"] + [f"{_num(a)},{_num(b)}" for a, b in zip(t, vals)]
        (out / f"trace_{label}.csv").write_text("\n".join(rows) + "\n")
    f = result.fit
    fit_lines = [
        f"scenario: {result.name}",
        f"kind: {result.kind}",
        f"value_unit: {result.value_unit}",
        f"visibility: {_num(f.visibility)}",
        f"visibility_stderr: {_num(f.visibility_stderr)}",
        f"net_visibility: {_num(result.net_visibility)}",
        f"net_visibility_stderr: {_num(result.net_visibility_stderr)}",
        f"amplitude: {_num(f.amplitude)}",
        f"offset: {_num(f.offset)}",
        f"phase_origin_rad: {_num(f.phase_origin)}",
        f"noise_level: {_num(sc.noise_level)}",
    ]
    for k, v in result.summary.items():
        if isinstance(v, tuple):
            fit_lines.append(f"{k}: [{', '.join(_num(x) for x in v)}]")
        elif isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            fit_lines.append(f"{k}: {int(v)}")
        elif isinstance(v, (float, np.floating)):
            fit_lines.append(f"{k}: {_num(v)}")
        else:
            fit_lines.append(f"{k}: {v}")
    (out / "fit.txt").write_text("\n".join(fit_lines) + "\n")
    (out / "anchors.txt").write_text("\n".join(a.line() for a in result.anchors) + "\n")
    return out
