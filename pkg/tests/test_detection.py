import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fidmz.detection import (
    DetectorSpec,
    GateSpec,
    classical_readout,
    click_probability,
    gate,
    mean_photons_in_window,
    monte_carlo_clicks,
    photons_from_click_probability,
)
from fidmz.propagation import FieldTrace, photon_energy

DT = 1e-9


def trace(values, t0=-100e-9):
    return FieldTrace(np.asarray(values, dtype=complex), DT, t0)


def test_gate_infinite_extinction_zeroes_outside():
    tr = trace(np.ones(3500))
    out = gate(tr, GateSpec(130e-9, 1e-6, math.inf), pulse_end=2e-6)
    t = out.times
    inside = (t >= 2e-6 + 130e-9 - 1e-15) & (t < 2e-6 + 1130e-9 - 1e-15)
    assert np.all(out.samples[inside] == 1)
    assert not np.any(out.samples[~inside])


def test_gate_zero_extinction_is_identity_and_idempotent():
    tr = trace(np.linspace(0, 1, 3000))
    assert np.array_equal(gate(tr, GateSpec(700e-9, 1e-6, 0.0), 1e-6).samples, tr.samples)
    g = GateSpec(700e-9, 1e-6, math.inf)
    once = gate(tr, g, 1e-6)
    assert np.array_equal(gate(once, g, 1e-6).samples, once.samples)


def test_gate_extinction_level_and_errors():
    tr = trace(np.ones(3000))
    out = gate(tr, GateSpec(130e-9, 1e-6, 60.0), 1e-6)
    assert out.flux[0] == pytest.approx(1e-6, rel=1e-12)
    with pytest.raises(ValueError):
        gate(tr, GateSpec(130e-9, 5e-6, 60.0), 1e-6)


def test_high_regime_gate_removes_pulse_keeps_tail():
    t = -100e-9 + DT * np.arange(4000)
    pulse = np.where((t >= 0) & (t < 2e-6), 100.0, 0.0)
    tail = np.where(t >= 2e-6, 10 * np.exp(-(t - 2e-6) / 300e-9), 0.0)
    out = gate(trace(pulse + tail), GateSpec(130e-9, 1e-6, 60.0), 2e-6)
    in_pulse = (t >= 0) & (t < 2e-6)
    open_ = (t > 2.13e-6) & (t < 3.13e-6)
    assert np.sum(out.flux[in_pulse]) < 0.01 * np.sum(out.flux[open_])
    k = out.index_at(2.5e-6)
    assert out.samples[k] == pytest.approx(tail[k])


def test_mean_photons_in_window():
    assert mean_photons_in_window(trace(np.zeros(500)), 0.0, 100e-9) == 0.0
    flux = 3e7
    assert mean_photons_in_window(trace(np.full(500, math.sqrt(flux))), 0.0, 100e-9) == pytest.approx(3.0, rel=1e-12)
    nw90 = 90e-9 / photon_energy(1532e-9)
    mu = mean_photons_in_window(trace(np.full(500, math.sqrt(nw90))), 0.0, 100e-9)
    assert mu == pytest.approx(6.94e4, rel=2e-3)
    with pytest.raises(ValueError):
        mean_photons_in_window(trace(np.zeros(500)), 350e-9, 100e-9)


def test_click_probability_examples():
    det = DetectorSpec(dark_prob=0.012)
    assert click_probability(0.0, det) == pytest.approx(0.012, abs=1e-15)
    assert click_probability(3.0, DetectorSpec(efficiency=0.1, dark_prob=0.0)) == pytest.approx(0.2592, abs=1e-4)
    assert click_probability(1e6, det) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        click_probability(-1.0, det)


def test_click_inverse_roundtrip():
    det = DetectorSpec()
    mu = np.array([0.0, 0.5, 3.0, 10.0])
    np.testing.assert_allclose(photons_from_click_probability(click_probability(mu, det), det), mu, atol=1e-12)


def test_monte_carlo_examples():
    assert monte_carlo_clicks(0.0, DetectorSpec(dark_prob=0.0), 1000, np.random.default_rng(0)) == 0
    det = DetectorSpec(efficiency=0.1, dark_prob=0.012)
    n = 100_000
    k = monte_carlo_clicks(3.0, det, n, np.random.default_rng(7))
    assert abs(k / n - 0.268) < 0.005
    assert k == monte_carlo_clicks(3.0, det, n, np.random.default_rng(7))
    per_shot = monte_carlo_clicks(np.full(n, 3.0), det, n, np.random.default_rng(8))
    assert abs(per_shot / n - click_probability(3.0, det)) < 0.005
    with pytest.raises(ValueError):
        monte_carlo_clicks(np.ones(3), det, 4, np.random.default_rng(0))


@settings(max_examples=50, deadline=None)
@given(mu=st.floats(0, 50), eta=st.floats(0, 1), dark=st.floats(0, 0.5),
       dmu=st.floats(0, 5), deta=st.floats(0, 0.5), ddark=st.floats(0, 0.4))
def test_click_probability_monotone(mu, eta, dark, dmu, deta, ddark):
    base = click_probability(mu, DetectorSpec(efficiency=eta, dark_prob=dark))
    assert click_probability(mu + dmu, DetectorSpec(efficiency=eta, dark_prob=dark)) >= base - 1e-15
    assert click_probability(mu, DetectorSpec(efficiency=min(eta + deta, 1), dark_prob=dark)) >= base - 1e-15
    assert click_probability(mu, DetectorSpec(efficiency=eta, dark_prob=min(dark + ddark, 1))) >= base - 1e-15


@settings(max_examples=25, deadline=None)
@given(mu=st.floats(0, 20), eta=st.floats(0.01, 1), dark=st.floats(0, 0.2), seed=st.integers(0, 2**32 - 1))
def test_monte_carlo_converges(mu, eta, dark, seed):
    det = DetectorSpec(efficiency=eta, dark_prob=dark)
    n = 20_000
    p = click_probability(mu, det)
    rate = monte_carlo_clicks(mu, det, n, np.random.default_rng(seed)) / n
    # 3 sigma plus a small floor for p near 0 or 1; ~0.3% of draws could exceed 3 sigma
    assert abs(rate - p) <= 4 * math.sqrt(p * (1 - p) / n) + 1e-12


@settings(max_examples=30, deadline=None)
@given(eta=st.floats(0.01, 1), dark=st.floats(0, 0.1), x=st.floats(1e-6, 0.02))
def test_small_mu_linearity(eta, dark, x):
    det = DetectorSpec(efficiency=eta, dark_prob=dark)
    mu = x / eta
    excess = click_probability(mu, det) - dark
    assert excess == pytest.approx((1 - dark) * eta * mu, rel=0.01)
    assert excess == pytest.approx(eta * mu, rel=0.01 + dark)


def test_classical_readout():
    rng = np.random.default_rng(0)
    det = DetectorSpec(kind="classical", noise_floor=5e-9, noise_rms=1e-10)
    zero = classical_readout(trace(np.zeros(2000)), det, rng)
    assert abs(zero.mean() - 5e-9) < 1e-11
    nw90 = 90e-9 / photon_energy(1532e-9)
    p = classical_readout(trace(np.full(2000, math.sqrt(nw90))), DetectorSpec(kind="classical", noise_rms=1e-9), rng)
    assert abs(p.mean() - 90e-9) < 1e-10
    exact = classical_readout(trace(np.full(10, math.sqrt(nw90))), DetectorSpec(kind="classical"), rng)
    np.testing.assert_allclose(exact, 90e-9, rtol=1e-12)
    with pytest.raises(ValueError):
        classical_readout(trace(np.zeros(10)), DetectorSpec(), rng)
