import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fidmz.analysis import (
    FringeScan,
    bootstrap_visibility_stderr,
    fit_fringe,
    mandel_visibility,
    net_visibility,
    scaling_exponent,
    two_beam_visibility,
)

PHASES = np.linspace(0, 6.5, 16)


def sinusoid(v, offset=1.0, phi0=0.4, phases=PHASES):
    return offset * (1 + v * np.cos(phases - phi0))


def test_mandel_examples():
    for n in (1, 10, 1e6):
        assert mandel_visibility(n, math.pi) == 0.0
    assert mandel_visibility(1, math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert abs(mandel_visibility(1e6, math.pi / 2) - 1) < 1e-6
    with pytest.raises(ValueError):
        mandel_visibility(10, 3.5)
    with pytest.raises(ValueError):
        mandel_visibility(0.5, 1.0)


@settings(max_examples=100, deadline=None)
@given(n=st.floats(1, 1e9), dn=st.floats(0, 1e9), theta=st.floats(0, math.pi))
def test_mandel_properties(n, dn, theta):
    assert mandel_visibility(n, 0.0) == 1.0
    assert abs(mandel_visibility(1, theta) - math.cos(theta / 2) ** 2) < 1e-12
    v = mandel_visibility(n, theta)
    assert 0 <= v <= 1
    if theta < math.pi:
        assert mandel_visibility(n + dn, theta) >= v - 1e-12


def test_two_beam_examples():
    assert two_beam_visibility(1, 1) == 1.0
    assert two_beam_visibility(1, 0) == 0.0
    assert two_beam_visibility(4, 1) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ValueError):
        two_beam_visibility(0, 0)


@settings(max_examples=100, deadline=None)
@given(i1=st.floats(1e-6, 1e6), i2=st.floats(1e-6, 1e6))
def test_two_beam_bounded(i1, i2):
    v = two_beam_visibility(i1, i2)
    assert v <= 1 + 1e-15
    if not math.isclose(i1, i2, rel_tol=1e-9):
        assert v < 1


def test_fit_recovers_noiseless_generator():
    fit = fit_fringe(FringeScan(PHASES, sinusoid(0.5)))
    assert abs(fit.visibility - 0.5) < 1e-9
    assert abs(fit.phase_origin - 0.4) < 1e-9
    assert abs(fit.offset - 1.0) < 1e-9


def test_fit_constant_data():
    fit = fit_fringe(FringeScan(PHASES, np.full(PHASES.size, 0.3)))
    assert fit.visibility == 0.0
    assert math.isinf(fit.phase_origin_stderr)


def test_fit_rejects_short_or_narrow_scans():
    with pytest.raises(ValueError):
        fit_fringe(FringeScan(PHASES[:5], sinusoid(0.5)[:5]))
    narrow = np.linspace(0, 3, 16)
    with pytest.raises(ValueError):
        fit_fringe(FringeScan(narrow, sinusoid(0.5, phases=narrow)))
    with pytest.raises(ValueError):
        FringeScan(PHASES, np.ones(3))


def test_fit_coverage_over_seeded_trials():
    rng = np.random.default_rng(123)
    hits, trials = 0, 400
    for _ in range(trials):
        y = sinusoid(0.7) + rng.normal(0, 0.05, PHASES.size)
        fit = fit_fringe(FringeScan(PHASES, y))
        hits += abs(fit.visibility - 0.7) <= 3 * fit.visibility_stderr
    assert hits / trials >= 0.95


def test_covariance_stderr_matches_bootstrap():
    rng = np.random.default_rng(4)
    err = np.full(PHASES.size, 0.03)
    y = sinusoid(0.8) + rng.normal(0, 0.03, PHASES.size)
    scan = FringeScan(PHASES, y, err)
    # covariance from known errors
    X = np.column_stack([np.ones_like(PHASES), np.cos(PHASES), np.sin(PHASES)])
    fit = fit_fringe(scan)
    boot = bootstrap_visibility_stderr(scan, np.random.default_rng(9), 2000)
    cov = 0.03**2 * np.linalg.inv(X.T @ X)
    a, b = fit.amplitude * math.cos(fit.phase_origin), fit.amplitude * math.sin(fit.phase_origin)
    g = np.array([-fit.amplitude / fit.offset**2, a / (fit.amplitude * fit.offset), b / (fit.amplitude * fit.offset)])
    analytic = math.sqrt(g @ cov @ g)
    assert boot == pytest.approx(analytic, rel=0.1)
    with pytest.raises(ValueError):
        bootstrap_visibility_stderr(FringeScan(PHASES, y), np.random.default_rng(0))


def test_net_visibility_examples():
    fit = fit_fringe(FringeScan(PHASES, 0.16 + 0.14 * np.cos(PHASES)))
    assert net_visibility(fit, 0.0) == pytest.approx(fit.visibility, rel=1e-12)
    assert net_visibility(fit, 0.012) == pytest.approx(0.946, abs=5e-4)
    with pytest.raises(ValueError):
        net_visibility(fit, 0.2)


def test_scaling_exponent_synthetic():
    x = np.geomspace(1e-3, 1, 7)
    assert abs(scaling_exponent(x, x)[0] - 1) < 1e-9
    assert abs(scaling_exponent(x, 5 * x**3)[0] - 3) < 1e-9
    with pytest.raises(ValueError):
        scaling_exponent([1, 2, 0], [1, 2, 3])
    with pytest.raises(ValueError):
        scaling_exponent([1, 2], [1, 2])
