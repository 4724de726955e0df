# %% [markdown]
# # How does the forward FID energy scale with the pulse energy?
#
# A square pulse much longer than the inverse linewidth of the addressed
# slice excites a weak, broad coherence. On a line far wider than the pulse
# spectrum the first-order coherence dephases completely during the pulse,
# so what survives after the pulse is higher order in the field. This script
# sweeps the pulse area at small optical depth and fits the log-log slope.

# %%
import math

import numpy as np

from fidmz.analysis import scaling_exponent
from fidmz.medium import MediumSpec, make_detuning_grid, stability_limit
from fidmz.propagation import (
    PulseSpec,
    calibrate_coupling,
    extract_fid,
    photon_energy,
    propagate,
    render_pulse,
)

DURATION = 2e-6
medium = MediumSpec(optical_depth=0.05, dipole_moment=0.82e-32)
grid = make_detuning_grid("flat", 6e6, 33)
kappa = calibrate_coupling(medium, grid).flux_to_rabi


def fid_energy(theta):
    """Forward FID photons after a square pulse of area ``theta``."""
    omega = theta / DURATION
    power = (omega / kappa) ** 2 * photon_energy(1532e-9)
    pulse = PulseSpec("square", DURATION, float(power))
    dt = 0.5 * stability_limit(grid.max_detuning, omega)
    dt = DURATION / math.ceil(DURATION / dt)
    src = render_pulse(pulse, dt, 50e-9, 1.3e-6)
    out, _ = propagate(src, medium, grid, 16)
    return src.energy(), extract_fid(out, DURATION).energy()


# %% small areas
thetas = np.geomspace(0.01, 0.1, 5)
pulse_e, fid_e = np.array([fid_energy(t) for t in thetas]).T
slope, err = scaling_exponent(pulse_e, fid_e)
for t, p, f in zip(thetas, pulse_e, fid_e):
    print(f"theta = {t:.3f}  pulse photons = {p:.3e}  FID photons = {f:.3e}")
print(f"log-log slope for theta in [0.01, 0.1]: {slope:.3f} +/- {err:.3f}")

# %% [markdown]
# The slope comes out close to 3: FID energy grows with the cube of the pulse
# energy, i.e. the emitted field is third order in the drive. Towards
# larger areas the local slope drops (to roughly 2.3 between pi/2 and pi)
# as the addressed atoms saturate.

# %% towards saturation
for t in (0.3, 1.0, math.pi / 2, math.pi):
    p, f = fid_energy(t)
    print(f"theta = {t:.3f}  FID photons = {f:.3e}  FID/pulse = {f / p:.3e}")
