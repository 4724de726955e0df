# %% [markdown]
# # Visibility expected for spontaneous emission from two N-atom ensembles
#
# For ensembles prepared by pulses of area theta, the two-ensemble fringe
# visibility is N cos^2(theta/2) / (1 + (N - 1) cos^2(theta/2)). A single
# atom per arm gives cos^2(theta/2); macroscopic ensembles stay close to
# unit visibility at any area short of full inversion.

# %%
import math

import numpy as np

from fidmz.analysis import mandel_visibility

thetas = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0]) * math.pi
ns = [1, 10, 1e3, 1e6, 1e12]
print("theta/pi " + "".join(f"{'N=' + format(n, 'g'):>12s}" for n in ns))
for th in thetas:
    print(f"{th / math.pi:8.2f} " + "".join(f"{mandel_visibility(n, th):12.6f}" for n in ns))
