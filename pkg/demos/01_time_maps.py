# %% [markdown]
# # Time-maps of the twist pendulum
#
# Orbits of x'' = -sin(2x) are level sets of V = y**2 - cos(2x).  A closed
# orbit is labelled by its amplitude alpha, an open one by the height beta
# at which it crosses x = 0.  Three transit times describe everything:
# the quarter period T(alpha), the time T1(alpha, phi) from the y-axis to
# the line x = phi, and the same time T2(beta, phi) along an open orbit.

# %%
import math

import numpy as np

from twistmap import quarter_period, time_above, time_to_line
from twistmap.oracles import OracleMap, quad_oracle

# %% [markdown]
# Small oscillations have period pi/sqrt(2), so T starts at pi/(2 sqrt 2)
# and grows without bound as alpha reaches the saddle at pi/2.

# %%
for a in (1e-6, 0.3, 0.7, 1.2, 1.5, math.pi / 2 - 1e-6):
    print(f"alpha={a:10.6f}  T={quarter_period(a):.12f}")
print("pi/(2 sqrt 2) =", math.pi / (2 * math.sqrt(2)))

# %% [markdown]
# T1 decreases in alpha at fixed phi, and T2 in beta.  Across the
# separatrix (alpha = pi/2, beta = sqrt 2) the two meet.

# %%
phi = 0.6
alphas = np.linspace(phi + 1e-3, math.pi / 2 - 1e-4, 6)
print([round(time_to_line(a, phi), 6) for a in alphas])
betas = np.linspace(math.sqrt(2), 6.0, 6)
print([round(time_above(b, phi), 6) for b in betas])

# %% [markdown]
# The kernels run on a fixed Gauss-Kronrod rule with a change of variable
# that removes the turning-point singularity.  The oracle integrates the raw
# integrands with QUADPACK instead; the two agree to roundoff.

# %%
for which, args, core in (
    (OracleMap.T, (0.9,), quarter_period(0.9)),
    (OracleMap.T1, (1.1, 0.4), time_to_line(1.1, 0.4)),
    (OracleMap.T2, (2.5, 0.8), time_above(2.5, 0.8)),
):
    ref = quad_oracle(which, args)
    print(f"{which.value:3s} kernel={core:.15f} oracle={ref:.15f} rel={abs(core - ref) / ref:.1e}")
