# %% [markdown]
# # Stability and independent checks
#
# An equilibrium of u_t = u_zz + (lambda/2) sin(2u) is stable when its orbit
# has no turning point inside the interval, unstable with two or more, and
# with exactly one the sign of the time-map slope decides.  Below, each
# verdict is tested by simply running the parabolic equation from a
# slightly perturbed equilibrium.

# %%
import math

from twistmap import BranchId, CellParams, classify, find_saddle_node, make_point, solve_at_L
from twistmap.oracles import integrate_orbit, relax, shoot_check

cell = CellParams(math.pi / 6, math.pi / 4)
sn = find_saddle_node(cell, BranchId("Cl", 0))

# %%
cases = [("A", 0, 0.7, 0), ("Cr", 0, 2.0, 0), ("Cl", 0, sn.L_sn + 0.04, 0),
         ("Cl", 0, sn.L_sn + 0.04, 1), ("D", 0, 2.5, 0), ("A", 1, 4.0, -1)]
for kind, k, L, idx in cases:
    branch = BranchId(kind, k)
    param = solve_at_L(cell, branch, L)[idx]
    point = make_point(cell, branch, param)
    verdict = classify(cell, branch, param).verdict
    run = relax(cell, point, grid_size=51)
    print(f"{str(branch):8s} L={L:.3f}  {verdict.value:22s} relax: {run.outcome.value}")

# %% [markdown]
# Shooting from the left boundary with the predicted slope must land on the
# right boundary.  The residual is the miss distance in (x, y).

# %%
point = make_point(cell, BranchId("D", 1), solve_at_L(cell, BranchId("D", 1), 5.0)[0])
print("shooting residual:", shoot_check(cell, point))

# %% [markdown]
# The number of turning points is visible in the trajectory itself.

# %%
trace = integrate_orbit((-cell.phi0, point.y_minus), 2 * point.L)
print("sign changes of y:", trace.sign_changes(), " energy drift:", trace.energy_drift)
