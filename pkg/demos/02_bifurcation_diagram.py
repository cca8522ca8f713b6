# %% [markdown]
# # Bifurcation diagram for boundary angles (pi/6, pi/4)
#
# A solution of x'' = -sin(2x) with x(-L) = -phi0 and x(L) = phi1 is an orbit
# that travels from one boundary line to the other in time 2L.  Sorting such
# orbits by how they wrap around the origin gives four families per winding
# number k: A, Cr, Cl and D.  The field strength is lambda = 8 L**2.

# %%
import math
from pathlib import Path

from twistmap import BranchId, CellParams, build_diagram, critical_times, find_saddle_node, solve_at_L
from twistmap.serialize import write_outputs

cell = CellParams(math.pi / 6, math.pi / 4)

# %% [markdown]
# Two critical orbits organise winding k.  They leave the left line and hit
# the right one with zero slope.  The A and Cr families start at the lower
# one, Cl and D at the upper one.

# %%
for k in range(3):
    c = critical_times(cell, k)
    print(f"k={k}: T_*={c.T_star:.6f}  T^*={c.T_upper:.6f}")

# %% [markdown]
# Cl is the only winding-0 family whose transit time is not monotone.  It
# falls from T^* to a minimum and climbs again, so two solutions are born in
# a saddle-node there.  With equal angles the minimum would sit at T^* and
# become a pitchfork.

# %%
sn = find_saddle_node(cell, BranchId("Cl", 0))
print(f"fold at L={sn.L_sn:.10f}, lambda={8 * sn.L_sn ** 2:.6f}")
for L in (sn.L_sn - 0.01, sn.L_sn + 0.01, 2.0):
    roots = solve_at_L(cell, BranchId("Cl", 0), L)
    print(f"L={L:.4f}: {len(roots)} root(s)", [round(r.value, 8) for r in roots])

# %% [markdown]
# The full diagram up to winding 2, written as CSV, JSON and SVG.  The SVG
# plots y(-L) against lambda with stable parts marked s and unstable u.

# %%
diagram = build_diagram(cell, k_max=2, L_max=8.0, n_points=100, overlay_symmetric=True)
out = Path("diagram_out")
out.mkdir(exist_ok=True)
write_outputs(diagram, out / "diagram.csv", out / "diagram.json", out / "diagram.svg")
print(len(diagram), "points written to", out.resolve())
