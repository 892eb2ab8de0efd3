"""Solving for a convex function with a prescribed dual curvature measure.

The unknowns are the values of the candidate at the atoms. The solver runs
L-BFGS on the variational functional and reports how well the recovered
measure, scaled by τ, matches the input.
"""

import numpy as np

from fdm import DiscreteMeasure, solve, verify_solution

two = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
for q in (0.0, -1.0):
    r = solve(two, q)
    print(f"two atoms, q={q:+.0f}: v={r.v}, τ={r.tau:.6f}, residual TV={r.residual_tv:.1e}")

ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
tri = DiscreteMeasure(np.column_stack([np.cos(ang), np.sin(ang)]), [1 / 3] * 3)
r = solve(tri, 0.0, seed=0)
print("\nsymmetric triangle: recovered weights", np.round(r.recovered.weights / r.recovered.total, 4))
rep = verify_solution(tri, 0.0, r, seed=0)
print("independent check:", {k: round(v, 6) for k, v in rep.to_dict().items() if isinstance(v, float)})

# weights that are not the barycentric coordinates of 0 make the functional
# unbounded below; the solver stops and says so
skew = DiscreteMeasure([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], [0.2, 0.3, 0.5])
r = solve(skew, 0.0)
print("\nskewed triangle: converged", r.converged, "diverging", r.extra.get("diverging"))
