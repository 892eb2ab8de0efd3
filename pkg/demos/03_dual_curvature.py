"""Dual curvature measures.

For a max-affine function the gradient is constant on each cell, so the
measure sits on the slopes with weights equal to cell integrals. For smooth
inputs the pushforward is sampled instead. Either way the total mass is the
dual quermassintegral.
"""

import numpy as np

from fdm import (
    Quadratic,
    body_bridge_check,
    dual_curvature_empirical,
    dual_curvature_semidiscrete,
    dual_quermassintegral,
    regular_polygon_gauge,
    unit_ball_gauge,
)

hexagon = regular_polygon_gauge(6)
m = dual_curvature_semidiscrete(hexagon, -1, seed=0)
print("atoms of C_-1 for the hexagon gauge")
for x, w in zip(m.atoms, m.weights):
    print(f"  ({x[0]:+.4f}, {x[1]:+.4f})  {w:.5f}")
print(f"total {m.total:.5f} ± {m.total_stderr:.1e}  vs  ∫ h dγ = {dual_quermassintegral(hexagon, -1, 'qmc:262144', seed=1).value:.5f}")

e = dual_curvature_empirical(Quadratic(np.diag([1.0, 3.0])), -1, 100_000, seed=2)
mass, se = e.integrate_with_stderr(lambda y: np.ones(len(y)))
print(f"\nellipse quadratic: sampled mass {mass:.4f} ± {se:.4f} (exact 2)")

print("\nbody bridge for the disc:")
for q in (0.0, -2.0):
    r = body_bridge_check(unit_ball_gauge(2), q)
    print(f"  q={q:+.0f}  Gaussian side {r.lhs.value:.6f}  radial side {r.rhs:.6f}")
