"""Gaussian dual quermassintegrals and their mixed versions.

Every quantity comes back as an ``IntegralResult`` carrying the scheme and a
standard error. Deterministic Gauss-Hermite rules give zero stderr; Monte
Carlo and scrambled Sobol estimates report a replicate-based one.
"""

from fdm import MaxAffine, Quadratic, dual_quermassintegral, mixed_fd, mixed_integral, self_mixed

half, square = Quadratic(1.0), Quadratic(2.0)

print("∫ f dγ  for f = x^2/2 :", dual_quermassintegral(half, -1).value)
print("∫ f^2 dγ              :", dual_quermassintegral(half, -2).value)
for scheme in ("mc:100000", "qmc:65536"):
    r = dual_quermassintegral(half, -2, scheme, seed=0)
    print(f"  {scheme:10s} {r.value:.6f} ± {r.stderr:.1e}")

absx = MaxAffine([-1.0, 1.0], [0.0, 0.0])
print("\n|x| is integrated cell by cell, so E|x| is exact:", dual_quermassintegral(absx, -1).value)

print("\nself-mixed value of x^2/2 at q=-1:", self_mixed(half, -1).value)
a, b = mixed_integral(half, square, 0), mixed_fd(half, square, -1)
print(f"mixed value by the integral formula {a.value:.8f}, by finite differences {b.value:.8f}")
