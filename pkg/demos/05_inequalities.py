"""Inequalities as signed gaps.

Each check returns a GapReport oriented so that a nonnegative gap means the
inequality holds. The standard battery sweeps one-dimensional pairs over
several exponents; the only reports that fail are the reversed
Brunn-Minkowski ones for -1 < q < 0.
"""

from collections import Counter

from fdm import MaxAffine, Quadratic, brunn_minkowski_gap, minkowski_gap, prekopa_leindler_check, standard_battery

half, square = Quadratic(1.0), Quadratic(2.0)
r = minkowski_gap(half, square, 0)
print(f"Minkowski (x^2/2, x^2, q=0): gap {r.gap:.6f}; the other sign arrangement gives {r.extra['printed_gap']:.6f}")
for q in (-2.0, -1.0, -0.5):
    r = brunn_minkowski_gap(half, square, 0.5, q)
    print(f"Brunn-Minkowski q={q:+.1f} ({r.extra['orientation']}): lhs {r.lhs:.5f} rhs {r.rhs:.5f} gap {r.gap:+.5f}")
absx = MaxAffine([-1.0, 1.0], [0.0, 0.0])
print("Prékopa-Leindler |x| vs x^2/2, t=1/4: gap", round(prekopa_leindler_check(absx, half, 0.25).gap, 6))

reports = standard_battery()
tally = Counter((r.name, r.passed) for r in reports)
print(f"\nbattery: {len(reports)} reports")
for (name, ok), n in sorted(tally.items()):
    print(f"  {name:18s} {'pass' if ok else 'FAIL'} {n}")
