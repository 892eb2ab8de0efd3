"""Gap computations for Brunn–Minkowski, Minkowski, Jensen and Prékopa–Leindler type inequalities.

Every check returns a :class:`GapReport` whose ``gap`` is oriented so that
``gap >= 0`` means the inequality holds. Stochastic schemes propagate
standard errors of the ingredients by the delta method, treating them as
independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .calculus import inf_convolution, right_scalar_mult
from .errors import TruncationTooSmall, ValidationError, ZeroQ
from .functions import ConvexFunction, MaxAffine, Quadratic
from .integrals import DEFAULT_SCHEME, mixed_integral, power_mean
from .quadrature import gauss_legendre

DEFAULT_TOL = 1e-3
EQUALITY_TOL = 1e-6
TAIL_TOL = 1e-8


@dataclass
class GapReport:
    name: str
    lhs: float
    rhs: float
    gap: float
    stderr: float
    instance: str
    tol: float = DEFAULT_TOL
    passed: bool = field(init=False)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs, self.rhs, self.gap, self.stderr = map(float, (self.lhs, self.rhs, self.gap, self.stderr))
        self.passed = bool(self.gap >= -self.threshold)

    @property
    def threshold(self) -> float:
        return max(3.0 * self.stderr, self.tol)

    def is_equality(self, tol: float = EQUALITY_TOL) -> bool:
        return abs(self.gap) <= max(3.0 * self.stderr, tol)

    def to_row(self) -> dict:
        return {
            "name": self.name,
            "instance": self.instance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "stderr": self.stderr,
            "pass": self.passed,
        }


def _rss(*terms) -> float:
    return float(np.sqrt(sum(t * t for t in terms)))


def combination(f: ConvexFunction, g: ConvexFunction, t: float) -> ConvexFunction:
    """``[f(1-t)] □ [g t]``, the convex combination in the inf-convolution sense."""
    if not 0 < t < 1:
        raise ValidationError("t must lie in (0, 1)")
    return inf_convolution(right_scalar_mult(f, 1.0 - t), right_scalar_mult(g, t))


def _label(f) -> str:
    return getattr(f, "label", None) or repr(f)


def brunn_minkowski_gap(f, g, t: float, q: float, scheme=DEFAULT_SCHEME, seed=None, tol=DEFAULT_TOL) -> GapReport:
    """Compare ``N(comb)`` with ``(1-t) N(f) + t N(g)``, ``N(φ) = (∫ φ^{-q} dγ)^{-1/q}``.

    For ``q <= -1`` the expected sense is ``N(comb) <= ...``; for ``q > -1``
    the reversed sense is tested. The orientation used is stored in
    ``extra["orientation"]``.

    Examples
    --------
    >>> from fdm import Quadratic
    >>> r = brunn_minkowski_gap(Quadratic(1.0), Quadratic(2.0), 0.5, -1)
    >>> round(r.lhs, 12), round(r.rhs, 12)
    (0.666666666667, 0.75)
    """
    q = float(q)
    if q == 0:
        raise ZeroQ("the Brunn–Minkowski gap needs q != 0")
    h = combination(f, g, t)
    nf, ng, nh = (power_mean(u, -q, scheme, seed) for u in (f, g, h))
    mix = (1 - t) * nf.value + t * ng.value
    se = _rss(nh.stderr, (1 - t) * nf.stderr, t * ng.stderr)
    if q <= -1:
        gap, orientation = mix - nh.value, "<="
    else:
        gap, orientation = nh.value - mix, ">="
    return GapReport(
        "brunn_minkowski",
        nh.value,
        mix,
        gap,
        se,
        f"{_label(f)} | {_label(g)} | t={t:g} q={q:g}",
        tol,
        extra={"orientation": orientation},
    )


def minkowski_gap(f, g, q: float, scheme=DEFAULT_SCHEME, seed=None, tol=DEFAULT_TOL) -> GapReport:
    """Gap of the first-variation form of the Minkowski inequality.

    With ``M(φ) = (∫ φ^{1-q} dγ)^{1/(1-q)}`` and mixed values
    ``V(φ, ψ) = ∫ ψ*(∇φ) φ^{-q} dγ``::

        gap = [M(g) - M(f)] - M(f)^q [V(f, f) - V(f, g)]

    The alternative sign arrangement is reported in ``extra["printed_gap"]``.

    Examples
    --------
    >>> from fdm import Quadratic
    >>> round(minkowski_gap(Quadratic(1.0), Quadratic(2.0), 0).gap, 12)
    0.25
    """
    q = float(q)
    if q > 0:
        raise ValidationError("minkowski_gap needs q <= 0")
    mf = power_mean(f, 1.0 - q, scheme, seed)
    mg = power_mean(g, 1.0 - q, scheme, seed)
    vff = mixed_integral(f, f, q, scheme, seed)
    vfg = mixed_integral(f, g, q, scheme, seed)
    scale = mf.value**q
    lhs = scale * (vff.value - vfg.value)
    rhs = mg.value - mf.value
    gap = rhs - lhs
    dscale = abs(q * mf.value ** (q - 1) * (vff.value - vfg.value))
    se = _rss(mg.stderr, (1 + dscale) * mf.stderr, scale * vff.stderr, scale * vfg.stderr)
    printed = vfg.value - vff.value - rhs / scale
    return GapReport(
        "minkowski",
        lhs,
        rhs,
        gap,
        se,
        f"{_label(f)} | {_label(g)} | q={q:g}",
        tol,
        extra={"printed_gap": float(printed), "mixed_ff": vff.value, "mixed_fg": vfg.value},
    )


def jensen_monotonicity_check(f, q1: float, q2: float, scheme=DEFAULT_SCHEME, seed=None, tol=DEFAULT_TOL) -> GapReport:
    """``(∫ f^{-q} dγ)^{-1/q}`` must not decrease from ``q1`` to ``q2`` when ``-q1 < -q2``.

    Examples
    --------
    >>> from fdm import MaxAffine
    >>> two = MaxAffine([[0.0]], [-2.0])
    >>> abs(jensen_monotonicity_check(two, -1, -2).gap) < 1e-12
    True
    """
    q1, q2 = float(q1), float(q2)
    if q1 == 0 or q2 == 0:
        raise ZeroQ("exponents must be nonzero")
    if not -q1 < -q2:
        raise ValidationError("need -q1 < -q2")
    a = power_mean(f, -q1, scheme, seed)
    b = power_mean(f, -q2, scheme, seed)
    return GapReport(
        "jensen",
        a.value,
        b.value,
        b.value - a.value,
        _rss(a.stderr, b.stderr),
        f"{_label(f)} | q1={q1:g} q2={q2:g}",
        tol,
    )


def _tail_1d(fn: ConvexFunction, R: float) -> float:
    """Bound on ``∫_{|x|>R} e^{-f}`` for convex ``f`` increasing beyond ``±R``.

    Beyond ``R`` a convex function lies above its tangent, so
    ``∫_R^∞ e^{-f} <= e^{-f(R)} / f'(R)`` when the slope is positive.
    """
    total = 0.0
    for sign in (1.0, -1.0):
        x0 = np.array([[sign * R]])
        val = float(fn(x0)[0])
        # one-sided slope outward from a secant, which underestimates the derivative
        eps = 1e-3 * max(1.0, R)
        inner = float(fn(np.array([[sign * (R - eps)]]))[0])
        slope = (val - inner) / eps
        if not np.isfinite(val):
            continue
        if slope <= 0:
            return np.inf
        total += np.exp(-val) / slope
    return total


def lebesgue_integral_1d(fn: ConvexFunction, R: float, panels: int | None = None) -> float:
    """``∫_{-R}^{R} e^{-f(x)} dx`` by composite 24-point Gauss–Legendre."""
    x, w = gauss_legendre(24)
    n = panels or max(8, int(np.ceil(4 * R)))
    edges = np.linspace(-R, R, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    vals = fn(pts[:, None])
    return float(wts @ np.exp(-np.asarray(vals)))


def prekopa_leindler_check(f, g, t: float, R: float | None = None, tail_tol: float = TAIL_TOL,
                           tol=EQUALITY_TOL) -> GapReport:
    """``∫ e^{-comb} >= (∫ e^{-f})^{1-t} (∫ e^{-g})^t`` over Lebesgue measure on the line.

    Integrals run over ``[-R, R]``; ``R`` doubles from 8 until the tail
    bounds of all three functions are below ``tail_tol``. The bound total is
    reported as ``stderr`` (it bounds the truncation error).

    Raises
    ------
    TruncationTooSmall
        When no ``R`` up to 1024 meets ``tail_tol``, or a given ``R`` misses it.
    """
    if f.dim != 1 or g.dim != 1:
        raise ValidationError("the Lebesgue check is one-dimensional")
    h = combination(f, g, t)
    fns = (f, g, h)
    if R is None:
        R = 8.0
        while max(_tail_1d(u, R) for u in fns) > tail_tol:
            R *= 2
            if R > 1024:
                raise TruncationTooSmall("tails stay above tolerance up to R = 1024")
    tails = [_tail_1d(u, R) for u in fns]
    if max(tails) > tail_tol:
        raise TruncationTooSmall(f"tail bound {max(tails):.3g} exceeds {tail_tol:g} at R = {R:g}")
    If, Ig, Ih = (lebesgue_integral_1d(u, R) for u in fns)
    rhs = If ** (1 - t) * Ig**t
    # truncation moves each side by at most its tail bound
    err = tails[2] + (1 - t) * rhs / If * tails[0] + t * rhs / Ig * tails[1]
    return GapReport(
        "prekopa_leindler",
        Ih,
        rhs,
        Ih - rhs,
        err / 3.0,
        f"{_label(f)} | {_label(g)} | t={t:g}",
        tol,
        extra={"R": R, "tail_bounds": tails},
    )


def _named(fn, label):
    fn.label = label
    return fn


def battery_functions() -> dict:
    """One-dimensional convex functions used by :func:`standard_battery`."""
    absx = MaxAffine([[-1.0], [1.0]], [0.0, 0.0])
    return {
        "x^2/2": _named(Quadratic(1.0), "x^2/2"),
        "x^2": _named(Quadratic(2.0), "x^2"),
        "(x-0.3)^2/2": _named(Quadratic.centered(1.0, 0.3), "(x-0.3)^2/2"),
        "|x|": _named(absx, "|x|"),
        "max(-x,2x)": _named(MaxAffine([[-1.0], [2.0]], [0.0, 0.0]), "max(-x,2x)"),
        "huber": _named(inf_convolution(MaxAffine([[-1.0], [1.0]], [0.0, 0.0]), Quadratic(1.0)), "huber"),
        "|x|+0.5": _named(MaxAffine([[-1.0], [1.0]], [-0.5, -0.5]), "|x|+0.5"),
    }


BM_PAIRS = [
    ("x^2/2", "x^2"),
    ("x^2/2", "(x-0.3)^2/2"),
    ("|x|", "x^2/2"),
    ("huber", "|x|+0.5"),
    ("max(-x,2x)", "|x|"),
    ("huber", "x^2"),
]
# ψ* must be finite on the range of ∇φ
MINKOWSKI_PAIRS = [
    ("x^2/2", "x^2"),
    ("x^2", "x^2/2"),
    ("x^2/2", "(x-0.3)^2/2"),
    ("|x|", "max(-x,2x)"),
    ("|x|", "x^2/2"),
    ("huber", "|x|+0.5"),
    ("huber", "x^2/2"),
]
PL_PAIRS = [
    ("x^2/2", "x^2"),
    ("x^2/2", "(x-0.3)^2/2"),
    ("|x|", "x^2/2"),
    ("huber", "|x|+0.5"),
    ("max(-x,2x)", "|x|"),
]
JENSEN_FUNCTIONS = ["x^2/2", "x^2", "(x-0.3)^2/2", "|x|", "huber", "|x|+0.5", "max(-x,2x)"]
QS = (0.0, -0.5, -1.0, -2.0)
TS = (0.25, 0.5, 0.75)


def standard_battery(scheme=DEFAULT_SCHEME, seed=None, which=("bm", "minkowski", "jensen", "pl"),
                     include_equality: bool = True) -> list[GapReport]:
    """Run every check over the standard one-dimensional battery.

    ``q`` runs over ``{0, -1/2, -1, -2}`` (``q = 0`` skipped where it is
    excluded) and ``t`` over ``{1/4, 1/2, 3/4}``. With ``include_equality``
    the pairs ``φ = ψ`` are added; their reports carry
    ``extra["equality_case"] = True``.
    """
    F = battery_functions()
    out: list[GapReport] = []
    eq_names = ["x^2/2", "|x|+0.5", "huber"] if include_equality else []

    def mark(r, eq):
        r.extra["equality_case"] = eq
        out.append(r)

    if "bm" in which:
        for (a, b), t, q in itertools.product(BM_PAIRS, TS, QS):
            if q != 0:
                mark(brunn_minkowski_gap(F[a], F[b], t, q, scheme, seed), False)
        for a, q in itertools.product(eq_names, QS):
            if q != 0:
                mark(brunn_minkowski_gap(F[a], F[a], 0.5, q, scheme, seed), True)
    if "minkowski" in which:
        for (a, b), q in itertools.product(MINKOWSKI_PAIRS, QS):
            mark(minkowski_gap(F[a], F[b], q, scheme, seed), False)
        for a, q in itertools.product(eq_names, QS):
            mark(minkowski_gap(F[a], F[a], q, scheme, seed), True)
    if "jensen" in which:
        neg = [q for q in QS if q != 0]
        for a in JENSEN_FUNCTIONS:
            for q1, q2 in itertools.combinations(neg, 2):
                mark(jensen_monotonicity_check(F[a], q1, q2, scheme, seed), False)
    if "pl" in which:
        for (a, b), t in itertools.product(PL_PAIRS, TS):
            mark(prekopa_leindler_check(F[a], F[b], t), False)
        for a in eq_names:
            mark(prekopa_leindler_check(F[a], F[a], 0.5), True)
    return out
