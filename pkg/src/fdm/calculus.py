"""Convex calculus on the finite representations.

Infimal convolution is computed through its conjugate,
``(f □ g)(x) = sup_y <x, y> - f*(y) - g*(y)``. Closed forms are used where
they exist (two quadratics, two max-affine functions in one dimension); other
pairs get an evaluable closure that maximizes the concave dual objective by
golden-section search, coordinate-wise above one dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegeneratePolar,
    DimensionMismatch,
    NonPositiveScale,
    PreconditionFailed,
    SearchBoxTooSmall,
    UnboundedBelow,
)
from .functions import (
    ConvexFunction,
    GridFunction,
    MaxAffine,
    PointHull,
    Quadratic,
    as_points,
)

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
DEFAULT_RADIUS = 100.0


def golden_max(obj, lo, hi, max_iter: int = 200):
    """Vectorized golden-section maximization of concave 1-D objectives.

    Parameters
    ----------
    obj : callable
        Maps an ``(m,)`` array of abscissae (one per problem) to values.
    lo, hi : ndarray, shape (m,)
        Bracket per problem; ``lo == hi`` is allowed.

    Returns
    -------
    t, value : ndarray
        The best of the converged midpoint and the two bracket ends.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(max_iter):
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))):
            break
        left = fc >= fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        new_c = np.where(left, b - _INVPHI * (b - a), d)
        new_d = np.where(left, c, a + _INVPHI * (b - a))
        fnew = obj(np.where(left, new_c, new_d))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = new_c, new_d
    cands = np.stack([0.5 * (a + b), np.asarray(lo, float), np.asarray(hi, float)])
    vals = np.stack([obj(row) for row in cands])
    best = np.argmax(vals, axis=0)
    cols = np.arange(cands.shape[1])
    return cands[best, cols], vals[best, cols]


def maximize_concave(obj, lo, hi, max_sweeps: int = 200):
    """Maximize ``obj`` over boxes, one problem per row.

    ``obj`` maps an ``(m, d)`` array to ``(m,)`` values. One dimension is a
    single golden-section search; otherwise cyclic coordinate ascent with a
    golden-section line search per coordinate, stopped when a sweep gains
    less than ``1e-15`` relative.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m, d = lo.shape
    if d == 1:
        t, val = golden_max(lambda s: obj(s[:, None]), lo[:, 0], hi[:, 0])
        return t[:, None], val
    y = np.clip(np.zeros((m, d)), lo, hi)
    val = obj(y)
    for _ in range(max_sweeps):
        prev = val
        for k in range(d):
            def line(s, k=k):
                z = y.copy()
                z[:, k] = s
                return obj(z)

            y[:, k], _ = golden_max(line, lo[:, k], hi[:, k])
        val = obj(y)
        if np.all(val - prev <= 1e-15 * np.maximum(1.0, np.abs(val))):
            break
    return y, val


def _closed_conjugate(f: ConvexFunction) -> ConvexFunction:
    if isinstance(f, GridFunction):
        raise TypeError("grid functions need an explicit dual box; call f.conjugate(lo, hi, shape)")
    return f.conjugate()


def _check_same_dim(f, g):
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimensions {f.dim} and {g.dim} differ")


class FunctionSum(ConvexFunction):
    """Pointwise sum ``f + g``; the conjugate of an infimal convolution."""

    def __init__(self, f: ConvexFunction, g: ConvexFunction):
        _check_same_dim(f, g)
        self.f, self.g, self.dim = f, g, f.dim

    def domain_bounds(self):
        flo, fhi = self.f.domain_bounds()
        glo, ghi = self.g.domain_bounds()
        return np.maximum(flo, glo), np.minimum(fhi, ghi)

    def in_domain(self, pts):
        return self.f.in_domain(pts) & self.g.in_domain(pts)

    def _eval(self, pts):
        return self.f._eval(pts) + self.g._eval(pts)

    def _grad(self, pts):
        gf, sf = self.f._grad(pts)
        gg, sg = self.g._grad(pts)
        return gf + gg, sf & sg

    def conjugate(self):
        return InfConvolution(_closed_conjugate(self.f), _closed_conjugate(self.g))


class InfConvolution(ConvexFunction):
    """Evaluable closure for ``f □ g`` via the dual program.

    Parameters
    ----------
    f, g : ConvexFunction
        Both must have closed-form conjugates.
    box : float or (lo, hi), optional
        Search box in the dual variable. The effective domains of ``f*`` and
        ``g*`` are intersected with it; a maximizer on a face that came from
        the box (rather than from a domain) raises ``SearchBoxTooSmall``.

    Notes
    -----
    The dual program is solved by golden section in one dimension and by
    cyclic coordinate ascent above. Coordinate ascent can stall at corners
    of a nonsmooth dual objective (for instance a polyhedral conjugate
    domain), where it returns a lower bound. Max-affine pairs therefore go
    through :class:`MaxAffineInfConvolution` instead.
    """

    def __init__(self, f: ConvexFunction, g: ConvexFunction, box=None):
        _check_same_dim(f, g)
        self.f, self.g, self.dim = f, g, f.dim
        self.fs, self.gs = _closed_conjugate(f), _closed_conjugate(g)
        if box is None:
            box = DEFAULT_RADIUS
        if np.isscalar(box):
            blo, bhi = np.full(self.dim, -float(box)), np.full(self.dim, float(box))
        else:
            blo = np.broadcast_to(np.asarray(box[0], float), (self.dim,)).copy()
            bhi = np.broadcast_to(np.asarray(box[1], float), (self.dim,)).copy()
        dlo, dhi = FunctionSum(self.fs, self.gs).domain_bounds()
        if np.any(dlo > dhi):
            raise UnboundedBelow("conjugate domains do not intersect; f □ g is -inf")
        self.box = (blo, bhi)
        self._lo = np.maximum(dlo, blo)
        self._hi = np.minimum(dhi, bhi)
        self._box_faces_lo = blo > dlo
        self._box_faces_hi = bhi < dhi
        if np.any(self._lo > self._hi):
            raise SearchBoxTooSmall("search box misses the conjugate domain")

    def _dual(self, pts):
        m = len(pts)
        lo = np.broadcast_to(self._lo, (m, self.dim))
        hi = np.broadcast_to(self._hi, (m, self.dim))

        def obj(y):
            return np.einsum("ij,ij->i", pts, y) - self.fs._eval(y) - self.gs._eval(y)

        y, val = maximize_concave(obj, lo, hi)
        width = np.maximum(self._hi - self._lo, 1e-300)
        tol = 1e-7 * np.maximum(width, 1.0)
        hit = ((y - self._lo <= tol) & self._box_faces_lo) | ((self._hi - y <= tol) & self._box_faces_hi)
        if np.any(hit):
            raise SearchBoxTooSmall("dual maximizer lies on the search box; enlarge it")
        return y, val

    def _eval(self, pts):
        return self._dual(pts)[1]

    def _grad(self, pts):
        return self._dual(pts)[0], np.ones(len(pts), dtype=bool)

    def conjugate(self):
        return FunctionSum(self.fs, self.gs)

    def __repr__(self):
        return f"InfConvolution({self.f!r}, {self.g!r})"


class MaxAffineInfConvolution(ConvexFunction):
    """``f □ g`` for max-affine ``f, g`` in any dimension, one LP per point.

    Solves ``min s + r`` subject to ``s >= <a_i, x - z> - c_i`` and
    ``r >= <b_j, z> - d_j`` over ``(z, s, r)``.
    """

    def __init__(self, f: MaxAffine, g: MaxAffine):
        _check_same_dim(f, g)
        self.f, self.g, self.dim = f, g, f.dim

    def _solve(self, x):
        d = self.dim
        A, c = self.f.slopes, self.f.intercepts
        B, e = self.g.slopes, self.g.intercepts
        rows_f = np.hstack([-A, -np.ones((len(A), 1)), np.zeros((len(A), 1))])
        rows_g = np.hstack([B, np.zeros((len(B), 1)), -np.ones((len(B), 1))])
        A_ub = np.vstack([rows_f, rows_g])
        b_ub = np.concatenate([c - A @ x, e])
        cost = np.concatenate([np.zeros(d), [1.0, 1.0]])
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")
        if res.status != 0:
            raise UnboundedBelow("f □ g is -inf (slope hulls do not meet)")
        lam = -res.ineqlin.marginals[: len(A)]
        return res.fun, lam @ A

    def _eval(self, pts):
        return np.array([self._solve(x)[0] for x in pts])

    def _grad(self, pts):
        return np.array([self._solve(x)[1] for x in pts]), np.ones(len(pts), dtype=bool)

    def conjugate(self):
        return FunctionSum(self.f.conjugate(), self.g.conjugate())


def _quadratic_inf_convolution(f: Quadratic, g: Quadratic) -> Quadratic:
    fs, gs = f.conjugate(), g.conjugate()
    return Quadratic(fs.A + gs.A, fs.b + gs.b, fs.c + gs.c).conjugate()


def _max_affine_inf_convolution_1d(f: MaxAffine, g: MaxAffine) -> MaxAffine:
    fs, gs = f.conjugate(), g.conjugate()
    lo = max(fs.domain_bounds()[0][0], gs.domain_bounds()[0][0])
    hi = min(fs.domain_bounds()[1][0], gs.domain_bounds()[1][0])
    if lo > hi:
        raise UnboundedBelow("slope intervals do not intersect; f □ g is -inf")
    # the sum of the two envelopes is affine between these breakpoints
    bp = np.concatenate([fs._hull[0], gs._hull[0], [lo, hi]])
    bp = np.unique(bp[(bp >= lo) & (bp <= hi)])
    return MaxAffine(bp, fs(bp) + gs(bp))


def inf_convolution(f: ConvexFunction, g: ConvexFunction, box=None) -> ConvexFunction:
    """Infimal convolution ``(f □ g)(x) = inf_y f(x - y) + g(y)``.

    Exact for quadratic pairs and for max-affine pairs; otherwise returns an
    :class:`InfConvolution` closure.

    Examples
    --------
    >>> huber = inf_convolution(MaxAffine([-1.0, 1.0], [0.0, 0.0]), Quadratic(1.0))
    >>> round(huber(2.0), 12), round(huber(0.5), 12)
    (1.5, 0.125)
    """
    _check_same_dim(f, g)
    if isinstance(f, Quadratic) and isinstance(g, Quadratic):
        return _quadratic_inf_convolution(f, g)
    if isinstance(f, MaxAffine) and isinstance(g, MaxAffine):
        if f.dim == 1:
            return _max_affine_inf_convolution_1d(f, g)
        return MaxAffineInfConvolution(f, g)
    return InfConvolution(f, g, box=box)


class RightScaled(ConvexFunction):
    """Generic ``(f t)(x) = t f(x / t)``."""

    def __init__(self, f: ConvexFunction, t: float):
        self.f, self.t, self.dim = f, float(t), f.dim

    def domain_bounds(self):
        lo, hi = self.f.domain_bounds()
        return lo * self.t, hi * self.t

    def in_domain(self, pts):
        return self.f.in_domain(pts / self.t)

    def _eval(self, pts):
        return self.t * self.f._eval(pts / self.t)

    def _grad(self, pts):
        return self.f._grad(pts / self.t)

    def conjugate(self):
        return ScaledFunction(_closed_conjugate(self.f), self.t)


class ScaledFunction(ConvexFunction):
    """Left multiplication ``t f``."""

    def __init__(self, f: ConvexFunction, t: float):
        self.f, self.t, self.dim = f, float(t), f.dim

    def domain_bounds(self):
        return self.f.domain_bounds()

    def in_domain(self, pts):
        return self.f.in_domain(pts)

    def _eval(self, pts):
        return self.t * self.f._eval(pts)

    def _grad(self, pts):
        g, s = self.f._grad(pts)
        return self.t * g, s

    def conjugate(self):
        return RightScaled(_closed_conjugate(self.f), self.t)


def right_scalar_mult(f: ConvexFunction, t: float) -> ConvexFunction:
    """Right scalar multiplication ``(f t)(x) = t f(x / t)``, ``t > 0``.

    The representation is preserved: max-affine intercepts scale by ``t``,
    hull points and values scale by ``t``, grid boxes stretch by ``t``.
    """
    t = float(t)
    if not (np.isfinite(t) and t > 0):
        raise NonPositiveScale(f"scale must be positive, got {t}")
    if isinstance(f, MaxAffine):
        return MaxAffine(f.slopes, t * f.intercepts)
    if isinstance(f, PointHull):
        return PointHull(t * f.points, t * f.values)
    if isinstance(f, Quadratic):
        return Quadratic(f.A / t, f.b, t * f.c)
    if isinstance(f, GridFunction):
        return GridFunction(t * f.lo, t * f.hi, f.shape, t * f.values)
    if isinstance(f, InfConvolution):
        return InfConvolution(right_scalar_mult(f.f, t), right_scalar_mult(f.g, t), box=f.box)
    return RightScaled(f, t)


def conjugate(f: ConvexFunction, *dual_grid) -> ConvexFunction:
    """Legendre transform; grid functions need ``(dual_lo, dual_hi, dual_shape)``."""
    return f.conjugate(*dual_grid)


class NumericConjugate(ConvexFunction):
    """``f*(y) = sup_x <x, y> - f(x)`` by direct maximization over a box.

    Independent of any closed form, so it serves as an oracle for identities
    such as ``(f □ g)* = f* + g*``.
    """

    def __init__(self, f: ConvexFunction, box=DEFAULT_RADIUS):
        self.f, self.dim = f, f.dim
        lo, hi = f.domain_bounds()
        self._lo = np.maximum(lo, -box)
        self._hi = np.minimum(hi, box)

    def _primal(self, pts):
        m = len(pts)

        def obj(x):
            return np.einsum("ij,ij->i", pts, x) - self.f._eval(x)

        return maximize_concave(
            obj, np.broadcast_to(self._lo, (m, self.dim)), np.broadcast_to(self._hi, (m, self.dim))
        )

    def _eval(self, pts):
        return self._primal(pts)[1]

    def _grad(self, pts):
        return self._primal(pts)[0], np.ones(len(pts), dtype=bool)


def numeric_conjugate(f: ConvexFunction, box: float = DEFAULT_RADIUS) -> NumericConjugate:
    return NumericConjugate(f, box)


class Pointwise(ConvexFunction):
    """Pointwise ``min`` or ``max`` of two functions (gradient of the active one)."""

    def __init__(self, f: ConvexFunction, g: ConvexFunction, mode: str):
        _check_same_dim(f, g)
        if mode not in ("min", "max"):
            raise ValueError(mode)
        self.f, self.g, self.mode, self.dim = f, g, mode, f.dim

    def _eval(self, pts):
        op = np.minimum if self.mode == "min" else np.maximum
        return op(self.f._eval(pts), self.g._eval(pts))

    def _grad(self, pts):
        vf, vg = self.f._eval(pts), self.g._eval(pts)
        pick_f = vf <= vg if self.mode == "min" else vf >= vg
        gf, sf = self.f._grad(pts)
        gg, sg = self.g._grad(pts)
        smooth = np.where(pick_f, sf, sg) & (vf != vg)
        return np.where(pick_f[:, None], gf, gg), smooth


def pointwise_max(f: ConvexFunction, g: ConvexFunction) -> ConvexFunction:
    _check_same_dim(f, g)
    if isinstance(f, MaxAffine) and isinstance(g, MaxAffine):
        return MaxAffine(np.vstack([f.slopes, g.slopes]), np.concatenate([f.intercepts, g.intercepts]))
    if isinstance(f, GridFunction) and isinstance(g, GridFunction) and _same_grid(f, g):
        return GridFunction(f.lo, f.hi, f.shape, np.maximum(f.values, g.values))
    return Pointwise(f, g, "max")


def pointwise_min(f: ConvexFunction, g: ConvexFunction) -> ConvexFunction:
    """Pointwise minimum; exact for 1-D max-affine pairs whose minimum is convex."""
    _check_same_dim(f, g)
    if isinstance(f, MaxAffine) and isinstance(g, MaxAffine) and f.dim == 1:
        return _max_affine_min_1d(f, g)
    if isinstance(f, GridFunction) and isinstance(g, GridFunction) and _same_grid(f, g):
        return GridFunction(f.lo, f.hi, f.shape, np.minimum(f.values, g.values))
    return Pointwise(f, g, "min")


def _same_grid(f: GridFunction, g: GridFunction) -> bool:
    return f.shape == g.shape and np.array_equal(f.lo, g.lo) and np.array_equal(f.hi, g.hi)


def _max_affine_min_1d(f: MaxAffine, g: MaxAffine) -> MaxAffine:
    A = np.concatenate([f.slopes[:, 0], g.slopes[:, 0]])
    C = np.concatenate([f.intercepts, g.intercepts])
    cuts = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            if A[i] != A[j]:
                cuts.append((C[i] - C[j]) / (A[i] - A[j]))
    cuts = np.unique(cuts) if cuts else np.array([0.0])
    probes = np.concatenate([[cuts[0] - 1.0], 0.5 * (cuts[1:] + cuts[:-1]), [cuts[-1] + 1.0]])
    pf, pg = f(probes), g(probes)
    slopes, icepts = [], []
    for x, a, b in zip(probes, pf, pg):
        h = f if a <= b else g
        k = h.active(np.array([[x]]))[0]
        slopes.append(h.slopes[k, 0])
        icepts.append(h.intercepts[k])
    m = MaxAffine(slopes, icepts)
    test = np.concatenate([cuts, probes])
    if np.max(np.abs(m(test) - np.minimum(f(test), g(test)))) > 1e-12 * max(1.0, np.abs(test).max()):
        raise PreconditionFailed("min of the two functions is not convex")
    return m


def gauge_from_polar_vertices(U) -> MaxAffine:
    """Gauge ``||x||_K = max_u <u, x>`` of the body ``K`` whose polar is ``conv U``.

    Raises
    ------
    DegeneratePolar
        If the origin is not interior to ``conv U``.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U.reshape(-1, 1)
    if U.shape[0] == 0:
        raise DegeneratePolar("no polar vertices")
    if not origin_interior(U):
        raise DegeneratePolar("origin is not interior to the convex hull of U")
    return MaxAffine(U, np.zeros(len(U)))


def origin_interior(U: np.ndarray) -> bool:
    """Whether 0 lies in the interior of ``conv U``."""
    k, d = U.shape
    if np.linalg.matrix_rank(U) < d:
        return False
    # maximize eps subject to sum λ u = 0, sum λ = 1, λ_i >= eps
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    A_eq = np.vstack([np.hstack([U.T, np.zeros((d, 1))]), np.concatenate([np.ones(k), [0.0]])])
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    A_ub = np.hstack([-np.eye(k), np.ones((k, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * k + [(None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-12


def unit_ball_gauge(dim: int, m: int = 512) -> MaxAffine:
    """Polytope gauge approximating the Euclidean norm from below.

    One dimension is exact (``{-1, +1}``). In two dimensions the polar
    vertices are ``m`` equally spaced unit vectors, so the gauge lies within a
    relative ``1 - cos(pi/m)`` of ``|x|``. In three dimensions they are ``m``
    Fibonacci-sphere points.
    """
    if dim == 1:
        return gauge_from_polar_vertices([[-1.0], [1.0]])
    if dim == 2:
        th = 2 * np.pi * np.arange(m) / m
        return gauge_from_polar_vertices(np.column_stack([np.cos(th), np.sin(th)]))
    if dim == 3:
        k = np.arange(m) + 0.5
        z = 1 - 2 * k / m
        phi = np.pi * (1 + np.sqrt(5.0)) * k
        r = np.sqrt(1 - z**2)
        return gauge_from_polar_vertices(np.column_stack([r * np.cos(phi), r * np.sin(phi), z]))
    raise DimensionMismatch("ball gauges are provided for dimensions 1 to 3")


def regular_polygon_gauge(m: int, circumradius: float = 1.0) -> MaxAffine:
    """Gauge of the regular ``m``-gon with vertices ``circumradius * e^{2πik/m}``.

    The polar of that polygon has vertices at angles ``π(2k+1)/m`` and radius
    ``1 / (circumradius cos(π/m))``.
    """
    th = np.pi * (2 * np.arange(m) + 1) / m
    r = 1.0 / (circumradius * np.cos(np.pi / m))
    return gauge_from_polar_vertices(r * np.column_stack([np.cos(th), np.sin(th)]))


@dataclass(frozen=True)
class Infimum:
    value: float
    argmin: np.ndarray
    weights: np.ndarray


def infimum(h: MaxAffine) -> Infimum:
    """``inf_y h(y)`` by linear programming, with the minimizer and LP duals.

    The duals ``λ`` are convex weights on the pieces with ``sum λ_i a_i = 0``;
    they are the derivative of the infimum with respect to the intercepts.
    """
    A, c = h.slopes, h.intercepts
    k, d = A.shape
    cost = np.concatenate([np.zeros(d), [1.0]])
    A_ub = np.hstack([A, -np.ones((k, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=c, bounds=(None, None), method="highs")
    if res.status != 0:
        raise UnboundedBelow("0 is outside the convex hull of the slopes")
    lam = np.clip(-res.ineqlin.marginals, 0.0, None)
    total = lam.sum()
    lam = lam / total if total > 0 else lam
    return Infimum(float(res.fun), res.x[:d], lam)


def normalize_at_origin(h: MaxAffine):
    """Shift ``h`` so that ``inf h = 0``.

    Returns
    -------
    normalized : MaxAffine
        ``h - s``.
    s : float
        The infimum of ``h``.
    """
    s = infimum(h).value
    return MaxAffine(h.slopes, h.intercepts + s), s


@dataclass(frozen=True)
class ConvexityReport:
    passed: bool
    violation: float
    tol: float
    worst_index: tuple | None
    direction: tuple | None


def check_convexity_grid(g: GridFunction, tol: float = 1e-8) -> ConvexityReport:
    """Worst midpoint-convexity violation over axis and diagonal triples.

    For every node ``i`` and direction ``e`` in ``{-1, 0, 1}^d`` the quantity
    ``v[i] - (v[i-e] + v[i+e]) / 2`` must not exceed ``tol`` times the value
    scale. Triples touching ``+inf`` are skipped.
    """
    V = g.values
    scale = max(1.0, float(np.max(np.abs(V[np.isfinite(V)]), initial=0.0)))
    worst, where, direction = -np.inf, None, None
    for e in np.ndindex(*([3] * g.dim)):
        e = np.array(e) - 1
        nz = np.flatnonzero(e)
        if len(nz) == 0 or e[nz[0]] < 0:
            continue
        core = tuple(slice(1 if ek else 0, n - 1 if ek else n) for ek, n in zip(e, g.shape))
        lo = tuple(slice(s.start - ek, s.stop - ek) for s, ek in zip(core, e))
        hi = tuple(slice(s.start + ek, s.stop + ek) for s, ek in zip(core, e))
        mid, a, b = V[core], V[lo], V[hi]
        ok = np.isfinite(mid) & np.isfinite(a) & np.isfinite(b)
        if not ok.any():
            continue
        viol = np.where(ok, mid - 0.5 * (a + b), -np.inf)
        j = np.unravel_index(np.argmax(viol), viol.shape)
        if viol[j] > worst:
            worst = float(viol[j])
            where = tuple(int(jj + (s.start or 0)) for jj, s in zip(j, core))
            direction = tuple(int(x) for x in e)
    worst = max(worst, 0.0) if np.isfinite(worst) else 0.0
    return ConvexityReport(worst <= tol * scale, worst, tol, where, direction)


def evaluate(f: ConvexFunction, x):
    """Functional spelling of ``f(x)``."""
    return f(x)


def gradient(f: ConvexFunction, x):
    """Functional spelling of ``f.gradient(x)``."""
    return f.gradient(x)


__all__ = [
    "ConvexityReport",
    "FunctionSum",
    "InfConvolution",
    "Infimum",
    "MaxAffineInfConvolution",
    "NumericConjugate",
    "Pointwise",
    "RightScaled",
    "ScaledFunction",
    "as_points",
    "check_convexity_grid",
    "conjugate",
    "evaluate",
    "gauge_from_polar_vertices",
    "golden_max",
    "gradient",
    "inf_convolution",
    "infimum",
    "maximize_concave",
    "normalize_at_origin",
    "numeric_conjugate",
    "origin_interior",
    "pointwise_max",
    "pointwise_min",
    "regular_polygon_gauge",
    "right_scalar_mult",
    "unit_ball_gauge",
]
