"""Finite representations of convex functions.

Four concrete types share the :class:`ConvexFunction` interface:

* :class:`MaxAffine` -- ``f(x) = max_i <a_i, x> - c_i``
* :class:`PointHull` -- lower convex envelope of ``(x_i, v_i)``, ``+inf`` outside the hull
* :class:`GridFunction` -- samples on a box grid, multilinear interpolation
* :class:`Quadratic` -- ``1/2 x^T A x + b^T x + c`` with ``A`` symmetric positive definite

``MaxAffine`` and ``PointHull`` are exact Legendre duals of each other (the
conjugate is a data swap), and ``Quadratic`` is closed under every operation in
:mod:`fdm.calculus`. Values live in ``R ∪ {+inf}``; ``numpy.inf`` plays the
role of the absorbing ``+inf``.

Evaluation accepts either a single point or a batch. In dimension one a scalar
is a single point and a 1-D array is a batch; otherwise a 1-D array of length
``dim`` is a single point and an ``(m, dim)`` array is a batch.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, OutOfDomain, ValidationError

TIE_TOL = 1e-12
LP_TOL = 1e-10


def as_points(x, dim: int):
    """Normalize ``x`` to an ``(m, dim)`` float array.

    Returns
    -------
    points : ndarray
    single : bool
        True when ``x`` described one point.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if dim != 1:
            raise DimensionMismatch(f"scalar input for a {dim}-dimensional function")
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1), False
        if arr.shape[0] != dim:
            raise DimensionMismatch(f"expected length {dim}, got {arr.shape[0]}")
        return arr.reshape(1, dim), True
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr, False
    raise DimensionMismatch(f"cannot read shape {arr.shape} as points in R^{dim}")


def _as_matrix(rows, dim=None) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValidationError("need a non-empty list of vectors")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"vectors of length {arr.shape[1]} in dimension {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("vector entries must be finite")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


def _merge_duplicates(locs: np.ndarray, vals: np.ndarray):
    """Merge rows with identical locations keeping the smallest value.

    First-occurrence order is preserved so that lowest-index tie-breaking is
    stable under merging.
    """
    seen: dict[bytes, int] = {}
    keep_locs, keep_vals = [], []
    for row, val in zip(locs, vals):
        key = row.tobytes()
        if key in seen:
            j = seen[key]
            keep_vals[j] = min(keep_vals[j], val)
        else:
            seen[key] = len(keep_locs)
            keep_locs.append(row)
            keep_vals.append(val)
    return np.array(keep_locs), np.array(keep_vals, dtype=float), len(locs) - len(keep_locs)


class ConvexFunction:
    """Common interface: call for values, :meth:`gradient` for slopes."""

    dim: int

    def __call__(self, x):
        pts, single = as_points(x, self.dim)
        vals = self._eval(pts)
        return float(vals[0]) if single else vals

    def gradient(self, x):
        """Gradient (or a subgradient) with a smoothness flag.

        Returns
        -------
        grad : ndarray
            Shape ``(dim,)`` for one point, ``(m, dim)`` for a batch.
        is_smooth : bool or ndarray of bool
            False where two or more pieces tie, i.e. at a kink.
        """
        pts, single = as_points(x, self.dim)
        g, smooth = self._grad(pts)
        if single:
            return g[0], bool(smooth[0])
        return g, smooth

    def domain_bounds(self):
        """Bounding box of the effective domain (``±inf`` when unbounded)."""
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def in_domain(self, pts: np.ndarray) -> np.ndarray:
        """Mask of points at which evaluation is permitted."""
        return np.ones(len(pts), dtype=bool)

    def _eval(self, pts):  # pragma: no cover - interface
        raise NotImplementedError

    def _grad(self, pts):  # pragma: no cover - interface
        raise NotImplementedError


class MaxAffine(ConvexFunction):
    """Finite maximum of affine pieces, ``f(x) = max_i <a_i, x> - c_i``.

    Parameters
    ----------
    slopes : array_like, shape (k, dim) or (k,) in one dimension
    intercepts : array_like, shape (k,)
        Note the sign: the piece is ``<a_i, x> - c_i``.

    Pieces with identical slopes are merged keeping the smaller intercept;
    the number of merged pieces is kept in ``merged``.

    Examples
    --------
    >>> f = MaxAffine([-1.0, 1.0], [0.0, 0.0])   # |x|
    >>> f(2.0)
    2.0
    """

    def __init__(self, slopes, intercepts, dim: int | None = None):
        A = _as_matrix(slopes, dim)
        c = np.asarray(intercepts, dtype=float).reshape(-1)
        if c.shape[0] != A.shape[0]:
            raise DimensionMismatch("one intercept per slope required")
        if not np.all(np.isfinite(c)):
            raise ValidationError("intercepts must be finite")
        A, c, merged = _merge_duplicates(A, c)
        self.slopes = _frozen(A)
        self.intercepts = _frozen(c)
        self.dim = A.shape[1]
        self.merged = merged

    @property
    def n_pieces(self) -> int:
        return self.slopes.shape[0]

    def piece_values(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.slopes.T - self.intercepts

    def active(self, pts: np.ndarray) -> np.ndarray:
        """Index of the active piece, lowest index on ties."""
        return np.argmax(self.piece_values(pts), axis=1)

    def _eval(self, pts):
        return self.piece_values(pts).max(axis=1)

    def _grad(self, pts):
        vals = self.piece_values(pts)
        idx = np.argmax(vals, axis=1)
        top = vals[np.arange(len(pts)), idx]
        ties = (vals >= (top - TIE_TOL * np.maximum(1.0, np.abs(top)))[:, None]).sum(axis=1)
        return self.slopes[idx].copy(), ties == 1

    def conjugate(self) -> "PointHull":
        return PointHull(self.slopes, self.intercepts)

    def cells_1d(self):
        """Breakpoints and active pieces of a one-dimensional function.

        The pieces that are ever strictly active are the lower-hull vertices
        of the points ``(a_i, c_i)``; the breakpoint between consecutive
        vertices is the slope of the hull edge joining them.

        Returns
        -------
        breaks : ndarray, shape (k - 1,)
            Increasing breakpoints.
        pieces : ndarray, shape (k,)
            Piece index active on each interval, left to right.
        """
        if self.dim != 1:
            raise DimensionMismatch("cells_1d needs a one-dimensional function")
        hx, hc, idx = _lower_hull_1d(self.slopes[:, 0], self.intercepts)
        return np.diff(hc) / np.diff(hx), idx

    def __repr__(self):
        return f"MaxAffine(dim={self.dim}, pieces={self.n_pieces})"


class PointHull(ConvexFunction):
    """Lower convex envelope of finitely many ``(x_i, v_i)`` pairs.

    ``f(y) = min { sum λ_i v_i : sum λ_i x_i = y, λ in the simplex }`` and
    ``+inf`` outside ``conv{x_i}``. One-dimensional hulls are evaluated by
    exact interpolation on the lower hull; higher dimensions solve the
    envelope linear program with HiGHS.
    """

    def __init__(self, points, values, dim: int | None = None):
        X = _as_matrix(points, dim)
        v = np.asarray(values, dtype=float).reshape(-1)
        if v.shape[0] != X.shape[0]:
            raise DimensionMismatch("one value per point required")
        if not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite")
        X, v, merged = _merge_duplicates(X, v)
        self.points = _frozen(X)
        self.values = _frozen(v)
        self.dim = X.shape[1]
        self.merged = merged
        self._lo = X.min(axis=0)
        self._hi = X.max(axis=0)
        if self.dim == 1:
            self._hull = _lower_hull_1d(X[:, 0], v)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def domain_bounds(self):
        return self._lo.copy(), self._hi.copy()

    def in_domain(self, pts):
        return np.isfinite(self._eval(pts))

    def conjugate(self) -> MaxAffine:
        return MaxAffine(self.points, self.values)

    def envelope(self, x):
        """Envelope values with the optimal simplex weights.

        Returns
        -------
        values : ndarray, shape (m,)
        weights : ndarray, shape (m, n_points)
            Convex weights over the stored points realizing each value; rows
            are zero where the value is ``+inf``.
        """
        pts, _ = as_points(x, self.dim)
        if self.dim == 1:
            return self._envelope_1d(pts[:, 0])
        vals = np.full(len(pts), np.inf)
        W = np.zeros((len(pts), self.n_points))
        for k, y in enumerate(pts):
            res = self._solve_lp(y)
            if res is not None:
                vals[k] = res.fun
                W[k] = np.clip(res.x, 0.0, None)
        return vals, W

    def _envelope_1d(self, y):
        hx, hv, hidx = self._hull
        vals = np.full(len(y), np.inf)
        W = np.zeros((len(y), self.n_points))
        inside = (y >= hx[0]) & (y <= hx[-1])
        if len(hx) == 1:
            vals[inside] = hv[0]
            W[inside, hidx[0]] = 1.0
            return vals, W
        yi = y[inside]
        j = np.clip(np.searchsorted(hx, yi, side="right") - 1, 0, len(hx) - 2)
        s = (yi - hx[j]) / (hx[j + 1] - hx[j])
        rows = np.flatnonzero(inside)
        vals[rows] = (1.0 - s) * hv[j] + s * hv[j + 1]
        W[rows, hidx[j]] += 1.0 - s
        W[rows, hidx[j + 1]] += s
        return vals, W

    def _solve_lp(self, y):
        if np.any(y < self._lo - LP_TOL) or np.any(y > self._hi + LP_TOL):
            return None
        k = self.n_points
        A_eq = np.vstack([self.points.T, np.ones((1, k))])
        b_eq = np.concatenate([y, [1.0]])
        res = linprog(self.values, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status != 0:
            return None
        return res

    def _eval(self, pts):
        if self.dim == 1:
            hx, hv, _ = self._hull
            y = pts[:, 0]
            out = np.full(len(y), np.inf)
            inside = (y >= hx[0]) & (y <= hx[-1])
            out[inside] = np.interp(y[inside], hx, hv) if len(hx) > 1 else hv[0]
            return out
        out = np.full(len(pts), np.inf)
        for k, y in enumerate(pts):
            res = self._solve_lp(y)
            if res is not None:
                out[k] = res.fun
        return out

    def _grad(self, pts):
        g = np.full(pts.shape, np.nan)
        smooth = np.zeros(len(pts), dtype=bool)
        if self.dim == 1:
            hx, hv, _ = self._hull
            if len(hx) < 2:
                return g, smooth
            slopes = np.diff(hv) / np.diff(hx)
            y = pts[:, 0]
            inside = (y >= hx[0]) & (y <= hx[-1])
            j = np.clip(np.searchsorted(hx, y, side="right") - 1, 0, len(hx) - 2)
            g[inside, 0] = slopes[j[inside]]
            on_vertex = np.isin(y, hx)
            smooth = inside & ~on_vertex
            return g, smooth
        for k, y in enumerate(pts):
            res = self._solve_lp(y)
            if res is None:
                continue
            g[k] = res.eqlin.marginals[: self.dim]
            smooth[k] = np.count_nonzero(res.x > LP_TOL) == self.dim + 1
        return g, smooth

    def __repr__(self):
        return f"PointHull(dim={self.dim}, points={self.n_points})"


def _lower_hull_1d(x: np.ndarray, v: np.ndarray):
    """Monotone-chain lower hull; returns sorted vertices and their source indices."""
    order = np.lexsort((v, x))
    hull: list[int] = []
    for i in order:
        if hull and x[hull[-1]] == x[i]:
            continue  # same abscissa, larger value (lexsort puts the smaller first)
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (x[i] - x[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(int(i))
    idx = np.array(hull)
    return x[idx].copy(), v[idx].copy(), idx


class Quadratic(ConvexFunction):
    """``f(x) = 1/2 x^T A x + b^T x + c`` with ``A`` symmetric positive definite.

    >>> Quadratic(1.0)(2.0)        # x^2/2
    2.0
    >>> Quadratic.centered(1.0, 0.3)(0.3)
    0.0
    """

    def __init__(self, A, b=None, c: float = 0.0):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch("A must be square")
        if not np.allclose(A, A.T, rtol=0, atol=1e-14 * max(1.0, np.abs(A).max())):
            raise ValidationError("A must be symmetric")
        try:
            np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise ValidationError("A must be positive definite") from None
        d = A.shape[0]
        b = np.zeros(d) if b is None else np.asarray(b, dtype=float).reshape(-1)
        if b.shape[0] != d:
            raise DimensionMismatch("b has the wrong length")
        self.A = _frozen(A)
        self.b = _frozen(b)
        self.c = float(c)
        self.dim = d

    @classmethod
    def centered(cls, A, center, offset: float = 0.0) -> "Quadratic":
        """``1/2 (x - m)^T A (x - m) + offset``."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        m = np.asarray(center, dtype=float).reshape(-1)
        if m.shape[0] == 1 and A.shape[0] > 1:
            m = np.repeat(m, A.shape[0])
        return cls(A, -A @ m, 0.5 * m @ A @ m + offset)

    def minimum(self) -> float:
        return self.c - 0.5 * self.b @ np.linalg.solve(self.A, self.b)

    def _eval(self, pts):
        return 0.5 * np.einsum("ij,jk,ik->i", pts, self.A, pts) + pts @ self.b + self.c

    def _grad(self, pts):
        return pts @ self.A + self.b, np.ones(len(pts), dtype=bool)

    def conjugate(self) -> "Quadratic":
        Ainv = np.linalg.inv(self.A)
        Ainv = 0.5 * (Ainv + Ainv.T)
        return Quadratic(Ainv, -Ainv @ self.b, 0.5 * self.b @ Ainv @ self.b - self.c)

    def __repr__(self):
        return f"Quadratic(dim={self.dim})"


class GridFunction(ConvexFunction):
    """Samples on a box grid with multilinear interpolation.

    Parameters
    ----------
    lo, hi : array_like
        Box corners, ``lo < hi`` on every axis.
    shape : sequence of int
        Samples per axis (at least 2).
    values : array_like
        ``prod(shape)`` samples in row-major order (or an array of ``shape``);
        ``+inf`` is allowed and absorbs in interpolation.
    """

    def __init__(self, lo, hi, shape, values):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        shape = tuple(int(s) for s in np.atleast_1d(shape))
        if not (len(lo) == len(hi) == len(shape)):
            raise DimensionMismatch("lo, hi and shape must have equal lengths")
        if np.any(hi <= lo):
            raise ValidationError("box must satisfy lo < hi on every axis")
        if min(shape) < 2:
            raise ValidationError("need at least two samples per axis")
        vals = np.asarray(values, dtype=float)
        if vals.size != int(np.prod(shape)):
            raise DimensionMismatch(f"{vals.size} values for shape {shape}")
        if np.any(np.isnan(vals)) or np.any(vals == -np.inf):
            raise ValidationError("values must be finite or +inf")
        self.dim = len(shape)
        self.lo = _frozen(lo)
        self.hi = _frozen(hi)
        self.shape = shape
        self.values = _frozen(vals.reshape(shape))
        self.step = (hi - lo) / (np.array(shape) - 1)

    @classmethod
    def sample(cls, fn, lo, hi, shape) -> "GridFunction":
        """Sample a callable (vectorized over ``(m, dim)`` points) on the grid."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        shape = tuple(int(s) for s in np.atleast_1d(shape))
        mesh = np.meshgrid(*[np.linspace(a, b, n) for a, b, n in zip(lo, hi, shape)], indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        return cls(lo, hi, shape, np.asarray(fn(pts), dtype=float).reshape(shape))

    def axes(self):
        return [np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.shape)]

    def nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def domain_bounds(self):
        return self.lo.copy(), self.hi.copy()

    def in_domain(self, pts):
        slack = 1e-12 * np.maximum(1.0, np.abs(self.hi - self.lo))
        return np.all((pts >= self.lo - slack) & (pts <= self.hi + slack), axis=1)

    def _locate(self, pts):
        if not np.all(self.in_domain(pts)):
            raise OutOfDomain("point outside the grid box")
        u = (pts - self.lo) / self.step
        n = np.array(self.shape)
        i = np.clip(np.floor(u).astype(int), 0, n - 2)
        s = np.clip(u - i, 0.0, 1.0)
        return i, s

    def _eval(self, pts):
        i, s = self._locate(pts)
        out = np.zeros(len(pts))
        for corner in itertools.product((0, 1), repeat=self.dim):
            corner = np.array(corner)
            w = np.prod(np.where(corner == 1, s, 1.0 - s), axis=1)
            v = self.values[tuple((i + corner).T)]
            pos = w > 0  # a zero weight must not touch an infinite corner
            out[pos] += w[pos] * v[pos]
        return out

    def _grad(self, pts):
        i, s = self._locate(pts)
        g = np.zeros(pts.shape)
        smooth = np.ones(len(pts), dtype=bool)
        n = np.array(self.shape)
        for k in range(self.dim):
            h = self.step[k]
            on_node = (np.abs(s[:, k]) < 1e-9) | (np.abs(s[:, k] - 1) < 1e-9)
            node = np.where(s[:, k] > 0.5, i[:, k] + 1, i[:, k])
            interior = on_node & (node > 0) & (node < n[k] - 1)
            smooth &= ~interior
            left = pts.copy()
            right = pts.copy()
            # cell slope of the interpolant off node lines, central difference on them
            left[:, k] = np.where(interior, self.lo[k] + (node - 1) * h, self.lo[k] + i[:, k] * h)
            right[:, k] = np.where(interior, self.lo[k] + (node + 1) * h, self.lo[k] + (i[:, k] + 1) * h)
            g[:, k] = (self._eval(right) - self._eval(left)) / (right[:, k] - left[:, k])
        return g, smooth

    def conjugate(self, dual_lo, dual_hi, dual_shape) -> "GridFunction":
        """Discrete Legendre transform onto a caller-supplied dual grid."""
        from .legendre import grid_conjugate

        return grid_conjugate(self, dual_lo, dual_hi, dual_shape)

    def __repr__(self):
        return f"GridFunction(dim={self.dim}, shape={self.shape})"
