"""Dual curvature measures ``C̃_q(f, ·) = (∇f)_# (f^{-q} γ_n)``.

For a max-affine ``h`` the gradient is constant on each cell, so the measure
is atomic on the slopes with cell masses ``∫_{cell_i} h^{-q} dγ``. In one
dimension cells are intervals and are integrated exactly; above one
dimension they are tallied from Gaussian nodes by argmax membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np
from scipy.optimize import linprog
from scipy.special import ndtr
from scipy.spatial import ConvexHull

from .calculus import check_convexity_grid, pointwise_max, pointwise_min
from .errors import PreconditionFailed, ValidationError
from .functions import ConvexFunction, GridFunction, MaxAffine, as_points
from .integrals import (
    DEFAULT_SCHEME,
    IntegralResult,
    _gradients,
    _values,
    dual_quermassintegral,
    power,
    sampling,
)
from .quadrature import QuadratureScheme, gauss_legendre, gaussian_interval_nodes

ATOM_TOL = 1e-12
MATCH_TOL = 1e-9
NODE_SCHEME = "qmc:65536"


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite atomic measure with positive weights and distinct atoms.

    ``stderr`` optionally carries the integration error of each weight and
    ``total_stderr`` that of their sum (cell errors are correlated, so it is
    not the root-sum-square of ``stderr``).
    """

    atoms: np.ndarray
    weights: np.ndarray
    stderr: np.ndarray | None = field(default=None, compare=False)
    total_stderr: float | None = field(default=None, compare=False)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if atoms.ndim != 2 or atoms.shape[0] != w.shape[0]:
            raise ValidationError("one weight per atom required")
        if atoms.shape[0] == 0:
            from .errors import EmptyMeasure

            raise EmptyMeasure("measure has no atoms")
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(w))):
            raise ValidationError("atoms and weights must be finite")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        if len(atoms) > 1:
            order = np.lexsort(atoms.T[::-1])
            srt = atoms[order]
            close = np.all(np.abs(np.diff(srt, axis=0)) <= ATOM_TOL, axis=1)
            if np.any(close) or _has_close_pairs(atoms):
                raise ValidationError("atoms must be pairwise distinct")
        atoms.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_masses(cls, atoms, masses, stderr=None, total_stderr=None) -> "DiscreteMeasure":
        """Build from possibly zero masses; zero-mass atoms are dropped."""
        atoms = np.asarray(atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        masses = np.asarray(masses, dtype=float)
        keep = masses > 0
        se = None if stderr is None else np.asarray(stderr, dtype=float)[keep]
        return cls(atoms[keep], masses[keep], se, total_stderr)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return len(self.weights)

    def scaled(self, c: float) -> "DiscreteMeasure":
        se = None if self.stderr is None else self.stderr * abs(c)
        tse = None if self.total_stderr is None else self.total_stderr * abs(c)
        return DiscreteMeasure(self.atoms, self.weights * c, se, tse)

    def normalized(self) -> "DiscreteMeasure":
        return self.scaled(1.0 / self.total)

    def integrate(self, g) -> float:
        """``∫ g dμ`` for ``g`` mapping ``(m, dim)`` points to values."""
        return float(self.weights @ np.asarray(g(self.atoms), dtype=float))

    def mass_at(self, x, tol: float = MATCH_TOL) -> float:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        hit = np.all(np.abs(self.atoms - x) <= tol, axis=1)
        return float(self.weights[hit].sum())


def _has_close_pairs(atoms: np.ndarray) -> bool:
    if len(atoms) > 2000:
        return False
    diff = np.abs(atoms[:, None, :] - atoms[None, :, :]).max(axis=2)
    np.fill_diagonal(diff, np.inf)
    return bool(np.any(diff <= ATOM_TOL))


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted sample standing in for a continuous pushforward."""

    samples: np.ndarray
    weights: np.ndarray
    seed: int
    n: int

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def integrate(self, g) -> float:
        return float(self.weights @ np.asarray(g(self.samples), dtype=float))

    def integrate_with_stderr(self, g):
        vals = self.n * self.weights * np.asarray(g(self.samples), dtype=float)
        return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(self.n))

    def mass_near(self, x, tol: float = MATCH_TOL) -> float:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        hit = np.all(np.abs(self.samples - x) <= tol, axis=1)
        return float(self.weights[hit].sum())


@dataclass(frozen=True)
class CellDecomposition:
    """Cells of a max-affine function.

    In one dimension ``breaks`` and ``active`` list the intervals left to
    right; in general only the membership oracle :meth:`owner_of` is used.
    ``redundant[i]`` flags pieces whose cell has empty interior.
    """

    owner: MaxAffine
    redundant: np.ndarray
    breaks: np.ndarray | None = None
    active: np.ndarray | None = None

    def owner_of(self, pts) -> np.ndarray:
        pts, _ = as_points(pts, self.owner.dim)
        return self.owner.active(pts)

    def intervals(self):
        """``(left, right, piece)`` triples in one dimension."""
        edges = np.concatenate([[-np.inf], self.breaks, [np.inf]])
        return list(zip(edges[:-1], edges[1:], self.active))


def cells_of_max_affine(h: MaxAffine) -> CellDecomposition:
    """Cell structure of ``h``: exact intervals in 1-D, LP emptiness tests otherwise."""
    k = h.n_pieces
    if h.dim == 1:
        breaks, active = h.cells_1d()
        redundant = np.ones(k, dtype=bool)
        redundant[active] = False
        return CellDecomposition(h, redundant, breaks, active)
    redundant = np.array([not _cell_has_interior(h, i) for i in range(k)])
    return CellDecomposition(h, redundant)


def _cell_has_interior(h: MaxAffine, i: int) -> bool:
    A, c = h.slopes, h.intercepts
    others = np.delete(np.arange(len(A)), i)
    if len(others) == 0:
        return True
    d = h.dim
    # maximize s subject to <a_i - a_j, y> - (c_i - c_j) >= s, s <= 1
    A_ub = np.hstack([-(A[i] - A[others]), np.ones((len(others), 1))])
    b_ub = -(c[i] - c[others])
    cost = np.concatenate([np.zeros(d), [-1.0]])
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * d + [(None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-12


def dual_curvature_semidiscrete(h: MaxAffine, q: float, scheme=None, seed=None) -> DiscreteMeasure:
    """Atomic ``C̃_q(h, ·)`` on the slopes of ``h``.

    One-dimensional cells are integrated exactly regardless of ``scheme``;
    otherwise ``scheme`` (default ``qmc:65536``) supplies Gaussian nodes and
    each node's weight goes to the lowest-index active piece.

    Examples
    --------
    >>> m = dual_curvature_semidiscrete(MaxAffine([-1.0, 1.0], [0.0, 0.0]), 0)
    >>> [round(float(w), 12) for w in m.weights]
    [0.5, 0.5]
    """
    masses, se, tse = cell_masses(h, q, scheme, seed, with_total=True)
    return DiscreteMeasure.from_masses(h.slopes, masses, se, tse)


def cell_masses(h: MaxAffine, q: float, scheme=None, seed=None, integrand_power: float | None = None,
                with_total: bool = False):
    """Per-piece masses ``∫_{cell_i} h^{p} dγ`` with ``p = -q`` by default.

    Returns
    -------
    masses, stderr : ndarray, shape (n_pieces,)
    total_stderr : float
        Only when ``with_total``.
    """
    q = float(q)
    if q > 0:
        raise ValidationError("dual curvature measures are computed for q <= 0")
    p = -q if integrand_power is None else float(integrand_power)
    k = h.n_pieces
    if h.dim == 1:
        masses = np.zeros(k)
        cells = cells_of_max_affine(h)
        for a, b, piece in cells.intervals():
            if p == 0:
                masses[piece] += ndtr(b) - ndtr(a)
                continue
            y, w = gaussian_interval_nodes(a, b)
            if len(y):
                masses[piece] += w @ power(h._eval(y[:, None]), p)
        return (masses, np.zeros(k), 0.0) if with_total else (masses, np.zeros(k))
    sch = QuadratureScheme.parse(scheme or NODE_SCHEME, seed)
    rule = sch.rule(h.dim)
    owner = h.active(rule.points)
    vals = power(h._eval(rule.points), p)
    M = np.zeros((len(owner), k + 1))
    M[np.arange(len(owner)), owner] = vals
    M[:, k] = vals
    est, se = (np.asarray(a) for a in rule.estimate(M))
    if with_total:
        return est[:k], se[:k], float(se[k])
    return est[:k], se[:k]


def dual_curvature_empirical(f: ConvexFunction, q: float, N: int, seed: int | None = None) -> EmpiricalMeasure:
    """Monte Carlo image of ``f^{-q} γ_n`` under ``∇f``; weights sum to the estimate of ``W̃``."""
    if N < 1:
        raise ValidationError("N must be positive")
    sch = QuadratureScheme("mc", int(N), seed)
    s = sampling(f, sch)
    grads, _ = _gradients(f, s)
    vals = _values(f, s)
    w = np.where(s.mask, power(np.where(s.mask, vals, 1.0), -float(q)), 0.0) / N
    return EmpiricalMeasure(grads[s.mask], w[s.mask], int(sch.seed), int(N))


def pushforward_integral(f: ConvexFunction, g, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``∫ g(∇f) f^{-q} dγ`` by quadrature (the right side of the pushforward identity)."""
    s = sampling(f, scheme, seed)
    grads, _ = _gradients(f, s)
    vals = power(np.where(s.mask, _values(f, s), 1.0), -float(q))
    return s.result(np.asarray(g(grads), dtype=float) * vals)


def tv_distance(m1: DiscreteMeasure, m2: DiscreteMeasure, tol: float = MATCH_TOL) -> float:
    """Half the summed weight differences after greedy matching of atoms within ``tol``."""
    used = np.zeros(len(m2), dtype=bool)
    diff = 0.0
    for x, w in zip(m1.atoms, m1.weights):
        dist = np.max(np.abs(m2.atoms - x), axis=1)
        dist[used] = np.inf
        j = int(np.argmin(dist))
        if dist[j] <= tol:
            used[j] = True
            diff += abs(w - m2.weights[j])
        else:
            diff += w
    diff += m2.weights[~used].sum()
    return 0.5 * float(diff)


def merge(*measures: DiscreteMeasure, tol: float = MATCH_TOL) -> DiscreteMeasure:
    """Sum of atomic measures, pooling atoms that agree within ``tol``."""
    atoms, weights = [], []
    for m in measures:
        for x, w in zip(m.atoms, m.weights):
            for k, y in enumerate(atoms):
                if np.max(np.abs(y - x)) <= tol:
                    weights[k] += w
                    break
            else:
                atoms.append(x.copy())
                weights.append(float(w))
    return DiscreteMeasure(np.array(atoms), np.array(weights))


@dataclass(frozen=True)
class HyperplaneVerdict:
    degenerate: bool
    sigma_min: float
    tol: float


def hyperplane_support_test(m, tol: float = 1e-9) -> HyperplaneVerdict:
    """Whether the measure lives in a linear subspace of positive codimension.

    Smallest singular value of the uncentered atom matrix with rows scaled by
    the square roots of the normalized weights.
    """
    atoms = m.atoms if isinstance(m, DiscreteMeasure) else m.samples
    w = np.asarray(m.weights, dtype=float)
    total = w.sum()
    if total <= 0:
        return HyperplaneVerdict(True, 0.0, tol)
    rows = atoms * np.sqrt(w / total)[:, None]
    if rows.shape[0] < rows.shape[1]:
        return HyperplaneVerdict(True, 0.0, tol)
    sigma = float(np.linalg.svd(rows, compute_uv=False).min())
    return HyperplaneVerdict(sigma < tol, sigma, tol)


@dataclass
class BridgeReport:
    lhs: IntegralResult
    rhs: float
    rhs_stderr: float
    constant: float
    sphere_integral: float

    @property
    def difference(self) -> float:
        return self.lhs.value - self.rhs


def bridge_constant(n: int, q: float) -> float:
    """``n (2π)^{-n/2} 2^{(n-q)/2 - 1} Γ((n-q)/2)``."""
    return n * (2 * pi) ** (-n / 2) * 2 ** ((n - q) / 2 - 1) * gamma((n - q) / 2)


def sphere_integral_of_radial(K: MaxAffine, q: float, nodes_per_arc: int = 32, samples: int = 65536, seed=None):
    """``∫_{S^{n-1}} ρ_K^q du`` with ``ρ_K = 1 / ||·||_K``.

    Exact two-point sum in 1-D; Gauss–Legendre per arc between the directions
    where the active polar vertex changes in 2-D; scrambled Sobol directions
    above. Returns ``(value, stderr)``.
    """
    n = K.dim
    if n == 1:
        return float(np.sum(K._eval(np.array([[1.0], [-1.0]])) ** (-q))), 0.0
    if n == 2:
        hull = ConvexHull(K.slopes)
        verts = K.slopes[hull.vertices]  # counter-clockwise
        edges = np.roll(verts, -1, axis=0) - verts
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        cuts = np.sort(np.mod(np.arctan2(normals[:, 1], normals[:, 0]), 2 * np.pi))
        cuts = np.concatenate([cuts, [cuts[0] + 2 * np.pi]])
        x, w = gauss_legendre(nodes_per_arc)
        a, b = cuts[:-1], cuts[1:]
        th = (0.5 * (a + b))[:, None] + (0.5 * (b - a))[:, None] * x[None, :]
        wt = (0.5 * (b - a))[:, None] * w[None, :]
        u = np.column_stack([np.cos(th.ravel()), np.sin(th.ravel())])
        return float(wt.ravel() @ K._eval(u) ** (-q)), 0.0
    rule = QuadratureScheme("qmc", samples, seed).rule(n)
    u = rule.points / np.linalg.norm(rule.points, axis=1, keepdims=True)
    area = 2 * pi ** (n / 2) / gamma(n / 2)
    mean, se = rule.estimate(K._eval(u) ** (-q))
    return float(area * mean), float(area * se)


def body_bridge_check(K: MaxAffine, q: float, scheme=DEFAULT_SCHEME, seed=None) -> BridgeReport:
    """Gaussian integral of the gauge of ``K`` against its radial-function form.

    ``lhs = ∫ ||x||_K^{-q} dγ_n`` and
    ``rhs = n (2π)^{-n/2} 2^{(n-q)/2-1} Γ((n-q)/2) · (1/n) ∫ ρ_K^q du``.
    ``K`` is given by its gauge (see :func:`fdm.calculus.gauge_from_polar_vertices`).
    """
    n = K.dim
    q = float(q)
    if q >= n:
        raise ValidationError("the bridge identity needs q < n")
    lhs = dual_quermassintegral(K, q, scheme, seed)
    sph, sph_se = sphere_integral_of_radial(K, q, seed=seed)
    c = bridge_constant(n, q)
    return BridgeReport(lhs, c * sph / n, c * sph_se / n, c, sph)


def default_dictionary(dim: int):
    """Bounded test functions: constant, ``tanh(y_k)``, ``tanh(y_k^2)``, ``tanh(sum y)``."""
    fns = [("one", lambda y: np.ones(len(y)))]
    for k in range(dim):
        fns.append((f"tanh(y{k})", lambda y, k=k: np.tanh(y[:, k])))
        fns.append((f"tanh(y{k}^2)", lambda y, k=k: np.tanh(y[:, k] ** 2)))
    if dim > 1:
        fns.append(("tanh(sum)", lambda y: np.tanh(y.sum(axis=1))))
    return fns


@dataclass
class ValuationReport:
    """Both sides of the valuation identity, tested through a dictionary."""

    tv: float | None
    discrepancies: dict
    stderr: dict
    passed: bool
    method: str

    @property
    def max_discrepancy(self) -> float:
        return max(abs(v) for v in self.discrepancies.values())


def valuation_check(f: ConvexFunction, g: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None,
                    tol: float = 1e-12) -> ValuationReport:
    """``C̃_q(f) + C̃_q(g)`` against ``C̃_q(min) + C̃_q(max)``.

    One-dimensional max-affine pairs compare exact atomic measures (TV on
    matched atoms). Other pairs compare ``∫ φ d(LHS - RHS)`` over
    :func:`default_dictionary` using one shared set of Gaussian nodes; an
    entry passes when ``|D| <= max(3 stderr, tol)``.

    Raises
    ------
    PreconditionFailed
        When ``min(f, g)`` is not convex.
    """
    q = float(q)
    mn, mx = pointwise_min(f, g), pointwise_max(f, g)
    if isinstance(mn, GridFunction):
        rep = check_convexity_grid(mn)
        if not rep.passed:
            raise PreconditionFailed(f"min is not convex (violation {rep.violation:.3g})")
    dictionary = default_dictionary(f.dim)
    if all(isinstance(u, MaxAffine) for u in (f, g, mn, mx)) and f.dim == 1:
        lhs = merge(*(dual_curvature_semidiscrete(u, q) for u in (f, g)))
        rhs = merge(*(dual_curvature_semidiscrete(u, q) for u in (mn, mx)))
        tv = tv_distance(lhs, rhs)
        disc = {name: lhs.integrate(fn) - rhs.integrate(fn) for name, fn in dictionary}
        se = {name: 0.0 for name in disc}
        return ValuationReport(tv, disc, se, tv <= tol, "cells")
    sch = QuadratureScheme.parse(scheme, seed)
    rule = sch.rule(f.dim)
    pts = rule.points
    quad = (f, g, mn, mx)
    mask = np.logical_and.reduce([u.in_domain(pts) for u in quad])
    pts = pts[mask]
    sides = []
    for u, sign in zip(quad, (1.0, 1.0, -1.0, -1.0)):
        grads, _ = u._grad(pts)
        sides.append((sign, grads, power(u._eval(pts), -q)))
    disc, se, ok = {}, {}, True
    for name, fn in dictionary:
        per_node = np.zeros(len(mask))
        per_node[mask] = sum(sign * fn(gr) * wv for sign, gr, wv in sides)
        val, err = rule.estimate(per_node)
        disc[name], se[name] = float(val), float(err)
        ok &= abs(val) <= max(3 * err, tol)
    return ValuationReport(None, disc, se, bool(ok), sch.kind)


def valuation_grid_pairs():
    """Five grid pairs ``f = |x|^2/2 + c``, ``g = f + k x_1|x_1|`` with ``k <= 1/2``.

    ``min(f, g) = f - k min(x_1, 0)^2`` stays convex and both functions
    cross along ``x_1 = 0``, which is a grid line.
    """
    out = []
    for c, k, dim, n in ((0.5, 0.25, 1, 81), (1.0, 0.5, 1, 81), (0.2, 0.1, 1, 161), (0.5, 0.25, 2, 41), (1.0, 0.4, 2, 41)):
        lo, hi, shape = [-4.0] * dim, [4.0] * dim, [n] * dim

        def base(x, c=c):
            return 0.5 * np.einsum("ij,ij->i", x, x) + c

        f = GridFunction.sample(base, lo, hi, shape)
        g = GridFunction.sample(lambda x, k=k, b=base: b(x) + k * x[:, 0] * np.abs(x[:, 0]), lo, hi, shape)
        out.append((f"c={c:g} k={k:g} n={dim}", f, g))
    return out
