"""Variational solver for the functional dual Minkowski problem, ``q <= 0``.

Unknowns are values ``v`` at the atoms ``x_i`` of ``μ``. They define
``h_v(y) = max_i <x_i, y> - v_i`` (the candidate ``f*``) and its conjugate
``f``, the lower envelope of ``(x_i, v_i)``. The functional is

    Ψ(v) = |μ|^{-1} Σ w_j f(x_j) - exp(-W̄(h)),   W̄(h) = (∫ h^{1-q} dγ)^{1/(1-q)},

evaluated after shifting ``h`` so that ``inf h = 0``. At a stationary point
``μ`` is matched, up to the factor ``τ = |μ| / W̃_{n-q}(h)``, by the cell
masses of ``h``.

The iteration is a limited-memory BFGS (two-loop recursion) with Armijo
backtracking; steps that fail to decrease fall back to steepest descent.
Cell integrals are exact in one dimension and use a fixed set of Gaussian
nodes (common random numbers) otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .calculus import infimum
from .curvature import DiscreteMeasure, hyperplane_support_test, tv_distance
from .errors import EmptyMeasure, NotConverged, QPositive, SupportDegenerate, ValidationError
from .functions import MaxAffine, PointHull
from .integrals import power
from .quadrature import QuadratureScheme, gaussian_interval_nodes

log = logging.getLogger(__name__)

DEFAULT_NODES = "qmc:65536"


@dataclass(frozen=True)
class SolverOptions:
    """Configuration of :func:`solve`.

    ``scheme=None`` means exact cell integration in one dimension and
    ``qmc:65536`` above. ``init`` is ``"zeros"`` or ``"random"`` (uniform on
    ``[0, 0.1]`` drawn with ``seed``).

    The run counts as converged when ``max|G|`` drops below ``tol`` or below
    the quadrature noise ``3 K max(stderr of cell masses)``, which is zero
    for exact cells. A stalled objective (relative change under ``ftol`` for
    three iterations) also counts when ``max|G| <= stall_gtol``; that covers
    envelope kinks where the gradient jumps.
    """

    q: float = 0.0
    max_iter: int = 500
    tol: float = 1e-10
    backtrack: float = 0.5
    armijo: float = 1e-4
    memory: int = 10
    scheme: str | None = None
    seed: int | None = None
    init: str = "zeros"
    raise_on_failure: bool = False
    ftol: float = 1e-15
    stall_gtol: float = 1e-6
    vmax: float = 100.0

    def __post_init__(self):
        if self.q > 0:
            raise QPositive("the solver covers q <= 0 only")
        if not (self.tol > 0 and 0 < self.backtrack < 1 and 0 < self.armijo < 1):
            raise ValidationError("tolerances must be positive and line-search constants in (0, 1)")
        if self.init not in ("zeros", "random"):
            raise ValidationError(f"unknown init mode {self.init!r}")
        if self.max_iter < 1 or self.memory < 1:
            raise ValidationError("max_iter and memory must be positive")


@dataclass
class SolveResult:
    v: np.ndarray
    phi0: PointHull
    phi0_star: MaxAffine
    tau: float
    trace: list
    recovered: DiscreteMeasure
    residual_tv: float
    iterations: int
    converged: bool
    q: float
    options: SolverOptions | None = None
    masses: np.ndarray | None = None
    extra: dict = field(default_factory=dict)


def validate_measure(mu: DiscreteMeasure) -> None:
    """Reject empty measures and measures living in a proper linear subspace."""
    if len(mu) == 0 or mu.total <= 0:
        raise EmptyMeasure("measure has no mass")
    verdict = hyperplane_support_test(mu)
    if verdict.degenerate:
        raise SupportDegenerate(f"atoms span a proper subspace (sigma_min={verdict.sigma_min:.3g})")


class _Integrator:
    """Cell masses and power integrals of a normalized ``h`` on fixed nodes."""

    def __init__(self, dim: int, scheme=None, seed=None):
        self.exact = dim == 1 and scheme is None
        if not self.exact:
            sch = QuadratureScheme.parse(scheme or DEFAULT_NODES, seed)
            self.scheme = sch
            self.rule = sch.rule(dim)
        else:
            self.scheme = None

    def __call__(self, h: MaxAffine, q: float):
        """Return ``(m, I, se)``: cell masses of ``h^{-q}``, ``∫ h^{1-q}``, mass stderr."""
        k = h.n_pieces
        if self.exact:
            m = np.zeros(k)
            total = 0.0
            breaks, active = h.cells_1d()
            edges = np.concatenate([[-np.inf], breaks, [np.inf]])
            for a, b, piece in zip(edges[:-1], edges[1:], active):
                y, w = gaussian_interval_nodes(a, b)
                if not len(y):
                    continue
                hv = np.clip(h._eval(y[:, None]), 0.0, None)
                base = power(hv, -q)
                m[piece] += w @ base
                total += w @ (base * hv)
            return m, total, np.zeros(k)
        pts = self.rule.points
        owner = h.active(pts)
        hv = np.clip(h._eval(pts), 0.0, None)
        base = power(hv, -q)
        M = np.zeros((len(pts), k))
        M[np.arange(len(pts)), owner] = base
        m, se = self.rule.estimate(M)
        total, _ = self.rule.estimate(base * hv)
        return np.asarray(m), float(total), np.asarray(se)


@dataclass
class _State:
    v: np.ndarray
    F: float
    G: np.ndarray
    f_atoms: np.ndarray
    h: MaxAffine
    masses: np.ndarray
    wbar: float
    shift: float
    mass_se: np.ndarray
    K: float = 0.0

    def noise(self) -> float:
        """Quadrature noise level of the gradient."""
        return 3.0 * self.K * float(np.max(self.mass_se, initial=0.0))


def _state(mu: DiscreteMeasure, q: float, v: np.ndarray, integ: _Integrator) -> _State:
    X, w = mu.atoms, mu.weights
    total = mu.total
    raw = MaxAffine(X, v)
    inf = infimum(raw)
    s = inf.value
    h = MaxAffine(X, v + s)
    f_raw, beta = PointHull(X, v).envelope(X)
    f_atoms = f_raw + s
    m, I, se = integ(h, q)
    wbar = I ** (1.0 / (1.0 - q)) if I > 0 else 0.0
    K = np.exp(-wbar) * wbar**q if wbar > 0 else 0.0
    F = float(w @ f_atoms / total - np.exp(-wbar))
    g = w @ beta / total - K * m
    G = g - g.sum() * inf.weights
    return _State(v, F, G, f_atoms, h, m, wbar, s, se, K)


def objective(mu: DiscreteMeasure, q: float, v, normalize: bool = True, scheme=None, seed=None) -> float:
    """``Ψ_μ`` at the max-affine candidate with values ``v``.

    ``f`` is the lower envelope of ``(x_i, v_i)`` evaluated at the atoms. With
    ``normalize=True`` the integral term uses ``h_v`` shifted to ``inf h = 0``;
    with ``normalize=False`` it uses ``h_v`` itself.

    Examples
    --------
    >>> mu = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
    >>> round(objective(mu, 0, [0.0, 0.0]), 5)
    -0.45028
    >>> round(objective(mu, 0, [1.0, 1.0]), 5)
    0.54972
    """
    mu_q = float(q)
    v = np.asarray(v, dtype=float)
    if len(v) != len(mu):
        raise ValidationError("one value per atom required")
    X, w = mu.atoms, mu.weights
    h = MaxAffine(X, v)
    if normalize:
        h = MaxAffine(X, v + infimum(h).value)
    f_atoms = PointHull(X, v)(X)
    _, I, _ = _Integrator(mu.dim, scheme, seed)(h, mu_q) if normalize else _raw_integral(h, mu_q, mu.dim, scheme, seed)
    wbar = I ** (1.0 / (1.0 - mu_q))
    return float(w @ f_atoms / mu.total - np.exp(-wbar))


def _raw_integral(h: MaxAffine, q: float, dim: int, scheme, seed):
    integ = _Integrator(dim, scheme, seed)
    if integ.exact:
        breaks, active = h.cells_1d()
        edges = np.concatenate([[-np.inf], breaks, [np.inf]])
        total = 0.0
        for a, b, _ in zip(edges[:-1], edges[1:], active):
            y, wts = gaussian_interval_nodes(a, b)
            if len(y):
                total += wts @ power(h._eval(y[:, None]), 1.0 - q)
        return None, total, None
    total, _ = integ.rule.estimate(power(h._eval(integ.rule.points), 1.0 - q))
    return None, float(total), None


def objective_gradient(mu: DiscreteMeasure, q: float, v, scheme=None, seed=None) -> np.ndarray:
    """``∂Ψ/∂v_i = w_i/|μ| - e^{-W̄} W̄^q m_i`` on the unshifted ``h_v``.

    ``m_i`` is the cell mass of ``h_v^{-q}`` on piece ``i``. This is the
    derivative of :func:`objective` with ``normalize=False`` wherever every
    atom lies on the lower hull.
    """
    q = float(q)
    v = np.asarray(v, dtype=float)
    h = MaxAffine(mu.atoms, v)
    m, I, _ = _Integrator(mu.dim, scheme, seed)(h, q)
    wbar = I ** (1.0 / (1.0 - q))
    return mu.weights / mu.total - np.exp(-wbar) * wbar**q * m


def projected_gradient(mu: DiscreteMeasure, q: float, v, scheme=None, seed=None):
    """Value and exact gradient of the normalized functional minimized by :func:`solve`."""
    st = _state(mu, float(q), np.asarray(v, dtype=float), _Integrator(mu.dim, scheme, seed))
    return st.F, st.G


def _two_loop(G, S, Y):
    r = G.copy()
    alphas = []
    for s, y in zip(reversed(S), reversed(Y)):
        rho = 1.0 / (y @ s)
        a = rho * (s @ r)
        alphas.append((a, rho, s, y))
        r -= a * y
    if S:
        gamma = (S[-1] @ Y[-1]) / (Y[-1] @ Y[-1])
        r *= gamma
    for a, rho, s, y in reversed(alphas):
        b = rho * (y @ r)
        r += s * (a - b)
    return -r


def solve(mu: DiscreteMeasure, q: float = 0.0, opts: SolverOptions | None = None, **kw) -> SolveResult:
    """Minimize the functional over max-affine candidates pinned at the atoms of ``mu``.

    Parameters
    ----------
    mu : DiscreteMeasure
    q : float
        Must be ``<= 0``.
    opts : SolverOptions, optional
        Keyword arguments override its fields.

    Returns
    -------
    SolveResult
        ``v`` holds the envelope values ``f(x_i)`` after normalization, so
        atoms whose piece is inactive are reported on the hull.
    """
    if opts is None:
        opts = SolverOptions(q=q, **kw)
    elif kw:
        opts = SolverOptions(**{**opts.__dict__, **kw})
    if opts.q != q:
        opts = SolverOptions(**{**opts.__dict__, "q": q})
    q = float(q)
    validate_measure(mu)
    integ = _Integrator(mu.dim, opts.scheme, opts.seed)
    m = len(mu)
    if opts.init == "random":
        rng = np.random.default_rng(opts.seed if opts.seed is not None else 0)
        v = rng.uniform(0.0, 0.1, m)
    else:
        v = np.zeros(m)
    st = _state(mu, q, v, integ)
    trace = [{"iteration": 0, "objective": st.F, "gradnorm": float(np.abs(st.G).max()), "step": 0.0}]
    S: list[np.ndarray] = []
    Y: list[np.ndarray] = []
    converged = bool(np.abs(st.G).max() <= max(opts.tol, st.noise()))
    it = 0
    stall = 0
    diverging = False
    while not converged and it < opts.max_iter:
        it += 1
        d = _two_loop(st.G, S, Y)
        slope = st.G @ d
        if slope >= 0:
            S.clear()
            Y.clear()
            d = -st.G
            slope = st.G @ d
        new, alpha = _line_search(mu, q, st, d, slope, integ, opts)
        if new is None and S:
            S.clear()
            Y.clear()
            d = -st.G
            new, alpha = _line_search(mu, q, st, d, st.G @ d, integ, opts)
        if new is None:
            log.info("line search stalled at iteration %d", it)
            break
        s_vec, y_vec = new.v - st.v, new.G - st.G
        if s_vec @ y_vec > 1e-12 * np.linalg.norm(s_vec) * np.linalg.norm(y_vec):
            S.append(s_vec)
            Y.append(y_vec)
            if len(S) > opts.memory:
                S.pop(0)
                Y.pop(0)
        stall = stall + 1 if st.F - new.F <= opts.ftol * (1.0 + abs(st.F)) else 0
        st = new
        gn = float(np.abs(st.G).max())
        trace.append({"iteration": it, "objective": st.F, "gradnorm": gn, "step": float(alpha)})
        gtol = max(opts.tol, st.noise())
        converged = gn <= gtol or (stall >= 3 and gn <= max(opts.stall_gtol, gtol))
        if np.abs(st.v).max() > opts.vmax:
            diverging = True
            log.info("values exceed %g; the functional is not bounded on this instance", opts.vmax)
            break
        if stall >= 3 and not converged:
            log.info("objective stalled with gradient %.3g", gn)
            break
    result = _finish(mu, q, st, integ, trace, it, converged, opts)
    result.extra["diverging"] = diverging
    if not converged and opts.raise_on_failure:
        raise NotConverged(f"no convergence after {it} iterations", result)
    return result


def _line_search(mu, q, st, d, slope, integ, opts):
    alpha = 1.0
    scale = np.abs(d).max()
    if scale > 1.0:
        alpha = 1.0 / scale
    while alpha > 1e-16:
        trial = st.v + alpha * d
        new = _state(mu, q, trial, integ)
        if new.F <= st.F + opts.armijo * alpha * slope:
            # keep iterates normalized so values stay O(1)
            new.v = new.v + new.shift
            return new, alpha
        alpha *= opts.backtrack
    return None, 0.0


def _finish(mu, q, st, integ, trace, it, converged, opts) -> SolveResult:
    X = mu.atoms
    v = st.f_atoms.copy()
    h = MaxAffine(X, v)
    s = infimum(h).value
    v = v + s
    h = MaxAffine(X, v)
    masses, I, se = integ(h, q)
    W = float(masses.sum())
    tau = mu.total / W
    recovered = DiscreteMeasure.from_masses(X, tau * masses, tau * se)
    residual = 0.5 * float(np.abs(mu.weights - tau * masses).sum())
    wbar = I ** (1.0 / (1.0 - q))
    extra = {
        "wbar": wbar,
        "tau_identity_lhs": 1.0 / W,
        "tau_identity_rhs": float(wbar**q * np.exp(-wbar)),
        "inf_h": infimum(h).value,
        "mass_stderr": se.tolist(),
        "scheme": "cells" if integ.exact else str(integ.scheme),
    }
    return SolveResult(v, PointHull(X, v), h, tau, trace, recovered, residual, it, converged, q, opts, masses, extra)


@dataclass
class VerifyReport:
    tv: float
    tv_normalized: float
    tau_identity_lhs: float
    tau_identity_rhs: float
    tau_identity_residual: float
    inf_h: float
    stderr: float

    def to_dict(self):
        return {k: float(v) for k, v in self.__dict__.items()}


def verify_solution(mu: DiscreteMeasure, q: float, result: SolveResult, scheme=None, seed=None) -> VerifyReport:
    """Recompute the cell masses of ``result.phi0_star`` and compare with ``μ``.

    ``scheme`` defaults to ``mc:200000`` with a seed different from the
    solver's, so the check does not reuse the solver's nodes in higher
    dimensions. In one dimension exact cells are used unless a scheme is given.
    """
    q = float(q)
    h = result.phi0_star
    if scheme is None and mu.dim > 1:
        scheme = "mc:200000"
        seed = (result.options.seed or 0) + 1 if seed is None and result.options else seed
    integ = _Integrator(mu.dim, scheme, seed)
    masses, I, se = integ(h, q)
    W = float(masses.sum())
    tau = mu.total / W
    tv = 0.5 * float(np.abs(mu.weights - tau * masses).sum())
    tvn = 0.5 * float(np.abs(mu.weights / mu.total - masses / W).sum())
    wbar = I ** (1.0 / (1.0 - q))
    lhs, rhs = 1.0 / W, float(wbar**q * np.exp(-wbar))
    return VerifyReport(tv, tvn, lhs, rhs, abs(lhs - rhs), float(infimum(h).value), float(np.sqrt(np.sum(se**2))))


def certificate_tv(mu: DiscreteMeasure, result: SolveResult) -> float:
    """TV between normalized ``μ`` and the normalized recovered measure."""
    return tv_distance(mu.normalized(), result.recovered.normalized())


def result_from_values(mu: DiscreteMeasure, q: float, v, scheme=None, seed=None) -> SolveResult:
    """Package a candidate ``h = max_i <x_i, y> - v_i`` as a :class:`SolveResult`.

    No optimization happens; ``iterations`` is 0 and ``converged`` is True so
    the result can be passed to :func:`verify_solution`.
    """
    q = float(q)
    validate_measure(mu)
    v = np.asarray(v, dtype=float)
    if v.shape != (len(mu),):
        raise ValidationError("one value per atom required")
    integ = _Integrator(mu.dim, scheme, seed)
    return _finish(mu, q, _state(mu, q, v, integ), integ, [], 0, True, None)
