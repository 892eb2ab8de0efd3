"""Gaussian dual quermassintegrals and mixed quermassintegrals.

All functionals are Gaussian expectations of per-node integrands, so one
rule serves value and standard error alike. One-dimensional max-affine
inputs under ``hermite`` are integrated cell by cell (Gauss–Legendre between
exact breakpoints), which is exact to rounding for their piecewise-linear
integrands.

Index conventions: ``dual_quermassintegral(f, q)`` is ``∫ f^{-q} dγ``;
``mixed_integral(f, g, q)`` is the integral formula ``∫ g*(∇f) f^{-q} dγ``
(index ``n+1-q``); ``mixed_fd(f, g, q)`` is the one-sided derivative
``(1/q) d/dt ∫ (f □ g t)^{-q} dγ`` (index ``n-q``). The two therefore agree as
``mixed_fd(f, g, q - 1) == mixed_integral(f, g, q)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import NumericConjugate, inf_convolution, right_scalar_mult
from .errors import (
    ConjugateUnbounded,
    Diverged,
    LogOfZero,
    NegativeBase,
    NonConvergent,
    ValidationError,
    ZeroQ,
)
from .functions import ConvexFunction, GridFunction, MaxAffine
from .quadrature import GaussianRule, QuadratureScheme, gaussian_interval_nodes

DEFAULT_SCHEME = "hermite:64"
FD_STEPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


@dataclass
class IntegralResult:
    """Value with standard error (zero for deterministic rules)."""

    value: float
    stderr: float
    scheme: dict
    truncated_mass: float = 0.0
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.value = float(self.value)
        self.stderr = float(self.stderr)
        self.truncated_mass = float(self.truncated_mass)

    def to_dict(self) -> dict:
        out = {"value": float(self.value), "stderr": float(self.stderr), "scheme": self.scheme}
        if self.truncated_mass:
            out["truncated_mass"] = float(self.truncated_mass)
        return out

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class CellRule:
    """Gauss–Legendre nodes laid out on the cells of a 1-D max-affine function."""

    scheme: QuadratureScheme
    points: np.ndarray
    weights: np.ndarray
    pieces: np.ndarray

    def estimate(self, values):
        v = np.asarray(values, dtype=float)
        return self.weights @ v, np.zeros(v.shape[1:]) if v.ndim > 1 else 0.0


def cell_rule(h: MaxAffine, scheme: QuadratureScheme) -> CellRule:
    breaks, pieces = h.cells_1d()
    edges = np.concatenate([[-np.inf], breaks, [np.inf]])
    ys, ws, ps = [], [], []
    for a, b, k in zip(edges[:-1], edges[1:], pieces):
        y, w = gaussian_interval_nodes(a, b)
        ys.append(y)
        ws.append(w)
        ps.append(np.full(len(y), k))
    return CellRule(scheme, np.concatenate(ys)[:, None], np.concatenate(ws), np.concatenate(ps))


@dataclass
class Sampling:
    """Nodes for one function plus its values and gradients there."""

    rule: object
    mask: np.ndarray
    truncated: float
    method: str

    @property
    def points(self):
        return self.rule.points

    def result(self, integrand, **notes) -> IntegralResult:
        vals = np.where(self.mask, integrand, 0.0)
        value, se = self.rule.estimate(vals)
        meta = {"method": self.method, **notes}
        return IntegralResult(float(value), float(se), self.rule.scheme.to_dict(), self.truncated, meta)


def sampling(f: ConvexFunction, scheme=DEFAULT_SCHEME, seed=None) -> Sampling:
    """Quadrature nodes adapted to ``f``.

    Grid functions only see nodes inside their box; the Gaussian mass of the
    dropped nodes is reported as ``truncated_mass``.
    """
    scheme = QuadratureScheme.parse(scheme, seed)
    if scheme.kind == "hermite" and isinstance(f, MaxAffine) and f.dim == 1:
        rule = cell_rule(f, scheme)
        return Sampling(rule, np.ones(len(rule.points), dtype=bool), 0.0, "cells")
    rule: GaussianRule = scheme.rule(f.dim)
    mask = np.asarray(f.in_domain(rule.points), dtype=bool)
    truncated = float(rule.weights[~mask].sum())
    return Sampling(rule, mask, truncated, scheme.kind)


def _values(f: ConvexFunction, s: Sampling) -> np.ndarray:
    out = np.zeros(len(s.points))
    out[s.mask] = f._eval(s.points[s.mask])
    return out


def _gradients(f: ConvexFunction, s: Sampling):
    if isinstance(s.rule, CellRule):
        return f.slopes[s.rule.pieces], np.ones(len(s.points), dtype=bool)
    grads = np.zeros(s.points.shape)
    smooth = np.ones(len(s.points), dtype=bool)
    if s.mask.any():
        g, sm = f._grad(s.points[s.mask])
        grads[s.mask] = g
        smooth[s.mask] = sm
    return grads, smooth


def power(base: np.ndarray, p: float) -> np.ndarray:
    """``base ** p`` with the library's error policy.

    Rounding-level negatives (above ``-1e-12`` times the value scale) are
    clipped to zero; other negatives under a fractional power raise
    ``NegativeBase``. A zero base under a negative power raises ``Diverged``.
    """
    base = np.asarray(base, dtype=float)
    if p == 0:
        return np.ones_like(base)
    finite = base[np.isfinite(base)]
    scale = max(1.0, float(np.max(np.abs(finite), initial=0.0)))
    base = np.where((base < 0) & (base >= -1e-12 * scale), 0.0, base)
    if not float(p).is_integer() and np.any(base < 0):
        raise NegativeBase("negative function value under a fractional power")
    if p < 0 and np.any(base == 0):
        raise Diverged("function vanishes at a node while -q < 0")
    with np.errstate(over="ignore"):
        out = base**p
    if np.any(np.isinf(out)):
        raise Diverged("integrand is infinite at a node")
    return out


def _integrand_power(f, q, s):
    return power(np.where(s.mask, _values(f, s), 1.0), -q)


def dual_quermassintegral(f: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``W̃_{n-q}(f) = ∫ f^{-q} dγ_n``.

    Examples
    --------
    >>> from fdm import Quadratic
    >>> round(dual_quermassintegral(Quadratic(1.0), -2).value, 12)
    0.75
    """
    q = float(q)
    if q == 0:
        sch = QuadratureScheme.parse(scheme, seed)
        return IntegralResult(1.0, 0.0, sch.to_dict(), 0.0, {"method": "exact"})
    s = sampling(f, scheme, seed)
    return s.result(_integrand_power(f, q, s))


def weighted_second_moment(f: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``∫ |x|^2 f^{-q} dγ_n``."""
    s = sampling(f, scheme, seed)
    r2 = np.einsum("ij,ij->i", s.points, s.points)
    return s.result(r2 * _integrand_power(f, float(q), s))


def self_mixed(f: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``W̃_{n-q}(f, f) = [(n - q) W̃_{n-q}(f) - ∫ |x|^2 f^{-q} dγ] / q``.

    Computed as a single expectation so the stochastic error is that of the
    combination, not of its parts.
    """
    q = float(q)
    if q == 0:
        raise ZeroQ("self_mixed needs q != 0")
    s = sampling(f, scheme, seed)
    r2 = np.einsum("ij,ij->i", s.points, s.points)
    return s.result((f.dim - q - r2) * _integrand_power(f, q, s) / q)


def power_mean(f: ConvexFunction, p: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``(∫ f^p dγ)^{1/p}``, or ``exp ∫ log f dγ`` when ``p = 0``.

    Nondecreasing in ``p``. Standard errors use the delta method.
    """
    p = float(p)
    s = sampling(f, scheme, seed)
    if p == 0:
        vals = np.where(s.mask, _values(f, s), 1.0)
        if np.any(vals <= 0):
            raise LogOfZero("log of a non-positive value")
        r = s.result(np.log(vals))
        val = np.exp(r.value)
        return IntegralResult(val, val * r.stderr, r.scheme, r.truncated_mass, r.notes)
    r = s.result(_integrand_power(f, -p, s))
    val = r.value ** (1.0 / p)
    se = abs(val / (p * r.value)) * r.stderr
    return IntegralResult(val, se, r.scheme, r.truncated_mass, r.notes)


def normalized_quermassintegral(f: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """``W̄_{n-q}(f) = W̃_{n-q}(f)^{1/q}``; ``exp(-∫ log f dγ)`` at ``q = 0``.

    This is the reciprocal of the power mean of order ``-q``, so for example
    ``f = x^2/2`` at ``q = -1`` gives ``2`` and a constant ``k`` gives ``1/k``.
    """
    m = power_mean(f, -float(q), scheme, seed)
    val = 1.0 / m.value
    return IntegralResult(val, m.stderr * val**2, m.scheme, m.truncated_mass, m.notes)


def conjugate_for_integrand(g: ConvexFunction) -> ConvexFunction:
    if isinstance(g, GridFunction):
        return NumericConjugate(g)
    return g.conjugate()


def mixed_integral(f: ConvexFunction, g: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None) -> IntegralResult:
    """Integral formula ``W̃_{n+1-q}(f, g) = ∫ g*(∇f) f^{-q} dγ_n``, ``q <= 0``.

    Nodes sitting on a kink of ``f`` use the lowest-index piece; their count
    is reported in ``notes["ties"]``.

    Raises
    ------
    ConjugateUnbounded
        When ``∇f`` leaves the domain of ``g*`` at a weighted node.
    """
    q = float(q)
    if q > 0:
        raise ValidationError("the integral formula covers q <= 0")
    if f.dim != g.dim:
        raise ValidationError("f and g must share a dimension")
    s = sampling(f, scheme, seed)
    grads, smooth = _gradients(f, s)
    gs = conjugate_for_integrand(g)
    gvals = np.zeros(len(grads))
    gvals[s.mask] = gs._eval(grads[s.mask])
    if np.any(np.isinf(gvals) & s.mask & (s.rule.weights > 0)):
        raise ConjugateUnbounded("gradient of f leaves the domain of g*")
    ties = int(np.count_nonzero(~smooth & s.mask))
    return s.result(gvals * _integrand_power(f, q, s), ties=ties)


def _richardson(ts, quotients):
    """One Richardson pass for halving steps: ``2 D(t/2) - D(t)``."""
    return [2 * quotients[k + 1] - quotients[k] for k in range(len(ts) - 1)]


def fd_derivative(family, exponent: float, scheme=DEFAULT_SCHEME, seed=None, steps=FD_STEPS,
                  rtol: float = 1e-2) -> IntegralResult:
    """Right derivative at ``t = 0`` of ``t ↦ ∫ family(t)^{exponent} dγ``.

    Forward quotients over the halving schedule ``steps`` followed by one
    Richardson pass. The stderr combines the quadrature error with the
    spread of the last two extrapolants.
    """
    steps = tuple(float(t) for t in steps)
    if len(steps) < 3 or any(abs(steps[k + 1] - steps[k] / 2) > 1e-15 for k in range(len(steps) - 1)):
        raise ValidationError("step schedule must halve and have at least three entries")
    q = -float(exponent)
    sch = QuadratureScheme.parse(scheme, seed)
    base = family(0.0)
    if sch.deterministic:
        w0 = dual_quermassintegral(base, q, sch).value
        quot = np.array([(dual_quermassintegral(family(t), q, sch).value - w0) / t for t in steps])
        rich = _richardson(steps, quot)
        resid = abs(rich[-1] - rich[-2])
        value, se = rich[-1], resid
        scheme_dict = sch.to_dict()
    else:
        rule = sch.rule(base.dim)
        pts = rule.points

        def node_vals(fn):
            return power(fn._eval(pts), -q)

        w0 = node_vals(base)
        per_node = np.array([(node_vals(family(t)) - w0) / t for t in steps])
        rich_nodes = 2 * per_node[1:] - per_node[:-1]
        quot = per_node.mean(axis=1)
        rich = list(rich_nodes.mean(axis=1))
        resid = abs(rich[-1] - rich[-2])
        value, qse = rule.estimate(rich_nodes[-1])
        se = float(np.hypot(qse, resid))
        scheme_dict = sch.to_dict()
    if resid > rtol * max(1.0, abs(value)):
        raise NonConvergent(f"difference quotients not settling (spread {resid:.3g})")
    notes = {"method": "fd", "steps": list(steps), "quotients": [float(x) for x in quot],
             "richardson": [float(x) for x in rich], "residual": float(resid)}
    return IntegralResult(float(value), float(se), scheme_dict, 0.0, notes)


def mixed_fd(f: ConvexFunction, g: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None,
             steps=FD_STEPS, box=None) -> IntegralResult:
    """``W̃_{n-q}(f, g) = (1/q) d/dt⁺ W̃_{n-q}(f □ (g t))`` by difference quotients.

    Examples
    --------
    >>> from fdm import Quadratic
    >>> r = mixed_fd(Quadratic(1.0), Quadratic(1.0), -1)
    >>> abs(r.value - 0.5) < 1e-5
    True
    """
    q = float(q)
    if q == 0:
        raise ZeroQ("the definition divides by q")

    def family(t):
        return f if t == 0 else inf_convolution(f, right_scalar_mult(g, t), box=box)

    d = fd_derivative(family, -q, scheme, seed, steps)
    d.value /= q
    d.stderr /= abs(q)
    return d


def self_mixed_fd(f: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None, steps=FD_STEPS) -> IntegralResult:
    """``(1/q) d/dt⁺ W̃_{n-q}(f (1 + t))``, the flow ``f □ (f t) = f (1 + t)``."""
    q = float(q)
    if q == 0:
        raise ZeroQ("the definition divides by q")
    d = fd_derivative(lambda t: f if t == 0 else right_scalar_mult(f, 1 + t), -q, scheme, seed, steps)
    d.value /= q
    d.stderr /= abs(q)
    return d


@dataclass
class CombinationDerivative:
    derivative: IntegralResult
    rhs: float
    rhs_stderr: float

    @property
    def gap(self) -> float:
        return self.derivative.value - self.rhs


def combination_derivative(f: ConvexFunction, g: ConvexFunction, q: float, scheme=DEFAULT_SCHEME, seed=None,
                           steps=FD_STEPS, box=None) -> CombinationDerivative:
    """``d/dt⁺ W̃_{n+1-q}([f(1-t)] □ [g t])`` next to ``(q-1)[W̃(f,g) - W̃(f,f)]``.

    The right-hand side uses :func:`mixed_integral` (index ``n+1-q``).
    """
    q = float(q)

    def family(t):
        if t == 0:
            return f
        return inf_convolution(right_scalar_mult(f, 1 - t), right_scalar_mult(g, t), box=box)

    deriv = fd_derivative(family, 1 - q, scheme, seed, steps)
    fg = mixed_integral(f, g, q, scheme, seed)
    ff = mixed_integral(f, f, q, scheme, seed)
    rhs = (q - 1) * (fg.value - ff.value)
    return CombinationDerivative(deriv, rhs, abs(q - 1) * float(np.hypot(fg.stderr, ff.stderr)))
