"""Gaussian quadrature rules and estimators.

A scheme is written ``NAME:N``:

``hermite:N``
    Tensor Gauss–Hermite with ``N`` nodes per axis (dimensions 1 to 3).
``mc:N``
    ``N`` standard normal draws; stderr is the sample standard deviation over
    ``sqrt(N)``.
``qmc:N``
    Scrambled Sobol points mapped through the normal quantile, split into
    independent scrambles whose spread gives the stderr.

Seeds default to the ``FDM_SEED`` environment variable, then to 0.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import norm, qmc

from .errors import ValidationError

KINDS = ("hermite", "mc", "qmc")


def default_seed() -> int:
    raw = os.environ.get("FDM_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"FDM_SEED must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class QuadratureScheme:
    """Gaussian integration rule description.

    Parameters
    ----------
    kind : {"hermite", "mc", "qmc"}
    n : int
        Nodes per axis for ``hermite``, total samples otherwise.
    seed : int, optional
        Falls back to :func:`default_seed`.
    replicates : int
        Independent scrambles for ``qmc``.
    """

    kind: str
    n: int
    seed: int | None = None
    replicates: int = 16

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown scheme {self.kind!r}; expected one of {KINDS}")
        if int(self.n) < 2:
            raise ValidationError("a scheme needs at least 2 nodes")
        if self.seed is None and self.kind != "hermite":
            object.__setattr__(self, "seed", default_seed())
        if self.kind == "qmc" and self.n // self.replicates < 2:
            object.__setattr__(self, "replicates", max(2, self.n // 2))

    @classmethod
    def parse(cls, text, seed: int | None = None) -> "QuadratureScheme":
        """Read ``"hermite:64"``; an existing scheme passes through (reseeded if asked)."""
        if isinstance(text, QuadratureScheme):
            if seed is None or text.kind == "hermite":
                return text
            return cls(text.kind, text.n, seed, text.replicates)
        try:
            kind, num = str(text).split(":")
            n = int(float(num))
        except ValueError:
            raise ValidationError(f"scheme must look like NAME:N, got {text!r}") from None
        return cls(kind.strip().lower(), n, seed)

    @property
    def deterministic(self) -> bool:
        return self.kind == "hermite"

    def with_seed(self, seed: int) -> "QuadratureScheme":
        return QuadratureScheme(self.kind, self.n, seed, self.replicates)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": int(self.n)}
        if not self.deterministic:
            out["seed"] = int(self.seed)
        if self.kind == "qmc":
            out["replicates"] = int(self.replicates)
        return out

    def __str__(self):
        return f"{self.kind}:{self.n}"

    def rule(self, dim: int) -> "GaussianRule":
        return _rule(self.kind, int(self.n), self.seed, self.replicates, int(dim))


@dataclass(frozen=True)
class GaussianRule:
    """Nodes, weights and an estimator for one scheme in one dimension."""

    scheme: QuadratureScheme
    points: np.ndarray
    weights: np.ndarray
    groups: np.ndarray | None = field(default=None)

    def estimate(self, values: np.ndarray):
        """Weighted mean of per-node values with its standard error.

        ``values`` has shape ``(N,)`` or ``(N, k)``; results follow the
        trailing shape.
        """
        v = np.asarray(values, dtype=float)
        if self.scheme.kind == "hermite":
            return self.weights @ v, np.zeros(v.shape[1:]) if v.ndim > 1 else 0.0
        if self.scheme.kind == "mc":
            mean = v.mean(axis=0)
            se = v.std(axis=0, ddof=1) / np.sqrt(len(v))
            return mean, se
        R = self.scheme.replicates
        reps = v.reshape((R, -1) + v.shape[1:]).mean(axis=1)
        return reps.mean(axis=0), reps.std(axis=0, ddof=1) / np.sqrt(R)

    def replicate_means(self, values: np.ndarray) -> np.ndarray:
        """Batch means used for delta-method free stderr of nonlinear functionals."""
        v = np.asarray(values, dtype=float)
        if self.scheme.kind == "qmc":
            return v.reshape((self.scheme.replicates, -1) + v.shape[1:]).mean(axis=1)
        batches = 20
        usable = (len(v) // batches) * batches
        return v[:usable].reshape((batches, -1) + v.shape[1:]).mean(axis=1)


def hermite_rule_1d(n: int):
    """Probabilists' Gauss–Hermite nodes with weights summing to one."""
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / w.sum()


@lru_cache(maxsize=64)
def _rule(kind, n, seed, replicates, dim) -> GaussianRule:
    scheme = QuadratureScheme(kind, n, seed, replicates)
    if kind == "hermite":
        if dim > 3:
            raise ValidationError("tensor Gauss–Hermite is limited to dimension 3; use qmc")
        x, w = hermite_rule_1d(n)
        mesh = np.meshgrid(*([x] * dim), indexing="ij")
        wmesh = np.meshgrid(*([w] * dim), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        wts = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
        return _frozen_rule(scheme, pts, wts, None)
    if kind == "mc":
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((n, dim))
        return _frozen_rule(scheme, pts, np.full(n, 1.0 / n), None)
    per = n // replicates
    children = np.random.SeedSequence(seed).spawn(replicates)
    blocks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # non power-of-two sample counts
        for child in children:
            eng = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(child))
            u = eng.random(per)
            blocks.append(norm.ppf(np.clip(u, 1e-16, 1 - 1e-16)))
    pts = np.vstack(blocks)
    groups = np.repeat(np.arange(replicates), per)
    return _frozen_rule(scheme, pts, np.full(len(pts), 1.0 / len(pts)), groups)


def _frozen_rule(scheme, pts, wts, groups):
    pts.flags.writeable = False
    wts.flags.writeable = False
    return GaussianRule(scheme, pts, wts, groups)


def gauss_legendre(n: int = 24):
    x, w = roots_legendre(n)
    return x, w


_GL_X, _GL_W = gauss_legendre(24)
TAIL = 14.0


def _panels(a: float, b: float, grade_a: bool, grade_b: bool, width: float = 0.5):
    """Panel edges on ``[a, b]``, refined geometrically toward graded ends."""
    n = max(1, int(np.ceil((b - a) / width)))
    edges = list(np.linspace(a, b, n + 1))
    first, last = edges[1] - edges[0], edges[-1] - edges[-2]
    if grade_a and n >= 1:
        fine = [a + first * 2.0 ** (-j) for j in range(1, 40)]
        edges.extend(fine)
    if grade_b:
        fine = [b - last * 2.0 ** (-j) for j in range(1, 40)]
        edges.extend(fine)
    return np.unique(edges)


def gaussian_interval_nodes(a: float, b: float, grade_a: bool = True, grade_b: bool = True):
    """Nodes and weights for ``∫_a^b g(y) φ(y) dy`` with φ the standard normal density.

    Infinite ends are truncated at ``±14`` where the Gaussian tail is below
    ``1e-44``. Composite 24-point Gauss–Legendre on panels of width at most
    one half, refined geometrically toward finite ends so that integrands
    with an algebraic zero at a breakpoint stay accurate.
    """
    lo = max(a, -TAIL)
    hi = min(b, TAIL)
    if hi <= lo:
        return np.empty(0), np.empty(0)
    edges = _panels(lo, hi, grade_a and np.isfinite(a), grade_b and np.isfinite(b))
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    y = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    w = w * np.exp(-0.5 * y * y) / np.sqrt(2 * np.pi)
    return y, w
