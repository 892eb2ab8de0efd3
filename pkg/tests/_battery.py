"""Shared instances for the test suite."""

import numpy as np

from fdm import (
    GridFunction,
    MaxAffine,
    Quadratic,
    dual_curvature_empirical,
    dual_curvature_semidiscrete,
    dual_quermassintegral,
    inf_convolution,
    regular_polygon_gauge,
    unit_ball_gauge,
)

ABS = MaxAffine([-1.0, 1.0], [0.0, 0.0])


def random_max_affine(rng, dim, k=None):
    """Max-affine function whose slopes surround the origin (so it is bounded below)."""
    k = k or int(rng.integers(dim + 1, 13))
    A = rng.normal(size=(k, dim))
    A[: dim + 1] = np.vstack([np.eye(dim), -np.ones((1, dim))]) * rng.uniform(0.5, 2.0)
    c = rng.normal(size=k)
    return MaxAffine(A, c)


def one_d():
    return {
        "x^2/2": Quadratic(1.0),
        "x^2": Quadratic(2.0),
        "(x-0.3)^2/2": Quadratic.centered(1.0, 0.3),
        "|x|": ABS,
        "max(-x,2x)": MaxAffine([-1.0, 2.0], [0.0, 0.0]),
        "huber": inf_convolution(ABS, Quadratic(1.0)),
        "|x|+0.5": MaxAffine([-1.0, 1.0], [-0.5, -0.5]),
    }


def twenty():
    """Twenty functions across dimensions 1 to 3 for mass-conservation checks."""
    rng = np.random.default_rng(20)
    fns = dict(one_d())
    for i in range(4):
        fns[f"random1d-{i}"] = random_max_affine(rng, 1, 5)
    fns["disc"] = unit_ball_gauge(2, 128)
    fns["12-gon"] = regular_polygon_gauge(12)
    fns["ellipse-quadratic"] = Quadratic(np.diag([1.0, 3.0]))
    fns["shifted-2d"] = Quadratic.centered(np.eye(2), [0.2, -0.1], 0.1)
    for i in range(2):
        fns[f"random2d-{i}"] = random_max_affine(rng, 2, 7)
    fns["grid-1d"] = GridFunction.sample(lambda p: 0.5 * p[:, 0] ** 2 + 0.25, [-8], [8], [641])
    fns["quadratic-3d"] = Quadratic(np.eye(3))
    fns["ball-3d"] = unit_ball_gauge(3, 200)
    assert len(fns) == 20
    return fns


def curvature_total(f, q, seed=7):
    """Total mass of the dual curvature measure with its standard error."""
    if isinstance(f, MaxAffine):
        m = dual_curvature_semidiscrete(f, q, seed=seed)
        return m.total, m.total_stderr
    e = dual_curvature_empirical(f, q, 200_000, seed=seed)
    return e.integrate_with_stderr(lambda y: np.ones(len(y)))


def reference_quermass(f, q):
    # Gauss-Hermite is exact on 1-D cells and smooth inputs; kinked n-D
    # inputs get an independent randomized estimate
    if f.dim == 1 or isinstance(f, Quadratic):
        return dual_quermassintegral(f, q, "hermite:64" if f.dim < 3 else "hermite:24")
    return dual_quermassintegral(f, q, "qmc:1048576", seed=99)
