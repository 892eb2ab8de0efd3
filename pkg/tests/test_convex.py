import numpy as np
import pytest
from scipy.optimize import linprog
from hypothesis import given, settings
from hypothesis import strategies as st

from _battery import ABS, random_max_affine
from fdm import (
    GridFunction,
    MaxAffine,
    PointHull,
    Quadratic,
    check_convexity_grid,
    gauge_from_polar_vertices,
    inf_convolution,
    infimum,
    normalize_at_origin,
    numeric_conjugate,
    pointwise_max,
    pointwise_min,
    regular_polygon_gauge,
    right_scalar_mult,
    unit_ball_gauge,
)
from fdm.calculus import InfConvolution
from fdm.errors import (
    DegeneratePolar,
    DimensionMismatch,
    NonPositiveScale,
    PreconditionFailed,
    SearchBoxTooSmall,
    UnboundedBelow,
    ValidationError,
)
from fdm.legendre import brute_force_conjugate, grid_conjugate


class TestMaxAffine:
    def test_abs_values(self):
        assert ABS([-2.0, 0.0, 3.0]).tolist() == [2.0, 0.0, 3.0]

    def test_tie_goes_to_lowest_index(self):
        g, smooth = ABS.gradient([[0.0]])
        assert g[0, 0] == -1.0 and not smooth[0]

    def test_duplicate_slopes_merge_to_smaller_intercept(self):
        f = MaxAffine([1.0, 1.0, -1.0], [0.0, 2.0, 0.0])
        assert f.n_pieces == 2 and f.merged == 1
        assert f(1.0) == 1.0

    def test_intercepts_must_be_finite(self):
        with pytest.raises(ValidationError):
            MaxAffine([1.0], [np.inf])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            MaxAffine([[1.0, 0.0]], [0.0, 1.0])

    def test_immutable(self):
        with pytest.raises(ValueError):
            ABS.slopes[0, 0] = 3.0

    def test_cells_1d(self):
        f = MaxAffine([-1.0, 0.0, 2.0, 0.5], [0.0, -0.5, 0.0, 10.0])
        breaks, active = f.cells_1d()
        # piece 3 never wins
        assert 3 not in active
        assert np.allclose(breaks, [-0.5, 0.25])


class TestPointHull:
    def test_lower_hull_interpolation(self):
        f = PointHull([0.0, 1.0, 2.0], [0.0, 5.0, 0.0])
        assert f(1.0) == 0.0
        assert f(3.0) == np.inf

    def test_envelope_weights_sum_to_one(self):
        f = PointHull([-1.0, 0.2, 1.5], [1.0, -0.3, 2.0])
        vals, W = f.envelope(np.array([[-0.5], [0.2], [1.0]]))
        assert np.allclose(W.sum(axis=1), 1.0)
        assert np.allclose(W @ f.points[:, 0], [-0.5, 0.2, 1.0])
        assert np.allclose(vals, W @ f.values)

    def test_2d_lp_value(self):
        f = PointHull([[0, 0], [1, 0], [0, 1]], [0.0, 1.0, 1.0])
        assert f([0.25, 0.25]) == pytest.approx(0.5, abs=1e-10)
        assert f([1.0, 1.0]) == np.inf


class TestConjugation:
    def test_max_affine_point_hull_swap_is_exact(self):
        rng = np.random.default_rng(0)
        for dim in (1, 2):
            for _ in range(50):
                f = random_max_affine(rng, dim)
                back = f.conjugate().conjugate()
                assert np.array_equal(back.slopes, f.slopes)
                assert np.array_equal(back.intercepts, f.intercepts)

    def test_quadratic_conjugate(self):
        q = Quadratic(np.array([[2.0, 0.5], [0.5, 1.0]]), [0.3, -0.2], 0.7)
        y = np.array([[0.4, -1.1], [2.0, 0.3]])
        assert np.allclose(q.conjugate()(y), numeric_conjugate(q)(y), atol=1e-9)

    def test_grid_conjugate_of_half_square(self):
        g = GridFunction.sample(lambda p: 0.5 * p[:, 0] ** 2, [-6], [6], [481])
        gs = grid_conjugate(g, [-3], [3], [121])
        y = np.linspace(-3, 3, 121)
        assert np.max(np.abs(gs(y[:, None]) - 0.5 * y**2)) <= 1e-3

    def test_grid_conjugate_matches_brute_force_2d(self):
        g = GridFunction.sample(lambda p: p[:, 0] ** 2 + 0.5 * np.abs(p[:, 1]) + p[:, 0] * p[:, 1] / 3, [-2, -2], [2, 2], [21, 31])
        gs = grid_conjugate(g, [-1, -1], [1, 1], [11, 9])
        brute = brute_force_conjugate(g, gs.nodes())
        assert np.max(np.abs(gs.values.ravel() - brute)) <= 1e-12

    def test_grid_with_infinite_values(self):
        vals = np.array([np.inf, 1.0, 0.0, 1.0, np.inf])
        g = GridFunction([-2], [2], [5], vals)
        assert g(0.0) == 0.0 and g(-1.5) == np.inf
        gs = grid_conjugate(g, [-1], [1], [3])
        assert np.allclose(gs.values, [0.0, 0.0, 0.0])


def _facets(V):
    """Rows ``(n, b)`` with ``<n, y> <= b`` describing the triangle ``conv V``."""
    V = np.asarray(V, dtype=float)
    rows = []
    for i in range(3):
        p, q, r = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
        n = np.array([q[1] - p[1], p[0] - q[0]])
        if n @ (r - p) > 0:
            n = -n
        rows.append([n[0], n[1], n @ p])
    return np.array(rows)


class TestCalculus:
    def test_quadratic_inf_convolution_is_harmonic(self):
        h = inf_convolution(Quadratic(1.0), Quadratic(2.0))
        assert isinstance(h, Quadratic)
        assert h.A[0, 0] == pytest.approx(2.0 / 3.0)

    def test_huber(self):
        h = inf_convolution(ABS, Quadratic(1.0))
        x = np.array([-3.0, -0.4, 0.0, 0.9, 2.5])
        want = np.where(np.abs(x) <= 1, 0.5 * x**2, np.abs(x) - 0.5)
        assert np.allclose(h(x[:, None]), want, atol=1e-10)

    def test_max_affine_inf_convolution_1d_exact(self):
        f = MaxAffine([-1.0, 2.0], [0.0, 0.0])
        g = MaxAffine([-2.0, 1.0], [0.5, 0.0])
        h = inf_convolution(f, g)
        assert isinstance(h, MaxAffine)
        x = np.linspace(-3, 3, 13)[:, None]
        # against the closure evaluated through the dual program
        closure = InfConvolution(f, g)
        assert np.allclose(h(x), closure(x), atol=1e-9)

    def test_max_affine_inf_convolution_2d_lp(self):
        f = gauge_from_polar_vertices([[1, 0], [0, 1], [-1, -1]])
        g = gauge_from_polar_vertices([[1, 1], [-1, 0], [0, -1]])
        h = inf_convolution(f, g)
        x = np.array([[0.3, -0.2], [1.0, 1.0]])
        # both gauges are support functions, so f □ g supports the intersection of the polar triangles
        A = np.vstack([_facets([[1, 0], [0, 1], [-1, -1]]), _facets([[1, 1], [-1, 0], [0, -1]])])
        for xi, hi in zip(x, h(x)):
            res = linprog(-xi, A_ub=A[:, :2], b_ub=A[:, 2], bounds=(None, None), method="highs")
            assert hi == pytest.approx(-res.fun, abs=1e-9)

    def test_disjoint_slope_ranges_unbounded(self):
        with pytest.raises(UnboundedBelow):
            inf_convolution(MaxAffine([1.0, 2.0], [0, 0]), MaxAffine([-3.0, -2.0], [0, 0]))

    def test_search_box_too_small(self):
        h = InfConvolution(Quadratic(1.0), Quadratic(1.0), box=1.0)
        assert h(0.5) == pytest.approx(0.0625)
        with pytest.raises(SearchBoxTooSmall):
            h(5.0)

    def test_right_scalar_mult(self):
        f = MaxAffine([-1.0, 2.0], [1.0, -1.0])
        t = 0.3
        x = np.linspace(-2, 2, 9)[:, None]
        assert np.allclose(right_scalar_mult(f, t)(x), t * f(x / t))
        with pytest.raises(NonPositiveScale):
            right_scalar_mult(f, 0.0)

    def test_pointwise_min_requires_convexity(self):
        with pytest.raises(PreconditionFailed):
            pointwise_min(ABS, MaxAffine([-1.0, 1.0], [2.0, -2.0]))
        m = pointwise_min(MaxAffine([-1.0, 2.0], [0, 0]), MaxAffine([-2.0, 1.0], [0, 0]))
        assert np.allclose(m(np.array([[-1.0], [1.0]])), [1.0, 1.0])

    def test_pointwise_max(self):
        m = pointwise_max(MaxAffine([-1.0, 2.0], [0, 0]), MaxAffine([-2.0, 1.0], [0, 0]))
        assert np.allclose(m(np.array([[-1.0], [1.0]])), [2.0, 2.0])


class TestGauges:
    def test_homogeneous(self):
        K = regular_polygon_gauge(7)
        x = np.array([[0.3, -1.2], [2.0, 0.5]])
        for lam in (0.5, 2.0, 8.0):
            assert np.array_equal(K(lam * x), lam * K(x))

    def test_polygon_vertex_on_unit_level(self):
        K = regular_polygon_gauge(12)
        assert K([1.0, 0.0]) == pytest.approx(1.0, abs=1e-14)

    def test_ball_gauge_close_to_norm(self):
        K = unit_ball_gauge(2)
        th = np.linspace(0, 2 * np.pi, 50)
        assert np.max(np.abs(K(np.column_stack([np.cos(th), np.sin(th)])) - 1)) <= 1 - np.cos(np.pi / 512) + 1e-15

    def test_origin_must_be_interior(self):
        with pytest.raises(DegeneratePolar):
            gauge_from_polar_vertices([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


class TestNormalization:
    def test_infimum_duals(self):
        h = MaxAffine([-1.0, 1.0], [1.0, 1.0])
        inf = infimum(h)
        assert inf.value == pytest.approx(-1.0)
        assert np.allclose(inf.weights, [0.5, 0.5])
        n, s = normalize_at_origin(h)
        assert s == pytest.approx(-1.0) and infimum(n).value == pytest.approx(0.0, abs=1e-12)

    def test_unbounded(self):
        with pytest.raises(UnboundedBelow):
            infimum(MaxAffine([1.0, 2.0], [0.0, 0.0]))


def test_convexity_checker():
    good = GridFunction.sample(lambda p: np.abs(p[:, 0]) + p[:, 1] ** 2, [-1, -1], [1, 1], [11, 11])
    bad = GridFunction.sample(lambda p: -(p[:, 0] ** 2), [-1], [1], [11])
    assert check_convexity_grid(good).passed
    rep = check_convexity_grid(bad)
    assert not rep.passed and rep.violation > 0


# ------------------------------------------------------------ properties

slopes_1d = st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=12, unique=True)


@st.composite
def max_affine_1d(draw):
    a = draw(slopes_1d)
    c = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=len(a), max_size=len(a)))
    return MaxAffine(a, c)


@settings(max_examples=60, deadline=None)
@given(max_affine_1d(), st.floats(-4, 4), st.floats(-6, 6))
def test_fenchel_young(f, x, y):
    fs = f.conjugate()
    fy = fs(y)
    assert f(x) + fy >= x * y - 1e-9


@settings(max_examples=60, deadline=None)
@given(max_affine_1d())
def test_involution_pointwise(f):
    x = np.linspace(-5, 5, 41)[:, None]
    assert np.array_equal(f.conjugate().conjugate()(x), f(x))


@settings(max_examples=40, deadline=None)
@given(max_affine_1d(), st.floats(0.1, 5.0))
def test_right_scaling_dualizes_to_left_scaling(f, t):
    y = np.linspace(f.slopes.min(), f.slopes.max(), 17)[:, None]
    lhs = right_scalar_mult(f, t).conjugate()(y)
    assert np.allclose(lhs, t * f.conjugate()(y), atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(max_affine_1d(), st.floats(0.3, 3.0))
def test_inf_convolution_conjugate_is_sum(f, a):
    """``(f □ g)* = f* + g*`` with the left side computed numerically."""
    g = Quadratic(a)
    h = inf_convolution(f, g)
    lo, hi = f.slopes.min(), f.slopes.max()
    y = np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 7)[:, None]
    numeric = numeric_conjugate(h, box=60.0)(y)
    assert np.allclose(numeric, f.conjugate()(y) + g.conjugate()(y), atol=1e-6)
