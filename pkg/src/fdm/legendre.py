"""Discrete Legendre transform on grids.

The d-dimensional transform is a composition of one-dimensional ones: with
``h_0 = f``, axis ``k`` produces ``h_k = conj_k(-h_{k-1})`` (the first pass uses
``f`` itself), because ``sup_{x} <x, y> - f(x)`` splits into nested suprema.
Each 1-D pass takes the lower hull of the samples and merges its sorted edge
slopes against the sorted dual abscissae.
"""

import numpy as np

from .errors import ValidationError
from .functions import GridFunction, _lower_hull_1d


def conjugate_1d(x, f, y):
    """``max_i x_i * y_j - f_i`` for every ``y_j``.

    Parameters
    ----------
    x : ndarray
        Sorted primal abscissae.
    f : ndarray
        Values at ``x``; ``+inf`` entries are ignored.
    y : ndarray
        Sorted dual abscissae.

    Returns
    -------
    ndarray
        ``-inf`` everywhere when ``f`` is identically ``+inf``.
    """
    finite = np.isfinite(f)
    if not finite.any():
        return np.full(len(y), -np.inf)
    hx, hv, _ = _lower_hull_1d(x[finite], f[finite])
    if len(hx) == 1:
        return hx[0] * y - hv[0]
    slopes = np.diff(hv) / np.diff(hx)
    k = np.searchsorted(slopes, y, side="left")
    return hx[k] * y - hv[k]


def grid_conjugate(g: GridFunction, dual_lo, dual_hi, dual_shape) -> GridFunction:
    """Legendre transform of a grid function onto a dual grid.

    Examples
    --------
    >>> import numpy as np
    >>> g = GridFunction.sample(lambda p: 0.5 * p[:, 0] ** 2, [-6], [6], [481])
    >>> gs = grid_conjugate(g, [-3], [3], [61])
    >>> float(np.max(np.abs(gs.values - 0.5 * np.linspace(-3, 3, 61) ** 2))) < 1e-3
    True
    """
    dual = GridFunction(dual_lo, dual_hi, dual_shape, np.zeros(int(np.prod(dual_shape))))
    if dual.dim != g.dim:
        raise ValidationError("dual grid dimension differs from the primal one")
    vals = np.array(g.values)
    for k, (x, y) in enumerate(zip(g.axes(), dual.axes())):
        moved = np.moveaxis(vals if k == 0 else -vals, k, -1)
        fibers = moved.reshape(-1, moved.shape[-1])
        out = np.empty((fibers.shape[0], len(y)))
        for j, fib in enumerate(fibers):
            out[j] = conjugate_1d(x, fib, y)
        vals = np.moveaxis(out.reshape(moved.shape[:-1] + (len(y),)), -1, k)
    if np.any(vals == -np.inf):
        raise ValidationError("function is identically +inf")
    return GridFunction(dual.lo, dual.hi, dual.shape, vals)


def brute_force_conjugate(g: GridFunction, dual_points) -> np.ndarray:
    """Direct ``max`` over all grid nodes; the oracle for :func:`grid_conjugate`."""
    nodes = g.nodes()
    f = g.values.ravel()
    finite = np.isfinite(f)
    nodes, f = nodes[finite], f[finite]
    pts = np.asarray(dual_points, dtype=float).reshape(-1, g.dim)
    return np.array([np.max(nodes @ y - f) for y in pts])
