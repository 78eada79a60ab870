"""Quadrature rules on reference simplices.

Rules are conical-product Gauss rules (Stroud): the reference k-simplex
{x_i >= 0, sum x_i <= 1} is mapped to the unit cube by the Duffy
substitution

    x_1 = t_1,  x_2 = t_2 (1 - t_1),  ...,  x_k = t_k prod_{j<k} (1 - t_j),

whose Jacobian factors (1-t_1)^{k-1} (1-t_2)^{k-2} ... are absorbed
exactly by Gauss-Jacobi weights.  A rule of `order` q integrates all
polynomials of total degree <= q exactly, all weights are positive and
all nodes are strictly interior.

Nodes are returned in barycentric coordinates (n_pts, k+1) with weights
normalized to sum to 1 (the reference simplex has volume 1/k!, handled
by callers).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


def _gauss_jacobi_01(n: int, alpha: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes/weights on [0,1] for the weight (1-t)^alpha."""
    # roots_jacobi integrates (1-x)^a (1+x)^b on [-1,1]
    x, w = roots_jacobi(n, alpha, 0.0)
    t = 0.5 * (x + 1.0)
    # dx = 2 dt and (1-x)^alpha = (2(1-t))^alpha
    w = w / 2.0 ** (alpha + 1)
    return t, w


@lru_cache(maxsize=None)
def simplex_rule(dim: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature rule on the reference `dim`-simplex.

    Parameters
    ----------
    dim : simplex dimension k (0, 1, 2 or 3)
    order : polynomial exactness degree, >= 1

    Returns
    -------
    bary : (n_pts, k+1) barycentric coordinates, strictly positive
    weights : (n_pts,) positive weights summing to 1
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    if dim == 0:
        return np.ones((1, 1)), np.ones(1)
    if dim not in (1, 2, 3):
        raise ValueError("dimension out of range")

    n = (order + 2) // 2  # n-point Gauss is exact to degree 2n-1
    axes = [_gauss_jacobi_01(n, dim - 1 - i) for i in range(dim)]

    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    ts = [g.ravel() for g in grids]
    weights = np.ones_like(ts[0])
    for wg in wgrids:
        weights = weights * wg.ravel()

    # Duffy map back to simplex coordinates
    coords = []
    rest = np.ones_like(ts[0])
    for t in ts:
        coords.append(t * rest)
        rest = rest * (1.0 - t)
    x = np.stack(coords, axis=1)
    bary = np.concatenate([1.0 - x.sum(axis=1, keepdims=True), x], axis=1)

    # Jacobi weights absorb the Duffy Jacobian; normalize to the volume
    # of the reference simplex and then to 1.
    weights = weights / weights.sum()
    return bary, weights
