"""Smooth forms on the sphere meshed by flat simplices.

Analytic k-forms are pulled back through the radial projection
P(x) = x/|x|, which maps each flat simplex bijectively onto its curved
spherical patch.  Integrating the pullback over the flat complex equals
integrating the form over the sphere, so a de Rham projection is exact
up to quadrature error only, and it commutes with d to the same order.

A k-form evaluator is a vectorized callable

    form(points, frames) -> values

with `points` of shape (m, dim) on the sphere and `frames` of shape
(m, k, dim) holding k tangent vectors per point; 0-forms receive
frames of shape (m, 0, dim).  Wedge products use the shuffle
(determinant) convention, (a ^ b)(u, v) = a(u) b(v) - a(v) b(u).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from .cochain import Cochain
from .quadrature import simplex_rule
from .mesh import _factorial, _parity


class FormField:
    """Analytic k-form on the sphere wrapping a vectorized evaluator."""

    def __init__(self, degree: int, evaluator, name: str = ""):
        self.degree = degree
        self._evaluator = evaluator
        self.name = name

    def __call__(self, points: np.ndarray, frames: np.ndarray) -> np.ndarray:
        return self._evaluator(points, frames)

    def __repr__(self):
        return f"FormField(degree={self.degree}, name={self.name!r})"


def radial_projection(points: np.ndarray, frames: np.ndarray):
    """P(x) = x/|x| and its differential applied to the frame vectors."""
    r = np.linalg.norm(points, axis=-1, keepdims=True)
    unit = points / r
    proj = frames - np.einsum("...kd,...d->...k", frames, unit)[..., None] * unit[..., None, :]
    return unit, proj / r[..., None]


# ----------------------------------------------------------------------
# quadrature frames on the mesh
# ----------------------------------------------------------------------

def _arc_nodes_frames(pts: np.ndarray, u: np.ndarray):
    """Angle-parametrized quadrature of circle arcs.

    pts is (n_edges, 2, 2); returns nodes (n, q, 2) and frames
    (n, q, 1, 2) for the parametrization phi(u) = phi0 + u*dphi, which
    integrates constant-rate integrands like f*(dtheta) exactly.
    """
    p0, p1 = pts[:, 0, :], pts[:, 1, :]
    phi0 = np.arctan2(p0[:, 1], p0[:, 0])
    dphi = np.arctan2(p0[:, 0] * p1[:, 1] - p0[:, 1] * p1[:, 0],
                      (p0 * p1).sum(axis=1))
    ang = phi0[:, None] + u[None, :] * dphi[:, None]
    nodes = np.stack([np.cos(ang), np.sin(ang)], axis=2)
    tang = np.stack([-np.sin(ang), np.cos(ang)], axis=2) * dphi[:, None, None]
    return nodes, tang[:, :, None, :]


def _nodes_and_frames(mesh, k: int, order: int | None, curved: bool):
    """Quadrature nodes of every k-simplex with its edge-vector frame.

    Returns (points, frames, weights) with shapes (n_s, n_q, dim),
    (n_s, n_q, k, dim) and (n_q,).  With `curved` the nodes are radially
    projected and the frame is pushed through dP; circle edges use the
    angle parametrization instead.
    """
    bary, w = simplex_rule(k, order or mesh.quad_order)
    simp = mesh.simplices[k]
    pts = mesh.verts[simp]                        # (n_s, k+1, dim)
    if curved and mesh.dim == 1 and k == 1:
        nodes, frames = _arc_nodes_frames(pts, bary[:, 1])
        return nodes, frames, w
    nodes = np.einsum("qj,sjd->sqd", bary, pts)
    edges = pts[:, 1:, :] - pts[:, :1, :]         # (n_s, k, dim)
    frames = np.broadcast_to(edges[:, None, :, :],
                             (len(simp), len(w), k, pts.shape[2]))
    if curved:
        nodes, frames = radial_projection(nodes, frames)
    return nodes, np.ascontiguousarray(frames), w


def de_rham_project(form, mesh, degree: int | None = None,
                    order: int | None = None, curved: bool = True) -> Cochain:
    """Cochain of quadrature integrals of `form` over the k-simplices.

    `form` is a k-form evaluator; its integral over each simplex is the
    integral over the curved (radially projected) patch unless
    `curved=False`, which integrates over the flat simplex instead.
    """
    k = form.degree if degree is None else degree
    if order is not None and k > 0 and order < 2:
        raise ValueError("projection quadrature order must be >= 2")
    if k == 0:
        pts = mesh.verts
        vals = form(pts, np.zeros((len(pts), 0, pts.shape[1])))
        return Cochain(mesh, 0, vals)
    nodes, frames, w = _nodes_and_frames(mesh, k, order, curved)
    n_s, n_q, _, dim = frames.shape
    vals = form(nodes.reshape(-1, dim), frames.reshape(-1, k, dim))
    vals = vals.reshape(n_s, n_q)
    integrals = vals @ w / _factorial(k)
    return Cochain(mesh, k, integrals)


def sphere_quadrature(mesh, order: int | None = None):
    """Global quadrature for scalar surface integrals over the sphere.

    Returns (points, weights) with points on the unit sphere; weights
    include the curved area element, so weights.sum() approximates the
    sphere volume |S^N|.
    """
    N = mesh.dim
    nodes, frames, w = _nodes_and_frames(mesh, N, order, curved=True)
    n_s, n_q, _, dim = frames.shape
    mats = np.concatenate([nodes[:, :, None, :], frames], axis=2)
    dens = np.linalg.det(mats)                   # curved area density
    weights = dens * w[None, :] / _factorial(N)
    return nodes.reshape(-1, dim), weights.reshape(-1)


# ----------------------------------------------------------------------
# Whitney forms
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _edge_subsets(N: int, k: int) -> tuple:
    """Sorted k-subsets of the N edge slots, in a fixed order."""
    return tuple(combinations(range(N), k))


@lru_cache(maxsize=None)
def _whitney_edge_tensor(N: int, k: int, order: int):
    """Reference tensor W[slot, node, subset]: Whitney forms of the local
    k-faces evaluated on edge-vector subsets at the quadrature nodes.

    Simplex-independent: dlambda_j(e_i) = delta(j, i+1) - delta(j, 0)
    for the edge vectors e_i = p_i - p_0 of any affine simplex.
    """
    bary, _ = simplex_rule(N, order)
    slots = list(combinations(range(N + 1), k + 1))
    subsets = _edge_subsets(N, k)
    dl = np.zeros((N + 1, N))
    for j in range(N + 1):
        for i in range(N):
            dl[j, i] = (1.0 if j == i + 1 else 0.0) - (1.0 if j == 0 else 0.0)
    W = np.zeros((len(slots), len(bary), len(subsets)))
    for s, tup in enumerate(slots):
        for m in range(k + 1):
            rest = tup[:m] + tup[m + 1:]
            for si, sub in enumerate(subsets):
                sign_det = np.linalg.det(dl[np.ix_(rest, sub)]) if k else 1.0
                W[s, :, si] += (-1) ** m * bary[:, tup[m]] * sign_det
    return _factorial(k) * W


def _whitney_coefficients(mesh, c: Cochain) -> np.ndarray:
    """Cochain values gathered per top simplex with orientation parities."""
    k = c.degree
    return c.values[mesh.top_faces[k]] * mesh.top_face_parity[k]


def whitney_values_on_frames(c: Cochain, tri_idx: np.ndarray,
                             bary: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """Whitney interpolant of `c` at barycentric points of given top
    simplices, evaluated on arbitrary tangent frames (m, k, dim)."""
    mesh = c.mesh
    k = c.degree
    coef = _whitney_coefficients(mesh, c)[tri_idx]        # (m, n_slots)
    lam = bary                                            # (m, N+1)
    if k == 0:
        return np.einsum("ms,ms->m", coef, lam)
    # dlambda_j(v_i) with the true barycentric gradients of each simplex
    dl = np.einsum("mjd,mid->mji", mesh.barygrad[tri_idx], frames)  # (m, N+1, k)
    slots = list(combinations(range(mesh.dim + 1), k + 1))
    out = np.zeros(len(tri_idx))
    for s, tup in enumerate(slots):
        acc = np.zeros(len(tri_idx))
        for m in range(k + 1):
            rest = list(tup[:m] + tup[m + 1:])
            det = np.linalg.det(dl[:, rest, :]) if k else 1.0
            acc += (-1) ** m * lam[:, tup[m]] * det
        out += coef[:, s] * acc
    return _factorial(k) * out


def whitney_interpolate(c: Cochain, x, vectors=None):
    """Value of the Whitney form of `c` at surface point(s) x.

    For a 0-cochain returns the scalar value; for k >= 1 `vectors`
    supplies the k tangent vectors (shape (k, dim) for a single point or
    (m, k, dim) batched).  Points are located by radial projection into
    the flat complex.
    """
    mesh = c.mesh
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    idx, bary = mesh.locate(pts)
    if c.degree == 0:
        vals = whitney_values_on_frames(c, idx, bary,
                                        np.zeros((len(pts), 0, pts.shape[1])))
    else:
        if vectors is None:
            raise ValueError("tangent vectors required for a k-form value")
        frames = np.asarray(vectors, dtype=float)
        if frames.ndim == 2:
            frames = np.broadcast_to(frames[None], (len(pts),) + frames.shape)
        vals = whitney_values_on_frames(c, idx, bary, frames)
    return float(vals[0]) if single else vals


# ----------------------------------------------------------------------
# wedge integration
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _shuffles(degrees: tuple, N: int) -> tuple:
    """All block-increasing partitions of range(N) with their signs."""
    if sum(degrees) != N:
        raise ValueError("wedge degree != N")
    out = []

    def rec(remaining, blocks):
        if not remaining and len(blocks) == len(degrees):
            perm = [i for b in blocks for i in b]
            out.append((tuple(blocks), _parity(perm)))
            return
        j = len(blocks)
        if j == len(degrees):
            return
        for sub in combinations(sorted(remaining), degrees[j]):
            rec(remaining - set(sub), blocks + [sub])

    rec(set(range(N)), [])
    return tuple(out)


def integrate_wedge(factors, mesh, order: int | None = None) -> float:
    """Integral over the sphere of the wedge of the given factors.

    Each factor is either an analytic k-form evaluator (pulled back
    through the radial projection) or a Cochain (evaluated as its
    Whitney form on the flat complex).  Degrees must sum to N.
    """
    N = mesh.dim
    degrees = tuple(f.degree for f in factors)
    if sum(degrees) != N:
        raise ValueError("wedge degree != N")
    order = order or mesh.quad_order
    bary, w = simplex_rule(N, order)
    n_q = len(w)
    tops = mesh.simplices[N]
    n_t = len(tops)
    dim = mesh.verts.shape[1]

    nodes = np.einsum("qj,tjd->tqd", bary, mesh.top_points)
    edges = np.broadcast_to(mesh.top_edges[:, None, :, :], (n_t, n_q, N, dim))

    all_analytic = all(not isinstance(f, Cochain) for f in factors)
    if any(not isinstance(f, Cochain) for f in factors):
        if N == 1 and all_analytic:
            # angle parametrization is exact for constant-rate integrands;
            # only valid when no flat Whitney factor shares the nodes
            pts_c, frames_c = _arc_nodes_frames(mesh.top_points, bary[:, 1])
        else:
            pts_c, frames_c = radial_projection(nodes, edges)

    # factor values per edge subset
    values = []
    for f in factors:
        k = f.degree
        subsets = _edge_subsets(N, k)
        if isinstance(f, Cochain):
            if f.mesh is not mesh:
                raise ValueError("cochain belongs to a different mesh")
            W = _whitney_edge_tensor(N, k, order)          # (slots, q, subs)
            coef = _whitney_coefficients(mesh, f)          # (t, slots)
            vals = np.einsum("ts,sqf->tqf", coef, W)
        else:
            vals = np.empty((n_t, n_q, len(subsets)))
            for si, sub in enumerate(subsets):
                fr = frames_c[:, :, sub, :].reshape(-1, k, dim)
                vals[:, :, si] = f(pts_c.reshape(-1, dim), fr).reshape(n_t, n_q)
        index = {sub: i for i, sub in enumerate(subsets)}
        values.append((vals, index))

    integrand = np.zeros((n_t, n_q))
    for blocks, sign in _shuffles(degrees, N):
        term = np.full((n_t, n_q), float(sign))
        for (vals, index), sub in zip(values, blocks):
            term = term * vals[:, :, index[sub]]
        integrand += term
    return float((integrand @ w).sum() / _factorial(N))
