"""Gauss-linking oracle for maps S^3 -> S^2.

Independent cross-check of the integral Hopf invariant: the preimages
of two regular values are disjoint links of circles in S^3, and the
invariant equals the total linking number between them.

Preimage circles are traced by predictor-corrector continuation of the
analytic map (kernel-direction predictor, Newton corrector), oriented
by the preimage convention: the tangent v is chosen so that
(v, w_1, w_2) is a positive frame of T_x S^3 whenever (Df w_1, Df w_2)
is a positive frame of T_p S^2, with both spheres oriented outward.
The linking number of each curve pair is evaluated by the Gauss double
line integral after an orientation-preserving stereographic chart to
R^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _tangent_basis(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space at x (columns, shape (4,3))."""
    A = np.eye(4) - np.outer(x, x)
    # columns of A span the tangent space; orthonormalize the best three
    q, r = np.linalg.qr(A)
    order = np.argsort(-np.abs(np.diag(r)))[:3]
    return q[:, sorted(order)]


def _target_frame(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positively oriented tangent frame of S^2 at y: det[y, t1, t2] = 1."""
    a = int(np.argmin(np.abs(y)))
    t1 = np.zeros(3)
    t1[a] = 1.0
    t1 = t1 - (t1 @ y) * y
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(y, t1)
    return t1, t2


class NonRegularValueError(ValueError):
    pass


@dataclass
class FiberCurve:
    points: np.ndarray              # (n, 4), closed cyclically
    min_transverse_sv: float


@dataclass
class LinkingResult:
    value: float                    # raw Gauss integral total
    rounded: int
    pair_values: list = field(default_factory=list)
    n_components: tuple = (0, 0)


def _newton_to_fiber(f, x: np.ndarray, p: np.ndarray,
                     tol: float = 1e-12, maxiter: int = 40):
    """Project x onto f^{-1}(p) along the sphere; None if not converged."""
    for _ in range(maxiter):
        r = f.value(x[None])[0] - p
        if np.linalg.norm(r) < tol:
            return x
        B = _tangent_basis(x)
        J = f.jacobian(x[None])[0] @ B
        delta, *_ = np.linalg.lstsq(J, -r, rcond=None)
        if not np.all(np.isfinite(delta)):
            return None
        step = B @ delta
        n = np.linalg.norm(step)
        if n > 0.5:
            step *= 0.5 / n
        x = x + step
        x /= np.linalg.norm(x)
    return None


def _oriented_kernel(f, x: np.ndarray, p: np.ndarray, reg_tol: float):
    """Unit fiber tangent at x with the preimage orientation."""
    B = _tangent_basis(x)
    J = f.jacobian(x[None])[0] @ B          # (3, 3), rank 2 at regular points
    U, s, Vt = np.linalg.svd(J)
    if s[1] <= reg_tol:
        raise NonRegularValueError("non-regular value")
    v = B @ Vt[2]
    v /= np.linalg.norm(v)
    y = f.value(x[None])[0]
    t1, t2 = _target_frame(y)
    w = []
    for t in (t1, t2):
        sol, *_ = np.linalg.lstsq(J, t, rcond=None)
        w.append(B @ sol)
    sign = np.linalg.det(np.stack([x, v, w[0], w[1]]))
    if sign < 0:
        v = -v
    return v, s[1]


def trace_fiber(f, p: np.ndarray, x0: np.ndarray, step: float,
                reg_tol: float = 1e-3, max_steps: int = 100000) -> FiberCurve:
    """Closed preimage curve of the regular value p through x0."""
    p = np.asarray(p, dtype=float)
    x = _newton_to_fiber(f, np.asarray(x0, dtype=float), p)
    if x is None:
        raise RuntimeError("could not land on the preimage")
    pts = [x]
    min_sv = np.inf
    start = x
    for n in range(max_steps):
        v, sv = _oriented_kernel(f, pts[-1], p, reg_tol)
        min_sv = min(min_sv, sv)
        pred = pts[-1] + step * v
        pred /= np.linalg.norm(pred)
        nxt = _newton_to_fiber(f, pred, p)
        if nxt is None:
            raise RuntimeError("corrector failed during fiber tracing")
        pts.append(nxt)
        if n >= 2 and np.linalg.norm(nxt - start) < 0.75 * step:
            return FiberCurve(np.array(pts[:-1]), min_sv)
    raise RuntimeError("open preimage trace: no closure within step budget")


def preimage_link(f, p: np.ndarray, step: float, seed: int = 0,
                  n_starts: int = 64, reg_tol: float = 1e-3) -> list[FiberCurve]:
    """All components of f^{-1}(p), each traced as a closed polyline."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_starts, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    curves: list[FiberCurve] = []
    for x0 in X:
        x = _newton_to_fiber(f, x0, np.asarray(p, dtype=float))
        if x is None:
            continue
        if any(np.linalg.norm(c.points - x, axis=1).min() < 2.0 * step
               for c in curves):
            continue
        curves.append(trace_fiber(f, p, x, step, reg_tol=reg_tol))
    return curves


# ----------------------------------------------------------------------
# the Gauss integral
# ----------------------------------------------------------------------

def _stereographic(points: np.ndarray, pole: np.ndarray) -> np.ndarray:
    """Orientation-preserving chart S^3 minus pole -> R^3.

    Basis (b1, b2, b3) of pole-perp is chosen with det[pole, b] = -1 so
    that linking numbers in the chart match the outward orientation of
    the sphere.
    """
    q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)[:, :3]]))
    q = q[:, 1:]
    if np.linalg.det(np.column_stack([pole, q])) > 0:
        q = q[:, [1, 0, 2]]
    den = 1.0 - points @ pole
    flat = (points - np.outer(points @ pole, pole)) / den[:, None]
    return flat @ q


def gauss_linking_integral(c1: np.ndarray, c2: np.ndarray) -> float:
    """(1/4pi) oint oint (x-y).(dx x dy)/|x-y|^3 for closed polylines in R^3.

    Midpoint rule per segment pair; exact in the limit of fine curves.
    """
    x_mid = 0.5 * (c1 + np.roll(c1, -1, axis=0))
    dx = np.roll(c1, -1, axis=0) - c1
    y_mid = 0.5 * (c2 + np.roll(c2, -1, axis=0))
    dy = np.roll(c2, -1, axis=0) - c2
    total = 0.0
    block = 512
    for i in range(0, len(x_mid), block):
        xm = x_mid[i:i + block]
        dxm = dx[i:i + block]
        diff = xm[:, None, :] - y_mid[None, :, :]
        cross = np.cross(dxm[:, None, :], dy[None, :, :])
        num = np.einsum("ijk,ijk->ij", diff, cross)
        dist3 = np.linalg.norm(diff, axis=2) ** 3
        total += float((num / dist3).sum())
    return total / (4.0 * np.pi)


def _chart_pole(curves: list[np.ndarray], seed: int = 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cand = rng.standard_normal((256, 4))
    cand /= np.linalg.norm(cand, axis=1, keepdims=True)
    allpts = np.vstack(curves)
    dists = np.linalg.norm(cand[:, None, :] - allpts[None, :, :], axis=2).min(axis=1)
    return cand[int(np.argmax(dists))]


def gauss_linking_oracle(f, p, q, step: float | None = None, seed: int = 0,
                         reg_tol: float = 1e-3) -> LinkingResult:
    """Total linking number between the preimage links of p and q.

    p and q must be regular values of f: the smallest transverse
    singular value of Df along the preimages must exceed `reg_tol`.
    Step defaults to about 2000 points per unit-circumference fiber.
    """
    if f.domain_dim != 3 or f.target.dim != 2 or f.target.kind != "sphere":
        raise ValueError("oracle requires a map S3 -> S2")
    step = step or (2 * np.pi / 2000)
    link_p = preimage_link(f, p, step, seed=seed, reg_tol=reg_tol)
    link_q = preimage_link(f, q, step, seed=seed + 1, reg_tol=reg_tol)
    if not link_p or not link_q:
        return LinkingResult(0.0, 0, [], (len(link_p), len(link_q)))
    pole = _chart_pole([c.points for c in link_p + link_q], seed=seed + 2)
    flat_p = [_stereographic(c.points, pole) for c in link_p]
    flat_q = [_stereographic(c.points, pole) for c in link_q]
    pairs = []
    for a in flat_p:
        for b in flat_q:
            pairs.append(gauss_linking_integral(a, b))
    total = float(sum(pairs))
    return LinkingResult(total, int(np.rint(total)), pairs,
                         (len(link_p), len(link_q)))
