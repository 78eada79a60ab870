"""Cochain Hodge Laplacian and the antiderivative d^{-1} = d* Delta^{-1}.

Whitney (Galerkin) mass matrices realize the L^2 pairing of k-forms on
the flat complex; the codifferential is the mass-weighted adjoint of
the coboundary,

    d* c  solves  M_{k-1} x = D_{k-1}^T M_k c,

and the weak Hodge Laplacian on k-cochains is

    A = D_k^T M_{k+1} D_k  +  M_k D_{k-1} M_{k-1}^{-1} D_{k-1}^T M_k,

which is symmetric positive definite for 1 <= k <= N-1 on S^N (no
harmonic forms).  d^{-1} eta = d* u with A u = M_k eta solved by
Jacobi-preconditioned conjugate gradients; mass solves inside the
operator use a sparse LU factorization.

Local mass entries use the exact identities
int_T lambda_a lambda_b = vol(1 + delta_ab)/((N+1)(N+2)) and
<dl_{a_1}^...^dl_{a_k}, dl_{b_1}^...^dl_{b_k}> = det[<grad l_a, grad l_b>].
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, cg, eigsh, splu

from .geometry.cochain import Cochain
from .geometry.mesh import _factorial


def mass_matrix(mesh, k: int) -> sparse.csr_matrix:
    """Whitney k-form mass matrix (symmetric positive definite)."""
    N = mesh.dim
    n_t = mesh.n_simplices(N)
    slots = list(combinations(range(N + 1), k + 1))
    vol = mesh.top_volumes
    g = mesh.metric                                   # (t, N+1, N+1)
    lamlam = (1.0 + np.eye(N + 1)) / ((N + 1) * (N + 2))
    faces = mesh.top_faces[k]
    par = mesh.top_face_parity[k]

    kfac2 = float(_factorial(k)) ** 2
    rows, cols, data = [], [], []
    for a, Ja in enumerate(slots):
        for b, Jb in enumerate(slots):
            acc = np.zeros(n_t)
            for m in range(k + 1):
                ra = list(Ja[:m] + Ja[m + 1:])
                for mm in range(k + 1):
                    rb = list(Jb[:mm] + Jb[mm + 1:])
                    det = np.linalg.det(g[:, ra, :][:, :, rb]) if k else 1.0
                    acc += ((-1) ** (m + mm) * lamlam[Ja[m], Jb[mm]]) * det
            val = kfac2 * vol * acc * par[:, a] * par[:, b]
            rows.append(faces[:, a])
            cols.append(faces[:, b])
            data.append(val)
    n = mesh.n_simplices(k)
    M = sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n))
    M.sum_duplicates()
    return M


def whitney_mass_local(vertices: np.ndarray, k: int) -> np.ndarray:
    """Local Whitney k-form mass matrix of one affine simplex.

    Rows/columns are indexed by the k-faces in lexicographic local
    vertex order (ascending tuples of combinations).  Used for testing
    against hand computations.
    """
    verts = np.asarray(vertices, dtype=float)
    N = len(verts) - 1
    edges = verts[1:] - verts[:1]
    gram = edges @ edges.T
    vol = np.sqrt(abs(np.linalg.det(gram))) / _factorial(N)
    inv = np.linalg.inv(gram)
    grads = inv @ edges
    barygrad = np.vstack([-grads.sum(axis=0), grads])
    g = barygrad @ barygrad.T
    lamlam = (1.0 + np.eye(N + 1)) / ((N + 1) * (N + 2))
    slots = list(combinations(range(N + 1), k + 1))
    M = np.zeros((len(slots), len(slots)))
    for a, Ja in enumerate(slots):
        for b, Jb in enumerate(slots):
            acc = 0.0
            for m in range(k + 1):
                ra = list(Ja[:m] + Ja[m + 1:])
                for mm in range(k + 1):
                    rb = list(Jb[:mm] + Jb[mm + 1:])
                    det = np.linalg.det(g[np.ix_(ra, rb)]) if k else 1.0
                    acc += (-1) ** (m + mm) * lamlam[Ja[m], Jb[mm]] * det
            M[a, b] = _factorial(k) ** 2 * vol * acc
    return M


class _MassSolver:
    """Solves with a Whitney mass matrix.

    Small systems get an exact sparse LU; large ones (where 3D-complex
    fill makes direct factorization explode) use Jacobi-preconditioned
    conjugate gradients at near-machine tolerance, which converges in a
    few dozen iterations since mass matrices are spectrally close to
    their diagonal.
    """

    DIRECT_LIMIT = 50_000

    def __init__(self, M: sparse.csr_matrix):
        self.M = M.tocsr()
        self.n = M.shape[0]
        self._diag = self.M.diagonal()
        self._lu = splu(M.tocsc()) if self.n <= self.DIRECT_LIMIT else None

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            return self._lu.solve(b)
        Mpre = LinearOperator(self.M.shape, matvec=lambda x: x / self._diag)
        x, info = cg(self.M, b, rtol=1e-13, atol=0.0, maxiter=400, M=Mpre)
        if info != 0:
            raise RuntimeError("mass solve did not converge")
        return x


class HodgeOperator:
    """Hodge Laplacian on k-cochains of a sphere mesh.

    Holds the Whitney mass matrices M_{k-1}, M_k, M_{k+1}, the weak
    Laplacian, and solver configuration (relative tolerance, iteration
    cap, Jacobi preconditioning).
    """

    def __init__(self, mesh, k: int, tol: float = 1e-9,
                 maxiter: int | None = None, jacobi: bool = True):
        if not 0 <= k <= mesh.dim:
            raise ValueError("degree out of range")
        self.mesh = mesh
        self.k = k
        self.tol = tol
        self.maxiter = maxiter
        self.jacobi = jacobi
        self.mass_k = mass_matrix(mesh, k)
        self.mass_up = mass_matrix(mesh, k + 1) if k < mesh.dim else None
        self.mass_down = mass_matrix(mesh, k - 1) if k > 0 else None
        self._down_solver = _MassSolver(self.mass_down) if k > 0 else None
        if k < mesh.dim:
            D = mesh.coboundary(k).astype(float)
            self.stiffness = (D.T @ self.mass_up @ D).tocsr()
        else:
            self.stiffness = None
        self.last_solve: dict = {}

    # -- inner products ----------------------------------------------------

    def norm(self, c: Cochain) -> float:
        M = {self.k: self.mass_k, self.k + 1: self.mass_up,
             self.k - 1: self.mass_down}[c.degree]
        return float(np.sqrt(max(c.values @ (M @ c.values), 0.0)))

    def inner(self, a: Cochain, b: Cochain) -> float:
        return float(a.values @ (self.mass_k @ b.values))

    def min_mass_eigenvalue(self) -> float:
        """Smallest mass eigenvalue estimate.

        Shift-invert Lanczos for small systems; inverse power iteration
        through the iterative mass solver above the direct-factorization
        size limit.
        """
        n = self.mass_k.shape[0]
        if n <= 2:
            return float(np.linalg.eigvalsh(self.mass_k.toarray()).min())
        if n <= _MassSolver.DIRECT_LIMIT:
            val = eigsh(self.mass_k, k=1, sigma=0, which="LM",
                        return_eigenvectors=False)
            return float(val[0])
        solver = _MassSolver(self.mass_k)
        rng = np.random.default_rng(0)
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        for _ in range(30):
            x = solver.solve(x)
            x /= np.linalg.norm(x)
        return float(x @ (self.mass_k @ x))

    # -- operators ----------------------------------------------------------

    def codifferential_values(self, values: np.ndarray) -> np.ndarray:
        D = self.mesh.coboundary(self.k - 1)
        return self._down_solver.solve(D.T @ (self.mass_k @ values))

    def apply_laplacian(self, values: np.ndarray) -> np.ndarray:
        """Strong-form Laplacian M_k^{-1} A applied to cochain values."""
        solver = getattr(self, "_k_solver", None)
        if solver is None:
            self._k_solver = solver = _MassSolver(self.mass_k)
        return solver.solve(self._weak_apply(values))

    def _weak_apply(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values)
        if self.stiffness is not None:
            out = out + self.stiffness @ values
        if self.k > 0:
            D = self.mesh.coboundary(self.k - 1)
            out = out + self.mass_k @ (D @ self._down_solver.solve(
                D.T @ (self.mass_k @ values)))
        return out

    def _jacobi_diagonal(self) -> np.ndarray:
        # diag of M_k D M~^{-1} D^T M_k with lumped M~, taken as row sums
        # of squares of B = M_k D (never forming the dense-ish product)
        diag = np.zeros(self.mass_k.shape[0])
        if self.stiffness is not None:
            diag = diag + self.stiffness.diagonal()
        if self.k > 0:
            D = self.mesh.coboundary(self.k - 1).astype(float)
            B = (self.mass_k @ D).tocsr()
            inv_lump = 1.0 / self.mass_down.diagonal()
            diag = diag + B.multiply(B) @ inv_lump
        return diag

    def solve_laplacian(self, rhs: Cochain) -> Cochain:
        """u with Delta u = rhs, to relative residual `tol` (weak form)."""
        b = self.mass_k @ rhs.values
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            self.last_solve = {"iterations": 0, "residual": 0.0}
            return Cochain.zeros(self.mesh, self.k)
        A = LinearOperator(self.mass_k.shape, matvec=self._weak_apply)
        M = None
        if self.jacobi:
            d = self._jacobi_diagonal()
            M = LinearOperator(self.mass_k.shape, matvec=lambda x: x / d)
        count = {"n": 0}

        def cb(_):
            count["n"] += 1

        maxiter = self.maxiter or max(2000, 40 * int(np.sqrt(self.mass_k.shape[0])))
        u, info = cg(A, b, rtol=self.tol, atol=0.0, maxiter=maxiter,
                     M=M, callback=cb)
        res = float(np.linalg.norm(self._weak_apply(u) - b) / bnorm)
        self.last_solve = {"iterations": count["n"], "residual": res}
        if info != 0:
            raise RuntimeError(
                f"conjugate gradient did not converge: relative residual "
                f"{res:.3e} after {count['n']} iterations")
        return Cochain(self.mesh, self.k, u)


_strong_refs: dict = {}


def hodge_operator(mesh, k: int, tol: float = 1e-9) -> HodgeOperator:
    """Cached HodgeOperator factory (meshes are immutable)."""
    key = (id(mesh), k, tol)
    op = _strong_refs.get(key)
    if op is None or op.mesh is not mesh:
        op = HodgeOperator(mesh, k, tol=tol)
        _strong_refs[key] = op
        if len(_strong_refs) > 32:
            _strong_refs.pop(next(iter(_strong_refs)))
    return op


def codifferential(c: Cochain, tol: float = 1e-9) -> Cochain:
    """Adjoint of d: solves M_{k-1} x = D^T M_k c."""
    if c.degree == 0:
        raise ValueError("no codifferential")
    op = hodge_operator(c.mesh, c.degree, tol=tol)
    return Cochain(c.mesh, c.degree - 1, op.codifferential_values(c.values))


def d_inverse(eta: Cochain, tol: float = 1e-9,
              closed_tol: float = 1e-6) -> Cochain:
    """Primitive of a (numerically) closed cochain: d^{-1} = d* Delta^{-1}.

    Requires 1 <= degree <= N-1 so that the Laplacian is invertible and
    the closedness defect ||d eta|| / ||eta|| below `closed_tol` in mass
    norm.  The result xi satisfies d(xi) = eta and d*(xi) = 0 up to
    solver tolerance plus the input's closedness defect; solve
    statistics are stored on the owning HodgeOperator.
    """
    mesh = eta.mesh
    if not 1 <= eta.degree <= mesh.dim - 1:
        raise ValueError("degree must be between 1 and N-1")
    op = hodge_operator(mesh, eta.degree, tol=tol)
    nrm = op.norm(eta)
    if nrm == 0.0:
        op.last_solve = {"iterations": 0, "residual": 0.0, "closedness": 0.0}
        return Cochain.zeros(mesh, eta.degree - 1)
    defect = op.norm(eta.d()) / nrm
    if defect > closed_tol:
        raise ValueError(
            f"input not closed: relative defect {defect:.3e} > {closed_tol:.1e}")
    u = op.solve_laplacian(eta)
    op.last_solve["closedness"] = defect
    return Cochain(mesh, eta.degree - 1, op.codifferential_values(u.values))
