"""Meshes, boundary operators, quadrature, and the mesh file format."""

import numpy as np
import pytest

from quanthom.geometry import SPHERE_VOLUMES, SimplicialSphere, build_sphere_mesh
from quanthom.geometry.quadrature import simplex_rule

from conftest import cached_mesh


def exact_monomial(dim, alphas):
    from math import factorial
    num = 1
    for a in alphas:
        num *= factorial(a)
    return num / factorial(dim + sum(alphas))


class TestQuadrature:
    @pytest.mark.parametrize("dim", [1, 2, 3])
    @pytest.mark.parametrize("order", [1, 2, 4, 6])
    def test_monomial_exactness(self, dim, order):
        from itertools import product
        from math import factorial
        bary, w = simplex_rule(dim, order)
        assert (w > 0).all()
        assert (bary > 0).all()
        assert abs(w.sum() - 1.0) < 1e-14
        x = bary[:, 1:]
        vol = 1.0 / factorial(dim)
        for alphas in product(range(order + 1), repeat=dim):
            if sum(alphas) > order:
                continue
            approx = vol * (w * np.prod(x ** np.array(alphas), axis=1)).sum()
            assert approx == pytest.approx(exact_monomial(dim, alphas), abs=1e-14)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            simplex_rule(2, 0)
        with pytest.raises(ValueError, match="dimension out of range"):
            simplex_rule(4, 2)


class TestMeshConstruction:
    def test_octagon_counts(self):
        m = build_sphere_mesh(1, 0)
        assert m.n_simplices(0) == 8
        assert m.n_simplices(1) == 8
        assert m.euler_characteristic() == 0

    def test_icosahedron_counts(self):
        m = build_sphere_mesh(2, 0)
        assert [m.n_simplices(k) for k in range(3)] == [12, 30, 20]
        assert m.euler_characteristic() == 2

    @pytest.mark.parametrize("dim,level,chi", [(1, 3, 0), (2, 2, 2), (3, 1, 0)])
    def test_euler_characteristic(self, dim, level, chi):
        assert cached_mesh(dim, level).euler_characteristic() == chi

    @pytest.mark.parametrize("dim,level", [(1, 2), (2, 2), (3, 0), (3, 1)])
    def test_vertices_on_sphere(self, dim, level):
        m = cached_mesh(dim, level)
        assert np.abs(np.linalg.norm(m.verts, axis=1) - 1.0).max() < 1e-14

    @pytest.mark.parametrize("dim,level", [(1, 2), (2, 2), (3, 1)])
    def test_boundary_of_boundary(self, dim, level):
        m = cached_mesh(dim, level)
        for k in range(dim - 1):
            prod = m.coboundary(k + 1) @ m.coboundary(k)
            assert prod.nnz == 0 or abs(prod).max() == 0

    @pytest.mark.parametrize("dim,level", [(1, 2), (2, 2), (3, 1)])
    def test_fundamental_cycle(self, dim, level):
        # the oriented sum of top cells is a cycle: Stokes holds exactly
        m = cached_mesh(dim, level)
        ones = np.ones(m.n_simplices(dim))
        assert np.abs(m.coboundary(dim - 1).T @ ones).max() == 0

    def test_s3_volume_level1(self):
        # coarse-projection tolerance measured at build time: -12.8%
        m = cached_mesh(3, 1)
        vol = m.signed_volume()
        assert vol > 0
        assert abs(vol - SPHERE_VOLUMES[3]) / SPHERE_VOLUMES[3] < 0.15

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_signed_volume_converges(self, dim):
        exact = SPHERE_VOLUMES[dim]
        lo = abs(cached_mesh(dim, 1).signed_volume() - exact)
        hi = abs(cached_mesh(dim, 2).signed_volume() - exact)
        assert hi < lo / 2.5   # O(h^2) deficit

    @pytest.mark.parametrize("dim,levels", [(1, (1, 2, 3)), (2, (1, 2, 3)),
                                            (3, (1, 2, 3))])
    def test_edge_halving(self, dim, levels):
        # asymptotic halving; the platonic-base transition sits outside
        hs = [cached_mesh(dim, l).max_edge_length() for l in levels]
        for a, b in zip(hs, hs[1:]):
            assert 0.45 <= b / a <= 0.55

    def test_bad_dimension(self):
        with pytest.raises(ValueError, match="dimension out of range"):
            build_sphere_mesh(4, 0)

    def test_locate_roundtrip(self, mesh_s2, rng):
        pts = rng.standard_normal((50, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        idx, bary = mesh_s2.locate(pts)
        assert (bary > -1e-12).all()
        rec = np.einsum("mj,mjd->md", bary, mesh_s2.top_points[idx])
        rec /= np.linalg.norm(rec, axis=1, keepdims=True)
        assert np.abs(rec - pts).max() < 1e-12


class TestMeshIO:
    @pytest.mark.parametrize("dim,level", [(1, 1), (2, 1), (3, 0)])
    def test_roundtrip(self, tmp_path, dim, level):
        m = build_sphere_mesh(dim, level)
        path = tmp_path / "mesh.txt"
        m.save(str(path))
        m2 = SimplicialSphere.load(str(path))
        assert m2.dim == m.dim and m2.level == m.level
        assert np.array_equal(m2.verts, m.verts)
        for k in range(dim + 1):
            assert np.array_equal(m2.simplices[k], m.simplices[k])

    def test_header(self, tmp_path):
        m = build_sphere_mesh(2, 0)
        text = m.format_ascii()
        assert text.splitlines()[0] == "DIM 2 LEVEL 0"
        assert "VERTICES 12" in text
        assert "SIMPLICES 20" in text

    def test_negative_orientation_flag(self):
        m = build_sphere_mesh(2, 0)
        text = m.format_ascii()
        flipped = []
        for ln in text.splitlines():
            parts = ln.split()
            if len(parts) == 4 and parts[-1] == "+1":
                flipped.append(" ".join([parts[0], parts[2], parts[1], "-1"]))
            else:
                flipped.append(ln)
        m2 = SimplicialSphere.parse_ascii("\n".join(flipped))
        assert np.array_equal(np.sort(m2.simplices[2], axis=1),
                              np.sort(m.simplices[2], axis=1))
        assert m2.signed_volume() > 0
