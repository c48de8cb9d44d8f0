import math

import numpy as np
import pytest

from helpers import diag_tensor, linear_eta, weighted_volume
from spectralab.assembly import SparseSymMatrix, apply_Lh, assemble
from spectralab.errors import MeshTooCoarseError, TensorError
from spectralab.eigensolve import solve_dense
from spectralab.geometry import LinearWeight, ZeroWeight, make_chart, make_eta, make_tensor
from spectralab.meshing import Mesh, build_structured


class QuadraticField:
    """h(xi) = xi^2 on a 1d chart."""

    def value(self, pts):
        return np.atleast_2d(pts)[:, 0] ** 2

    def gradient(self, pts):
        return 2.0 * np.atleast_2d(pts)[:, :1]


def test_interval_textbook_matrices():
    chart = make_chart("flat_interval")
    mesh = build_structured(chart.domain, 4)
    a_mat, b_mat, dof_map = assemble(chart, mesh)
    h = 0.25
    expected_a = (1 / h) * (2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1))
    expected_b = (h / 6) * (4 * np.eye(3) + np.eye(3, k=1) + np.eye(3, k=-1))
    assert np.allclose(a_mat.to_dense(), expected_a, atol=1e-14)
    assert np.allclose(b_mat.to_dense(), expected_b, atol=1e-14)
    assert list(dof_map) == [-1, 0, 1, 2, -1]


def test_storage_is_upper_triangular_and_symmetric():
    chart = make_chart("stereographic_sphere", (1.0,))
    mesh = build_structured(chart.domain, 4)
    a_mat, b_mat, _ = assemble(chart, mesh)
    for mat in (a_mat, b_mat):
        assert np.all(mat.rows <= mat.cols)
        dense = mat.to_dense()
        assert np.array_equal(dense, dense.T)
    # both matrices of the pencil are positive definite on desk sizes
    assert np.linalg.eigvalsh(a_mat.to_dense()).min() > 0
    assert np.linalg.eigvalsh(b_mat.to_dense()).min() > 0


def test_assembly_is_deterministic():
    chart = make_chart("associate_family", (0.4,), eta=linear_eta(0.2, -0.1))
    mesh = build_structured(chart.domain, 6)
    first = assemble(chart, mesh)[0]
    second = assemble(chart, mesh)[0]
    assert np.array_equal(first.vals, second.vals)
    assert np.array_equal(first.rows, second.rows)


def _dunavant5_volume(chart, mesh):
    """Weighted mesh volume by a degree-5 triangle rule (independent of the
    midpoint-rule mass matrix)."""
    bary = np.array([
        [1 / 3, 1 / 3, 1 / 3],
        [0.059715871789770, 0.470142064105115, 0.470142064105115],
        [0.470142064105115, 0.059715871789770, 0.470142064105115],
        [0.470142064105115, 0.470142064105115, 0.059715871789770],
        [0.797426985353087, 0.101286507323456, 0.101286507323456],
        [0.101286507323456, 0.797426985353087, 0.101286507323456],
        [0.101286507323456, 0.101286507323456, 0.797426985353087]])
    wts = np.array([0.225,
                    0.132394152788506, 0.132394152788506, 0.132394152788506,
                    0.125939180544827, 0.125939180544827, 0.125939180544827])
    verts = mesh.vertices[mesh.cells]
    areas = mesh.cell_measures()
    total = 0.0
    for lam, w in zip(bary, wts):
        pts = np.einsum("a,cad->cd", lam, verts)
        jac = chart.immersion.jacobian(pts)
        g = np.einsum("pai,paj->pij", jac, jac)
        integrand = np.exp(-chart.eta.value(pts)) * np.sqrt(np.linalg.det(g))
        total += float((w * areas * integrand).sum())
    return total


def test_weighted_measure_consistency_interval():
    # 1^T B 1 without elimination equals the weighted volume by independent
    # Gauss quadrature (2-pt elementwise rule leaves O(h^4) error)
    chart = make_chart("flat_interval", eta=make_eta("linear", (2.0,), dim=1))
    mesh = build_structured(chart.domain, 2000)
    _, b_mat, _ = assemble(chart, mesh, dirichlet=False)
    ones = np.ones(mesh.num_vertices)
    mass = float(ones @ (b_mat.to_csr() @ ones))
    assert mass == pytest.approx(weighted_volume(chart, nodes=96), rel=1e-10)


def test_weighted_measure_consistency_curved():
    # on the curved chart the fan polygon is the integration region, so the
    # independent rule runs cell by cell at degree 5
    chart = make_chart("stereographic_sphere", (1.0,),
                       eta=make_eta("radial_quadratic", (0.2,)))
    mesh = build_structured(chart.domain, 24)
    _, b_mat, _ = assemble(chart, mesh, dirichlet=False)
    ones = np.ones(mesh.num_vertices)
    mass = float(ones @ (b_mat.to_csr() @ ones))
    assert mass == pytest.approx(_dunavant5_volume(chart, mesh), rel=1e-7)


def test_weighted_measure_consistency_flat_exact():
    chart = make_chart("flat_rectangle", eta=make_eta("linear", (0.5, -0.25)))
    mesh = build_structured(chart.domain, 16)
    _, b_mat, _ = assemble(chart, mesh, dirichlet=False)
    ones = np.ones(mesh.num_vertices)
    mass = float(ones @ (b_mat.to_csr() @ ones))
    # midpoint rule is exact through quadratics but exp(-eta) is not
    # polynomial; 16^2 cells leave O(h^4) quadrature error
    assert mass == pytest.approx(weighted_volume(chart, nodes=64), rel=1e-8)


def test_tensor_scaling_covariance_exact():
    mesh = build_structured(make_chart("flat_rectangle").domain, 8)
    base = assemble(make_chart("flat_rectangle", tensor=diag_tensor(0.5, 1.0)), mesh)
    doubled = assemble(make_chart("flat_rectangle", tensor=diag_tensor(1.0, 2.0)), mesh)
    assert np.array_equal(2.0 * base[0].vals, doubled[0].vals)
    assert np.array_equal(base[1].vals, doubled[1].vals)


def test_dirichlet_form_identity():
    chart = make_chart("flat_rectangle")
    mesh = build_structured(chart.domain, 12)
    a_mat, b_mat, _ = assemble(chart, mesh)
    result = solve_dense(a_mat, b_mat, 5)
    a_csr, b_csr = a_mat.to_csr(), b_mat.to_csr()
    for lam, vec in zip(result.eigenvalues, result.vectors):
        quotient = (vec @ (a_csr @ vec)) / (vec @ (b_csr @ vec))
        assert quotient == pytest.approx(lam, rel=1e-12)


def test_indefinite_tensor_names_cell():
    chart = make_chart("flat_rectangle", tensor=diag_tensor(1.0, -2.0))
    mesh = build_structured(chart.domain, 4)
    with pytest.raises(TensorError, match="cell"):
        assemble(chart, mesh)


def test_all_boundary_mesh_rejected():
    verts = np.array([[0.0], [0.5], [1.0]])
    cells = np.array([[0, 1], [1, 2]])
    mesh = Mesh(verts, cells, np.array([True, True, True]), 0.5)
    with pytest.raises(MeshTooCoarseError):
        assemble(make_chart("flat_interval"), mesh)


def test_matrix_dump_format(tmp_path):
    chart = make_chart("flat_interval")
    mesh = build_structured(chart.domain, 4)
    a_mat, _, _ = assemble(chart, mesh)
    path = tmp_path / "a.txt"
    a_mat.dump(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == len(a_mat.vals)
    i, j, v = lines[0].split()
    assert int(i) <= int(j)
    assert float(v) == a_mat.vals[0]


def test_from_entries_coalesces_duplicates():
    mat = SparseSymMatrix.from_entries(3, [0, 1, 0, 2], [1, 0, 1, 2],
                                       [1.0, 2.0, 3.0, 4.0])
    dense = mat.to_dense()
    assert dense[0, 1] == 6.0 and dense[1, 0] == 6.0
    assert dense[2, 2] == 4.0


# ---------------------------------------------------------------------------
# pointwise operator application
# ---------------------------------------------------------------------------

def test_apply_Lh_constant_is_zero():
    chart = make_chart("flat_interval")
    mesh = build_structured(chart.domain, 8)
    values = apply_Lh(chart, mesh, ZeroWeight())
    assert np.abs(values).max() == 0.0


def test_apply_Lh_quadratic_flat():
    chart = make_chart("flat_interval")
    mesh = build_structured(chart.domain, 8)
    values = apply_Lh(chart, mesh, QuadraticField())
    assert np.allclose(values, 2.0, atol=1e-9)


def test_apply_Lh_linear_with_drift():
    # L h = h'' - eta' h' = 0 - 2 for h = xi, eta = 2 xi
    chart = make_chart("flat_interval", eta=make_eta("linear", (2.0,), dim=1))
    mesh = build_structured(chart.domain, 8)
    values = apply_Lh(chart, mesh, LinearWeight([1.0]))
    assert np.allclose(values, -2.0, atol=1e-9)


def test_apply_Lh_sphere_coordinate():
    # restriction of an ambient coordinate to the unit sphere satisfies
    # Laplace-Beltrami(x_l) = -2 x_l
    from spectralab.geometry import AmbientCoordinate

    chart = make_chart("stereographic_sphere", (1.0,))
    mesh = build_structured(chart.domain, 6)
    field = AmbientCoordinate(chart, 0)
    values = apply_Lh(chart, mesh, field)
    expected = -2.0 * field.value(mesh.vertices)
    assert np.allclose(values, expected, atol=1e-6)
