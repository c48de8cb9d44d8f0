import math

import numpy as np
import pytest
import scipy.sparse as sp

from helpers import pipeline
from spectralab.assembly import assemble
from spectralab.eigensolve import solve_dense, solve_sparse, vertex_fields
from spectralab.errors import (
    ConvergenceError,
    NotSPDError,
    ParameterError,
    ShiftError,
)
from spectralab.geometry import make_chart, make_eta
from spectralab.meshing import build_structured


def _diag_problem(avals, bvals=None):
    a = sp.diags(avals).tocsr()
    b = sp.diags(bvals if bvals is not None else np.ones(len(avals))).tocsr()
    return a, b


def test_dense_diagonal_case():
    a, b = _diag_problem([1.0, 2.0, 3.0])
    result = solve_dense(a, b, 2)
    assert np.allclose(result.eigenvalues, [1.0, 2.0])


def test_dense_scalar_mass_scaling():
    a, b = _diag_problem([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
    result = solve_dense(a, b, 3)
    assert np.allclose(result.eigenvalues, [0.25, 0.5, 0.75])


def test_interval_first_eigenvalue_dense():
    chart = make_chart("flat_interval")
    mesh = build_structured(chart.domain, 2000)
    a_mat, b_mat, _ = assemble(chart, mesh)
    result = solve_dense(a_mat, b_mat, 1)
    assert result.eigenvalues[0] == pytest.approx(math.pi ** 2, rel=1e-5)


@pytest.mark.parametrize("chart_id,params,eta,res", [
    ("flat_rectangle", (), None, 32),
    ("flat_interval", (), ("linear", (2.0,)), 500),
    ("stereographic_sphere", (1.0,), None, 8),
])
def test_sparse_matches_dense(chart_id, params, eta, res):
    eta_field = None
    if eta is not None:
        eta_field = make_eta(eta[0], eta[1], dim=1 if chart_id == "flat_interval" else 2)
    chart = make_chart(chart_id, params, eta=eta_field)
    mesh = build_structured(chart.domain, res)
    a_mat, b_mat, _ = assemble(chart, mesh)
    dense = solve_dense(a_mat, b_mat, 10)
    sparse = solve_sparse(a_mat, b_mat, 10)
    rel = np.abs(sparse.eigenvalues - dense.eigenvalues) / (1.0 + dense.eigenvalues)
    assert rel.max() <= 1e-8


def test_square_symmetry_pairs():
    # the fixed-diagonal mesh keeps the (x, y) swap symmetry but splits the
    # symmetric/antisymmetric blocks of each continuum multiplicity at
    # O(h^2); measured splittings at 64x64 are 5.8e-4 and 3.3e-6
    chart = make_chart("flat_rectangle")
    mesh = build_structured(chart.domain, 64)
    a_mat, b_mat, _ = assemble(chart, mesh)
    result = solve_sparse(a_mat, b_mat, 13)
    lam = result.eigenvalues
    assert abs(lam[2] - lam[1]) / lam[1] <= 1e-3     # 5 pi^2 pair
    assert abs(lam[5] - lam[4]) / lam[4] <= 1e-5     # 10 pi^2 pair
    assert lam[0] == pytest.approx(2 * math.pi ** 2, rel=2e-3)


def test_zero_requested_pairs():
    a, b = _diag_problem([1.0, 2.0])
    for solver in (solve_dense, solve_sparse):
        result = solver(a, b, 0)
        assert len(result) == 0


def test_b_orthonormality_and_residuals():
    chart, mesh, (a_mat, b_mat, _), result = pipeline(
        "stereographic_sphere", (1.0,), resolution=8, k=8)
    b_csr = b_mat.to_csr()
    gram = result.vectors @ (b_csr @ result.vectors.T)
    assert np.abs(gram - np.eye(len(result))).max() <= 1e-8
    assert result.residuals.max() <= 1e-8
    assert np.all(np.diff(result.eigenvalues) >= 0)
    assert np.all(result.eigenvalues > 0)


def test_random_rayleigh_quotients_bound_lambda1():
    chart = make_chart("flat_rectangle")
    mesh = build_structured(chart.domain, 10)
    a_mat, b_mat, _ = assemble(chart, mesh)
    a_csr, b_csr = a_mat.to_csr(), b_mat.to_csr()
    lam1 = solve_dense(a_mat, b_mat, 1).eigenvalues[0]
    rng = np.random.default_rng(0)
    for _ in range(100):
        vec = rng.standard_normal(a_csr.shape[0])
        quotient = (vec @ (a_csr @ vec)) / (vec @ (b_csr @ vec))
        assert quotient >= lam1 - 1e-10


def test_eigenvector_sign_convention():
    chart, mesh, _, result = pipeline("flat_rectangle", resolution=12, k=4)
    for vec in result.vectors:
        assert vec[np.argmax(np.abs(vec))] > 0


def test_vertex_fields_zero_on_boundary():
    chart, mesh, (a_mat, b_mat, dof_map), result = pipeline(
        "flat_rectangle", resolution=8, k=3)
    fields = vertex_fields(result, dof_map)
    assert fields.shape == (3, mesh.num_vertices)
    assert np.all(fields[:, mesh.boundary] == 0)


def test_request_exceeding_dimension_rejected():
    a, b = _diag_problem([1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        solve_dense(a, b, 4)
    with pytest.raises(ParameterError):
        solve_sparse(a, b, 4)


def test_dense_dimension_cap():
    a = sp.eye(4001, format="csr")
    with pytest.raises(ParameterError):
        solve_dense(a, a, 1)


def test_non_spd_mass_rejected():
    a, _ = _diag_problem([1.0, 2.0, 3.0])
    b = sp.diags([1.0, -1.0, 1.0]).tocsr()
    with pytest.raises(NotSPDError):
        solve_dense(a, b, 2)


def test_singular_shift_rejected():
    a, b = _diag_problem([1.0, 2.0, 3.0])
    with pytest.raises(ShiftError):
        solve_sparse(a, b, 1, sigma=1.0)  # A - sigma B exactly singular


def test_convergence_error_carries_residuals():
    chart = make_chart("flat_rectangle")
    mesh = build_structured(chart.domain, 24)
    a_mat, b_mat, _ = assemble(chart, mesh)
    with pytest.raises(ConvergenceError) as excinfo:
        solve_sparse(a_mat, b_mat, 10, maxiter=12)
    # cap too small to converge ten pairs; best residuals are reported
    assert excinfo.value.best_residuals is None or len(excinfo.value.best_residuals) == 10


def test_small_problem_exhausts_krylov_space():
    # Lanczos must terminate exactly once the basis spans the whole space
    a, b = _diag_problem([1.0, 1.0, 2.0, 5.0])
    result = solve_sparse(a, b, 3)
    assert np.allclose(result.eigenvalues, [1.0, 1.0, 2.0])
