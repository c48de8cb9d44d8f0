"""Shared pipeline shortcuts for the test suite."""

import numpy as np

from spectralab.assembly import EigenfunctionQuadrature, assemble
from spectralab.eigensolve import solve_sparse, vertex_fields
from spectralab.geometry import make_chart, make_eta, make_tensor
from spectralab.meshing import build_structured


def pipeline(chart_id, params=(), resolution=16, k=13, eta=None, tensor=None,
             domain=None):
    """Chart -> mesh -> assemble -> sparse solve, returning all stages."""
    chart = make_chart(chart_id, params, domain=domain, eta=eta, tensor=tensor)
    mesh = build_structured(chart.domain, resolution)
    a_mat, b_mat, dof_map = assemble(chart, mesh)
    result = solve_sparse(a_mat, b_mat, k)
    result.vertex_values = vertex_fields(result, dof_map)
    return chart, mesh, (a_mat, b_mat, dof_map), result


def quadrature_context(chart, mesh, result):
    return EigenfunctionQuadrature(chart, mesh, result.vertex_values)


def linear_eta(*coeffs):
    return make_eta("linear", coeffs, dim=len(coeffs))


def radial_eta(coeff):
    return make_eta("radial_quadratic", (coeff,), dim=2)


def diag_tensor(*entries):
    return make_tensor("diag", entries, dim=len(entries))


def weighted_volume(chart, nodes=64):
    """Independent quadrature of the weighted measure exp(-eta) dM."""
    pts, wts = chart.domain.quadrature(nodes)
    jac = chart.immersion.jacobian(pts)
    g = np.einsum("pai,paj->pij", jac, jac)
    det = np.linalg.det(g) if chart.dim_n > 1 else g[:, 0, 0]
    return float((wts * np.exp(-chart.eta.value(pts)) * np.sqrt(det)).sum())
