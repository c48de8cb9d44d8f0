"""P1 finite element assembly of the weighted bilinear forms.

Discretizes ``a(u, v) = int T(grad u, grad v) dm`` and
``b(u, v) = int u v dm`` with ``dm = exp(-eta) sqrt(det g) dxi`` over a
structured mesh of the chart parameter domain.  In chart indices the
stiffness integrand is ``K^ij d_i phi_a d_j phi_b`` with
``K = g^-1 T g^-1``.  Quadrature is the 3-point edge-midpoint rule on
triangles (exact for quadratics) and 2-point Gauss on segments.  Dirichlet
vertices are eliminated, keeping both matrices symmetric positive definite.

Assembly order is deterministic (cells ascending, fixed local node order),
so repeated runs produce bit-identical matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import MeshTooCoarseError, TensorError
from .geometry import _inv_spd, apply_operator_pointwise, metric, pair_eigenvalues

# reference quadrature
_GAUSS_1D = (np.array([-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)]),
             np.array([0.5, 0.5]))  # weights on the unit segment
# P1 values at triangle edge midpoints m01, m12, m20 (rows: qpoint, cols: node)
_TRI_PHI = np.array([[0.5, 0.5, 0.0],
                     [0.0, 0.5, 0.5],
                     [0.5, 0.0, 0.5]])


@dataclass
class SparseSymMatrix:
    """Symmetric sparse matrix stored as its upper triangle (row <= col)."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_entries(cls, dim, rows, cols, vals):
        """Coalesce duplicate (row, col) entries; canonicalize to row <= col."""
        rows = np.asarray(rows, dtype=int)
        cols = np.asarray(cols, dtype=int)
        vals = np.asarray(vals, dtype=float)
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        order = np.lexsort((hi, lo))
        lo, hi, vals = lo[order], hi[order], vals[order]
        key = lo * dim + hi
        boundaries = np.concatenate([[0], np.nonzero(np.diff(key))[0] + 1])
        summed = np.add.reduceat(vals, boundaries)
        return cls(dim, lo[boundaries], hi[boundaries], summed)

    def to_csr(self):
        """Full symmetric scipy CSR matrix."""
        off = self.rows != self.cols
        rows = np.concatenate([self.rows, self.cols[off]])
        cols = np.concatenate([self.cols, self.rows[off]])
        vals = np.concatenate([self.vals, self.vals[off]])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def to_dense(self):
        return self.to_csr().toarray()

    def dump(self, path):
        """Coordinate text format `i j value` (upper triangle, 17 digits)."""
        with open(path, "w") as handle:
            for i, j, v in zip(self.rows, self.cols, self.vals):
                handle.write(f"{i} {j} {v:.17g}\n")


def _cell_geometry(mesh):
    """Quadrature points, chart-measure weights and P1 gradients per cell."""
    verts = mesh.vertices[mesh.cells]
    if mesh.dim == 1:
        h = verts[:, 1, 0] - verts[:, 0, 0]
        ref, wref = _GAUSS_1D
        mid = 0.5 * (verts[:, 0, 0] + verts[:, 1, 0])
        qpts = (mid[:, None] + 0.5 * h[:, None] * ref[None, :])[:, :, None]
        qw = h[:, None] * wref[None, :]
        grads = np.stack([-1.0 / h, 1.0 / h], axis=1)[:, :, None]
        phi_half = 0.5 * (1.0 - ref)
        phi = np.stack([phi_half, 1.0 - phi_half], axis=-1)  # (Q, nodes)
        phi = np.broadcast_to(phi, (verts.shape[0],) + phi.shape)
        return qpts, qw, grads, phi

    e1 = verts[:, 1] - verts[:, 0]
    e2 = verts[:, 2] - verts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    qpts = np.stack([0.5 * (verts[:, 0] + verts[:, 1]),
                     0.5 * (verts[:, 1] + verts[:, 2]),
                     0.5 * (verts[:, 2] + verts[:, 0])], axis=1)
    qw = (det / 6.0)[:, None] * np.ones((1, 3))
    # rows of inv([e1 e2]): gradients of the barycentric coordinates
    g1 = np.stack([e2[:, 1], -e2[:, 0]], axis=1) / det[:, None]
    g2 = np.stack([-e1[:, 1], e1[:, 0]], axis=1) / det[:, None]
    grads = np.stack([-g1 - g2, g1, g2], axis=1)
    phi = np.broadcast_to(_TRI_PHI, (verts.shape[0], 3, 3))
    return qpts, qw, grads, phi


def _chart_fields(chart, qpts_flat):
    """Metric, conductivity K = g^-1 T g^-1 and dm weight at flat points."""
    g = metric(chart, qpts_flat, check_domain=False)
    ginv = _inv_spd(g)
    t = chart.tensor.value(qpts_flat, g)
    k = np.einsum("pia,pab,pbj->pij", ginv, t, ginv)
    det = np.linalg.det(g) if chart.dim_n > 1 else g[:, 0, 0]
    w = np.exp(-chart.eta.value(qpts_flat)) * np.sqrt(det)
    return g, ginv, t, k, w


def _check_k_spd(t, g, ncells, nq):
    eig = pair_eigenvalues(t, g)
    scale = np.maximum(np.abs(eig).max(axis=1), 1.0)
    bad = eig.min(axis=1) <= 1e-12 * scale
    if np.any(bad):
        cell = int(np.nonzero(bad)[0][0] // nq)
        raise TensorError(
            f"coefficient tensor not positive definite at a quadrature point of cell {cell}")


def assemble(chart, mesh, dirichlet=True):
    """Assemble the stiffness/mass pair of the weighted eigenproblem.

    Parameters
    ----------
    chart : Chart
    mesh : Mesh over the chart's parameter domain
    dirichlet : bool
        Eliminate boundary vertices (default).  With ``dirichlet=False``
        all vertices are kept, which is useful for measure consistency
        checks; the returned ``dof_map`` is then the identity.

    Returns
    -------
    (A, B, dof_map) : SparseSymMatrix pair and an int array mapping vertex
    index to reduced index (-1 on eliminated boundary vertices).
    """
    qpts, qw, grads, phi = _cell_geometry(mesh)
    ncells, nq = qw.shape
    flat = qpts.reshape(-1, mesh.dim)
    g, _, t, k, w = _chart_fields(chart, flat)
    _check_k_spd(t, g, ncells, nq)
    kq = k.reshape(ncells, nq, mesh.dim, mesh.dim)
    wq = (w.reshape(ncells, nq)) * qw

    # stiffness: grads are constant per cell, so sum the weighted K first
    k_eff = np.einsum("cq,cqij->cij", wq, kq)
    a_elem = np.einsum("cai,cij,cbj->cab", grads, k_eff, grads)
    b_elem = np.einsum("cq,cqa,cqb->cab", wq, phi, phi)

    nodes = mesh.cells.shape[1]
    rows, cols, avals, bvals = [], [], [], []
    for a in range(nodes):
        for b in range(a, nodes):
            rows.append(mesh.cells[:, a])
            cols.append(mesh.cells[:, b])
            avals.append(a_elem[:, a, b])
            bvals.append(b_elem[:, a, b])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    avals = np.concatenate(avals)
    bvals = np.concatenate(bvals)

    nverts = mesh.num_vertices
    if dirichlet:
        interior = ~mesh.boundary
        dof_map = -np.ones(nverts, dtype=int)
        dof_map[interior] = np.arange(int(interior.sum()))
        if not np.any(interior):
            raise MeshTooCoarseError("no interior degrees of freedom after elimination")
        keep = (dof_map[rows] >= 0) & (dof_map[cols] >= 0)
        rows_r = dof_map[rows[keep]]
        cols_r = dof_map[cols[keep]]
        a_mat = SparseSymMatrix.from_entries(int(interior.sum()), rows_r, cols_r, avals[keep])
        b_mat = SparseSymMatrix.from_entries(int(interior.sum()), rows_r, cols_r, bvals[keep])
    else:
        dof_map = np.arange(nverts)
        a_mat = SparseSymMatrix.from_entries(nverts, rows, cols, avals)
        b_mat = SparseSymMatrix.from_entries(nverts, rows, cols, bvals)
    return a_mat, b_mat, dof_map


def apply_Lh(chart, mesh, h):
    """Pointwise values of the divergence-form operator applied to ``h``.

    Evaluates ``div_eta(T(grad h))`` at every mesh vertex from the chart
    coordinate formula; the outer derivative uses a fixed central-difference
    step (see :data:`spectralab.geometry.FLUX_STEP_REL`).
    """
    return apply_operator_pointwise(chart, h, mesh.vertices)


class EigenfunctionQuadrature:
    """Element-quadrature context for integrals of discrete eigenfunctions.

    Wraps a chart, a mesh and eigenfunctions given as vertex-value arrays,
    exposing P1-interpolated values, per-cell gradients and dm-weighted
    integration.  Shared by the test-function and tensor-theorem checks.
    """

    def __init__(self, chart, mesh, vertex_values):
        self.chart = chart
        self.mesh = mesh
        self.vertex_values = np.atleast_2d(np.asarray(vertex_values, dtype=float))
        qpts, qw, grads, phi = _cell_geometry(mesh)
        self.ncells, self.nq = qw.shape
        self.qpts_flat = qpts.reshape(-1, mesh.dim)
        g, ginv, t, k, w = _chart_fields(chart, self.qpts_flat)
        self.g = g
        self.ginv = ginv
        self.tensor = t
        self.k = k
        self.dm_weights = (w.reshape(self.ncells, self.nq) * qw).ravel()
        self.grads = grads
        self.phi = phi
        self.jacobian = chart.immersion.jacobian(self.qpts_flat)

    def integrate(self, values_flat):
        """Integral of a quadrature-point sampled function against dm."""
        return float((self.dm_weights * values_flat).sum())

    def interpolate(self, vertex_field):
        """P1 interpolation of a vertex field to quadrature points, flat."""
        nodal = np.asarray(vertex_field)[self.mesh.cells]
        return np.einsum("cqa,ca->cq", self.phi, nodal).ravel()

    def u_at_quadrature(self, i):
        return self.interpolate(self.vertex_values[i])

    def grad_u(self, i):
        """Piecewise-constant chart gradient of eigenfunction i, (C, n)."""
        nodal = self.vertex_values[i][self.mesh.cells]
        return np.einsum("cai,ca->ci", self.grads, nodal)

    def grad_u_flat(self, i):
        return np.repeat(self.grad_u(i), self.nq, axis=0)

    def tensor_bilinear(self, grad1_flat, grad2_flat):
        """T(X, Y) = K^ij X_i Y_j for chart-coordinate covector fields."""
        return np.einsum("pij,pi,pj->p", self.k, grad1_flat, grad2_flat)
