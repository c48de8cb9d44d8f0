"""Charts, induced metrics, extrinsic curvature and global geometric constants.

A :class:`Chart` bundles a parameterized isometric immersion of an ``n``
dimensional patch into ``R^m`` (``n <= m <= 4``) together with a scalar
weight field and a symmetric positive definite coefficient tensor.  All
evaluators are vectorized: points are passed as ``(N, n)`` arrays and fields
come back with a leading ``N`` axis.

The module also computes the global constants (suprema of the weight
gradient, mean curvature, shape operators, tensor norms and the unweighted
volume) that enter the eigenvalue bounds in :mod:`spectralab.bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegeneracyError,
    DomainError,
    EvaluationError,
    ParameterError,
    TensorError,
)
from .expressions import compile_expression

DEGENERACY_TOL = 1e-12

# Finite-difference steps used by compute_constants / apply_operator_pointwise.
# Both are independent of the sampling resolution so that nested sample grids
# re-evaluate shared points to identical floats (suprema are then exactly
# monotone under refinement).
CHRISTOFFEL_STEP_REL = 1.0 / 1024.0
FLUX_STEP_REL = 4.0e-6


# ---------------------------------------------------------------------------
# parameter domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned box in chart coordinates; ``bounds[i] = (a_i, b_i)``."""

    bounds: tuple

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        for a, b in bounds:
            if not b > a:
                raise ParameterError(f"empty rectangle extent ({a}, {b})")

    @property
    def dim(self):
        return len(self.bounds)

    @property
    def extents(self):
        return np.array([b - a for a, b in self.bounds])

    @property
    def measure(self):
        return float(np.prod(self.extents))

    def contains(self, points, tol=1e-9):
        points = np.atleast_2d(points)
        ok = np.ones(points.shape[0], dtype=bool)
        for axis, (a, b) in enumerate(self.bounds):
            ok &= (points[:, axis] >= a - tol) & (points[:, axis] <= b + tol)
        return ok

    def sample_grid(self, resolution):
        """Uniform grid with ``resolution + 1`` points per axis, boundary included."""
        axes = [np.linspace(a, b, resolution + 1) for a, b in self.bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def quadrature(self, nodes_per_axis):
        rules = [np.polynomial.legendre.leggauss(nodes_per_axis) for _ in self.bounds]
        pts_1d, wts_1d = [], []
        for (x, w), (a, b) in zip(rules, self.bounds):
            pts_1d.append(0.5 * (b - a) * x + 0.5 * (a + b))
            wts_1d.append(0.5 * (b - a) * w)
        if self.dim == 1:
            return pts_1d[0][:, None], wts_1d[0]
        gx, gy = np.meshgrid(pts_1d[0], pts_1d[1], indexing="ij")
        wx, wy = np.meshgrid(wts_1d[0], wts_1d[1], indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
        return pts, (wx * wy).ravel()


@dataclass(frozen=True)
class Disk:
    """Disk-in-chart region with the given center and radius (2d only)."""

    center: tuple = (0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ParameterError("disk radius must be positive")

    @property
    def dim(self):
        return 2

    @property
    def extents(self):
        return np.array([2.0 * self.radius, 2.0 * self.radius])

    @property
    def measure(self):
        return math.pi * self.radius ** 2

    def contains(self, points, tol=1e-9):
        points = np.atleast_2d(points)
        d = np.hypot(points[:, 0] - self.center[0], points[:, 1] - self.center[1])
        return d <= self.radius + tol

    def sample_grid(self, resolution):
        """Center plus ``resolution`` concentric rings of ``6*resolution`` angles."""
        n_theta = 6 * resolution
        theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        radii = self.radius * np.arange(1, resolution + 1) / resolution
        rr, tt = np.meshgrid(radii, theta, indexing="ij")
        pts = np.stack(
            [self.center[0] + rr.ravel() * np.cos(tt.ravel()),
             self.center[1] + rr.ravel() * np.sin(tt.ravel())], axis=-1)
        return np.vstack([np.array([self.center]), pts])

    def quadrature(self, nodes_per_axis):
        # Gauss-Legendre in the radius, uniform (spectrally accurate,
        # periodic) rule in the angle.
        x, w = np.polynomial.legendre.leggauss(nodes_per_axis)
        r = 0.5 * self.radius * (x + 1.0)
        wr = 0.5 * self.radius * w
        n_theta = 6 * nodes_per_axis
        theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        w_theta = 2.0 * math.pi / n_theta
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        pts = np.stack(
            [self.center[0] + rr.ravel() * np.cos(tt.ravel()),
             self.center[1] + rr.ravel() * np.sin(tt.ravel())], axis=-1)
        wts = (wr[:, None] * w_theta * rr).ravel()
        return pts, wts


# ---------------------------------------------------------------------------
# immersions
# ---------------------------------------------------------------------------

class FlatImmersion:
    """Identity inclusion of R^n into R^n."""

    def __init__(self, dim):
        self.dim_n = dim
        self.dim_m = dim

    def position(self, pts):
        return np.array(np.atleast_2d(pts), dtype=float)

    def jacobian(self, pts):
        pts = np.atleast_2d(pts)
        return np.broadcast_to(np.eye(self.dim_n), (pts.shape[0], self.dim_n, self.dim_n)).copy()

    def hessian(self, pts):
        pts = np.atleast_2d(pts)
        return np.zeros((pts.shape[0], self.dim_m, self.dim_n, self.dim_n))


class StereographicSphere:
    """Sphere of radius ``r`` in R^3, chart by stereographic projection.

    The chart origin maps to the pole opposite the projection point, so the
    unit disk ``|xi| <= 1`` covers a closed hemisphere with the equator as
    its boundary.  The induced metric is ``4 r^2 / (1 + |xi|^2)^2`` times the
    identity.
    """

    def __init__(self, r=1.0):
        if r <= 0:
            raise ParameterError("sphere radius must be positive")
        self.r = float(r)
        self.dim_n = 2
        self.dim_m = 3

    def position(self, pts):
        pts = np.atleast_2d(pts)
        s = (pts ** 2).sum(axis=1)
        d = 1.0 + s
        out = np.empty((pts.shape[0], 3))
        out[:, 0] = 2.0 * self.r * pts[:, 0] / d
        out[:, 1] = 2.0 * self.r * pts[:, 1] / d
        out[:, 2] = self.r * (s - 1.0) / d
        return out

    def jacobian(self, pts):
        pts = np.atleast_2d(pts)
        n = pts.shape[0]
        s = (pts ** 2).sum(axis=1)
        d = 1.0 + s
        jac = np.empty((n, 3, 2))
        for a in range(2):
            for i in range(2):
                jac[:, a, i] = 2.0 * self.r * ((a == i) * d - 2.0 * pts[:, a] * pts[:, i]) / d ** 2
        for i in range(2):
            jac[:, 2, i] = 4.0 * self.r * pts[:, i] / d ** 2
        return jac

    def hessian(self, pts):
        pts = np.atleast_2d(pts)
        n = pts.shape[0]
        s = (pts ** 2).sum(axis=1)
        d = 1.0 + s
        hess = np.empty((n, 3, 2, 2))
        for a in range(2):
            for i in range(2):
                for j in range(2):
                    hess[:, a, i, j] = (
                        -4.0 * self.r * ((a == i) * pts[:, j] + (a == j) * pts[:, i]
                                         + (i == j) * pts[:, a]) / d ** 2
                        + 16.0 * self.r * pts[:, a] * pts[:, i] * pts[:, j] / d ** 3)
        for i in range(2):
            for j in range(2):
                hess[:, 2, i, j] = (4.0 * self.r * (i == j) / d ** 2
                                    - 16.0 * self.r * pts[:, i] * pts[:, j] / d ** 3)
        return hess


class Cylinder:
    """Cylinder of radius ``r``; arclength chart, so the metric is flat."""

    def __init__(self, r=1.0):
        if r <= 0:
            raise ParameterError("cylinder radius must be positive")
        self.r = float(r)
        self.dim_n = 2
        self.dim_m = 3

    def position(self, pts):
        pts = np.atleast_2d(pts)
        phi = pts[:, 0] / self.r
        return np.stack([self.r * np.cos(phi), self.r * np.sin(phi), pts[:, 1]], axis=-1)

    def jacobian(self, pts):
        pts = np.atleast_2d(pts)
        phi = pts[:, 0] / self.r
        jac = np.zeros((pts.shape[0], 3, 2))
        jac[:, 0, 0] = -np.sin(phi)
        jac[:, 1, 0] = np.cos(phi)
        jac[:, 2, 1] = 1.0
        return jac

    def hessian(self, pts):
        pts = np.atleast_2d(pts)
        phi = pts[:, 0] / self.r
        hess = np.zeros((pts.shape[0], 3, 2, 2))
        hess[:, 0, 0, 0] = -np.cos(phi) / self.r
        hess[:, 1, 0, 0] = -np.sin(phi) / self.r
        return hess


class AssociateFamily:
    """One-parameter family of isometric minimal surfaces in R^3.

    ``theta = 0`` is the catenoid, ``theta = pi/2`` the helicoid; every
    member carries the same induced metric ``cosh(v)^2 I``.
    """

    def __init__(self, theta=0.0):
        self.theta = float(theta)
        self.dim_n = 2
        self.dim_m = 3

    def _trig(self, pts):
        pts = np.atleast_2d(pts)
        u, v = pts[:, 0], pts[:, 1]
        return np.cos(u), np.sin(u), np.cosh(v), np.sinh(v)

    def position(self, pts):
        cu, su, cv, sv = self._trig(pts)
        pts = np.atleast_2d(pts)
        c, s = math.cos(self.theta), math.sin(self.theta)
        cat = np.stack([cv * cu, cv * su, pts[:, 1]], axis=-1)
        hel = np.stack([sv * su, -sv * cu, pts[:, 0]], axis=-1)
        return c * cat + s * hel

    def jacobian(self, pts):
        cu, su, cv, sv = self._trig(pts)
        n = np.atleast_2d(pts).shape[0]
        c, s = math.cos(self.theta), math.sin(self.theta)
        jac = np.empty((n, 3, 2))
        jac[:, 0, 0] = c * (-cv * su) + s * (sv * cu)
        jac[:, 1, 0] = c * (cv * cu) + s * (sv * su)
        jac[:, 2, 0] = s
        jac[:, 0, 1] = c * (sv * cu) + s * (cv * su)
        jac[:, 1, 1] = c * (sv * su) + s * (-cv * cu)
        jac[:, 2, 1] = c
        return jac

    def hessian(self, pts):
        cu, su, cv, sv = self._trig(pts)
        n = np.atleast_2d(pts).shape[0]
        c, s = math.cos(self.theta), math.sin(self.theta)
        hess = np.zeros((n, 3, 2, 2))
        # d^2/du^2
        hess[:, 0, 0, 0] = c * (-cv * cu) + s * (-sv * su)
        hess[:, 1, 0, 0] = c * (-cv * su) + s * (sv * cu)
        # d^2/dudv (symmetric)
        hess[:, 0, 0, 1] = hess[:, 0, 1, 0] = c * (-sv * su) + s * (cv * cu)
        hess[:, 1, 0, 1] = hess[:, 1, 1, 0] = c * (sv * cu) + s * (cv * su)
        # d^2/dv^2
        hess[:, 0, 1, 1] = c * (cv * cu) + s * (sv * su)
        hess[:, 1, 1, 1] = c * (cv * su) + s * (-sv * cu)
        return hess


class CallableImmersion:
    """Immersion defined by user callables (position, jacobian, hessian)."""

    def __init__(self, dim_n, dim_m, position, jacobian, hessian):
        self.dim_n = dim_n
        self.dim_m = dim_m
        self._pos = position
        self._jac = jacobian
        self._hess = hessian

    def position(self, pts):
        return np.asarray(self._pos(np.atleast_2d(pts)), dtype=float)

    def jacobian(self, pts):
        return np.asarray(self._jac(np.atleast_2d(pts)), dtype=float)

    def hessian(self, pts):
        return np.asarray(self._hess(np.atleast_2d(pts)), dtype=float)


# ---------------------------------------------------------------------------
# weight fields (eta) and coefficient tensors (T)
# ---------------------------------------------------------------------------

class ZeroWeight:
    def value(self, pts):
        return np.zeros(np.atleast_2d(pts).shape[0])

    def gradient(self, pts):
        pts = np.atleast_2d(pts)
        return np.zeros_like(pts)


class LinearWeight:
    """eta(xi) = coeffs . xi"""

    def __init__(self, coeffs):
        self.coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))

    def value(self, pts):
        return np.atleast_2d(pts) @ self.coeffs

    def gradient(self, pts):
        pts = np.atleast_2d(pts)
        return np.broadcast_to(self.coeffs, pts.shape).copy()


class RadialQuadraticWeight:
    """eta(xi) = coeff * |xi - center|^2"""

    def __init__(self, coeff, center=None):
        self.coeff = float(coeff)
        self.center = None if center is None else np.asarray(center, dtype=float)

    def value(self, pts):
        pts = np.atleast_2d(pts)
        c = np.zeros(pts.shape[1]) if self.center is None else self.center
        return self.coeff * ((pts - c) ** 2).sum(axis=1)

    def gradient(self, pts):
        pts = np.atleast_2d(pts)
        c = np.zeros(pts.shape[1]) if self.center is None else self.center
        return 2.0 * self.coeff * (pts - c)


class ExpressionWeight:
    """User expression string; gradient by central differences."""

    def __init__(self, text, dim, step=1e-6):
        self.fn = compile_expression(text, dim)
        self.dim = dim
        self.step = step

    def value(self, pts):
        return self.fn(pts)

    def gradient(self, pts):
        pts = np.atleast_2d(pts)
        grad = np.empty_like(pts)
        for axis in range(self.dim):
            h = self.step * (1.0 + np.abs(pts[:, axis]))
            shift = np.zeros_like(pts)
            shift[:, axis] = h
            grad[:, axis] = (self.fn(pts + shift) - self.fn(pts - shift)) / (2.0 * h)
        return grad


class AmbientCoordinate:
    """Scalar field xi -> x_l(xi): one ambient coordinate of the immersion."""

    def __init__(self, chart, axis):
        if not (0 <= axis < chart.dim_m):
            raise ParameterError(f"ambient axis {axis} out of range")
        self.chart = chart
        self.axis = axis

    def value(self, pts):
        return self.chart.immersion.position(pts)[:, self.axis]

    def gradient(self, pts):
        return self.chart.immersion.jacobian(pts)[:, self.axis, :]


class MetricTensor:
    """T_ab = g_ab: the coefficient tensor equals the induced metric."""

    is_metric = True

    def value(self, pts, metric):
        return metric


class DiagonalTensor:
    """Constant diagonal tensor in chart coordinates."""

    is_metric = False

    def __init__(self, diag):
        self.diag = np.atleast_1d(np.asarray(diag, dtype=float))

    def value(self, pts, metric):
        n = np.atleast_2d(pts).shape[0]
        return np.broadcast_to(np.diag(self.diag), (n, len(self.diag), len(self.diag))).copy()


class ExpressionTensor:
    """Symmetric tensor with expression-string entries (upper triangle)."""

    is_metric = False

    def __init__(self, entries, dim):
        # entries: sequence of strings, row-major upper triangle
        expected = dim * (dim + 1) // 2
        if len(entries) != expected:
            raise ParameterError(
                f"need {expected} upper-triangle entries for a {dim}d tensor")
        self.dim = dim
        self.fns = [compile_expression(text, dim) for text in entries]

    def value(self, pts, metric):
        pts = np.atleast_2d(pts)
        out = np.empty((pts.shape[0], self.dim, self.dim))
        idx = 0
        for i in range(self.dim):
            for j in range(i, self.dim):
                out[:, i, j] = out[:, j, i] = self.fns[idx](pts)
                idx += 1
        return out


# ---------------------------------------------------------------------------
# chart
# ---------------------------------------------------------------------------

@dataclass
class Chart:
    """A parameterized immersion with weight and coefficient tensor.

    Attributes
    ----------
    dim_n, dim_m : intrinsic and ambient dimensions
    domain : Rectangle or Disk in chart coordinates
    immersion : object with position/jacobian/hessian evaluators
    eta : scalar weight field with value/gradient evaluators
    tensor : symmetric coefficient tensor field
    label : human readable identifier
    """

    dim_n: int
    dim_m: int
    domain: object
    immersion: object
    eta: object
    tensor: object
    label: str = ""

    def __post_init__(self):
        if not (1 <= self.dim_n <= 2):
            raise ParameterError("intrinsic dimension must be 1 or 2")
        if not (self.dim_n <= self.dim_m <= 4):
            raise ParameterError("ambient dimension must satisfy n <= m <= 4")
        if self.domain.dim != self.dim_n:
            raise ParameterError("domain dimension does not match the chart")


def metric(chart, points, check_domain=True):
    """Induced metric g_ij = <d_i x, d_j x> at each point, shape ``(N, n, n)``.

    Raises :class:`DomainError` for points outside the parameter domain and
    :class:`DegeneracyError` where ``det g`` falls below tolerance.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if check_domain and not np.all(chart.domain.contains(points)):
        bad = points[~chart.domain.contains(points)][0]
        raise DomainError(f"point {tuple(bad)} outside the parameter domain")
    jac = chart.immersion.jacobian(points)
    g = np.einsum("pai,paj->pij", jac, jac)
    scale = np.einsum("pii->p", g) / chart.dim_n
    if np.any(np.linalg.det(g) <= DEGENERACY_TOL * scale ** chart.dim_n):
        raise DegeneracyError("degenerate immersion: det g below tolerance")
    return g


def _inv_spd(g):
    """Inverse of batched 1x1 / 2x2 SPD matrices (closed form)."""
    n = g.shape[-1]
    if n == 1:
        return 1.0 / g
    det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
    inv = np.empty_like(g)
    inv[:, 0, 0] = g[:, 1, 1] / det
    inv[:, 1, 1] = g[:, 0, 0] / det
    inv[:, 0, 1] = inv[:, 1, 0] = -g[:, 0, 1] / det
    return inv


def pair_eigenvalues(t, g):
    """Eigenvalues of the pencil (T, g) for batched 1x1 / 2x2 symmetric pairs."""
    n = t.shape[-1]
    if n == 1:
        lam = t[:, 0, 0] / g[:, 0, 0]
        return np.stack([lam], axis=-1)
    det_g = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] ** 2
    det_t = t[:, 0, 0] * t[:, 1, 1] - t[:, 0, 1] ** 2
    # det(T - mu g) = det_g mu^2 - tr_adj mu + det_t
    tr_adj = (t[:, 0, 0] * g[:, 1, 1] + t[:, 1, 1] * g[:, 0, 0]
              - 2.0 * t[:, 0, 1] * g[:, 0, 1])
    disc = np.maximum(tr_adj ** 2 - 4.0 * det_g * det_t, 0.0)
    root = np.sqrt(disc)
    lam1 = (tr_adj - root) / (2.0 * det_g)
    lam2 = (tr_adj + root) / (2.0 * det_g)
    return np.stack([lam1, lam2], axis=-1)


def check_tensor_spd(chart, points, t=None, g=None):
    """Raise :class:`TensorError` if T is not SPD relative to g at a sample."""
    points = np.atleast_2d(points)
    if g is None:
        g = metric(chart, points, check_domain=False)
    if t is None:
        t = chart.tensor.value(points, g)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(g))):
        raise EvaluationError("non-finite field values in tensor/metric")
    eig = pair_eigenvalues(t, g)
    scale = np.maximum(np.abs(eig).max(axis=1), 1.0)
    bad = eig.min(axis=1) <= DEGENERACY_TOL * scale
    if np.any(bad):
        where = points[bad][0]
        raise TensorError(
            f"coefficient tensor not positive definite at sample {tuple(where)}")


def second_fundamental_form(chart, points):
    """Normal frame, second-fundamental-form components and mean curvature.

    Returns ``(frames, alpha, mean_curvature)`` with shapes
    ``(N, m-n, m)``, ``(N, m-n, n, n)`` and ``(N, m)``.  The frame is built
    by Gram-Schmidt over the ambient basis in fixed order, so it is
    deterministic; for ``m == n`` all outputs are empty/zero.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    npts = points.shape[0]
    n, m = chart.dim_n, chart.dim_m
    codim = m - n
    if codim == 0:
        return (np.zeros((npts, 0, m)), np.zeros((npts, 0, n, n)), np.zeros((npts, m)))

    jac = chart.immersion.jacobian(points)
    q, r = np.linalg.qr(jac)
    diag = np.abs(np.einsum("pii->pi", r))
    if np.any(diag.min(axis=1) <= DEGENERACY_TOL * (1.0 + diag.max(axis=1))):
        raise DegeneracyError("rank-deficient tangent space")

    frames = np.zeros((npts, codim, m))
    count = np.zeros(npts, dtype=int)
    for a in range(m):
        w = np.zeros((npts, m))
        w[:, a] = 1.0
        w -= np.einsum("pbk,pk->pb", q, q[:, a, :])
        # subtract projections on already accepted normals
        for slot in range(codim):
            coef = np.einsum("pk,pk->p", frames[:, slot, :], w)
            w -= coef[:, None] * frames[:, slot, :]
        norm = np.linalg.norm(w, axis=1)
        accept = (norm > 1e-10) & (count < codim)
        if np.any(accept):
            idx = np.nonzero(accept)[0]
            frames[idx, count[idx], :] = w[idx] / norm[idx, None]
            count[idx] += 1
    if np.any(count < codim):
        raise DegeneracyError("could not complete an orthonormal normal frame")

    hess = chart.immersion.hessian(points)
    alpha = np.einsum("pka,paij->pkij", frames, hess)
    g = np.einsum("pai,paj->pij", jac, jac)
    ginv = _inv_spd(g)
    trace = np.einsum("pij,pkij->pk", ginv, alpha)
    mean_curv = np.einsum("pk,pka->pa", trace, frames) / n
    return frames, alpha, mean_curv


def shape_operator_norms(chart, points):
    """Hilbert-Schmidt norm of the shape operator per normal direction, (N, m-n)."""
    points = np.atleast_2d(points)
    _, alpha, _ = second_fundamental_form(chart, points)
    g = metric(chart, points, check_domain=False)
    ginv = _inv_spd(g)
    sq = np.einsum("pia,pjb,pkij,pkab->pk", ginv, ginv, alpha, alpha)
    return np.sqrt(np.maximum(sq, 0.0))


def second_form_hs_norm(chart, points):
    """Hilbert-Schmidt norm of the full second fundamental form, (N,)."""
    norms = shape_operator_norms(chart, points)
    if norms.shape[1] == 0:
        return np.zeros(norms.shape[0])
    return np.sqrt((norms ** 2).sum(axis=1))


def apply_operator_pointwise(chart, field, points, identity_tensor=False,
                             step_rel=FLUX_STEP_REL):
    """Divergence-form operator applied to a scalar field, pointwise.

    Computes ``(1/sqrt(det g)) d_i(sqrt(det g) K^ij d_j h) - K^ij d_i eta d_j h``
    with ``K = g^-1 T g^-1``; the outer derivative is a central difference
    with step ``step_rel * max(domain extent)``.  With ``identity_tensor``
    the coefficient tensor is replaced by the metric (drifting-Laplacian
    case).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = chart.dim_n
    step = step_rel * float(chart.domain.extents.max())

    def flux(pts):
        g = metric(chart, pts, check_domain=False)
        ginv = _inv_spd(g)
        sqrt_g = np.sqrt(np.linalg.det(g)) if n > 1 else np.sqrt(g[:, 0, 0])
        if identity_tensor:
            k = ginv
        else:
            t = chart.tensor.value(pts, g)
            k = np.einsum("pia,pab,pbj->pij", ginv, t, ginv)
        dh = field.gradient(pts)
        return sqrt_g[:, None] * np.einsum("pij,pj->pi", k, dh)

    div = np.zeros(points.shape[0])
    for axis in range(n):
        shift = np.zeros_like(points)
        shift[:, axis] = step
        div += (flux(points + shift)[:, axis] - flux(points - shift)[:, axis]) / (2.0 * step)

    g = metric(chart, points, check_domain=False)
    ginv = _inv_spd(g)
    sqrt_g = np.sqrt(np.linalg.det(g)) if n > 1 else np.sqrt(g[:, 0, 0])
    if identity_tensor:
        k = ginv
    else:
        t = chart.tensor.value(points, g)
        k = np.einsum("pia,pab,pbj->pij", ginv, t, ginv)
    deta = chart.eta.gradient(points)
    dh = field.gradient(points)
    drift = np.einsum("pij,pi,pj->p", k, deta, dh)
    values = div / sqrt_g - drift
    if not np.all(np.isfinite(values)):
        raise EvaluationError("operator application produced non-finite values")
    return values


# ---------------------------------------------------------------------------
# geometric constants
# ---------------------------------------------------------------------------

def omega_n(n):
    """Volume of the unit ball in R^n (2 for n=1, pi for n=2)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass
class GeometricConstants:
    """Suprema/infima entering the eigenvalue bounds, sampled over a grid."""

    eta0: float
    eta_bar0: float
    h0: float
    a0: float
    t_star: float
    t0: float
    tr_t_inf: float
    tr_t_sup: float
    vol_omega: float
    dim_n: int
    dim_m: int
    sample_resolution: int
    metadata: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "eta0": self.eta0,
            "eta_bar0": self.eta_bar0,
            "h0": self.h0,
            "a0": self.a0,
            "t_star": self.t_star,
            "t0": self.t0,
            "tr_t_inf": self.tr_t_inf,
            "tr_t_sup": self.tr_t_sup,
            "vol_omega": self.vol_omega,
            "dim_n": self.dim_n,
            "dim_m": self.dim_m,
            "sample_resolution": self.sample_resolution,
            "metadata": dict(self.metadata),
        }


def _christoffel(chart, points, step):
    """Christoffel symbols Gamma^k_ij by central differences of the metric."""
    points = np.atleast_2d(points)
    n = chart.dim_n
    dg = np.empty((points.shape[0], n, n, n))  # dg[:, i, j, k] = d_i g_jk
    for axis in range(n):
        shift = np.zeros_like(points)
        shift[:, axis] = step
        gp = metric(chart, points + shift, check_domain=False)
        gm = metric(chart, points - shift, check_domain=False)
        dg[:, axis] = (gp - gm) / (2.0 * step)
    g = metric(chart, points, check_domain=False)
    ginv = _inv_spd(g)
    gamma = 0.5 * (np.einsum("pkl,pijl->pkij", ginv, dg)
                   + np.einsum("pkl,pjil->pkij", ginv, dg)
                   - np.einsum("pkl,plij->pkij", ginv, dg))
    return gamma, g, ginv


def _trace_grad_tensor(chart, points, step):
    """tr(nabla T)^b = g^ij (nabla_i T)_jk g^kb and its metric norm."""
    points = np.atleast_2d(points)
    n = chart.dim_n
    gamma, g, ginv = _christoffel(chart, points, step)
    dt = np.empty((points.shape[0], n, n, n))  # dt[:, i, j, k] = d_i T_jk
    for axis in range(n):
        shift = np.zeros_like(points)
        shift[:, axis] = step
        gp = metric(chart, points + shift, check_domain=False)
        gm = metric(chart, points - shift, check_domain=False)
        tp = chart.tensor.value(points + shift, gp)
        tm = chart.tensor.value(points - shift, gm)
        dt[:, axis] = (tp - tm) / (2.0 * step)
    t = chart.tensor.value(points, g)
    # nabla_t[:, i, j, k] = (nabla_i T)_{jk}
    nabla_t = (dt
               - np.einsum("plij,plk->pijk", gamma, t)
               - np.einsum("plik,pjl->pijk", gamma, t))
    trace_vec = np.einsum("pij,pijk,pkb->pb", ginv, nabla_t, ginv)
    norm = np.sqrt(np.maximum(np.einsum("pab,pa,pb->p", g, trace_vec, trace_vec), 0.0))
    return trace_vec, norm


def compute_constants(chart, resolution):
    """Evaluate all geometric constants on a sample grid of the given resolution.

    Suprema and infima are taken over the grid returned by the domain's
    ``sample_grid`` (boundary included); the unweighted volume is computed
    by Gauss quadrature of ``sqrt(det g)``.

    Parameters
    ----------
    chart : Chart
    resolution : int
        Sample points per axis; must be at least 8.

    Returns
    -------
    GeometricConstants
    """
    if resolution < 8:
        raise ParameterError("constants resolution must be at least 8 points per axis")
    pts = chart.domain.sample_grid(resolution)
    extent = float(chart.domain.extents.max())
    christoffel_step = CHRISTOFFEL_STEP_REL * extent

    g = metric(chart, pts, check_domain=False)
    ginv = _inv_spd(g)
    t = chart.tensor.value(pts, g)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(t))):
        raise EvaluationError("non-finite metric or tensor values on the sample grid")
    check_tensor_spd(chart, pts, t=t, g=g)

    deta = chart.eta.gradient(pts)
    eta0 = float(np.sqrt(np.maximum(
        np.einsum("pij,pi,pj->p", ginv, deta, deta), 0.0)).max())

    # drifting Laplacian of eta (coefficient tensor = metric)
    eta_bar0 = float(apply_operator_pointwise(
        chart, chart.eta, pts, identity_tensor=True).max())

    if chart.dim_m > chart.dim_n:
        _, alpha, mean_curv = second_fundamental_form(chart, pts)
        h0 = float(np.linalg.norm(mean_curv, axis=1).max())
        a0 = float(shape_operator_norms(chart, pts).max())
    else:
        h0 = 0.0
        a0 = 0.0

    t_star = float(np.sqrt(np.maximum(
        np.einsum("pij,pji->p", np.einsum("pia,pab->pib", ginv, t),
                  np.einsum("pjb,pba->pja", ginv, t)), 0.0)).max())
    tr_t = np.einsum("pij,pji->p", ginv, t)
    if getattr(chart.tensor, "is_metric", False):
        # metric compatibility: nabla g = 0 identically
        t0 = 0.0
    else:
        _, t0_norms = _trace_grad_tensor(chart, pts, christoffel_step)
        t0 = float(t0_norms.max())

    qnodes = max(resolution, 16)
    qpts, qwts = chart.domain.quadrature(qnodes)
    gq = metric(chart, qpts, check_domain=False)
    sqrt_g = np.sqrt(np.linalg.det(gq)) if chart.dim_n > 1 else np.sqrt(gq[:, 0, 0])
    vol = float((qwts * sqrt_g).sum())

    return GeometricConstants(
        eta0=eta0,
        eta_bar0=eta_bar0,
        h0=h0,
        a0=a0,
        t_star=t_star,
        t0=t0,
        tr_t_inf=float(tr_t.min()),
        tr_t_sup=float(tr_t.max()),
        vol_omega=vol,
        dim_n=chart.dim_n,
        dim_m=chart.dim_m,
        sample_resolution=resolution,
        metadata={
            "christoffel_step": christoffel_step,
            "flux_step": FLUX_STEP_REL * extent,
            "quadrature_nodes": qnodes,
        },
    )


# ---------------------------------------------------------------------------
# catalogs
# ---------------------------------------------------------------------------

def _default_domain(chart_id, params):
    if chart_id == "flat_interval":
        return Rectangle(((0.0, 1.0),))
    if chart_id == "flat_rectangle":
        return Rectangle(((0.0, 1.0), (0.0, 1.0)))
    if chart_id == "stereographic_sphere":
        return Disk((0.0, 0.0), 1.0)
    if chart_id == "cylinder":
        r = params[0] if params else 1.0
        return Rectangle(((0.0, math.pi * r), (0.0, 1.0)))
    if chart_id == "associate_family":
        return Rectangle(((0.0, math.pi), (-0.8, 0.8)))
    raise ParameterError(f"unknown chart id {chart_id!r}")


def chart_ids():
    return sorted(["flat_interval", "flat_rectangle", "stereographic_sphere",
                   "cylinder", "associate_family"])


def eta_ids():
    return sorted(["zero", "linear", "radial_quadratic", "expr"])


def tensor_ids():
    return sorted(["metric", "diag", "expr"])


def make_eta(kind, params=(), expr=None, dim=2):
    if kind == "zero":
        return ZeroWeight()
    if kind == "linear":
        if len(params) != dim:
            raise ParameterError(f"linear weight needs {dim} coefficients")
        return LinearWeight(params)
    if kind == "radial_quadratic":
        if len(params) < 1:
            raise ParameterError("radial_quadratic weight needs a coefficient")
        center = params[1:] if len(params) > 1 else None
        return RadialQuadraticWeight(params[0], center)
    if kind == "expr":
        if not expr:
            raise ParameterError("expression weight needs an expression string")
        return ExpressionWeight(expr, dim)
    raise ParameterError(f"unknown weight kind {kind!r}")


def make_tensor(kind, params=(), expr=None, dim=2):
    if kind == "metric":
        return MetricTensor()
    if kind == "diag":
        if len(params) != dim:
            raise ParameterError(f"diagonal tensor needs {dim} entries")
        return DiagonalTensor(params)
    if kind == "expr":
        if not expr:
            raise ParameterError("expression tensor needs entry strings")
        entries = [part.strip() for part in expr.split(";")]
        return ExpressionTensor(entries, dim)
    raise ParameterError(f"unknown tensor kind {kind!r}")


def make_chart(chart_id, params=(), domain=None, eta=None, tensor=None):
    """Build a chart from the builtin catalog.

    Parameters
    ----------
    chart_id : str
        One of :func:`chart_ids`.
    params : sequence of float
        Chart parameters (sphere/cylinder radius, family angle).
    domain : Rectangle or Disk, optional
        Overrides the chart's default parameter domain.
    eta, tensor : optional weight / coefficient-tensor fields
        Default to the zero weight and the metric tensor.
    """
    params = tuple(float(p) for p in params)
    if chart_id == "flat_interval":
        immersion = FlatImmersion(1)
    elif chart_id == "flat_rectangle":
        immersion = FlatImmersion(2)
    elif chart_id == "stereographic_sphere":
        immersion = StereographicSphere(params[0] if params else 1.0)
    elif chart_id == "cylinder":
        immersion = Cylinder(params[0] if params else 1.0)
    elif chart_id == "associate_family":
        immersion = AssociateFamily(params[0] if params else 0.0)
    else:
        raise ParameterError(f"unknown chart id {chart_id!r}")
    domain = domain if domain is not None else _default_domain(chart_id, params)
    eta = eta if eta is not None else ZeroWeight()
    tensor = tensor if tensor is not None else MetricTensor()
    label = chart_id if not params else f"{chart_id}({', '.join(map(str, params))})"
    return Chart(dim_n=immersion.dim_n, dim_m=immersion.dim_m, domain=domain,
                 immersion=immersion, eta=eta, tensor=tensor, label=label)
