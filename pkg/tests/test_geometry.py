import math

import numpy as np
import pytest

from spectralab.errors import DegeneracyError, DomainError, ParameterError, TensorError
from spectralab.expressions import compile_expression
from spectralab.geometry import (
    AmbientCoordinate,
    CallableImmersion,
    Chart,
    Disk,
    ExpressionWeight,
    Rectangle,
    compute_constants,
    make_chart,
    make_eta,
    make_tensor,
    metric,
    omega_n,
    second_form_hs_norm,
    second_fundamental_form,
    shape_operator_norms,
)

RNG = np.random.default_rng(7)


def test_flat_rectangle_metric_is_identity():
    chart = make_chart("flat_rectangle")
    pts = RNG.uniform(0, 1, (20, 2))
    g = metric(chart, pts)
    assert np.allclose(g, np.eye(2), atol=1e-15)


def test_sphere_metric_at_origin_is_conformal():
    chart = make_chart("stereographic_sphere", (1.0,))
    g = metric(chart, [[0.0, 0.0]])
    assert np.allclose(g[0], 4.0 * np.eye(2), atol=1e-14)
    # conformal factor 4/(1+|xi|^2)^2 away from the origin
    g = metric(chart, [[0.3, -0.4]])
    factor = 4.0 / (1.0 + 0.25) ** 2
    assert np.allclose(g[0], factor * np.eye(2), atol=1e-14)


def test_sphere_points_lie_on_sphere():
    chart = make_chart("stereographic_sphere", (2.5,))
    pts = RNG.uniform(-1, 1, (50, 2))
    pos = chart.immersion.position(pts)
    assert np.allclose(np.linalg.norm(pos, axis=1), 2.5, atol=1e-13)


def test_associate_family_metric_theta_independent():
    pts = RNG.uniform([0.1, -0.7], [3.0, 0.7], (40, 2))
    reference = metric(make_chart("associate_family", (0.0,)), pts)
    for theta in (0.4, math.pi / 4, 1.2, math.pi / 2):
        g = metric(make_chart("associate_family", (theta,)), pts)
        assert np.abs(g - reference).max() <= 1e-10
    expected = np.cosh(pts[:, 1]) ** 2
    assert np.abs(reference - expected[:, None, None] * np.eye(2)).max() <= 1e-12


def test_metric_outside_domain_rejected():
    chart = make_chart("flat_rectangle")
    with pytest.raises(DomainError):
        metric(chart, [[1.5, 0.5]])


def test_degenerate_immersion_detected():
    collapse = CallableImmersion(
        2, 3,
        position=lambda p: np.stack([p[:, 0], p[:, 0], 0 * p[:, 0]], axis=-1),
        jacobian=lambda p: np.broadcast_to(
            np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]), (p.shape[0], 3, 2)).copy(),
        hessian=lambda p: np.zeros((p.shape[0], 3, 2, 2)))
    chart = Chart(2, 3, Rectangle(((0, 1), (0, 1))), collapse,
                  make_eta("zero"), make_tensor("metric"))
    with pytest.raises(DegeneracyError):
        metric(chart, [[0.5, 0.5]])


def test_flat_chart_has_no_curvature():
    chart = make_chart("flat_rectangle")
    frames, alpha, mean_curv = second_fundamental_form(chart, [[0.3, 0.3]])
    assert frames.shape == (1, 0, 2)
    assert np.all(alpha == 0) and np.all(mean_curv == 0)


def test_sphere_mean_curvature_is_unit():
    chart = make_chart("stereographic_sphere", (1.0,))
    pts = RNG.uniform(-0.8, 0.8, (10, 2))
    _, _, mean_curv = second_fundamental_form(chart, pts)
    assert np.allclose(np.linalg.norm(mean_curv, axis=1), 1.0, atol=1e-12)
    assert np.allclose(shape_operator_norms(chart, pts), math.sqrt(2), atol=1e-12)


def test_associate_family_members_are_minimal():
    pts = RNG.uniform([0.1, -0.7], [3.0, 0.7], (25, 2))
    for theta in (0.0, math.pi / 4, math.pi / 2):
        chart = make_chart("associate_family", (theta,))
        _, _, mean_curv = second_fundamental_form(chart, pts)
        assert np.linalg.norm(mean_curv, axis=1).max() <= 1e-8


def test_associate_family_alpha_norm_theta_independent():
    pts = RNG.uniform([0.1, -0.7], [3.0, 0.7], (25, 2))
    ref = second_form_hs_norm(make_chart("associate_family", (0.0,)), pts)
    # catenoid principal curvatures are +-1/cosh^2 v
    assert np.allclose(ref, math.sqrt(2) / np.cosh(pts[:, 1]) ** 2, atol=1e-12)
    for theta in (math.pi / 4, math.pi / 2):
        norms = second_form_hs_norm(make_chart("associate_family", (theta,)), pts)
        assert np.abs(norms - ref).max() <= 1e-8


def test_cylinder_curvatures():
    chart = make_chart("cylinder", (0.5,))
    pts = RNG.uniform([0.1, 0.1], [1.4, 0.9], (10, 2))
    _, _, mean_curv = second_fundamental_form(chart, pts)
    assert np.allclose(np.linalg.norm(mean_curv, axis=1), 1.0, atol=1e-12)  # 1/(2r)
    assert np.allclose(shape_operator_norms(chart, pts), 2.0, atol=1e-12)   # 1/r


# ---------------------------------------------------------------------------
# geometric constants
# ---------------------------------------------------------------------------

def test_interval_drift_constants():
    # eta = 2 xi: |eta'| = 2 and L eta = eta'' - (eta')^2 = -4
    chart = make_chart("flat_interval", eta=make_eta("linear", (2.0,), dim=1))
    consts = compute_constants(chart, 16)
    assert consts.eta0 == pytest.approx(2.0, abs=1e-12)
    assert consts.eta_bar0 == pytest.approx(-4.0, abs=1e-10)
    assert consts.h0 == 0.0 and consts.a0 == 0.0
    assert consts.vol_omega == pytest.approx(1.0, abs=1e-12)


def test_flat_square_constants():
    consts = compute_constants(make_chart("flat_rectangle"), 8)
    assert consts.eta0 == 0.0 and consts.eta_bar0 == pytest.approx(0.0, abs=1e-12)
    assert consts.h0 == 0.0 and consts.a0 == 0.0 and consts.t0 == 0.0
    assert consts.t_star == pytest.approx(math.sqrt(2), rel=1e-12)
    assert consts.tr_t_inf == pytest.approx(2.0, rel=1e-12)
    assert consts.vol_omega == pytest.approx(1.0, rel=1e-12)


def test_hemisphere_constants():
    consts = compute_constants(make_chart("stereographic_sphere", (1.0,)), 32)
    assert consts.h0 == pytest.approx(1.0, abs=1e-6)
    assert consts.a0 == pytest.approx(math.sqrt(2), abs=1e-6)
    assert consts.vol_omega == pytest.approx(2 * math.pi, abs=1e-3)
    assert consts.t_star == pytest.approx(math.sqrt(2), rel=1e-12)
    assert consts.t0 == 0.0  # metric tensor is parallel


def test_hemisphere_weighted_constants_closed_form():
    # eta = c|xi|^2 on the stereographic chart: |grad eta| = 2c|xi|/(conformal)
    # peaks at 0.4 on the rim; L eta = (1+s)^2 (c - c^2 s) peaks at 0.64
    chart = make_chart("stereographic_sphere", (1.0,),
                       eta=make_eta("radial_quadratic", (0.2,)))
    consts = compute_constants(chart, 32)
    assert consts.eta0 == pytest.approx(0.4, abs=1e-10)
    assert consts.eta_bar0 == pytest.approx(0.64, abs=1e-8)


def test_constants_refinement_monotone():
    charts = [
        make_chart("stereographic_sphere", (1.0,),
                   eta=make_eta("radial_quadratic", (0.2,))),
        make_chart("flat_rectangle",
                   eta=make_eta("expr", expr="sin(3*x)*cosh(y)", dim=2)),
    ]
    for chart in charts:
        coarse = compute_constants(chart, 12)
        fine = compute_constants(chart, 24)
        for name in ("eta0", "eta_bar0", "h0", "a0", "t_star", "t0", "tr_t_sup"):
            assert getattr(coarse, name) <= getattr(fine, name) + 1e-12, name
        assert coarse.tr_t_inf >= fine.tr_t_inf - 1e-12


def test_constants_invariant_under_affine_reparameterization():
    # same flat patch charted over [0,1]^2 and over [0,2]x[0,1] with the
    # first coordinate halved
    eta_a = make_eta("expr", expr="sin(x) + y^2", dim=2)
    chart_a = make_chart("flat_rectangle", eta=eta_a)

    scale = np.array([0.5, 1.0])
    stretched = CallableImmersion(
        2, 2,
        position=lambda p: p * scale,
        jacobian=lambda p: np.broadcast_to(np.diag(scale), (p.shape[0], 2, 2)).copy(),
        hessian=lambda p: np.zeros((p.shape[0], 2, 2, 2)))
    eta_b = make_eta("expr", expr="sin(x/2) + y^2", dim=2)
    chart_b = Chart(2, 2, Rectangle(((0, 2), (0, 1))), stretched, eta_b,
                    make_tensor("metric"))

    const_a = compute_constants(chart_a, 16)
    const_b = compute_constants(chart_b, 16)
    for name in ("eta0", "eta_bar0", "h0", "a0", "t_star", "t0",
                 "tr_t_inf", "tr_t_sup", "vol_omega"):
        va, vb = getattr(const_a, name), getattr(const_b, name)
        assert va == pytest.approx(vb, rel=1e-8, abs=1e-8), name


def test_expression_tensor_parallel_when_proportional_to_metric():
    # a scaled metric written as expression entries exercises the generic
    # finite-difference covariant-derivative path; nabla(c g) = 0
    conformal = "6.8/(1+x^2+y^2)^2"
    chart = make_chart("stereographic_sphere", (1.0,),
                       tensor=make_tensor("expr", expr=f"{conformal}; 0; {conformal}",
                                          dim=2))
    consts = compute_constants(chart, 16)
    assert consts.t0 <= 1e-9
    assert consts.t_star == pytest.approx(1.7 * math.sqrt(2), rel=1e-10)
    assert consts.tr_t_inf == pytest.approx(3.4, rel=1e-10)


def test_indefinite_tensor_rejected():
    chart = make_chart("flat_rectangle", tensor=make_tensor("diag", (1.0, -1.0)))
    with pytest.raises(TensorError):
        compute_constants(chart, 8)


def test_low_resolution_rejected():
    with pytest.raises(ParameterError):
        compute_constants(make_chart("flat_rectangle"), 4)


def test_unit_ball_volumes():
    assert omega_n(1) == pytest.approx(2.0, rel=1e-15)
    assert omega_n(2) == pytest.approx(math.pi, rel=1e-15)
    assert omega_n(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)


def test_ambient_coordinate_field_consistency():
    chart = make_chart("stereographic_sphere", (1.0,))
    field = AmbientCoordinate(chart, 2)
    pts = RNG.uniform(-0.5, 0.5, (6, 2))
    # finite differences of the value must match the analytic gradient
    step = 1e-6
    for axis in range(2):
        shift = np.zeros((6, 2))
        shift[:, axis] = step
        fd = (field.value(pts + shift) - field.value(pts - shift)) / (2 * step)
        assert np.allclose(fd, field.gradient(pts)[:, axis], atol=1e-8)


def test_expression_weight_gradient_matches_compiled_value():
    field = ExpressionWeight("sin(2*x)*y", 2)
    fn = compile_expression("sin(2*x)*y", 2)
    pts = RNG.uniform(0.1, 0.9, (8, 2))
    grad = field.gradient(pts)
    expected_x = 2 * np.cos(2 * pts[:, 0]) * pts[:, 1]
    expected_y = np.sin(2 * pts[:, 0])
    assert np.allclose(grad[:, 0], expected_x, atol=1e-7)
    assert np.allclose(grad[:, 1], expected_y, atol=1e-7)
    assert np.allclose(field.value(pts), fn(pts))


def test_disk_domain_membership():
    disk = Disk((0.0, 0.0), 1.0)
    assert not disk.contains([[0.8, 0.8]])[0]
    assert disk.contains([[0.6, 0.6]])[0]
