import numpy as np
import pytest

from lagkit import fd
from lagkit.charts import (
    Chart,
    FdConfig,
    curvature_line_check,
    evaluate_jet,
    fundamental_forms,
    principal_decomposition,
)
from lagkit.errors import (
    ImmersionError,
    MarginError,
    UmbilicError,
    VanishingCurvatureError,
)
from lagkit.families import sphere_chart
from tests.conftest import graph_chart, mesh


def quadric(a1, a2, cross=0.0):
    def h(U):
        return a1 * U[..., 0] ** 2 + a2 * U[..., 1] ** 2 + cross * U[..., 0] * U[..., 1]

    def hg(U):
        return np.stack(
            [2 * a1 * U[..., 0] + cross * U[..., 1],
             2 * a2 * U[..., 1] + cross * U[..., 0]],
            axis=-1,
        )

    def hh(U):
        m = U.shape[0]
        out = np.empty((m, 2, 2))
        out[:, 0, 0] = 2 * a1
        out[:, 1, 1] = 2 * a2
        out[:, 0, 1] = out[:, 1, 0] = cross
        return out

    return graph_chart(h, hg, hh)


def black_box(chart, step=1e-4, scheme="central-4th-order"):
    """Strip the exact jet/normal so finite differences are exercised."""
    return Chart(
        n=chart.n,
        domain=chart.domain,
        evaluator=chart.evaluator,
        fd=FdConfig(step=step, scheme=scheme),
        name=chart.name + "-fd",
    )


def test_hilf_value_at_origin(hilf2):
    jet = evaluate_jet(hilf2, [0.0, 0.0])
    assert np.allclose(jet.x, 0.0)
    assert np.allclose(jet.xi, [-1.0, 0.0, 0.0])


def test_polynomial_second_partials_exact():
    chart = quadric(0.5, 0.0)  # x = (u1, u2, u1^2 / 2): dd x_3 = diag(1, 0)
    jet = evaluate_jet(black_box(chart), [0.0, 0.0])
    assert np.allclose(jet.ddx[..., 2], np.diag([1.0, 0.0]), atol=1e-7)
    assert np.allclose(jet.ddx[..., :2], 0.0, atol=1e-7)


def test_torus_value(torus21):
    jet = evaluate_jet(torus21, [0.0, 0.0])
    assert np.allclose(jet.x, [3.0, 0.0, 0.0])


def test_margin_error(torus21):
    with pytest.raises(MarginError):
        evaluate_jet(black_box(torus21), [0.0, np.pi / 3 - 1e-6])


def test_rank_deficient_jacobian_rejected():
    def collapse(U):
        U = np.atleast_2d(U)
        s = U[:, 0] + U[:, 1]
        return np.stack([s, s, s**2], axis=-1)

    chart = Chart(n=2, domain=((-1, 1), (-1, 1)), evaluator=collapse)
    with pytest.raises(ImmersionError):
        evaluate_jet(chart, [0.1, 0.2])


def test_paraboloid_forms_identity():
    chart = quadric(0.5, 0.5)
    jet = evaluate_jet(chart, [0.0, 0.0])
    I, II, III = fundamental_forms(jet)
    assert np.allclose(I, np.eye(2), atol=1e-12)
    assert np.allclose(np.abs(II), np.eye(2), atol=1e-12)
    assert np.allclose(III, np.eye(2), atol=1e-12)


def test_torus_first_form(torus21):
    jet = evaluate_jet(torus21, [0.0, 0.0])
    I, II, _ = fundamental_forms(jet)
    assert np.allclose(I, np.diag([9.0, 1.0]), atol=1e-12)
    assert np.allclose(II, II.T, atol=1e-12)


def test_second_form_symmetric_generic(generic_chart, generic_points):
    for u in generic_points:
        _, II, _ = fundamental_forms(evaluate_jet(generic_chart, u))
        assert np.max(np.abs(II - II.T)) <= 1e-10


def test_torus_principal_curvatures(torus21):
    frame = principal_decomposition(evaluate_jet(torus21, [0.0, 0.0]))
    assert np.allclose(sorted(frame.k), [1.0 / 3.0, 1.0], atol=1e-12)


def test_frame_radii_arithmetic():
    # curvatures {1, 2} at the origin of a quadric graph
    chart = quadric(0.5, 1.0)
    frame = principal_decomposition(evaluate_jet(chart, [0.0, 0.0]))
    k = np.sort(np.abs(frame.k))
    assert np.allclose(k, [1.0, 2.0], atol=1e-12)
    r_i = np.sort(np.abs(frame.r_i))
    assert np.allclose(r_i, [0.5, 1.0], atol=1e-12)
    assert abs(abs(frame.r) - 0.75) <= 1e-12
    assert abs(frame.rho - np.sqrt(0.125)) <= 1e-12


def test_mean_radius_centers_radii(generic_chart, generic_points):
    for u in generic_points:
        frame = principal_decomposition(evaluate_jet(generic_chart, u))
        assert abs(np.sum(frame.r - frame.r_i)) <= 1e-12 * np.sum(np.abs(frame.r_i))


def test_directions_orthonormal_in_first_form(generic_chart, generic_points):
    for u in generic_points:
        jet = evaluate_jet(generic_chart, u)
        I, _, _ = fundamental_forms(jet)
        frame = principal_decomposition(jet)
        gram = frame.e @ I @ frame.e.T
        assert np.max(np.abs(gram - np.eye(2))) <= 1e-8


def test_principal_direction_derivative_relation(hilf3):
    # e_i(xi) = -k_i e_i(x) along every principal direction
    U = mesh(3, 0.3, 2)
    for u in U:
        jet = evaluate_jet(hilf3, u)
        frame = principal_decomposition(jet)
        dxi = fd.grad_field(hilf3.normal, u[None, :], 1e-5, 4)[0]
        for i in range(3):
            lhs = frame.e[i] @ dxi
            rhs = -frame.k[i] * (frame.e[i] @ jet.dx)
            assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_sphere_is_umbilic():
    with pytest.raises(UmbilicError):
        principal_decomposition(evaluate_jet(sphere_chart(1.0), [0.05, -0.03]))


def test_vanishing_curvature_rejected():
    cylinder_like = quadric(0.5, 0.0)
    with pytest.raises(VanishingCurvatureError):
        principal_decomposition(evaluate_jet(cylinder_like, [0.0, 0.0]))


def test_curvature_lines_hilf(hilf3):
    assert curvature_line_check(hilf3, mesh(3, 0.4, 3), 1e-8)


def test_curvature_lines_torus(torus21, torus_points):
    assert curvature_line_check(torus21, torus_points, 1e-8)


def test_rotated_chart_fails_curvature_lines(hilf3):
    theta = np.pi / 6
    R = np.array(
        [[np.cos(theta), -np.sin(theta), 0.0],
         [np.sin(theta), np.cos(theta), 0.0],
         [0.0, 0.0, 1.0]]
    )
    rotated = Chart(
        n=3,
        domain=hilf3.domain,
        evaluator=lambda U: hilf3.evaluator(np.atleast_2d(U) @ R.T),
        name="rotated",
    )
    assert not curvature_line_check(rotated, mesh(3, 0.2, 3), 1e-8)


@pytest.mark.parametrize(
    "scheme,nominal", [("central-2nd-order", 2.0), ("central-4th-order", 4.0)]
)
def test_first_derivative_convergence_order(torus21, scheme, nominal):
    u = np.array([[0.4, 0.3]])
    _, dx_exact, _ = torus21.jet(u)
    steps = [0.04, 0.02, 0.01]
    errs = []
    for h in steps:
        chart = black_box(torus21, step=h, scheme=scheme)
        dx = fd.grad_field(chart.evaluator, u, h, chart.fd.first_order)
        errs.append(np.max(np.abs(dx - dx_exact)))
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert abs(slope - nominal) <= 0.5


def test_second_derivative_convergence_order(torus21):
    u = np.array([[0.4, 0.3]])
    _, _, ddx_exact = torus21.jet(u)
    steps = [0.04, 0.02, 0.01]
    errs = []
    for h in steps:
        ddx = fd.hess_field(torus21.evaluator, u, h, 2)
        errs.append(np.max(np.abs(ddx - ddx_exact)))
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert abs(slope - 2.0) <= 0.5


def test_fd_jets_match_exact_jets(hilf3):
    fd_chart = black_box(hilf3)
    U = mesh(3, 0.3, 2)
    for u in U[:4]:
        exact = evaluate_jet(hilf3, u)
        approx = evaluate_jet(fd_chart, u)
        assert np.max(np.abs(exact.dx - approx.dx)) <= 1e-10
        assert np.max(np.abs(exact.ddx - approx.ddx)) <= 1e-6
        assert np.max(np.abs(np.abs(exact.xi @ approx.xi) - 1.0)) <= 1e-10


def test_unit_normal(hilf3):
    jet = evaluate_jet(hilf3, [0.2, -0.1, 0.3])
    assert abs(np.linalg.norm(jet.xi) - 1.0) <= 1e-10
    assert np.max(np.abs(jet.dx @ jet.xi)) <= 1e-10
