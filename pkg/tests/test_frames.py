import numpy as np
import pytest

from lagkit.charts import evaluate_jet, fundamental_forms, principal_decomposition
from lagkit.errors import DegeneracyError
from lagkit.frames import laguerre_metric, lift_arrays, normal_map, position_vector
from lagkit.invariants import analyze, laguerre_frame, n_vector
from lagkit.spaces import inner_product, laguerre_space, p_vector
from lagkit import fd
from tests.conftest import mesh


@pytest.fixture(scope="module")
def hilf2_frame(hilf2):
    jet = evaluate_jet(hilf2, [0.1, -0.2])
    return jet, principal_decomposition(jet)


def test_position_vector_lightlike(hilf2_frame):
    jet, frame = hilf2_frame
    Y = position_vector(jet, frame)
    assert abs(inner_product(Y, Y)) <= 1e-14


def test_position_vector_last_coordinate_is_rho(hilf2_frame):
    jet, frame = hilf2_frame
    Y = position_vector(jet, frame)
    assert abs(Y.coords[-1] - frame.rho) <= 1e-15


def test_position_vector_orthogonal_to_p(hilf2_frame):
    jet, frame = hilf2_frame
    Y = position_vector(jet, frame)
    P = p_vector(laguerre_space(2))
    assert abs(inner_product(Y, P)) <= 1e-14


def test_normal_map_relations(hilf2_frame):
    jet, frame = hilf2_frame
    eta = normal_map(jet, frame)
    Y = position_vector(jet, frame)
    P = p_vector(laguerre_space(2))
    assert abs(inner_product(eta, eta)) <= 1e-10
    assert abs(inner_product(eta, P) + 1.0) <= 1e-14
    assert abs(inner_product(Y, eta)) <= 1e-10


def test_rho_at_origin_two_curvature(hilf2):
    # a = (1, 2): curvatures +-(2, 4) at the origin, radii -+(1/2, 1/4),
    # so rho^2 = 2 (1/8)^2 = 1/32 -- independent arithmetic oracle.
    frame = principal_decomposition(evaluate_jet(hilf2, [0.0, 0.0]))
    assert abs(frame.rho**2 - 1.0 / 32.0) <= 1e-14


def test_metric_is_scaled_third_form(hilf2):
    jet = evaluate_jet(hilf2, [0.0, 0.0])
    frame = principal_decomposition(jet)
    _, _, III = fundamental_forms(jet)
    g = laguerre_metric(frame, III)
    assert np.allclose(g, frame.rho**2 * III, atol=1e-15)
    # oracle: III at the origin is the differential of the closed-form
    # normal, d xi . d xi = diag(4 a_i^2)
    dxi = fd.grad_field(hilf2.normal, np.zeros((1, 2)), 1e-5, 4)[0]
    third = dxi @ dxi.T
    assert np.max(np.abs(third - III)) <= 1e-9


def test_metric_rejects_indefinite_input(hilf2_frame):
    _, frame = hilf2_frame
    with pytest.raises(DegeneracyError):
        laguerre_metric(frame, -np.eye(2))


def test_metric_equals_lift_gram(hilf3):
    # <Y_,i, Y_,j> reproduces the invariant metric in chart coordinates
    grid = mesh(3, 0.3, 2)

    def y_field(U):
        return lift_arrays(hilf3, U).Y

    lift = lift_arrays(hilf3, grid)
    dY = fd.grad_field(y_field, grid, 1e-4, 4)
    gram = np.einsum("mal,l,mbl->mab", dY, lift.space.signs, dY)
    assert np.max(np.abs(gram - lift.g)) <= 1e-8


def test_n_vector_relations_on_grid(hilf3, grid3):
    a = analyze(hilf3, grid3)
    sp = a.lift.space
    assert np.max(np.abs(sp.dot(a.N, a.N))) <= 1e-6
    assert np.max(np.abs(sp.dot(a.lift.Y, a.N) + 1.0)) <= 1e-6


def test_n_vector_constant_on_explicit_family(hilf3, grid3):
    a = analyze(hilf3, grid3)
    assert np.max(np.abs(a.N - a.N.mean(axis=0))) <= 1e-5


def test_n_minus_lambda_y_constant(hilf3, grid3):
    a = analyze(hilf3, grid3)
    lam = a.lambda_estimate
    alpha = a.N - lam * a.lift.Y
    assert np.max(np.abs(alpha - alpha.mean(axis=0))) <= 1e-5


def test_single_point_n_vector(hilf3):
    N = n_vector(hilf3, [0.1, 0.0, -0.1])
    assert N.coords.shape == (7,)
    assert abs(inner_product(N, N)) <= 1e-6


def test_laguerre_frame_relations(hilf3):
    frame = laguerre_frame(hilf3, [0.1, -0.15, 0.2])
    residuals = frame.relation_residuals()
    assert max(residuals.values()) <= 1e-6
    assert frame.EY.shape == (3, 7)
    assert np.allclose(frame.y.coords * frame.Y.coords[-1], frame.Y.coords)
