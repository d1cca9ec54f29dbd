"""Light-cone lift of a curvature frame and the moving-frame objects.

For a hypersurface x with unit normal xi, curvature radii r_i, mean
radius r and rho = sqrt(sum (r - r_i)^2), the lift into the light cone
of the signature-(n+2,2) space is

    Y   = rho * (x.xi, -x.xi, xi, 1),
    eta = ((1+|x|^2)/2, (1-|x|^2)/2, x, 0) + r * (x.xi, -x.xi, xi, 1),

with invariant metric g = rho^2 * III in chart coordinates.  The frame
tangent vectors E_i(Y) use the orthonormal realisation
E_i = rho^-1 r_i e_i; on charts parametrized by curvature lines this is
the diagonal frame E_i = g_ii^(-1/2) d/du_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import (
    Chart,
    CurvatureFrame,
    JetPoint,
    forms_arrays,
    frame_scalars,
    jet_arrays,
    principal_arrays,
    UMBILIC_TOL,
    CURVATURE_FLOOR,
)
from .errors import DegeneracyError, UmbilicError, VanishingCurvatureError
from .spaces import SignatureSpace, SpaceVector, laguerre_space

__all__ = [
    "LiftBatch",
    "LaguerreFrame",
    "lift_arrays",
    "position_vector",
    "normal_map",
    "laguerre_metric",
    "frame_coefficients",
]


@dataclass(frozen=True)
class LiftBatch:
    """Batched pointwise data of the lift over a set of parameter points."""

    space: SignatureSpace
    u: np.ndarray        # (m, n)
    x: np.ndarray        # (m, n+1)
    xi: np.ndarray       # (m, n+1)
    k: np.ndarray        # (m, n) descending
    e: np.ndarray        # (m, n, n) unit principal directions (rows)
    r_i: np.ndarray      # (m, n)
    r: np.ndarray        # (m,)
    rho: np.ndarray      # (m,)
    b: np.ndarray        # (m, n) Laguerre principal curvatures (r - r_i)/rho
    y: np.ndarray        # (m, n+4) scaled position Y/rho
    Y: np.ndarray        # (m, n+4)
    eta: np.ndarray      # (m, n+4)
    I: np.ndarray        # (m, n, n)
    II: np.ndarray       # (m, n, n)
    III: np.ndarray      # (m, n, n)
    g: np.ndarray        # (m, n, n)


def _lift_from_scalars(x, xi, r, rho):
    m, d = x.shape
    dot = np.sum(x * xi, axis=-1)
    y = np.empty((m, d + 3))
    y[:, 0] = dot
    y[:, 1] = -dot
    y[:, 2:-1] = xi
    y[:, -1] = 1.0
    Y = rho[:, None] * y
    eta = np.empty_like(y)
    sq = np.sum(x * x, axis=-1)
    eta[:, 0] = 0.5 * (1.0 + sq)
    eta[:, 1] = 0.5 * (1.0 - sq)
    eta[:, 2:-1] = x
    eta[:, -1] = 0.0
    eta = eta + r[:, None] * y
    return y, Y, eta


def lift_arrays(chart: Chart, U: np.ndarray) -> LiftBatch:
    """Evaluate the full pointwise lift on a batch of parameter points.

    Raises UmbilicError / VanishingCurvatureError when a point violates
    the curvature-regularity assumptions, and DegeneracyError if the
    invariant metric loses positive definiteness.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    x, dx, ddx, xi = jet_arrays(chart, U)
    I, II, III = forms_arrays(dx, ddx, xi)
    k, e = principal_arrays(I, II)

    kmax = np.max(np.abs(k), axis=-1)
    if np.any(k[:, 0] - k[:, -1] < UMBILIC_TOL * kmax):
        raise UmbilicError("umbilic point in the sampled batch")
    if np.any(np.min(np.abs(k), axis=-1) <= CURVATURE_FLOOR * kmax):
        raise VanishingCurvatureError("vanishing principal curvature in the batch")

    r_i, r, rho = frame_scalars(k)
    b = (r[:, None] - r_i) / rho[:, None]
    y, Y, eta = _lift_from_scalars(x, xi, r, rho)
    g = rho[:, None, None] ** 2 * III
    if np.any(np.diagonal(g, axis1=-2, axis2=-1) <= 0.0):
        raise DegeneracyError("invariant metric lost positive definiteness")
    return LiftBatch(
        space=laguerre_space(chart.n),
        u=U, x=x, xi=xi, k=k, e=e, r_i=r_i, r=r, rho=rho, b=b,
        y=y, Y=Y, eta=eta, I=I, II=II, III=III, g=g,
    )


def frame_coefficients(lift: LiftBatch) -> np.ndarray:
    """Coordinate coefficients w[m, i, :] of the orthonormal fields E_i.

    E_i = rho^-1 r_i e_i with e_i the unit principal directions; the
    ordering follows the descending-curvature sort and the sign rule of
    the directions, which keeps the frame field smooth wherever the
    curvatures stay separated.  On a chart parametrized by curvature
    lines this is numerically the diagonal realisation g_ii^(-1/2) d_i
    up to the same ordering.
    """
    scale = lift.r_i / lift.rho[:, None]
    return scale[:, :, None] * lift.e


@dataclass(frozen=True)
class LaguerreFrame:
    """The moving frame {Y, N, E_i(Y), eta, P} at a single point."""

    Y: SpaceVector
    N: SpaceVector
    eta: SpaceVector
    P: SpaceVector
    EY: np.ndarray   # (n, n+4)
    g: np.ndarray    # (n, n)
    y: SpaceVector

    def relation_residuals(self) -> dict:
        """Residuals of the defining pairings of the frame."""
        sp = self.Y.space
        Y, N, eta = self.Y.coords, self.N.coords, self.eta.coords
        P = self.P.coords
        gram = np.einsum("ia,a,ja->ij", self.EY, sp.signs, self.EY)
        return {
            "position_lightlike": abs(float(sp.dot(Y, Y))),
            "n_vector_lightlike": abs(float(sp.dot(N, N))),
            "position_n_pairing": abs(float(sp.dot(Y, N)) + 1.0),
            "normal_map_lightlike": abs(float(sp.dot(eta, eta))),
            "normal_map_p_pairing": abs(float(sp.dot(eta, P)) + 1.0),
            "position_normal_orthogonal": abs(float(sp.dot(Y, eta))),
            "tangent_orthonormal": float(np.max(np.abs(gram - np.eye(gram.shape[0])))),
        }


def position_vector(jet: JetPoint, frame: CurvatureFrame) -> SpaceVector:
    """Light-cone position vector Y = rho (x.xi, -x.xi, xi, 1)."""
    if not frame.rho > 0:
        raise UmbilicError("rho vanishes; position vector undefined")
    space = laguerre_space(jet.u.shape[0])
    _, Y, _ = _lift_from_scalars(
        jet.x[None], jet.xi[None], np.array([frame.r]), np.array([frame.rho])
    )
    return space.vector(Y[0])


def normal_map(jet: JetPoint, frame: CurvatureFrame) -> SpaceVector:
    """The second lightlike map eta = ((1+|x|^2)/2, (1-|x|^2)/2, x, 0) + r y."""
    space = laguerre_space(jet.u.shape[0])
    _, _, eta = _lift_from_scalars(
        jet.x[None], jet.xi[None], np.array([frame.r]), np.array([frame.rho])
    )
    return space.vector(eta[0])


def laguerre_metric(frame: CurvatureFrame, III: np.ndarray) -> np.ndarray:
    """Invariant metric g = rho^2 III in chart coordinates."""
    if not frame.rho > 0:
        raise UmbilicError("rho vanishes; metric undefined")
    g = frame.rho**2 * np.asarray(III, dtype=float)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("invariant metric is not positive definite") from exc
    return g

