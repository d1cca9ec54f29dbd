"""Parametrized hypersurfaces, derivative jets and the curvature frame.

A ``Chart`` evaluates a hypersurface x: U in R^n -> R^(n+1) on batches of
parameter points.  Built-in charts carry exact analytic jets; black-box
charts fall back to central finite differences configured by ``FdConfig``.
The unit normal is the normalised generalized cross product of the
Jacobian rows taken in parameter order, unless the chart supplies its own
normal field; ``flip_normal`` reverses either choice and all curvature
signs are reported relative to the resulting orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fd
from .errors import ImmersionError, UmbilicError, VanishingCurvatureError

__all__ = [
    "FdConfig",
    "Chart",
    "JetPoint",
    "CurvatureFrame",
    "evaluate_jet",
    "jet_arrays",
    "fundamental_forms",
    "forms_arrays",
    "principal_decomposition",
    "principal_arrays",
    "curvature_line_check",
    "cross_normal",
]

SCHEMES = {"central-2nd-order": 2, "central-4th-order": 4}

# Relative thresholds flagging the regimes the theory excludes: umbilic
# points (all curvatures equal) and vanishing principal curvatures.
UMBILIC_TOL = 1e-7
CURVATURE_FLOOR = 1e-7


@dataclass(frozen=True)
class FdConfig:
    """Step and scheme for finite-difference jets.

    First partials use the scheme's order at ``step``; second partials
    always use the 2nd-order stencils at the same step, which balances
    truncation against roundoff for O(1)-scaled charts.
    """

    step: float = 1e-4
    scheme: str = "central-4th-order"

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("fd step must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def first_order(self) -> int:
        return SCHEMES[self.scheme]


@dataclass(frozen=True, eq=False)
class Chart:
    """A parametrized hypersurface with optional exact derivative data.

    ``evaluator`` maps parameter batches (m, n) to points (m, n+1).
    ``jet`` if present returns (x, dx, ddx) exactly, with dx of shape
    (m, n, n+1) and ddx of shape (m, n, n, n+1).  ``normal`` if present
    returns the unit normal field (m, n+1).
    """

    n: int
    domain: tuple
    evaluator: Callable
    jet: Optional[Callable] = None
    normal: Optional[Callable] = None
    flip_normal: bool = False
    fd: FdConfig = field(default_factory=FdConfig)
    name: str = ""
    params: dict = field(default_factory=dict)

    @property
    def orientation(self) -> str:
        base = "analytic-normal" if self.normal is not None else "cross-product"
        return base + (" (flipped)" if self.flip_normal else "")


@dataclass(frozen=True)
class JetPoint:
    """Value, first and second partials, and unit normal at one point."""

    u: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    ddx: np.ndarray
    xi: np.ndarray


@dataclass(frozen=True)
class CurvatureFrame:
    """Principal curvatures (descending), directions and curvature radii.

    ``e[i]`` holds the parameter-space coefficients of the i-th principal
    direction, normalised in the first fundamental form with its first
    nonzero component positive.  ``ties`` flags nearly equal curvatures.
    """

    k: np.ndarray
    e: np.ndarray
    r_i: np.ndarray
    r: float
    rho: float
    ties: bool


def cross_normal(dx: np.ndarray) -> np.ndarray:
    """Generalized cross product of Jacobian rows, batched.

    For dx of shape (m, n, n+1) returns the (unnormalised) normal with
    components nu_a = (-1)^(n+a) det(dx with column a removed), the usual
    cofactor-expansion convention in parameter order.
    """
    m, n, d = dx.shape
    out = np.empty((m, d))
    cols = np.arange(d)
    for a in range(d):
        minor = dx[:, :, cols != a]
        out[:, a] = (-1) ** (n + a) * np.linalg.det(minor)
    return out


def _fd_jet(chart: Chart, U: np.ndarray):
    h = chart.fd.step
    order = chart.fd.first_order
    x = np.asarray(chart.evaluator(U))
    dx = fd.grad_field(chart.evaluator, U, h, order)
    ddx = fd.hess_field(chart.evaluator, U, h, 2)
    return x, dx, ddx


def jet_arrays(chart: Chart, U: np.ndarray):
    """Batched jets: returns (x, dx, ddx, xi) for U of shape (m, n).

    Raises MarginError if a finite-difference stencil would leave the
    domain and ImmersionError on a rank-deficient Jacobian.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if U.shape[1] != chart.n:
        raise ImmersionError(
            f"parameter points of dimension {U.shape[1]} on an n={chart.n} chart"
        )
    reach = 0.0
    if chart.jet is None:
        reach = 2 * chart.fd.step
    fd.check_margin(chart.domain, U, reach)

    if chart.jet is not None:
        x, dx, ddx = chart.jet(U)
    else:
        x, dx, ddx = _fd_jet(chart, U)

    sv = np.linalg.svd(dx, compute_uv=False)
    if np.any(sv[:, -1] <= 1e-10 * sv[:, 0]):
        raise ImmersionError("Jacobian is rank deficient at a sampled point")

    if chart.normal is not None:
        xi = np.asarray(chart.normal(U))
    else:
        xi = cross_normal(dx)
    xi = xi / np.linalg.norm(xi, axis=-1, keepdims=True)
    if chart.flip_normal:
        xi = -xi
    return x, dx, ddx, xi


def evaluate_jet(chart: Chart, u) -> JetPoint:
    """Jet at a single parameter point (margin >= 2*step for fd charts)."""
    u = np.asarray(u, dtype=float).reshape(-1)
    x, dx, ddx, xi = jet_arrays(chart, u[None, :])
    return JetPoint(u=u, x=x[0], dx=dx[0], ddx=ddx[0], xi=xi[0])


def forms_arrays(dx: np.ndarray, ddx: np.ndarray, xi: np.ndarray):
    """Batched fundamental forms (I, II, III) from jet arrays."""
    I = np.einsum("mia,mja->mij", dx, dx)
    II = np.einsum("mija,ma->mij", ddx, xi)
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    try:
        I_inv = np.linalg.inv(I)
    except np.linalg.LinAlgError as exc:
        raise ImmersionError("singular first fundamental form") from exc
    III = np.einsum("mij,mjk,mkl->mil", II, I_inv, II)
    III = 0.5 * (III + np.swapaxes(III, -1, -2))
    return I, II, III


def fundamental_forms(jet: JetPoint):
    """First, second and third fundamental forms at a jet point.

    I_ij = dx_i . dx_j, II_ij = ddx_ij . xi (= -dx_i . dxi_j) and
    III = II I^-1 II, the coordinate matrix of dxi . dxi.
    """
    I, II, III = forms_arrays(jet.dx[None], jet.ddx[None], jet.xi[None])
    return I[0], II[0], III[0]


def _fix_direction_signs(dirs: np.ndarray) -> np.ndarray:
    """Scale each direction so its first nonzero component is positive."""
    mags = np.abs(dirs)
    thresh = 1e-12 * np.max(mags, axis=-1, keepdims=True)
    first = np.argmax(mags > thresh, axis=-1)
    lead = np.take_along_axis(dirs, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0, -1.0, 1.0)
    return dirs * sign[..., None]


def principal_arrays(I: np.ndarray, II: np.ndarray):
    """Batched principal decomposition II e = k I e.

    Returns (k, dirs) with curvatures sorted descending and dirs[m, i, :]
    the I-orthonormal coefficient vector of the i-th direction.  The
    umbilic / vanishing-curvature checks are left to the caller.
    """
    try:
        L = np.linalg.cholesky(I)
    except np.linalg.LinAlgError as exc:
        raise ImmersionError("first fundamental form is not positive definite") from exc
    B = np.linalg.solve(L, II)
    A = np.swapaxes(np.linalg.solve(L, np.swapaxes(B, -1, -2)), -1, -2)
    A = 0.5 * (A + np.swapaxes(A, -1, -2))
    w, Q = np.linalg.eigh(A)
    E = np.linalg.solve(np.swapaxes(L, -1, -2), Q)
    k = w[..., ::-1]
    dirs = np.swapaxes(E, -1, -2)[..., ::-1, :]
    return k, _fix_direction_signs(dirs)


def _check_k_regular(k: np.ndarray) -> None:
    kmax = np.max(np.abs(k), axis=-1)
    spread = k[..., 0] - k[..., -1]
    if np.any(spread < UMBILIC_TOL * kmax):
        raise UmbilicError("umbilic point: principal curvatures coincide")
    if np.any(np.min(np.abs(k), axis=-1) <= CURVATURE_FLOOR * kmax):
        raise VanishingCurvatureError("a principal curvature vanishes")


def frame_scalars(k: np.ndarray):
    """Radii, mean radius and rho from curvatures (batched on last axis)."""
    r_i = 1.0 / k
    r = np.mean(r_i, axis=-1)
    rho = np.sqrt(np.sum((r[..., None] - r_i) ** 2, axis=-1))
    return r_i, r, rho


def principal_decomposition(jet: JetPoint) -> CurvatureFrame:
    """Curvature frame at a jet point.

    Solves the generalized symmetric eigenproblem II e = k I e, orders
    the curvatures descending (ties broken by the direction-sign rule)
    and fills the curvature radii r_i = 1/k_i, their mean r and
    rho = sqrt(sum (r - r_i)^2).  Raises UmbilicError at umbilic points
    and VanishingCurvatureError when some k_i is numerically zero.
    """
    I, II, _ = fundamental_forms(jet)
    k, dirs = principal_arrays(I[None], II[None])
    k, dirs = k[0], dirs[0]
    _check_k_regular(k[None])
    kmax = np.max(np.abs(k))
    ties = bool(np.any(np.diff(k) > -UMBILIC_TOL * kmax))
    r_i, r, rho = frame_scalars(k)
    return CurvatureFrame(k=k, e=dirs, r_i=r_i, r=float(r), rho=float(rho), ties=ties)


def curvature_line_check(chart: Chart, grid: np.ndarray, tol: float = 1e-8) -> bool:
    """Whether the coordinate directions are principal on the whole grid.

    True iff I and II are simultaneously diagonal (relative to their
    diagonal scale) at every grid point.
    """
    _, dx, ddx, xi = jet_arrays(chart, grid)
    I, II, _ = forms_arrays(dx, ddx, xi)
    idx = np.arange(chart.n)
    for M in (I, II):
        diag_scale = np.max(np.abs(np.diagonal(M, axis1=-2, axis2=-1)))
        off = M.copy()
        off[:, idx, idx] = 0.0
        if np.max(np.abs(off)) > tol * diag_scale:
            return False
    return True
