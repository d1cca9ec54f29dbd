"""Invariants of the light-cone lift, computed two independent ways.

Closed forms (diagonal in the principal frame, with b_i = (r - r_i)/rho):

    B_ij = b_i delta_ij,
    C_i  = -rho^-2 r_i { e_i(r) - (r - r_i) e_i(log rho) },
    L    = two closed-form variants computed side by side (their
           constant term and direction-weight factors disagree); the
           structural computation below arbitrates between them.

Structural values project derivatives of the moving frame:

    L_ij = <E_i(N), E_j(Y)>,   C_i = -<E_i(N), eta>,
    B_ij = -<E_j(E_i(Y)), eta>,

using <N,eta> = <Y,eta> = <E_j(Y),eta> = 0 and <eta,P> = -1.  The
second-order vector N is assembled from the Laplace-Beltrami operator of
the invariant metric (divergence-of-gradient sign, which is the choice
consistent with <Y,N> = -1):

    N = Delta_g Y / n + <Delta_g Y, Delta_g Y> Y / (2 n^2).

All derivative fields use central differences on pointwise-exact data;
steps are configurable via ``FieldSteps``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fd
from .charts import Chart
from .errors import InputError
from .fields import (
    MetricField,
    christoffels,
    frame_connection,
    frame_riemann,
    laplacian,
    lowered_riemann,
)
from .frames import LaguerreFrame, LiftBatch, frame_coefficients, lift_arrays
from .spaces import laguerre_space, p_vector

__all__ = [
    "FieldSteps",
    "LaguerreInvariants",
    "ClassificationResult",
    "CheckEntry",
    "Analysis",
    "analyze",
    "n_vector",
    "laguerre_frame",
    "invariants_closed_form",
    "invariants_structural",
    "metric_geometry",
    "classify",
    "identity_suite",
]


@dataclass(frozen=True)
class FieldSteps:
    """Steps for differentiating derived fields (all 4th-order central).

    ``first`` differentiates pointwise-exact fields once; ``second``
    is larger to keep second differences above the roundoff floor;
    ``outer`` differentiates fields that are themselves fd-derived
    (N, Christoffel symbols), where the inherited noise dominates.
    """

    first: float = 1e-4
    second: float = 1e-3
    outer: float = 1e-3


DEFAULT_STEPS = FieldSteps()


@dataclass(frozen=True)
class LaguerreInvariants:
    """Invariant tensors at one point, in the orthonormal principal frame."""

    B: np.ndarray
    C: np.ndarray
    b: np.ndarray
    L_closed_a: Optional[np.ndarray] = None
    L_closed_b: Optional[np.ndarray] = None
    L_structural: Optional[np.ndarray] = None
    lambda_estimate: Optional[float] = None


class _LiftPack:
    """Flattens the pointwise-exact lift quantities into one field.

    Packing Y, eta, g, III, log rho, r, b and the frame coefficients
    into a single array lets one stencil evaluation feed every first
    derivative the invariants need.
    """

    def __init__(self, chart: Chart):
        self.chart = chart
        n = chart.n
        d = n + 4
        sizes = {
            "Y": d, "eta": d, "g": n * n, "III": n * n,
            "logrho": 1, "r": 1, "b": n, "w": n * n,
        }
        self.slices = {}
        start = 0
        for name, size in sizes.items():
            self.slices[name] = slice(start, start + size)
            start += size
        self.width = start

    def __call__(self, U: np.ndarray) -> np.ndarray:
        lift = lift_arrays(self.chart, U)
        m, n = lift.u.shape
        w = frame_coefficients(lift)
        return np.concatenate(
            [
                lift.Y,
                lift.eta,
                lift.g.reshape(m, -1),
                lift.III.reshape(m, -1),
                np.log(lift.rho)[:, None],
                lift.r[:, None],
                lift.b,
                w.reshape(m, -1),
            ],
            axis=1,
        )

    def take(self, packed: np.ndarray, name: str, matrix: bool = False):
        part = packed[..., self.slices[name]]
        if matrix:
            n = self.chart.n
            return part.reshape(part.shape[:-1] + (n, n))
        if part.shape[-1] == 1:
            return part[..., 0]
        return part


def _hess_pack(chart: Chart):
    """Smaller pack (Y, log rho) for second derivatives."""

    def f(U):
        lift = lift_arrays(chart, U)
        return np.concatenate([lift.Y, np.log(lift.rho)[:, None]], axis=1)

    return f


def _n_from_parts(space, lift: LiftBatch, dY, ddY, gamma_g):
    delta_y = laplacian(lift.g, gamma_g, dY, ddY)
    nsq = space.dot(delta_y, delta_y)
    n = lift.u.shape[1]
    N = delta_y / n + (nsq / (2.0 * n * n))[:, None] * lift.Y
    return N, delta_y


def _n_field(chart: Chart, steps: FieldSteps):
    """Vectorised field U -> N(U) for outer differentiation."""
    pack = _LiftPack(chart)
    hpack = _hess_pack(chart)
    space = laguerre_space(chart.n)
    d = chart.n + 4

    def f(U):
        lift = lift_arrays(chart, U)
        grads = fd.grad_field(pack, U, steps.first, 4)
        dY = pack.take(grads, "Y")
        dg = pack.take(grads, "g", matrix=True)
        ddY = fd.hess_field(hpack, U, steps.second, 4)[..., :d]
        gamma_g = christoffels(lift.g, dg)
        N, _ = _n_from_parts(space, lift, dY, ddY, gamma_g)
        return N

    return f


@dataclass(frozen=True)
class Analysis:
    """Every invariant field over a grid, from one shared evaluation pass."""

    chart: Chart
    grid: np.ndarray
    steps: FieldSteps
    lift: LiftBatch
    w: np.ndarray              # (m, n, n) frame coefficients
    N: np.ndarray              # (m, n+4)
    delta_y: np.ndarray        # (m, n+4)
    E_Y: np.ndarray            # (m, i, n+4)
    E_N: np.ndarray            # (m, i, n+4)
    E2_Y: np.ndarray           # (m, i, j, n+4): E_j(E_i(Y))
    gamma_g: np.ndarray        # coordinate Christoffels of g
    conn: np.ndarray           # frame connection (m, k, i, l) = Gamma^l_ik
    L_structural: np.ndarray   # (m, n, n)
    C_structural: np.ndarray   # (m, n)
    B_structural: np.ndarray   # (m, n, n)
    C_closed: np.ndarray       # (m, n)
    L_closed_a: np.ndarray     # (m, n, n)
    L_closed_b: np.ndarray     # (m, n, n)
    cov_B: np.ndarray          # (m, i, j, k) frame covariant derivative
    E_b: np.ndarray            # (m, k, i): E_k(b_i)
    laplace_iii_logrho: np.ndarray   # (m,)
    grad_iii_logrho_sq: np.ndarray   # (m,)

    @property
    def lambda_estimate(self) -> float:
        m, n = self.grid.shape
        traces = np.trace(self.L_structural, axis1=-2, axis2=-1) / n
        return float(np.median(traces))

    def structure_residual(self) -> float:
        """Max norm of the second structure equation over the grid."""
        m, n = self.grid.shape
        space = self.lift.space
        P = p_vector(space).coords
        eye = np.eye(n)
        rhs = (
            np.einsum("mij,ml->mijl", self.L_structural, self.lift.Y)
            + np.einsum("ij,ml->mijl", eye, self.N)
            + np.einsum("mijk,mkl->mijl", self.conn_proj, self.E_Y)
            + np.einsum("mij,l->mijl", self.B_structural, P)
        )
        return float(np.max(np.abs(self.E2_Y - rhs)))

    @property
    def conn_proj(self) -> np.ndarray:
        """Gamma^k_ij as projections <E_j(E_i(Y)), E_k(Y)> -> (m, i, j, k)."""
        signs = self.lift.space.signs
        return np.einsum("mijl,l,mkl->mijk", self.E2_Y, signs, self.E_Y)


def analyze(chart: Chart, grid: np.ndarray, steps: FieldSteps = DEFAULT_STEPS) -> Analysis:
    """Evaluate every invariant field of the lift over a grid of points."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    m, n = grid.shape
    if n != chart.n:
        raise InputError(f"grid dimension {n} does not match chart n={chart.n}")
    d = n + 4
    space = laguerre_space(n)
    signs = space.signs

    lift = lift_arrays(chart, grid)
    w = frame_coefficients(lift)

    pack = _LiftPack(chart)
    grads = fd.grad_field(pack, grid, steps.first, 4)
    dY = pack.take(grads, "Y")              # (m, a, d)
    dg = pack.take(grads, "g", matrix=True)  # (m, a, n, n)
    dIII = pack.take(grads, "III", matrix=True)
    dlogrho = pack.take(grads, "logrho")     # (m, a)
    dr = pack.take(grads, "r")
    db = pack.take(grads, "b")               # (m, a, i)
    dw = pack.take(grads, "w", matrix=True)  # (m, a, i, b)

    hess = fd.hess_field(_hess_pack(chart), grid, steps.second, 4)
    ddY = hess[..., :d]                      # (m, a, b, d)
    ddlogrho = hess[..., d]                  # (m, a, b)

    gamma_g = christoffels(lift.g, dg)
    N, delta_y = _n_from_parts(space, lift, dY, ddY, gamma_g)

    E_Y = np.einsum("mia,mal->mil", w, dY)
    E2_Y = np.einsum("mja,maib,mbl->mijl", w, dw, dY) + np.einsum(
        "mja,mib,mabl->mijl", w, w, ddY
    )

    dN = fd.grad_field(_n_field(chart, steps), grid, steps.outer, 4)
    E_N = np.einsum("mia,mal->mil", w, dN)

    L_structural = np.einsum("mil,l,mjl->mij", E_N, signs, E_Y)
    C_structural = -np.einsum("mil,l,ml->mi", E_N, signs, lift.eta)
    B_structural = -np.einsum("mijl,l,ml->mij", E2_Y, signs, lift.eta)

    # Directional derivatives along the III-orthonormal frame E'_i = rho E_i
    # and the unit principal directions e_i = E'_i / r_i.
    w_iii = lift.rho[:, None, None] * w
    Ep_logrho = np.einsum("mia,ma->mi", w_iii, dlogrho)
    Ep_r = np.einsum("mia,ma->mi", w_iii, dr)
    e_logrho = Ep_logrho / lift.r_i
    e_r = Ep_r / lift.r_i

    rho = lift.rho
    C_closed = -(rho[:, None] ** -2) * lift.r_i * (
        e_r - (lift.r[:, None] - lift.r_i) * e_logrho
    )

    gamma_iii = christoffels(lift.III, dIII)
    hess_coord = ddlogrho - np.einsum("mkab,mk->mab", gamma_iii, dlogrho)
    hess_frame = np.einsum("mia,mjb,mab->mij", w_iii, w_iii, hess_coord)
    iii_inv = np.linalg.inv(lift.III)
    grad_sq = np.einsum("mab,ma,mb->m", iii_inv, dlogrho, dlogrho)
    lap_iii = laplacian(lift.III, gamma_iii, dlogrho, ddlogrho)

    eye = np.eye(n)
    inv_rho2 = rho**-2
    L_closed_a = inv_rho2[:, None, None] * (
        hess_frame
        - np.einsum("mi,mj->mij", Ep_logrho, Ep_logrho)
        + 0.5 * (grad_sq - 1.0)[:, None, None] * eye
    )
    L_closed_b = inv_rho2[:, None, None] * (
        hess_frame
        - np.einsum("mi,mj->mij", e_logrho, e_logrho)
        + 0.5 * grad_sq[:, None, None] * eye
    )

    conn = frame_connection(w, dw, gamma_g, lift.g)
    E_b = np.einsum("mka,mai->mki", w, db)
    # B_ij,k = E_k(b_i) delta_ij - Gamma^j_ik b_j - Gamma^i_jk b_i
    cov_B = (
        np.einsum("mki,ij->mijk", E_b, eye)
        - np.einsum("mkij,mj->mijk", conn, lift.b)
        - np.einsum("mkji,mi->mijk", conn, lift.b)
    )

    return Analysis(
        chart=chart, grid=grid, steps=steps, lift=lift, w=w,
        N=N, delta_y=delta_y, E_Y=E_Y, E_N=E_N, E2_Y=E2_Y,
        gamma_g=gamma_g, conn=conn,
        L_structural=L_structural, C_structural=C_structural,
        B_structural=B_structural,
        C_closed=C_closed, L_closed_a=L_closed_a, L_closed_b=L_closed_b,
        cov_B=cov_B, E_b=E_b,
        laplace_iii_logrho=lap_iii, grad_iii_logrho_sq=grad_sq,
    )


def n_vector(chart: Chart, u, steps: FieldSteps = DEFAULT_STEPS):
    """The frame vector N at one parameter point, as a SpaceVector."""
    u = np.asarray(u, dtype=float).reshape(1, -1)
    N = _n_field(chart, steps)(u)
    return laguerre_space(chart.n).vector(N[0])


def laguerre_frame(chart: Chart, u, steps: FieldSteps = DEFAULT_STEPS) -> LaguerreFrame:
    """The complete moving frame {Y, N, E_i(Y), eta, P} at one point."""
    a = analyze(chart, np.asarray(u, dtype=float).reshape(1, -1), steps)
    space = a.lift.space
    return LaguerreFrame(
        Y=space.vector(a.lift.Y[0]),
        N=space.vector(a.N[0]),
        eta=space.vector(a.lift.eta[0]),
        P=p_vector(space),
        EY=a.E_Y[0],
        g=a.lift.g[0],
        y=space.vector(a.lift.y[0]),
    )


def invariants_closed_form(
    chart: Chart, u, steps: FieldSteps = DEFAULT_STEPS
) -> LaguerreInvariants:
    """Closed-form invariants at a point (both L variants filled)."""
    a = analyze(chart, np.asarray(u, dtype=float).reshape(1, -1), steps)
    return LaguerreInvariants(
        B=np.diag(a.lift.b[0]),
        C=a.C_closed[0],
        b=a.lift.b[0],
        L_closed_a=a.L_closed_a[0],
        L_closed_b=a.L_closed_b[0],
    )


def invariants_structural(
    chart: Chart, u, steps: FieldSteps = DEFAULT_STEPS
) -> LaguerreInvariants:
    """Structure-equation invariants at a point."""
    a = analyze(chart, np.asarray(u, dtype=float).reshape(1, -1), steps)
    n = chart.n
    return LaguerreInvariants(
        B=a.B_structural[0],
        C=a.C_structural[0],
        b=a.lift.b[0],
        L_structural=a.L_structural[0],
        lambda_estimate=float(np.trace(a.L_structural[0]) / n),
    )


def metric_geometry(
    chart: Chart, grid: np.ndarray, steps: FieldSteps = DEFAULT_STEPS
) -> MetricField:
    """Christoffels and curvature of the invariant metric over a grid."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))

    def g_field(U):
        lift = lift_arrays(chart, U)
        return lift.g

    lift = lift_arrays(chart, grid)
    w = frame_coefficients(lift)
    dg = fd.grad_field(g_field, grid, steps.first, 4)
    ddg = fd.hess_field(g_field, grid, steps.second, 4)
    gamma = christoffels(lift.g, dg)
    riem = lowered_riemann(lift.g, dg, ddg)
    return MetricField(
        grid=grid, g=lift.g, gamma=gamma, riemann=riem,
        riemann_frame=frame_riemann(riem, w),
    )


@dataclass(frozen=True)
class ClassificationResult:
    """Grid-level classification of a chart by its invariants."""

    is_isotropic: bool
    lambda_estimate: float
    is_isoparametric: bool
    alpha: Optional[np.ndarray]
    b_hat: np.ndarray
    max_abs_c: float
    l_identity_deviation: float
    b_spread: float
    alpha_spread: Optional[float]
    prop2_sign_ok: Optional[bool]
    prop7_consistent: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "is_isotropic": self.is_isotropic,
            "lambda_estimate": self.lambda_estimate,
            "is_isoparametric": self.is_isoparametric,
            "alpha": None if self.alpha is None else list(self.alpha),
            "b_hat": list(self.b_hat),
            "max_abs_c": self.max_abs_c,
            "l_identity_deviation": self.l_identity_deviation,
            "b_spread": self.b_spread,
            "alpha_spread": self.alpha_spread,
            "prop2_sign_ok": self.prop2_sign_ok,
            "prop7_consistent": self.prop7_consistent,
        }


def classify_analysis(a: Analysis, tol: float = 1e-5) -> ClassificationResult:
    """Classification from a completed analysis (>= 2 grid points)."""
    m, n = a.grid.shape
    if m < 2:
        raise InputError("classification needs at least two grid points")
    lam = a.lambda_estimate
    eye = np.eye(n)
    max_c = float(np.max(np.abs(a.C_closed)))
    l_dev = float(np.max(np.abs(a.L_structural - lam * eye)))
    b_sorted = np.sort(a.lift.b, axis=1)
    b_hat = np.mean(b_sorted, axis=0)
    b_spread = float(np.max(np.ptp(b_sorted, axis=0)))

    is_isotropic = max_c <= tol and l_dev <= tol
    is_isoparametric = max_c <= tol and b_spread <= tol

    alpha = None
    alpha_spread = None
    prop2 = None
    prop7 = None
    if is_isotropic:
        alpha_field = a.N - lam * a.lift.Y
        alpha = np.mean(alpha_field, axis=0)
        alpha_spread = float(np.max(np.abs(alpha_field - alpha)))
        prop2 = bool(lam >= -tol)
        if is_isoparametric:
            prop7 = bool(abs(lam) <= tol)
    return ClassificationResult(
        is_isotropic=is_isotropic,
        lambda_estimate=lam,
        is_isoparametric=is_isoparametric,
        alpha=alpha,
        b_hat=b_hat,
        max_abs_c=max_c,
        l_identity_deviation=l_dev,
        b_spread=b_spread,
        alpha_spread=alpha_spread,
        prop2_sign_ok=prop2,
        prop7_consistent=prop7,
    )


def classify(
    chart: Chart, grid: np.ndarray, tol: float = 1e-5,
    steps: FieldSteps = DEFAULT_STEPS,
) -> ClassificationResult:
    """Classify a chart as L-isotropic / L-isoparametric over a grid."""
    return classify_analysis(analyze(chart, grid, steps), tol)


@dataclass(frozen=True)
class CheckEntry:
    """One residual of the identity suite."""

    name: str
    residual: Optional[float]
    note: str = ""
    skipped: bool = False


def _b_groups(b_hat: np.ndarray, tol: float) -> list:
    """Group indices of b_hat whose values coincide within tol."""
    groups = []
    for i, val in enumerate(b_hat):
        for grp in groups:
            if abs(b_hat[grp[0]] - val) <= tol:
                grp.append(i)
                break
        else:
            groups.append([i])
    return groups


def identity_suite(
    chart: Chart,
    grid: np.ndarray,
    tol: float = 1e-5,
    steps: FieldSteps = DEFAULT_STEPS,
    analysis: Optional[Analysis] = None,
    metric: Optional[MetricField] = None,
) -> tuple:
    """Residuals of every identity the invariants must satisfy.

    Returns (entries, classification, analysis).  Conditional checks are
    reported as skipped (never silently passed) when their hypotheses do
    not hold on this chart.
    """
    a = analysis if analysis is not None else analyze(chart, grid, steps)
    m, n = a.grid.shape
    cls = classify_analysis(a, tol)
    lam = cls.lambda_estimate
    space = a.lift.space
    entries = []

    b = a.lift.b
    entries.append(CheckEntry("b_trace_zero", float(np.max(np.abs(b.sum(axis=1))))))
    entries.append(
        CheckEntry("b_square_one", float(np.max(np.abs((b**2).sum(axis=1) - 1.0))))
    )

    nsq = space.dot(a.delta_y, a.delta_y)
    trace_l = np.trace(a.L_structural, axis1=-2, axis2=-1)
    entries.append(
        CheckEntry(
            "l_trace_laplacian",
            float(np.max(np.abs(trace_l + nsq / (2.0 * n)))),
        )
    )

    sum_cov = np.einsum("miji->mj", a.cov_B)
    entries.append(
        CheckEntry(
            "covariant_b_contraction",
            float(np.max(np.abs(sum_cov - (n - 1) * a.C_closed))),
        )
    )

    if cls.is_isotropic:
        total = np.sum(a.cov_B**2, axis=(1, 2, 3))
        entries.append(
            CheckEntry(
                "covariant_b_square", float(np.max(np.abs(total - 2.0 * n * lam)))
            )
        )
        # Last coordinate of Delta_g Y = 2 n lambda Y + n alpha, converted
        # through the conformal rescaling g = rho^2 III.  The conversion
        # carries the gradient term and the alpha component; with the
        # gauge alpha^(n+4) = 0 and grad rho = 0 it collapses to the bare
        # Delta_III log rho = 2 n lambda rho^2.
        alpha_last = cls.alpha[-1]
        rho = a.lift.rho
        coord_res = (
            a.laplace_iii_logrho
            + (n - 1) * a.grad_iii_logrho_sq
            - 2.0 * n * lam * rho**2
            - n * rho * alpha_last
        )
        entries.append(
            CheckEntry("log_rho_laplacian", float(np.max(np.abs(coord_res))))
        )
        # Trace of the closed form of L with L = lambda I (gauge-free).
        trace_res = (
            a.laplace_iii_logrho
            + 0.5 * (n - 2) * a.grad_iii_logrho_sq
            - 0.5 * n
            - n * lam * rho**2
        )
        entries.append(
            CheckEntry("log_rho_trace_identity", float(np.max(np.abs(trace_res))))
        )
        grad_b = float(np.max(np.abs(a.cov_B)))
        consistent = (grad_b <= 10 * tol) == (abs(lam) <= tol)
        entries.append(
            CheckEntry(
                "parallel_b_iff_lambda_zero",
                0.0 if consistent else max(grad_b, abs(lam)),
                note=f"max|B_ij,k|={grad_b:.3e}, lambda={lam:.3e}",
            )
        )
        if lam > tol:
            rho2 = a.lift.rho**2
            margin = float(np.max(rho2 - 1.0 / (2.0 * lam)))
            entries.append(
                CheckEntry("rho_square_bound", max(margin, 0.0))
            )
        else:
            entries.append(
                CheckEntry(
                    "rho_square_bound", None,
                    note="vacuous (lambda ~ 0)", skipped=True,
                )
            )
    else:
        for name in (
            "covariant_b_square",
            "log_rho_laplacian",
            "log_rho_trace_identity",
            "parallel_b_iff_lambda_zero",
            "rho_square_bound",
        ):
            entries.append(
                CheckEntry(name, None, note="requires isotropic input", skipped=True)
            )

    if cls.is_isoparametric and n >= 3:
        groups = _b_groups(cls.b_hat, tol)
        if all(len(g) == 1 for g in groups) and len(groups) == n:
            mf = metric if metric is not None else metric_geometry(chart, grid, steps)
            rf = mf.riemann_frame
            worst = 0.0
            for i in range(n):
                total = np.zeros(m)
                for j in range(n):
                    if j == i:
                        continue
                    total += rf[:, i, j, i, j] / (b[:, i] - b[:, j])
                worst = max(worst, float(np.max(np.abs(total))))
            entries.append(CheckEntry("isoparametric_curvature_sum", worst))
        else:
            entries.append(
                CheckEntry(
                    "isoparametric_curvature_sum", None,
                    note="requires distinct Laguerre principal curvatures",
                    skipped=True,
                )
            )
    else:
        reason = (
            "requires isoparametric input" if n >= 3 else "requires n >= 3"
        )
        entries.append(
            CheckEntry(
                "isoparametric_curvature_sum", None, note=reason, skipped=True
            )
        )
    return entries, cls, a
