"""Closed-form integration of the curvature-line frame system.

For constants b_i (trace-free, unit-square, pairwise distinct and
nonzero), an orthogonal matrix C with nonvanishing diagonal, and free
vectors beta1, beta3, gamma1, the integrated position and second frame
vector are, in the privileged coordinates v,

    Y^1 = sum_k [ v_k^2 b_k + sqrt2 v_k c_k (beta1_k - beta3_k b_k)
                  + c_k^2 beta3_k (beta3_k b_k / 2 - beta1_k) + gamma1_k ],
    Y^2 = -Y^1,     Y^3 = sum v_k^2 - 1/2,    Y^(n+4) = Y^3 + 1,
    Y^(s+3) = sqrt2 sum_k v_k C[k, s],

    eta^1 = A + 1/2,  eta^2 = -A + 1/2,
    eta^3 = eta^(n+4) = r(v),
    eta^(s+3) = sum_k (sqrt2 v_k b_k + d_k) C[k, s],

with c_k = C[k, k], d_k = c_k (beta1_k - beta3_k b_k) and
A = sum_k [ v_k^2 b_k^2 + sqrt2 v_k b_k d_k + d_k^2 / 2 ].  The scalar
invariants are rho(v) = 1/2 + sum v_k^2 and r(v) = sum v_k^2 b_k + phi/2
where

    phi = -2 sum_k [ c_k^2 beta3_k (beta3_k b_k / 2 - beta1_k) + gamma1_k ].

The remaining integration constants (gamma3, the alpha's and the psi's)
are fully determined by the lightlike/pairing constraints and are
eliminated here, never exposed.  After the per-line reparametrization
vbar_k = sqrt2 v_k b_k the immersion and its normal take the closed form

    x^1 = r/rho,
    x^(s+1) = sum_k [ vbar_k (1 - (r/rho) bbar_k) + d_k ] C[k, s],
    xi^1 = (rho - 1)/rho,
    xi^(s+1) = (1/rho) sum_k vbar_k bbar_k C[k, s],

with bbar_k = 1/b_k, which for C = I and d = 0 is exactly the explicit
family with constants a_k = 1/b_k and phi-shift phi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Callable

import numpy as np

from . import fd
from .charts import Chart
from .errors import ParameterError
from .frames import lift_arrays
from .spaces import laguerre_space

__all__ = [
    "ConstructionConstants",
    "ConstructedMaps",
    "ValidationReport",
    "validate_constants",
    "random_orthogonal",
    "b_from_curvatures",
    "build_position",
    "build_normal_map",
    "build_immersion",
    "frobenius_report",
]

UNBOUNDED = (-np.inf, np.inf)


@dataclass(frozen=True)
class ConstructionConstants:
    """Free integration data: b, the orthogonal matrix, beta1/beta3/gamma1."""

    b: np.ndarray
    cmat: np.ndarray
    beta1: np.ndarray
    beta3: np.ndarray
    gamma1: np.ndarray

    def __post_init__(self):
        for name in ("b", "beta1", "beta3", "gamma1"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        cmat = np.array(self.cmat, dtype=float)
        cmat.flags.writeable = False
        object.__setattr__(self, "cmat", cmat)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def diag(self) -> np.ndarray:
        return np.diagonal(self.cmat)

    @property
    def phi(self) -> float:
        c = self.diag
        return float(
            -2.0
            * np.sum(
                c**2 * self.beta3 * (0.5 * self.beta3 * self.b - self.beta1)
                + self.gamma1
            )
        )

    def to_json_dict(self) -> dict:
        return {
            "b": self.b.tolist(),
            "cmat": self.cmat.tolist(),
            "beta1": self.beta1.tolist(),
            "beta3": self.beta3.tolist(),
            "gamma1": self.gamma1.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConstructionConstants":
        n = len(data["b"])
        return cls(
            b=np.asarray(data["b"], dtype=float),
            cmat=np.asarray(data["cmat"], dtype=float).reshape(n, n),
            beta1=np.asarray(data.get("beta1", np.zeros(n)), dtype=float),
            beta3=np.asarray(data.get("beta3", np.zeros(n)), dtype=float),
            gamma1=np.asarray(data.get("gamma1", np.zeros(n)), dtype=float),
        )

    @classmethod
    def simple(cls, b, cmat=None, beta1=None, beta3=None, gamma1=None):
        b = np.asarray(b, dtype=float)
        n = b.shape[0]
        return cls(
            b=b,
            cmat=np.eye(n) if cmat is None else np.asarray(cmat, dtype=float),
            beta1=np.zeros(n) if beta1 is None else np.asarray(beta1, dtype=float),
            beta3=np.zeros(n) if beta3 is None else np.asarray(beta3, dtype=float),
            gamma1=np.zeros(n) if gamma1 is None else np.asarray(gamma1, dtype=float),
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple
    values: dict


def validate_constants(c: ConstructionConstants) -> ValidationReport:
    """Check every admissibility condition; failures are enumerated."""
    failures = []
    b = c.b
    n = c.n
    values = {
        "b_trace": float(abs(b.sum())),
        "b_square": float(abs((b**2).sum() - 1.0)),
        "orthogonality": float(np.max(np.abs(c.cmat.T @ c.cmat - np.eye(n)))),
        "min_abs_b": float(np.min(np.abs(b))),
        "min_b_gap": float(np.min(np.abs(np.subtract.outer(b, b))[~np.eye(n, dtype=bool)]))
        if n > 1
        else float("inf"),
        "min_abs_diag": float(np.min(np.abs(c.diag))),
    }
    if c.cmat.shape != (n, n):
        failures.append(f"matrix shape {c.cmat.shape} != ({n}, {n})")
    if not all(v.shape == (n,) for v in (c.beta1, c.beta3, c.gamma1)):
        failures.append("beta1/beta3/gamma1 must have length n")
    if values["b_trace"] > 1e-12:
        failures.append(f"sum b_i = {values['b_trace']:.3e} exceeds 1e-12")
    if values["b_square"] > 1e-12:
        failures.append(f"|sum b_i^2 - 1| = {values['b_square']:.3e} exceeds 1e-12")
    if values["min_abs_b"] <= 1e-9:
        failures.append("some b_i is (numerically) zero")
    if values["min_b_gap"] <= 1e-9:
        failures.append("b_i are not pairwise distinct")
    if values["orthogonality"] > 1e-12:
        failures.append(
            f"matrix is not orthogonal: max |C'C - I| = {values['orthogonality']:.3e}"
        )
    if values["min_abs_diag"] <= 1e-12:
        failures.append("matrix has a vanishing diagonal entry")
    return ValidationReport(ok=not failures, failures=tuple(failures), values=values)


def _require_valid(c: ConstructionConstants) -> None:
    report = validate_constants(c)
    if not report.ok:
        raise ParameterError("; ".join(report.failures))


def random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Seeded Haar-orthogonal matrix, resampled until every diagonal
    entry has magnitude >= 1e-3 (the construction needs c_kk != 0)."""
    if n < 2:
        raise ParameterError("need n >= 2")
    rng = np.random.default_rng(seed)
    while True:
        A = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(A)
        Q = Q * np.sign(np.diag(R))
        if np.min(np.abs(np.diag(Q))) >= 1e-3:
            return Q


def b_from_curvatures(a) -> np.ndarray:
    """Trace-free unit b-vector from distinct nonzero principal curvatures.

    Accepts ints, floats or decimal strings; the radii, their mean and
    the differences are taken in exact rational arithmetic so that
    sum b = 0 and sum b^2 = 1 hold to the last float digit.
    """
    fracs = [Fraction(str(v)) for v in a]
    if any(f == 0 for f in fracs):
        raise ParameterError("curvatures must be nonzero")
    if len(set(fracs)) != len(fracs):
        raise ParameterError("curvatures must be pairwise distinct")
    radii = [1 / f for f in fracs]
    mean = sum(radii, Fraction(0)) / len(radii)
    diffs = [mean - r for r in radii]
    rho2 = sum(d * d for d in diffs)
    scale = 1.0 / sqrt(float(rho2))
    return np.array([float(d) * scale for d in diffs])


def build_position(c: ConstructionConstants) -> Callable:
    """Evaluator v -> Y(v) in R^(n+4), vectorised over batches."""
    _require_valid(c)
    b, cmat, ck = c.b, c.cmat, c.diag
    d = ck * (c.beta1 - c.beta3 * b)
    const1 = float(np.sum(ck**2 * c.beta3 * (0.5 * c.beta3 * b - c.beta1) + c.gamma1))
    n = c.n

    def position(V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        m = V.shape[0]
        Y = np.empty((m, n + 4))
        y1 = np.sum(V**2 * b, axis=1) + np.sqrt(2.0) * V @ d + const1
        vsq = np.sum(V**2, axis=1)
        Y[:, 0] = y1
        Y[:, 1] = -y1
        Y[:, 2] = vsq - 0.5
        Y[:, 3:-1] = np.sqrt(2.0) * V @ cmat
        Y[:, -1] = vsq + 0.5
        return Y

    return position


def build_normal_map(c: ConstructionConstants) -> Callable:
    """Evaluator v -> eta(v) in R^(n+4), vectorised over batches."""
    _require_valid(c)
    b, cmat, ck = c.b, c.cmat, c.diag
    d = ck * (c.beta1 - c.beta3 * b)
    const3 = -float(
        np.sum(ck**2 * c.beta3 * (0.5 * c.beta3 * b - c.beta1) + c.gamma1)
    )
    n = c.n

    def normal_map(V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        m = V.shape[0]
        eta = np.empty((m, n + 4))
        A = np.sum(V**2 * b**2, axis=1) + np.sqrt(2.0) * V @ (b * d) + 0.5 * np.sum(d**2)
        r = np.sum(V**2 * b, axis=1) + const3
        eta[:, 0] = A + 0.5
        eta[:, 1] = -A + 0.5
        eta[:, 2] = r
        eta[:, 3:-1] = (np.sqrt(2.0) * V * b) @ cmat + np.broadcast_to(d @ cmat, (m, n))
        eta[:, -1] = r
        return eta

    return normal_map


@dataclass(frozen=True, eq=False)
class ConstructedMaps:
    """Closed-form maps of one admissible constant set.

    ``position``, ``normal_map``, ``rho`` and ``mean_radius`` take the
    privileged coordinates v; ``x`` and ``xi`` (and the derived chart)
    take the reparametrized curvature-line coordinates vbar.
    """

    constants: ConstructionConstants
    position: Callable
    normal_map: Callable
    rho: Callable
    mean_radius: Callable
    x: Callable
    xi: Callable
    chart: Chart


def build_immersion(c: ConstructionConstants) -> ConstructedMaps:
    """Assemble every closed-form map, with exact jets for the chart."""
    _require_valid(c)
    b, cmat, ck = c.b, c.cmat, c.diag
    dconst = ck * (c.beta1 - c.beta3 * b)
    bbar = 1.0 / b
    phi = c.phi
    n = c.n

    def rho_v(V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        return 0.5 + np.sum(V**2, axis=1)

    def r_v(V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        return np.sum(V**2 * b, axis=1) + 0.5 * phi

    def _scalars(Vbar):
        Vbar = np.atleast_2d(np.asarray(Vbar, dtype=float))
        rho = 0.5 * (1.0 + np.sum((Vbar * bbar) ** 2, axis=1))
        r = 0.5 * np.sum(Vbar**2 * bbar, axis=1) + 0.5 * phi
        return Vbar, rho, r

    def x_eval(Vbar):
        Vbar, rho, r = _scalars(Vbar)
        q = r / rho
        w = Vbar * (1.0 - q[:, None] * bbar) + dconst
        out = np.empty((Vbar.shape[0], n + 1))
        out[:, 0] = q
        out[:, 1:] = w @ cmat
        return out

    def xi_eval(Vbar):
        Vbar, rho, _ = _scalars(Vbar)
        out = np.empty((Vbar.shape[0], n + 1))
        out[:, 0] = (rho - 1.0) / rho
        out[:, 1:] = (Vbar * bbar) @ cmat / rho[:, None]
        return out

    def x_jet(Vbar):
        Vbar, rho, r = _scalars(Vbar)
        m = Vbar.shape[0]
        q = r / rho
        dr = bbar * Vbar                     # d r / d vbar_i
        drho = bbar**2 * Vbar
        dq = dr / rho[:, None] - (r / rho**2)[:, None] * drho
        eye = np.eye(n)
        ddr = bbar * eye                     # constant diagonal second partials
        ddrho = bbar**2 * eye
        ddq = (
            ddr[None] / rho[:, None, None]
            - np.einsum("mi,mj->mij", dr, drho) / (rho**2)[:, None, None]
            - np.einsum("mj,mi->mij", dr, drho) / (rho**2)[:, None, None]
            - (r / rho**2)[:, None, None] * ddrho[None]
            + 2.0 * (r / rho**3)[:, None, None] * np.einsum("mi,mj->mij", drho, drho)
        )
        x = x_eval(Vbar)
        # w_k = vbar_k (1 - q bbar_k) + d_k, so
        # dw[m, i, k] = delta_ik (1 - q bbar_k) - dq_i bbar_k vbar_k
        dw = eye[None] * (1.0 - q[:, None, None] * bbar[None, None, :]) - np.einsum(
            "mi,k,mk->mik", dq, bbar, Vbar
        )
        dx = np.empty((m, n, n + 1))
        dx[:, :, 0] = dq
        dx[:, :, 1:] = np.einsum("mik,ks->mis", dw, cmat)
        ddw = (
            -np.einsum("mj,ik,k->mijk", dq, eye, bbar)
            - np.einsum("mi,jk,k->mijk", dq, eye, bbar)
            - np.einsum("mij,k,mk->mijk", ddq, bbar, Vbar)
        )
        ddx = np.empty((m, n, n, n + 1))
        ddx[:, :, :, 0] = ddq
        ddx[:, :, :, 1:] = np.einsum("mijk,ks->mijs", ddw, cmat)
        return x, dx, ddx

    chart = Chart(
        n=n,
        domain=tuple(UNBOUNDED for _ in range(n)),
        evaluator=x_eval,
        jet=x_jet,
        normal=xi_eval,
        name="constructed",
        params={"b": b.tolist(), "phi": phi},
    )
    return ConstructedMaps(
        constants=c,
        position=build_position(c),
        normal_map=build_normal_map(c),
        rho=rho_v,
        mean_radius=r_v,
        x=x_eval,
        xi=xi_eval,
        chart=chart,
    )


def frobenius_report(maps: ConstructedMaps, grid: np.ndarray, step: float = 1e-3) -> dict:
    """Numerical residuals of the integrability conditions on the output.

    Verifies, over the v-grid: vanishing mixed partials of Y, the
    diagonal second-order equation Y_,ii/g_ii - g_ii,i Y_,i/(2 g_ii^2)
    = N + b_i P with the constant N = (0,0,1,0...,1), the first-order
    equation eta_,i = b_i Y_,i, diagonality of <Y_,i, Y_,j>, constancy
    of the pipeline vector N over the derived chart, and constancy of
    the Laguerre principal curvatures.
    """
    c = maps.constants
    n = c.n
    space = laguerre_space(n)
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    m = grid.shape[0]

    dY = fd.grad_field(maps.position, grid, step, 4)       # (m, a, n+4)
    ddY = fd.hess_field(maps.position, grid, step, 4)      # (m, a, b, n+4)
    deta = fd.grad_field(maps.normal_map, grid, step, 4)

    off = ddY.copy()
    idx = np.arange(n)
    off[:, idx, idx] = 0.0
    mixed = float(np.max(np.abs(off)))

    gram = np.einsum("mal,l,mbl->mab", dY, space.signs, dY)
    gram_off = gram.copy()
    gram_off[:, idx, idx] = 0.0
    tangent_off = float(np.max(np.abs(gram_off)))

    gdiag = np.diagonal(gram, axis1=1, axis2=2)            # (m, i)

    def gdiag_field(V):
        dYv = fd.grad_field(maps.position, V, step, 4)
        gv = np.einsum("mal,l,mal->ma", dYv, space.signs, dYv)
        return gv

    dgdiag = fd.grad_field(gdiag_field, grid, 10 * step, 4)   # (m, a, i)

    N_const = np.zeros(n + 4)
    N_const[2] = 1.0
    N_const[-1] = 1.0
    P = np.zeros(n + 4)
    P[0] = 1.0
    P[1] = -1.0
    second = 0.0
    for i in range(n):
        lhs = (
            ddY[:, i, i, :] / gdiag[:, i, None]
            - dgdiag[:, i, i, None] * dY[:, i, :] / (2.0 * gdiag[:, i, None] ** 2)
        )
        rhs = N_const[None, :] + c.b[i] * P[None, :]
        second = max(second, float(np.max(np.abs(lhs - rhs))))

    eta_res = float(np.max(np.abs(deta - c.b[None, :, None] * dY)))

    # Pipeline checks on the derived curvature-line chart (vbar coords).
    from .invariants import DEFAULT_STEPS, _n_field

    vbar = np.sqrt(2.0) * grid * c.b
    lift = lift_arrays(maps.chart, vbar)
    nhat = _n_field(maps.chart, DEFAULT_STEPS)(vbar)
    nhat_spread = float(np.max(np.abs(nhat - nhat.mean(axis=0))))
    b_sorted = np.sort(lift.b, axis=1)
    b_spread = float(np.max(np.ptp(b_sorted, axis=0))) if m > 1 else 0.0

    return {
        "mixed_partials": mixed,
        "second_equation": second,
        "eta_derivative": eta_res,
        "tangent_diagonality": tangent_off,
        "pipeline_n_constancy": nhat_spread,
        "pipeline_b_constancy": b_spread,
    }


def constants_to_json(c: ConstructionConstants) -> str:
    return json.dumps(c.to_json_dict(), indent=2, sort_keys=True)


def constants_from_json(text: str) -> ConstructionConstants:
    return ConstructionConstants.from_json_dict(json.loads(text))
