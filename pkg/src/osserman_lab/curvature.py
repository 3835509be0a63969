"""Curvature of metric fields at a point.

All tensors are computed in the coordinate basis.  The curvature sign is
pinned by calibration tests, not by convention prose: the stereographic
round sphere must come out with sectional curvature +1, so that

    K(x, y) = R(x, y, x, y) / (g(x,x) g(y,y) - g(x,y)^2)

and constant-curvature metrics satisfy R_ijkl = K (g_ik g_jl - g_il g_jk).
The Weyl tensor is the remainder R - C * g with C the Schouten tensor and
* the Kulkarni-Nomizu product; it is totally trace-free and invariant (as a
(1,3)-tensor) under conformal rescaling, both checked by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import ExprAst, eval_jet2
from .metric import MetricField

__all__ = [
    "Curvature4",
    "RicciData",
    "ScalarFieldData",
    "CurvatureError",
    "christoffel",
    "riemann",
    "ricci_scalar",
    "schouten",
    "weyl",
    "sectional",
    "scalar_field_geometry",
    "kulkarni_nomizu",
    "weyl_trace_residual",
    "point_curvature",
    "within",
]

ABS_FLOOR = 1e-12


class CurvatureError(ValueError):
    pass


def within(residual: float, scale: float, tol: float) -> bool:
    """Scale-relative comparison with an absolute floor."""
    return residual <= max(tol * scale, ABS_FLOOR)


@dataclass
class Curvature4:
    """Covariant 4-index curvature-type tensor at a point."""

    components: np.ndarray  # (n, n, n, n)
    basis: str = "coordinate"  # coordinate | frame
    flag: Optional[str] = None

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.components)))

    def symmetry_residuals(self) -> dict:
        r = self.components
        return {
            "antisym_first_pair": float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))),
            "antisym_second_pair": float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))),
            "pair_symmetry": float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))),
            "first_bianchi": float(
                np.max(np.abs(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)))
            ),
        }

    def check_symmetries(self, tol: float = 1e-8) -> None:
        scale = self.scale
        for name, residual in self.symmetry_residuals().items():
            if not within(residual, scale, tol):
                raise CurvatureError(f"{name} violated: residual {residual:g} at scale {scale:g}")


@dataclass
class RicciData:
    ricci: np.ndarray  # (n, n)
    scalar: float


@dataclass
class ScalarFieldData:
    """Gradient/Hessian data of a scalar field at a point.

    gradient: raised index (vector), hessian: covariant bilinear form,
    operator: the metric-raise of the hessian, grad_norm_sq: g(grad, grad).
    """

    gradient: np.ndarray
    hessian: np.ndarray
    operator: np.ndarray
    grad_norm_sq: float
    raw_gradient: np.ndarray  # plain partials d_i f
    raw_hessian: np.ndarray   # plain second partials d_i d_j f


def christoffel(metric: MetricField, point) -> np.ndarray:
    """Levi-Civita coefficients Gamma[k, i, j] = Gamma^k_ij, symmetric in (i, j)."""
    g, dg, _ = metric.jets(point)
    ginv = metric.inverse(point, g=g)
    n = metric.dimension
    # lowered[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    lowered = np.empty((n, n, n))
    for l in range(n):
        lowered[l] = dg[:, :, l] + dg[:, :, l].T - dg[l]
    return 0.5 * np.einsum("kl,lij->kij", ginv, lowered)


def _christoffel_and_derivative(metric: MetricField, point):
    g, dg, d2g = metric.jets(point)
    ginv = metric.inverse(point, g=g)
    n = metric.dimension
    lowered = np.empty((n, n, n))
    dlowered = np.empty((n, n, n, n))
    for l in range(n):
        lowered[l] = dg[:, :, l] + dg[:, :, l].T - dg[l]
        for m in range(n):
            dlowered[m, l] = d2g[m, :, :, l] + d2g[m, :, :, l].T - d2g[m, l]
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, lowered)
    dginv = -np.einsum("la,mab,bp->mlp", ginv, dg, ginv)
    dgamma = 0.5 * (
        np.einsum("mlp,pjk->mljk", dginv, lowered)
        + np.einsum("lp,mpjk->mljk", ginv, dlowered)
    )
    return g, ginv, gamma, dgamma


def riemann(metric: MetricField, point) -> Curvature4:
    """Covariant curvature tensor R[i, j, k, l] in the calibrated sign."""
    g, _, gamma, dgamma = _christoffel_and_derivative(metric, point)
    # up[l, k, i, j]: curvature operator of the pair (i, j) acting on k
    up = (
        np.einsum("iljk->lkij", dgamma)
        - np.einsum("jlik->lkij", dgamma)
        + np.einsum("lim,mjk->lkij", gamma, gamma)
        - np.einsum("ljm,mik->lkij", gamma, gamma)
    )
    r4 = -np.einsum("lm,mkij->ijkl", g, up)
    return Curvature4(r4, basis="coordinate")


def ricci_scalar(metric: MetricField, point, r4: Optional[Curvature4] = None) -> RicciData:
    """Ricci tensor rho_ij = g^{kl} R_kilj and scalar tau = g^{ij} rho_ij."""
    if r4 is None:
        r4 = riemann(metric, point)
    ginv = metric.inverse(point)
    ricci = np.einsum("kl,kilj->ij", ginv, r4.components)
    scalar = float(np.einsum("ij,ij->", ginv, ricci))
    return RicciData(ricci, scalar)


def kulkarni_nomizu(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric bilinear forms."""
    return (
        np.einsum("ik,jl->ijkl", a, b)
        + np.einsum("jl,ik->ijkl", a, b)
        - np.einsum("il,jk->ijkl", a, b)
        - np.einsum("jk,il->ijkl", a, b)
    )


def schouten(metric: MetricField, point, ricci: Optional[RicciData] = None) -> np.ndarray:
    """Schouten tensor; the unique C with R = C * g + W for trace-free W."""
    n = metric.dimension
    if n < 3:
        raise CurvatureError("Schouten tensor needs dimension >= 3")
    if ricci is None:
        ricci = ricci_scalar(metric, point)
    g = metric.value(point)
    return (ricci.ricci - ricci.scalar / (2.0 * (n - 1)) * g) / (n - 2)


def weyl(metric: MetricField, point, r4: Optional[Curvature4] = None) -> Curvature4:
    """Weyl tensor W = R - C * g.  Identically zero (flagged) for n = 2, 3."""
    n = metric.dimension
    if n < 4:
        zero = np.zeros((n, n, n, n))
        return Curvature4(zero, basis="coordinate", flag=f"trivial in dimension {n}")
    if r4 is None:
        r4 = riemann(metric, point)
    ric = ricci_scalar(metric, point, r4=r4)
    c = schouten(metric, point, ricci=ric)
    g = metric.value(point)
    w = r4.components - kulkarni_nomizu(c, g)
    return Curvature4(w, basis="coordinate")


def weyl_trace_residual(metric: MetricField, point, w: Optional[Curvature4] = None) -> float:
    """Largest metric trace of the Weyl tensor, normalized by its scale."""
    if w is None:
        w = weyl(metric, point)
    ginv = metric.inverse(point)
    tr = np.einsum("ik,ijkl->jl", ginv, w.components)
    return float(np.max(np.abs(tr)))


def sectional(metric: MetricField, point, x, y, r4: Optional[Curvature4] = None) -> float:
    """Sectional curvature of the plane spanned by x and y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g = metric.value(point)
    gxx = float(x @ g @ x)
    gyy = float(y @ g @ y)
    gxy = float(x @ g @ y)
    denom = gxx * gyy - gxy * gxy
    norm2 = float(x @ x) * float(y @ y)
    if abs(denom) <= 1e-12 * max(norm2, ABS_FLOOR):
        raise CurvatureError("degenerate plane: g-area of the span vanishes")
    if r4 is None:
        r4 = riemann(metric, point)
    num = float(np.einsum("ijkl,i,j,k,l->", r4.components, x, y, x, y))
    return num / denom


def scalar_field_geometry(metric: MetricField, f: ExprAst, point) -> ScalarFieldData:
    """Gradient, covariant Hessian, Hessian operator and |grad f|^2 at a point."""
    pt = np.asarray(point, dtype=float)
    jet = eval_jet2(f, pt)
    gamma = christoffel(metric, pt)
    ginv = metric.inverse(pt)
    hess = jet.hessian - np.einsum("kij,k->ij", gamma, jet.gradient)
    grad = ginv @ jet.gradient
    op = ginv @ hess
    grad_sq = float(jet.gradient @ ginv @ jet.gradient)
    return ScalarFieldData(grad, hess, op, grad_sq, jet.gradient, jet.hessian)


@dataclass
class PointCurvature:
    """Bundle of per-point curvature data reused across operator evaluations."""

    metric: MetricField
    point: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    riemann: Curvature4
    ricci: RicciData
    weyl: Curvature4

    @property
    def dimension(self) -> int:
        return self.metric.dimension


def point_curvature(metric: MetricField, point) -> PointCurvature:
    pt = np.asarray(point, dtype=float)
    g = metric.value(pt)
    ginv = metric.inverse(pt, g=g)
    r4 = riemann(metric, pt)
    ric = ricci_scalar(metric, pt, r4=r4)
    w4 = weyl(metric, pt, r4=r4)
    return PointCurvature(metric, pt, g, ginv, r4, ric, w4)
