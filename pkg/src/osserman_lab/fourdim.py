"""Self-dual / anti-self-dual Weyl machinery in dimension four.

Two-forms at a point split into +-1 eigenspaces of the Hodge star when the
signature is Riemannian (++++) or neutral (++--).  In an orthonormal frame
e_1..e_4 with signs eps_a, an orthogonal basis of the two eigenspaces is

    E_1pm = (e^1^e^2 +- eps3*eps4 e^3^e^4) / sqrt(2)
    E_2pm = (e^1^e^3 -+ eps2*eps4 e^2^e^4) / sqrt(2)
    E_3pm = (e^1^e^4 +- eps2*eps3 e^2^e^3) / sqrt(2)

The 3x3 matrices W+ and W- hold the Weyl components in these bases.  They
are populated from twelve explicit combinations of frame Weyl components
and cross-validated against the direct bilinear projection of the Weyl
tensor onto the bases (the two agree up to the +-1 norms of the E_i in
neutral signature).  Verdicts use norms and spectra, which do not depend on
the frame choice; swapping orientation exchanges the two matrices.

Lorentzian signature admits no real splitting; there, self-dual,
anti-self-dual and conformally flat all coincide and the verdict degrades
to a conformal-flatness check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curvature import PointCurvature, point_curvature, within
from .linalg import Frame, metric_frame, sym_eigen
from .metric import MetricField

__all__ = [
    "FourDimError",
    "LambdaBasis",
    "WeylPM",
    "lambda_pm_basis",
    "weyl_pm",
    "selfduality_verdict",
    "SelfDualityReport",
    "weyl_norm_decomposition",
]


class FourDimError(ValueError):
    pass


def _wedge(a: int, b: int) -> np.ndarray:
    """Frame components of e^a ^ e^b (0-based indices)."""
    m = np.zeros((4, 4))
    m[a, b] = 1.0
    m[b, a] = -1.0
    return m


@dataclass
class LambdaBasis:
    """Bases of the +-1 Hodge eigenspaces, as frame-component two-forms."""

    plus: tuple    # three antisymmetric 4x4 arrays
    minus: tuple
    norms: tuple   # <E_i, E_i> under the Lambda^2 inner product, each +-1
    frame: Frame
    orientation: int


def _signature_guard(frame: Frame) -> None:
    if frame.dimension != 4:
        raise FourDimError("self-dual decomposition lives in dimension 4")
    eps = frame.epsilons.epsilons
    negatives = sum(1 for e in eps if e == -1)
    if negatives in (1, 3):
        raise FourDimError(
            "Lorentzian signature has no real self-dual splitting; "
            "use selfduality_verdict, which falls back to a conformal-flatness check"
        )


def lambda_pm_basis(frame: Frame) -> LambdaBasis:
    """Orthogonal bivector bases of the two Hodge eigenspaces for a frame."""
    _signature_guard(frame)
    e1, e2, e3, e4 = frame.epsilons.epsilons
    s = 1.0 / np.sqrt(2.0)
    plus = (
        s * (_wedge(0, 1) + e3 * e4 * _wedge(2, 3)),
        s * (_wedge(0, 2) - e2 * e4 * _wedge(1, 3)),
        s * (_wedge(0, 3) + e2 * e3 * _wedge(1, 2)),
    )
    minus = (
        s * (_wedge(0, 1) - e3 * e4 * _wedge(2, 3)),
        s * (_wedge(0, 2) + e2 * e4 * _wedge(1, 3)),
        s * (_wedge(0, 3) - e2 * e3 * _wedge(1, 2)),
    )
    norms = (
        (e1 * e2 + e3 * e4) // 2,
        (e1 * e3 + e2 * e4) // 2,
        (e1 * e4 + e2 * e3) // 2,
    )
    return LambdaBasis(plus, minus, norms, frame, frame.orientation())


def lambda2_inner(alpha: np.ndarray, beta: np.ndarray, eps: np.ndarray) -> float:
    """Induced inner product of two frame-component two-forms."""
    raised = eps[:, None] * eps[None, :] * beta
    return 0.5 * float(np.sum(alpha * raised))


@dataclass
class WeylPM:
    """Self-dual and anti-self-dual Weyl matrices at a point."""

    w_plus: np.ndarray   # 3x3 symmetric, trace-free
    w_minus: np.ndarray
    frame: Frame
    orientation: int
    basis: LambdaBasis = field(repr=False, default=None)

    @property
    def scale(self) -> float:
        return max(float(np.max(np.abs(self.w_plus))), float(np.max(np.abs(self.w_minus))))

    def spectra(self):
        return sym_eigen(self.w_plus), sym_eigen(self.w_minus)


def _frame_weyl(data: PointCurvature, frame: Frame) -> np.ndarray:
    e = frame.vectors
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", data.weyl.components, e, e, e, e)


def _projection_matrix(wf: np.ndarray, forms: tuple, eps: np.ndarray) -> np.ndarray:
    """Bilinear projection Q_ij = W(E_i, E_j) with frame indices raised."""
    q = np.zeros((3, 3))
    raised = [eps[:, None] * eps[None, :] * f for f in forms]
    for i in range(3):
        for j in range(3):
            q[i, j] = 0.25 * float(np.einsum("abcd,ab,cd->", wf, raised[i], raised[j]))
    return q


def weyl_pm(metric: MetricField, point, frame: Optional[Frame] = None,
            data: Optional[PointCurvature] = None, cross_check_tol: float = 1e-8) -> WeylPM:
    """The two 3x3 Weyl blocks, component formulas cross-checked by projection."""
    if metric.dimension != 4:
        raise FourDimError("self-dual decomposition lives in dimension 4")
    if data is None:
        data = point_curvature(metric, point)
    if frame is None:
        frame = metric_frame(data.g, metric.signature)
    gram = frame.vectors.T @ data.g @ frame.vectors
    if np.max(np.abs(gram - np.diag(frame.epsilons.as_array()))) > 1e-8:
        raise FourDimError("frame is not orthonormal for the metric at this point")
    basis = lambda_pm_basis(frame)
    eps_arr = frame.epsilons.as_array()
    wf = _frame_weyl(data, frame)
    _, e2, e3, e4 = frame.epsilons.epsilons

    def W(a, b, c, d):
        return wf[a - 1, b - 1, c - 1, d - 1]

    plus = np.empty((3, 3))
    minus = np.empty((3, 3))
    plus[0, 0] = 0.5 * (W(1, 2, 1, 2) + W(3, 4, 3, 4) + 2 * e3 * e4 * W(1, 2, 3, 4))
    minus[0, 0] = 0.5 * (W(1, 2, 1, 2) + W(3, 4, 3, 4) - 2 * e3 * e4 * W(1, 2, 3, 4))
    plus[1, 1] = 0.5 * (W(1, 3, 1, 3) + W(2, 4, 2, 4) - 2 * e2 * e4 * W(1, 3, 2, 4))
    minus[1, 1] = 0.5 * (W(1, 3, 1, 3) + W(2, 4, 2, 4) + 2 * e2 * e4 * W(1, 3, 2, 4))
    plus[2, 2] = 0.5 * (W(1, 4, 1, 4) + W(2, 3, 2, 3) + 2 * e2 * e3 * W(1, 4, 2, 3))
    minus[2, 2] = 0.5 * (W(1, 4, 1, 4) + W(2, 3, 2, 3) - 2 * e2 * e3 * W(1, 4, 2, 3))
    plus[0, 1] = plus[1, 0] = 0.5 * (
        W(1, 2, 1, 3) - e2 * e4 * W(1, 2, 2, 4) + e3 * e4 * W(3, 4, 1, 3) - e2 * e3 * W(3, 4, 2, 4)
    )
    minus[0, 1] = minus[1, 0] = 0.5 * (
        W(1, 2, 1, 3) + e2 * e4 * W(1, 2, 2, 4) - e3 * e4 * W(3, 4, 1, 3) - e2 * e3 * W(3, 4, 2, 4)
    )
    plus[0, 2] = plus[2, 0] = 0.5 * (
        W(1, 2, 1, 4) + e2 * e3 * W(1, 2, 2, 3) + e3 * e4 * W(3, 4, 1, 4) + e2 * e4 * W(3, 4, 2, 3)
    )
    minus[0, 2] = minus[2, 0] = 0.5 * (
        W(1, 2, 1, 4) - e2 * e3 * W(1, 2, 2, 3) - e3 * e4 * W(3, 4, 1, 4) + e2 * e4 * W(3, 4, 2, 3)
    )
    plus[1, 2] = plus[2, 1] = 0.5 * (
        W(1, 3, 1, 4) + e2 * e3 * W(1, 3, 2, 3) - e2 * e4 * W(2, 4, 1, 4) - e3 * e4 * W(2, 4, 2, 3)
    )
    minus[1, 2] = minus[2, 1] = 0.5 * (
        W(1, 3, 1, 4) - e2 * e3 * W(1, 3, 2, 3) + e2 * e4 * W(2, 4, 1, 4) - e3 * e4 * W(2, 4, 2, 3)
    )

    # cross-validation: direct projection, adjusted by the basis norms
    d = np.diag([float(n) for n in basis.norms])
    q_plus = _projection_matrix(wf, basis.plus, eps_arr)
    q_minus = _projection_matrix(wf, basis.minus, eps_arr)
    scale = max(float(np.max(np.abs(plus))), float(np.max(np.abs(minus))))
    dev = max(
        float(np.max(np.abs(plus - d @ q_plus @ d))),
        float(np.max(np.abs(minus - d @ q_minus @ d))),
    )
    if not within(dev, scale, cross_check_tol):
        raise FourDimError(
            f"component formulas and direct projection disagree by {dev:g} at scale {scale:g}"
        )
    return WeylPM(plus, minus, frame, basis.orientation, basis)


@dataclass
class SelfDualityReport:
    self_dual: bool
    anti_self_dual: bool
    evidence: list  # per point: dict with norms and scale
    tolerance: float
    mode: str = "hodge"  # hodge | lorentzian-lcf


def selfduality_verdict(metric: MetricField, points, tol: float = 1e-8) -> SelfDualityReport:
    """Do W- (self-dual) or W+ (anti-self-dual) vanish at all sample points?"""
    if metric.dimension != 4:
        raise FourDimError("self-dual decomposition lives in dimension 4")
    if metric.signature.is_lorentzian:
        evidence = []
        flat_ok = True
        for point in points:
            data = point_curvature(metric, point)
            norm = data.weyl.scale
            r_scale = max(data.riemann.scale, 1.0)
            evidence.append({"point": list(np.asarray(point, float)), "weyl_norm": norm})
            flat_ok = flat_ok and within(norm, r_scale, tol)
        return SelfDualityReport(flat_ok, flat_ok, evidence, tol, mode="lorentzian-lcf")
    sd, asd = True, True
    evidence = []
    for point in points:
        pm = weyl_pm(metric, point)
        norm_plus = float(np.max(np.abs(pm.w_plus)))
        norm_minus = float(np.max(np.abs(pm.w_minus)))
        scale = pm.scale
        evidence.append(
            {
                "point": list(np.asarray(point, float)),
                "w_plus_norm": norm_plus,
                "w_minus_norm": norm_minus,
                "scale": scale,
            }
        )
        sd = sd and norm_minus <= tol * (1.0 + scale)
        asd = asd and norm_plus <= tol * (1.0 + scale)
    return SelfDualityReport(sd, asd, evidence, tol)


def weyl_norm_decomposition(metric: MetricField, point) -> tuple:
    """(full restricted norm, block norm) of the Weyl tensor on two-forms.

    Returns (1/4 W_abcd W^abcd, sum n_i n_j ((W+_ij)^2 + (W-_ij)^2)); the two
    must agree, which pins the normalization of the W+- matrices.
    """
    data = point_curvature(metric, point)
    frame = metric_frame(data.g, metric.signature)
    pm = weyl_pm(metric, point, frame=frame, data=data)
    eps = frame.epsilons.as_array()
    wf = _frame_weyl(data, frame)
    raised = np.einsum("abcd,a,b,c,d->abcd", wf, eps, eps, eps, eps)
    full = 0.25 * float(np.sum(wf * raised))
    n = np.array([float(v) for v in pm.basis.norms])
    weights = np.outer(n, n)
    blocks = float(np.sum(weights * (pm.w_plus**2 + pm.w_minus**2)))
    return full, blocks
