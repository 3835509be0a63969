"""Jacobi and conformal Jacobi operators, with spectral constancy checks.

Both operators are evaluated as matrices in an orthonormal frame produced by
``metric_frame``.  In Riemannian signature spectra are sorted eigenvalue
lists; in indefinite signature the operators need not be diagonalizable
(nilpotent examples exist), so spectra are summarized by characteristic
polynomial coefficients instead and verdicts are about charpoly constancy,
never labelled "Osserman".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curvature import Curvature4, PointCurvature, point_curvature
from .linalg import Frame, SpectrumReport, char_poly, jacobi_eigh, metric_frame, sphere_samples, sym_eigen
from .metric import MetricField

__all__ = [
    "OperatorError",
    "OppointReport",
    "jacobi",
    "conformal_jacobi",
    "osserman_check",
    "conformally_osserman_check",
    "rakic_duality_check",
    "DualityRecord",
]

DEFAULT_TOL = 1e-7


class OperatorError(ValueError):
    pass


def _operator_matrix(tensor: Curvature4, data: PointCurvature, frame: Frame, x_chart: np.ndarray) -> np.ndarray:
    """Frame matrix of Y -> R(x, Y) x for a curvature-type tensor.

    Components: J[a, b] = eps_a * R(x, e_b, x, e_a).
    """
    r = tensor.components
    t = np.einsum("ijkm,i,k->jm", r, x_chart, x_chart)
    e = frame.vectors
    m = e.T @ t.T @ e
    eps = frame.epsilons.as_array()
    return eps[:, None] * m


def _unit_check(data: PointCurvature, x: np.ndarray) -> float:
    q = float(x @ data.g @ x)
    if abs(q) < 1e-10:
        raise OperatorError(f"direction {x.tolist()} is null; Jacobi operators need |g(x,x)| = 1")
    return q


def jacobi(metric: MetricField, point, x, data: Optional[PointCurvature] = None,
           frame: Optional[Frame] = None) -> np.ndarray:
    """Jacobi operator J(x): Y -> R(x, Y) x as a frame matrix.

    x is a chart-coordinate vector with g(x, x) = +-1.  x spans the kernel,
    and in Riemannian signature the matrix is symmetric.
    """
    if data is None:
        data = point_curvature(metric, point)
    if frame is None:
        frame = metric_frame(data.g, metric.signature)
    x = np.asarray(x, dtype=float)
    _unit_check(data, x)
    return _operator_matrix(data.riemann, data, frame, x)


def conformal_jacobi(metric: MetricField, point, x, data: Optional[PointCurvature] = None,
                     frame: Optional[Frame] = None) -> np.ndarray:
    """Conformal Jacobi operator: the Jacobi construction with the Weyl tensor."""
    if data is None:
        data = point_curvature(metric, point)
    if frame is None:
        frame = metric_frame(data.g, metric.signature)
    x = np.asarray(x, dtype=float)
    _unit_check(data, x)
    return _operator_matrix(data.weyl, data, frame, x)


@dataclass
class OppointReport:
    """Spectral constancy of an operator over the unit sphere at one point."""

    point: tuple
    mode: str  # riemannian | indefinite
    operator: str  # jacobi | conformal_jacobi
    spectra: list  # list of SpectrumReport
    max_deviation: float
    verdict: str  # constant | non-constant
    seed: int
    samples: int
    tolerance: float
    causal_signs: tuple = (1,)
    notes: list = field(default_factory=list)

    @property
    def is_constant(self) -> bool:
        return self.verdict == "constant"


def _spectra_deviation(vectors: list) -> float:
    if len(vectors) < 2:
        return 0.0
    arr = np.array(vectors)
    return float(np.max(arr.max(axis=0) - arr.min(axis=0)))


def _sphere_check(metric: MetricField, point, samples: int, seed: int, tol: Optional[float],
                  which: str) -> OppointReport:
    if samples < 8:
        raise OperatorError("need at least 8 sphere samples")
    data = point_curvature(metric, point)
    frame = metric_frame(data.g, metric.signature)
    tensor = data.riemann if which == "jacobi" else data.weyl
    base_tol = DEFAULT_TOL if tol is None else tol
    tolerance = base_tol * (1.0 + tensor.scale)
    riemannian = metric.signature.is_riemannian
    signs = (1,) if riemannian else (1, -1)
    spectra: list = []
    notes: list = []
    deviation = 0.0
    for sign in signs:
        if sign == 1 and metric.signature.positives == 0:
            notes.append("no spacelike directions in this signature")
            continue
        if sign == -1 and metric.signature.negatives == 0:
            notes.append("no timelike directions in this signature")
            continue
        coeff_vectors = []
        # sample in the frame's sign ordering (positives first), which can
        # differ from the declared signature ordering
        for s in sphere_samples(frame.epsilons, samples, seed, causal_sign=sign):
            x_chart = frame.vectors @ s
            op = _operator_matrix(tensor, data, frame, x_chart)
            if riemannian:
                values = sym_eigen(0.5 * (op + op.T))
                spectra.append(SpectrumReport("eigenvalues", tuple(values)))
                coeff_vectors.append(values)
            else:
                coeffs = char_poly(op)
                spectra.append(SpectrumReport("charpoly", tuple(coeffs)))
                coeff_vectors.append(coeffs)
        deviation = max(deviation, _spectra_deviation(coeff_vectors))
    verdict = "constant" if deviation <= tolerance else "non-constant"
    return OppointReport(
        point=tuple(np.asarray(point, dtype=float).tolist()),
        mode="riemannian" if riemannian else "indefinite",
        operator=which,
        spectra=spectra,
        max_deviation=deviation,
        verdict=verdict,
        seed=seed,
        samples=samples,
        tolerance=tolerance,
        causal_signs=signs,
        notes=notes,
    )


def osserman_check(metric: MetricField, point, samples: int = 64, seed: int = 42,
                   tol: Optional[float] = None) -> OppointReport:
    """Is the Jacobi spectrum constant over the unit sphere at this point?"""
    return _sphere_check(metric, point, samples, seed, tol, "jacobi")


def conformally_osserman_check(metric: MetricField, point, samples: int = 64, seed: int = 42,
                               tol: Optional[float] = None) -> OppointReport:
    """Same constancy check for the conformal Jacobi operator."""
    return _sphere_check(metric, point, samples, seed, tol, "conformal_jacobi")


@dataclass
class DualityRecord:
    eigenvalue: float
    eigenvector: tuple  # frame coordinates
    residual: float


def rakic_duality_check(metric: MetricField, point, x, tol: float = 1e-8) -> list:
    """Duality residuals: J(x) y = lam y should imply J(y) x = lam x.

    Riemannian signature only.  For each unit eigenvector y of J(x)
    orthogonal to x, reports the residual |J(y) x - lam x| (frame norms).
    """
    if not metric.signature.is_riemannian:
        raise OperatorError("duality check supports Riemannian signature only")
    data = point_curvature(metric, point)
    frame = metric_frame(data.g, metric.signature)
    x = np.asarray(x, dtype=float)
    _unit_check(data, x)
    j_x = _operator_matrix(data.riemann, data, frame, x)
    j_x = 0.5 * (j_x + j_x.T)
    vals, vecs = jacobi_eigh(j_x)
    # frame coordinates of x itself (Euclidean coordinates in the frame)
    eps = frame.epsilons.as_array()
    s = eps * (frame.vectors.T @ data.g @ x)
    records = []
    for k in range(len(vals)):
        y = vecs[:, k]
        overlap = float(np.dot(y, s))
        if abs(overlap) > 1e-6:
            # strip the pole direction out of (possibly degenerate) eigenspaces
            y = y - overlap * s
            norm = np.linalg.norm(y)
            if norm < 1e-8:
                continue
            y = y / norm
        y_chart = frame.vectors @ y
        j_y = _operator_matrix(data.riemann, data, frame, y_chart)
        residual = float(np.max(np.abs(j_y @ s - vals[k] * s)))
        records.append(DualityRecord(float(vals[k]), tuple(y.tolist()), residual))
    return records
