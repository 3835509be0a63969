"""Dense linear algebra for small matrices (n <= 8).

Frames adapted to an indefinite metric, symmetric eigendecomposition by
cyclic Jacobi rotations, Faddeev-LeVerrier characteristic polynomials and
deterministic sampling of unit pseudo-spheres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinalgError",
    "SingularMatrixError",
    "SignatureMismatchError",
    "Signature",
    "Frame",
    "SpectrumReport",
    "jacobi_eigh",
    "sym_eigen",
    "char_poly",
    "metric_frame",
    "sphere_samples",
]

MAX_DIM = 8


class LinalgError(ValueError):
    pass


class SingularMatrixError(LinalgError):
    pass


class SignatureMismatchError(LinalgError):
    pass


@dataclass(frozen=True)
class Signature:
    """Diagonal signs of an orthonormal frame, each exactly +1 or -1."""

    epsilons: tuple

    def __post_init__(self):
        eps = tuple(int(e) for e in self.epsilons)
        # length 1 is allowed so that product factors can be lines;
        # whole manifolds are still required to have dimension >= 2.
        if not 1 <= len(eps) <= MAX_DIM:
            raise LinalgError(f"signature length must be 1..{MAX_DIM}, got {len(eps)}")
        if any(e not in (1, -1) for e in eps):
            raise LinalgError(f"signature entries must be +1 or -1, got {eps}")
        object.__setattr__(self, "epsilons", eps)

    @property
    def dimension(self) -> int:
        return len(self.epsilons)

    @property
    def positives(self) -> int:
        return sum(1 for e in self.epsilons if e == 1)

    @property
    def negatives(self) -> int:
        return sum(1 for e in self.epsilons if e == -1)

    @property
    def is_riemannian(self) -> bool:
        return self.negatives == 0

    @property
    def is_lorentzian(self) -> bool:
        return min(self.positives, self.negatives) == 1 and self.dimension > 2

    def as_array(self) -> np.ndarray:
        return np.array(self.epsilons, dtype=float)


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame at a point: columns of ``vectors`` in chart coords.

    Satisfies e_a^T g e_b = eps_a * delta_ab at the anchor point.
    """

    vectors: np.ndarray  # (n, n), column a is e_a
    epsilons: Signature

    @property
    def dimension(self) -> int:
        return self.epsilons.dimension

    def orientation(self) -> int:
        return 1 if np.linalg.det(self.vectors) > 0 else -1


@dataclass(frozen=True)
class SpectrumReport:
    """Operator spectrum summary.

    ``mode`` is ``"eigenvalues"`` (sorted ascending, Riemannian operators) or
    ``"charpoly"`` (monic coefficients, descending degree, used in indefinite
    signature where the operator need not be diagonalizable).
    """

    mode: str
    values: tuple

    def __post_init__(self):
        if self.mode not in ("eigenvalues", "charpoly"):
            raise LinalgError(f"unknown spectrum mode '{self.mode}'")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise LinalgError(f"dimension {m.shape[0]} exceeds the cap {MAX_DIM}")
    return m


def jacobi_eigh(m, sym_tol: float = 1e-10):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (values, vectors) with values ascending and vectors[:, k] the
    unit eigenvector for values[k].  Off-diagonal residual after the sweeps
    is below 1e-12 times the input norm.
    """
    m = _check_square(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > sym_tol * scale:
        raise LinalgError("matrix is not symmetric")
    n = m.shape[0]
    a = 0.5 * (m + m.T)
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0.0 or n == 1:
        order = np.argsort(np.diag(a), kind="stable")
        return np.diag(a)[order], v[:, order]

    def offdiag(x):
        return np.sqrt(np.sum(np.tril(x, -1) ** 2) * 2.0)

    for _ in range(60):
        if offdiag(a) <= 1e-13 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-16 * norm:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def sym_eigen(m) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    vals, _ = jacobi_eigh(m)
    return vals


def char_poly(m) -> np.ndarray:
    """Monic characteristic polynomial coefficients, descending degree.

    Faddeev-LeVerrier recurrence; exact in n trace computations, no
    eigenvalue extraction, so it is safe for defective matrices.
    """
    a = _check_square(m)
    n = a.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    work = np.eye(n)
    for k in range(1, n + 1):
        work = a @ work
        ck = -np.trace(work) / k
        coeffs[k] = ck
        work = work + ck * np.eye(n)
    return coeffs


def metric_frame(g, signature: Signature) -> Frame:
    """Orthonormal frame for a (possibly indefinite) metric value matrix.

    Built from the symmetric eigendecomposition (Gram-Schmidt would die on
    null coordinate directions), columns scaled by 1/sqrt|lambda|, positive
    directions first, and the resulting basis flipped to positive chart
    orientation.
    """
    g = _check_square(g)
    n = g.shape[0]
    if n != signature.dimension:
        raise LinalgError(f"metric is {n}x{n} but signature has length {signature.dimension}")
    vals, vecs = jacobi_eigh(g)
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0 or np.min(np.abs(vals)) <= 1e-12 * scale:
        raise SingularMatrixError("metric is singular at this point")
    pos = [k for k in range(n) if vals[k] > 0]
    neg = [k for k in range(n) if vals[k] < 0]
    if len(pos) != signature.positives:
        raise SignatureMismatchError(
            f"declared signature has {signature.positives} positive directions, "
            f"metric has {len(pos)}"
        )
    order = pos + neg
    columns = np.empty((n, n))
    eps = []
    for slot, k in enumerate(order):
        columns[:, slot] = vecs[:, k] / np.sqrt(abs(vals[k]))
        eps.append(1 if vals[k] > 0 else -1)
    if np.linalg.det(columns) < 0:
        columns[:, n - 1] = -columns[:, n - 1]
    return Frame(columns, Signature(tuple(eps)))


def sphere_samples(signature: Signature, count: int, seed: int, causal_sign: int = 1):
    """Deterministic unit vectors in frame coordinates with <x,x> = causal_sign.

    The list starts with every frame axis of the requested sign, then the
    normalized bisectors of same-sign axis pairs, then seeded pseudo-random
    fill.  Same inputs give the identical list.
    """
    if count < 1:
        raise LinalgError("count must be >= 1")
    if causal_sign not in (1, -1):
        raise LinalgError("causal_sign must be +1 or -1")
    eps = signature.as_array()
    n = signature.dimension
    matching = [i for i in range(n) if signature.epsilons[i] == causal_sign]
    if not matching:
        raise LinalgError(
            f"no vector with <x,x> = {causal_sign} exists in signature {signature.epsilons}"
        )
    samples = []
    for i in matching:
        v = np.zeros(n)
        v[i] = 1.0
        samples.append(v)
    for a in range(len(matching)):
        for b in range(a + 1, len(matching)):
            v = np.zeros(n)
            v[matching[a]] = 1.0
            v[matching[b]] = 1.0
            samples.append(v / np.sqrt(2.0))
    samples = samples[:count]
    rng = np.random.default_rng(seed)
    guard = 0
    while len(samples) < count:
        v = rng.standard_normal(n)
        q = float(np.dot(eps * v, v))
        if q * causal_sign <= 0.1 * float(np.dot(v, v)):
            guard += 1
            if guard > 10000:
                raise LinalgError("could not draw vectors of the requested causal sign")
            continue
        samples.append(v / np.sqrt(abs(q)))
    return samples
