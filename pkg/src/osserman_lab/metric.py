"""Metric fields: symmetric grids of expressions over a coordinate chart."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .expr import BinOp, Call, Const, ExprAst, eval_jet2, eval_value, parse, to_string
from .linalg import Signature, SingularMatrixError, SignatureMismatchError, jacobi_eigh

__all__ = ["MetricField", "MetricError", "conformal_rescale"]


class MetricError(ValueError):
    pass


@dataclass
class MetricField:
    """Expression-valued metric tensor on a chart with coordinates x1..xn.

    ``components`` is a full n x n grid built from the upper triangle, so it
    is symmetric by construction.  ``box`` gives the per-coordinate sampling
    interval used by classifiers; it should avoid singular loci of the
    component expressions.
    """

    dimension: int
    signature: Signature
    components: tuple  # tuple of tuples of ExprAst, n x n
    provenance: str = "coordinate"  # coordinate | direct | warped | twisted
    box: tuple = ()
    name: str = ""
    factors: Optional[tuple] = None  # (base, fiber, function) for products
    _jet_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.dimension
        # dimension 1 is legal for product factors; classification requires >= 2
        if not 1 <= n <= 8:
            raise MetricError(f"dimension must be 1..8, got {n}")
        if self.signature.dimension != n:
            raise MetricError("signature length does not match dimension")
        grid = tuple(tuple(row) for row in self.components)
        if len(grid) != n or any(len(row) != n for row in grid):
            raise MetricError("components must form an n x n grid")
        # mirror the upper triangle so the grid is exactly symmetric
        sym = [[grid[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
        self.components = tuple(tuple(row) for row in sym)
        if not self.box:
            self.box = tuple((-1.0, 1.0) for _ in range(n))
        else:
            self.box = tuple((float(lo), float(hi)) for lo, hi in self.box)
            if len(self.box) != n:
                raise MetricError("box must give one interval per coordinate")

    @staticmethod
    def from_strings(rows, signature, box=(), name="", provenance="coordinate") -> "MetricField":
        """Build from a grid of expression strings."""
        n = len(rows)
        sig = signature if isinstance(signature, Signature) else Signature(tuple(signature))
        grid = tuple(tuple(parse(rows[i][j], n) for j in range(n)) for i in range(n))
        return MetricField(n, sig, grid, provenance=provenance, box=box, name=name)

    @staticmethod
    def flat(n: int, name: str = "") -> "MetricField":
        one, zero = Const(1.0), Const(0.0)
        grid = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
        return MetricField(n, Signature(tuple([1] * n)), grid, name=name or f"flat{n}")

    def component_strings(self):
        return [[to_string(self.components[i][j]) for j in range(self.dimension)]
                for i in range(self.dimension)]

    # -- evaluation ---------------------------------------------------------

    def value(self, point) -> np.ndarray:
        """Metric component matrix g_ij at a point."""
        pt = np.asarray(point, dtype=float)
        self._check_point(pt)
        n = self.dimension
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = eval_value(self.components[i][j], pt)
        return g

    def jets(self, point):
        """(g, dg, d2g) with dg[k,i,j] = d_k g_ij and d2g[k,l,i,j] = d_k d_l g_ij."""
        pt = np.asarray(point, dtype=float)
        self._check_point(pt)
        key = pt.tobytes()
        hit = self._jet_cache.get(key)
        if hit is not None:
            return hit
        n = self.dimension
        g = np.empty((n, n))
        dg = np.empty((n, n, n))
        d2g = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(i, n):
                jet = eval_jet2(self.components[i][j], pt)
                g[i, j] = g[j, i] = jet.value
                dg[:, i, j] = dg[:, j, i] = jet.gradient
                d2g[:, :, i, j] = d2g[:, :, j, i] = jet.hessian
        out = (g, dg, d2g)
        if len(self._jet_cache) > 512:
            self._jet_cache.clear()
        self._jet_cache[key] = out
        return out

    def inverse(self, point=None, g: Optional[np.ndarray] = None) -> np.ndarray:
        if g is None:
            g = self.value(point)
        det = np.linalg.det(g)
        scale = max(1.0, float(np.max(np.abs(g)))) ** self.dimension
        if abs(det) <= 1e-12 * scale:
            raise SingularMatrixError(f"metric singular at {point}")
        return np.linalg.inv(g)

    def check_inertia(self, point) -> None:
        """Raise unless the component matrix has the declared signature."""
        g = self.value(point)
        vals, _ = jacobi_eigh(g)
        top = float(np.max(np.abs(vals)))
        if top == 0.0 or np.min(np.abs(vals)) <= 1e-12 * top:
            raise SingularMatrixError(f"metric singular at {point}")
        pos = int(np.sum(vals > 0))
        if pos != self.signature.positives:
            raise SignatureMismatchError(
                f"metric at {point} has {pos} positive directions, "
                f"declared signature has {self.signature.positives}"
            )

    def _check_point(self, pt: np.ndarray) -> None:
        if pt.shape != (self.dimension,):
            raise MetricError(
                f"point has shape {pt.shape}, metric lives on a {self.dimension}-dim chart"
            )


def conformal_rescale(metric: MetricField, sigma: ExprAst) -> MetricField:
    """Metric with components e^{2 sigma} g_ij on the same chart."""
    factor = Call("exp", (BinOp("*", Const(2.0), sigma),))
    n = metric.dimension
    grid = tuple(
        tuple(BinOp("*", factor, metric.components[i][j]) for j in range(n))
        for i in range(n)
    )
    name = f"{metric.name}*conformal" if metric.name else "conformal"
    return MetricField(
        n,
        metric.signature,
        grid,
        provenance="coordinate",
        box=metric.box,
        name=name,
    )
