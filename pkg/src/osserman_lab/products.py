"""Direct, warped and twisted product metrics and their curvature oracles.

A product chart orders base coordinates first: x1..xb on the base, then
x(b+1)..xn on the fiber.  ``build_product`` assembles the block metric
g_B + f^2 g_F.  The oracle functions evaluate the closed-form curvature of
such products from factor curvatures plus derivative data of the warping or
twisting function, never from the curvature of the joint metric, so that
comparing them against the generic coordinate computation is a genuine
two-route consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curvature import (
    Curvature4,
    point_curvature,
    riemann,
    scalar_field_geometry,
)
from .expr import (
    BinOp,
    Call,
    Const,
    ExprAst,
    eval_jet2,
    eval_value,
    shift_variables,
    to_string,
    variables_used,
)
from .linalg import Signature
from .metric import MetricField

__all__ = [
    "ProductError",
    "ProductSpec",
    "build_product",
    "function_value",
    "warped_oracle",
    "twisted_oracle",
    "oracle_items",
    "compare_oracle",
    "max_oracle_residual",
    "twisting_reducibility",
    "ReducibilityVerdict",
    "adapted_frame",
]


class ProductError(ValueError):
    pass


@dataclass
class ProductSpec:
    """A product metric recipe: base x fiber with an optional function.

    The function is an expression over the joint chart.  For a warped
    product it may reference base variables only; for a twisted product it
    may reference any variable; a direct product has none.
    """

    kind: str  # direct | warped | twisted
    base: MetricField
    fiber: MetricField
    function: Optional[ExprAst] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("direct", "warped", "twisted"):
            raise ProductError(f"unknown product kind '{self.kind}'")
        n = self.base.dimension + self.fiber.dimension
        if n > 8:
            raise ProductError(f"total dimension {n} exceeds the cap 8")
        if self.kind == "direct":
            if self.function is not None:
                raise ProductError("a direct product takes no function")
            return
        if self.function is None:
            raise ProductError(f"a {self.kind} product needs a function")
        used = variables_used(self.function)
        if any(v > n for v in used):
            raise ProductError("function references variables beyond the joint chart")
        if self.kind == "warped":
            bad = sorted(v for v in used if v > self.base.dimension)
            if bad:
                names = ", ".join(f"x{v}" for v in bad)
                raise ProductError(
                    f"warping function must depend on base variables only, found {names}"
                )

    @property
    def dimension(self) -> int:
        return self.base.dimension + self.fiber.dimension

    @property
    def base_dim(self) -> int:
        return self.base.dimension

    @property
    def fiber_dim(self) -> int:
        return self.fiber.dimension


def function_value(spec: ProductSpec, point) -> float:
    """Value of the warping/twisting function, checked positive."""
    if spec.function is None:
        return 1.0
    value = eval_value(spec.function, np.asarray(point, dtype=float))
    if value <= 0.0:
        raise ProductError(
            f"function {to_string(spec.function)} is not positive at {list(point)}"
        )
    return value


def build_product(spec: ProductSpec) -> MetricField:
    """Block metric of the product: base block g_B, fiber block f^2 g_F."""
    b, d = spec.base_dim, spec.fiber_dim
    n = b + d
    zero = Const(0.0)
    grid = [[zero] * n for _ in range(n)]
    for i in range(b):
        for j in range(b):
            grid[i][j] = spec.base.components[i][j]
    f2 = None
    if spec.function is not None:
        f2 = BinOp("*", spec.function, spec.function)
    for i in range(d):
        for j in range(d):
            comp = shift_variables(spec.fiber.components[i][j], b)
            if f2 is not None:
                comp = BinOp("*", f2, comp)
            grid[b + i][b + j] = comp
    signature = Signature(spec.base.signature.epsilons + spec.fiber.signature.epsilons)
    box = spec.base.box + spec.fiber.box
    return MetricField(
        n,
        signature,
        tuple(tuple(row) for row in grid),
        provenance=spec.kind,
        box=box,
        name=spec.name or f"{spec.base.name}x{spec.fiber.name}",
        factors=(spec.base, spec.fiber, spec.function),
    )


def _split(spec: ProductSpec, v: np.ndarray):
    b = spec.base_dim
    return v[:b], v[b:]


def _check_tangent(spec: ProductSpec, v: np.ndarray, factor: str) -> None:
    vb, vf = _split(spec, v)
    wrong = vf if factor == "base" else vb
    if np.max(np.abs(wrong)) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise ProductError(f"vector {v.tolist()} is not tangent to the {factor} factor")


def _embed_base(spec: ProductSpec, vb: np.ndarray) -> np.ndarray:
    out = np.zeros(spec.dimension)
    out[: spec.base_dim] = vb
    return out


def _embed_fiber(spec: ProductSpec, vf: np.ndarray) -> np.ndarray:
    out = np.zeros(spec.dimension)
    out[spec.base_dim :] = vf
    return out


def _action(r4: Curvature4, ginv: np.ndarray, a, b, c) -> np.ndarray:
    """(1,3) curvature action: the vector R(a, b) c."""
    return np.einsum("ijkm,lm,i,j,k->l", r4.components, ginv, a, b, c)


def warped_oracle(spec: ProductSpec, point, x, y, z, u, v, w) -> dict:
    """Closed-form curvature of a warped product on factor-tangent vectors.

    x, y, z must be tangent to the base, u, v, w to the fiber (full-chart
    vectors).  Returns the six curvature vectors, keyed by shape:

        base            R(X,Y)Z           lift of the base curvature
        normal          R(U,X)Y           (H_f(X,Y)/f) U
        zero_base_pair  R(X,Y)U           zero
        zero_fiber_pair R(U,V)X           zero
        mixed           R(X,U)V           (<U,V>/f) grad_X(grad f)
        fiber           R(U,V)W           fiber curvature with a |grad f|^2/f^2 correction
    """
    if spec.kind != "warped":
        raise ProductError("warped_oracle needs a warped spec")
    pt = np.asarray(point, dtype=float)
    vecs = [np.asarray(a, dtype=float) for a in (x, y, z, u, v, w)]
    for a in vecs[:3]:
        _check_tangent(spec, a, "base")
    for a in vecs[3:]:
        _check_tangent(spec, a, "fiber")
    x, y, z, u, v, w = vecs
    b = spec.base_dim
    pb, pf = pt[:b], pt[b:]
    xb, yb, zb = x[:b], y[:b], z[:b]
    uf, vf, wf = u[b:], v[b:], w[b:]

    fval = function_value(spec, pt)
    base_r4 = riemann(spec.base, pb)
    base_ginv = spec.base.inverse(pb)
    fiber_r4 = riemann(spec.fiber, pf)
    fiber_g = spec.fiber.value(pf)
    fiber_ginv = spec.fiber.inverse(pf, g=fiber_g)
    fd = scalar_field_geometry(spec.base, spec.function, pb)

    def inner_fiber(a, bb):
        # metric of the product restricted to fiber vectors
        return fval * fval * float(a @ fiber_g @ bb)

    out = {}
    out["base"] = _embed_base(spec, _action(base_r4, base_ginv, xb, yb, zb))
    h_xy = float(xb @ fd.hessian @ yb)
    out["normal"] = (h_xy / fval) * u
    out["zero_base_pair"] = np.zeros(spec.dimension)
    out["zero_fiber_pair"] = np.zeros(spec.dimension)
    out["mixed"] = (inner_fiber(uf, vf) / fval) * _embed_base(spec, fd.operator @ xb)
    correction = (fd.grad_norm_sq / fval**2) * (inner_fiber(uf, wf) * v - inner_fiber(vf, wf) * u)
    out["fiber"] = _embed_fiber(spec, _action(fiber_r4, fiber_ginv, uf, vf, wf)) - correction
    return out


def twisted_oracle(spec: ProductSpec, point, x, y, z, u, v, w) -> dict:
    """Closed-form curvature of a twisted product on factor-tangent vectors.

    Works with xi = log f.  Its gradient, covariant Hessian and Hessian
    operator are taken with respect to the product metric itself (first
    derivatives of the metric only); the curvature content comes from the
    factor curvatures and xi.  Keys as in ``warped_oracle`` except that
    ``fiber_pair_base`` (R(U,V)X) is generally nonzero here.
    """
    if spec.kind != "twisted":
        raise ProductError("twisted_oracle needs a twisted spec")
    pt = np.asarray(point, dtype=float)
    vecs = [np.asarray(a, dtype=float) for a in (x, y, z, u, v, w)]
    for a in vecs[:3]:
        _check_tangent(spec, a, "base")
    for a in vecs[3:]:
        _check_tangent(spec, a, "fiber")
    x, y, z, u, v, w = vecs
    b = spec.base_dim
    pb, pf = pt[:b], pt[b:]
    function_value(spec, pt)

    joint = build_product(spec)
    g = joint.value(pt)
    xi = Call("log", (spec.function,))
    sd = scalar_field_geometry(joint, xi, pt)

    base_r4 = riemann(spec.base, pb)
    base_ginv = spec.base.inverse(pb)
    fiber_r4 = riemann(spec.fiber, pf)
    fiber_ginv = spec.fiber.inverse(pf)

    def dxi(a):
        return float(sd.raw_gradient @ a)

    def ddxi(a, bb):
        # a(b(xi)) for constant-coefficient coordinate combinations
        return float(a @ sd.raw_hessian @ bb)

    def hxi(a, bb):
        return float(a @ sd.hessian @ bb)

    def gdot(a, bb):
        return float(a @ g @ bb)

    grad_xi = sd.gradient
    h_op = sd.operator

    out = {}
    out["base"] = _embed_base(spec, _action(base_r4, base_ginv, x[:b], y[:b], z[:b]))
    out["normal"] = (hxi(x, y) + dxi(x) * dxi(y)) * u
    out["mixed"] = gdot(u, v) * (dxi(x) * grad_xi + h_op @ x) - ddxi(x, v) * u
    out["fiber_pair_base"] = ddxi(x, v) * u - ddxi(x, u) * v
    fiber_part = _embed_fiber(
        spec, _action(fiber_r4, fiber_ginv, u[b:], v[b:], w[b:])
    )
    out["fiber"] = (
        fiber_part
        + sd.grad_norm_sq * (gdot(u, w) * v - gdot(v, w) * u)
        + hxi(v, w) * u
        - hxi(u, w) * v
        + gdot(v, w) * (h_op @ u)
        - gdot(u, w) * (h_op @ v)
        + dxi(w) * (dxi(v) * u - dxi(u) * v)
        + (dxi(u) * gdot(v, w) - dxi(v) * gdot(u, w)) * grad_xi
    )
    return out


# Which (A, B, C) triple each oracle key corresponds to, in terms of the
# sample vectors (x, y, z, u, v, w).
_ITEM_TRIPLES = {
    "base": (0, 1, 2),
    "normal": (3, 0, 1),
    "zero_base_pair": (0, 1, 3),
    "zero_fiber_pair": (3, 4, 0),
    "mixed": (0, 3, 4),
    "fiber_pair_base": (3, 4, 0),
    "fiber": (3, 4, 5),
}


def oracle_items(spec: ProductSpec) -> tuple:
    if spec.kind == "warped":
        return ("base", "normal", "zero_base_pair", "zero_fiber_pair", "mixed", "fiber")
    if spec.kind == "twisted":
        return ("base", "normal", "mixed", "fiber_pair_base", "fiber")
    raise ProductError("direct products have no oracle items")


def compare_oracle(spec: ProductSpec, point, vectors, joint_data=None) -> dict:
    """Oracle vs generic coordinate curvature for one vector tuple.

    ``vectors`` is (x, y, z, u, v, w) with the first three tangent to the
    base and the rest to the fiber.  Returns key -> (oracle, generic,
    residual) with the residual normalized by the curvature scale.
    """
    pt = np.asarray(point, dtype=float)
    if joint_data is None:
        joint_data = point_curvature(build_product(spec), pt)
    oracle = (
        warped_oracle(spec, pt, *vectors)
        if spec.kind == "warped"
        else twisted_oracle(spec, pt, *vectors)
    )
    scale = max(1.0, joint_data.riemann.scale)
    out = {}
    for key in oracle_items(spec):
        ia, ib, ic = _ITEM_TRIPLES[key]
        generic = _action(
            joint_data.riemann, joint_data.ginv, vectors[ia], vectors[ib], vectors[ic]
        )
        residual = float(np.max(np.abs(oracle[key] - generic))) / scale
        out[key] = (oracle[key], generic, residual)
    return out


def max_oracle_residual(spec: ProductSpec, points, tuples_per_point: int, seed: int) -> float:
    """Worst normalized oracle-vs-generic residual over points and tuples."""
    rng = np.random.default_rng(seed)
    joint = build_product(spec)
    worst = 0.0
    for point in points:
        data = point_curvature(joint, point)
        for _ in range(tuples_per_point):
            vecs = _random_tuple(spec, rng)
            report = compare_oracle(spec, point, vecs, joint_data=data)
            worst = max(worst, max(res for _, _, res in report.values()))
    return worst


def _random_tuple(spec: ProductSpec, rng) -> tuple:
    b, d, n = spec.base_dim, spec.fiber_dim, spec.dimension
    out = []
    for _ in range(3):
        vb = rng.uniform(-1.0, 1.0, b)
        out.append(_embed_base(spec, vb))
    for _ in range(3):
        vf = rng.uniform(-1.0, 1.0, d)
        out.append(_embed_fiber(spec, vf))
    return tuple(out)


def adapted_frame(spec: ProductSpec, point) -> "Frame":
    """Orthonormal frame respecting the product split: base vectors first.

    Base columns are an orthonormal frame of g_B, fiber columns one of g_F
    scaled by 1/f, so the result is orthonormal for the joint metric while
    keeping each vector tangent to its factor.
    """
    from .linalg import Frame, metric_frame

    pt = np.asarray(point, dtype=float)
    b = spec.base_dim
    base_frame = metric_frame(spec.base.value(pt[:b]), spec.base.signature)
    fiber_frame = metric_frame(spec.fiber.value(pt[b:]), spec.fiber.signature)
    fval = function_value(spec, pt)
    n = spec.dimension
    columns = np.zeros((n, n))
    columns[:b, :b] = base_frame.vectors
    columns[b:, b:] = fiber_frame.vectors / fval
    eps = base_frame.epsilons.epsilons + fiber_frame.epsilons.epsilons
    return Frame(columns, Signature(eps))


@dataclass
class ReducibilityVerdict:
    reducible: bool
    max_mixed_derivative: float
    witness: Optional[tuple] = None  # (point, base_index, fiber_index, value)


def twisting_reducibility(spec: ProductSpec, sample_points, tol: float = 1e-9) -> ReducibilityVerdict:
    """Does log f split into base + fiber parts?

    The twisting function factors as f = f_B * f_F exactly when every mixed
    base/fiber second derivative of xi = log f vanishes; then the twisted
    product is a warped product in disguise.
    """
    if spec.kind != "twisted":
        raise ProductError("reducibility applies to twisted specs")
    xi = Call("log", (spec.function,))
    b = spec.base_dim
    worst = 0.0
    witness = None
    for point in sample_points:
        pt = np.asarray(point, dtype=float)
        function_value(spec, pt)  # positivity check
        hess = eval_jet2(xi, pt).hessian
        mixed = hess[:b, b:]
        value = float(np.max(np.abs(mixed)))
        if value > worst:
            i, j = np.unravel_index(np.argmax(np.abs(mixed)), mixed.shape)
            worst = value
            witness = (tuple(pt.tolist()), int(i) + 1, b + int(j) + 1, float(mixed[i, j]))
    if worst <= tol:
        return ReducibilityVerdict(True, worst, None)
    return ReducibilityVerdict(False, worst, witness)
