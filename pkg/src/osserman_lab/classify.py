"""Manifold-level verdicts aggregated from per-point computations.

Every flag means "numerically true at the sampled points", never a claim
about the whole manifold; reports carry the sample set, seed and tolerances
that produced them.  The cross-check table re-states the structural
statements the toolkit is built to probe (each a biconditional or an
implication between flags) and records expected vs observed per input.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .curvature import CurvatureError, point_curvature, sectional
from .linalg import SingularMatrixError, SignatureMismatchError
from .metric import MetricField
from .operators import conformally_osserman_check, osserman_check
from .products import ProductSpec, build_product, max_oracle_residual, twisting_reducibility
from .fourdim import selfduality_verdict

__all__ = [
    "ClassifyConfig",
    "Flags",
    "CrossCheckRow",
    "ClassificationReport",
    "classify",
    "constant_curvature_check",
    "default_seed",
]

SEED_ENV_VAR = "OSSERMAN_LAB_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'") from None


@dataclass
class ClassifyConfig:
    points: int = 5
    samples: int = 64
    seed: Optional[int] = None
    tol: float = 1e-7

    def __post_init__(self):
        if self.seed is None:
            self.seed = default_seed()
        if self.points < 1 or self.samples < 8:
            raise ValueError("need at least 1 point and 8 sphere samples")


@dataclass
class Flags:
    einstein: Optional[bool] = None
    lcf: Optional[bool] = None
    self_dual: Optional[bool] = None
    anti_self_dual: Optional[bool] = None
    pointwise_osserman: Optional[bool] = None
    conformally_osserman: Optional[bool] = None
    constant_curvature: Optional[bool] = None
    constant_curvature_value: Optional[float] = None
    twisted_reducible: Optional[bool] = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CrossCheckRow:
    check_id: str
    statement: str
    applicable: bool
    expected: str
    observed: str
    passed: Optional[bool]
    note: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ClassificationReport:
    name: str
    kind: str
    dimension: int
    signature: tuple
    mode: str  # riemannian | indefinite
    config: dict
    sample_points: list
    flags: Flags
    evidence: dict
    cross_checks: list
    warnings: list = field(default_factory=list)
    oracle_residual: Optional[float] = None

    def all_checks_pass(self) -> bool:
        return all(row.passed for row in self.cross_checks if row.applicable)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "dimension": self.dimension,
            "signature": list(self.signature),
            "mode": self.mode,
            "config": self.config,
            "sample_points": [list(p) for p in self.sample_points],
            "flags": self.flags.to_dict(),
            "evidence": self.evidence,
            "cross_checks": [row.to_dict() for row in self.cross_checks],
            "warnings": list(self.warnings),
            "oracle_residual": self.oracle_residual,
            "all_checks_pass": self.all_checks_pass(),
        }


def _sample_points(metric: MetricField, count: int, seed: int, warnings: list) -> list:
    rng = np.random.default_rng(seed)
    points = []
    attempts = 0
    lo = np.array([b[0] for b in metric.box])
    hi = np.array([b[1] for b in metric.box])
    # stay off the box boundary where preset singular loci live
    margin = 0.05 * (hi - lo)
    while len(points) < count and attempts < 100 * count:
        attempts += 1
        pt = rng.uniform(lo + margin, hi - margin)
        try:
            metric.check_inertia(pt)
        except (SingularMatrixError, SignatureMismatchError) as err:
            warnings.append(f"skipped sample point {pt.tolist()}: {err}")
            continue
        points.append(pt)
    if len(points) < count:
        raise SingularMatrixError(
            f"could not draw {count} non-singular sample points in the chart box"
        )
    return points


def constant_curvature_check(metric: MetricField, points, tol: float = 1e-7,
                             seed: int = 42, planes: int = 20) -> dict:
    """Sectional curvature spread over random planes across the points."""
    rng = np.random.default_rng(seed)
    n = metric.dimension
    values = []
    discarded = 0
    for point in points:
        data = point_curvature(metric, point)
        drawn = 0
        while drawn < max(planes // len(points), 4):
            if discarded > 100 * planes:
                raise CurvatureError("too many degenerate plane samples")
            x = rng.uniform(-1.0, 1.0, n)
            y = rng.uniform(-1.0, 1.0, n)
            try:
                k = sectional(metric, point, x, y, r4=data.riemann)
            except CurvatureError:
                discarded += 1
                continue
            values.append(k)
            drawn += 1
    spread = float(np.max(values) - np.min(values))
    mean = float(np.mean(values))
    is_constant = spread <= tol * (1.0 + float(np.max(np.abs(values))))
    return {
        "is_constant": is_constant,
        "value": mean if is_constant else None,
        "spread": spread,
        "plane_count": len(values),
        "seed": seed,
    }


def _fmt(flag: Optional[bool]) -> str:
    return {True: "true", False: "false", None: "indeterminate"}[flag]


def classify(obj: Union[MetricField, ProductSpec], config: Optional[ClassifyConfig] = None) -> ClassificationReport:
    """Full classification of a metric or product spec at sampled points."""
    config = config or ClassifyConfig()
    spec = obj if isinstance(obj, ProductSpec) else None
    metric = build_product(spec) if spec is not None else obj
    if metric.dimension < 2:
        raise ValueError("classification needs dimension >= 2")
    n = metric.dimension
    warnings: list = []
    points = _sample_points(metric, config.points, config.seed, warnings)
    riemannian = metric.signature.is_riemannian
    mode = "riemannian" if riemannian else "indefinite"
    tol = config.tol
    flags = Flags()
    evidence: dict = {}

    # Einstein: rho - (tau/n) g small at every point
    einstein_dev = 0.0
    for pt in points:
        data = point_curvature(metric, pt)
        dev = float(np.max(np.abs(data.ricci.ricci - (data.ricci.scalar / n) * data.g)))
        einstein_dev = max(einstein_dev, dev / (1.0 + float(np.max(np.abs(data.ricci.ricci)))))
    flags.einstein = einstein_dev <= tol
    evidence["einstein"] = {"deviation": einstein_dev, "tolerance": tol}

    # locally conformally flat: W = 0 (n >= 4)
    if n >= 4:
        lcf_dev = 0.0
        for pt in points:
            data = point_curvature(metric, pt)
            lcf_dev = max(lcf_dev, data.weyl.scale / (1.0 + data.riemann.scale))
        flags.lcf = lcf_dev <= tol
        evidence["lcf"] = {"deviation": lcf_dev, "tolerance": tol}
    elif n == 2:
        flags.lcf = True
        evidence["lcf"] = {"note": "every metric on a surface is conformally flat"}
    else:
        flags.lcf = None
        evidence["lcf"] = {"note": "undecided in dimension 3 (needs the Cotton tensor, out of scope)"}

    # Osserman-type constancy per point
    for which, check in (("pointwise_osserman", osserman_check),
                         ("conformally_osserman", conformally_osserman_check)):
        per_point = []
        verdict_all = True
        spectra_across = []
        for pt in points:
            rep = check(metric, pt, samples=config.samples, seed=config.seed, tol=tol)
            per_point.append({
                "point": list(rep.point),
                "deviation": rep.max_deviation,
                "tolerance": rep.tolerance,
                "verdict": rep.verdict,
            })
            verdict_all = verdict_all and rep.is_constant
            if rep.spectra:
                spectra_across.append(np.array(rep.spectra[0].values))
        setattr(flags, which, verdict_all)
        globally_constant = None
        if verdict_all and len(spectra_across) > 1:
            across = np.array(spectra_across)
            spread = float(np.max(across.max(axis=0) - across.min(axis=0)))
            globally_constant = spread <= max(p["tolerance"] for p in per_point)
        evidence[which] = {
            "per_point": per_point,
            "seed": config.seed,
            "samples": config.samples,
            "mode": mode,
            "verdict_label": "eigenvalue-constancy" if riemannian else "charpoly-constancy",
            "globally_constant": globally_constant,
        }

    # constant sectional curvature
    cc = constant_curvature_check(metric, points, tol=tol, seed=config.seed)
    flags.constant_curvature = cc["is_constant"]
    flags.constant_curvature_value = cc["value"]
    evidence["constant_curvature"] = cc

    # four-dimensional self-duality
    if n == 4:
        sd = selfduality_verdict(metric, points, tol=tol)
        flags.self_dual = sd.self_dual
        flags.anti_self_dual = sd.anti_self_dual
        evidence["selfduality"] = {
            "mode": sd.mode,
            "tolerance": sd.tolerance,
            "per_point": sd.evidence,
        }

    # product-specific data
    if spec is not None:
        if spec.kind == "twisted":
            red = twisting_reducibility(spec, points)
            flags.twisted_reducible = red.reducible
            evidence["twisted_reducible"] = {
                "max_mixed_derivative": red.max_mixed_derivative,
                "witness": red.witness,
            }
        if spec.kind in ("warped", "twisted"):
            residual = max_oracle_residual(spec, points[:3], 5, seed=config.seed)
            evidence["oracle_equivalence"] = {"max_residual": residual, "tolerance": 1e-7}
    oracle_residual = evidence.get("oracle_equivalence", {}).get("max_residual")

    # consistency: constant curvature must imply Einstein and (n>=4) LCF
    if flags.constant_curvature:
        if flags.einstein is False or flags.lcf is False:
            warnings.append(
                "inconsistent verdicts: constant curvature with non-Einstein or non-flat Weyl"
            )

    rows = _cross_checks(metric, spec, flags, mode)
    return ClassificationReport(
        name=metric.name or "unnamed",
        kind=metric.provenance,
        dimension=n,
        signature=metric.signature.epsilons,
        mode=mode,
        config={"points": config.points, "samples": config.samples,
                "seed": config.seed, "tol": config.tol},
        sample_points=[p.tolist() for p in points],
        flags=flags,
        evidence=evidence,
        cross_checks=rows,
        warnings=warnings,
        oracle_residual=oracle_residual,
    )


def _row_biconditional(check_id, statement, applicable, left, right, left_name, right_name, note=""):
    if not applicable or left is None or right is None:
        return CrossCheckRow(check_id, statement, False, f"{left_name} iff {right_name}",
                             f"{left_name}={_fmt(left)}, {right_name}={_fmt(right)}", None, note)
    return CrossCheckRow(
        check_id, statement, True,
        f"{left_name} iff {right_name}",
        f"{left_name}={_fmt(left)}, {right_name}={_fmt(right)}",
        left == right, note,
    )


def _cross_checks(metric: MetricField, spec: Optional[ProductSpec], flags: Flags, mode: str) -> list:
    n = metric.dimension
    riemannian = mode == "riemannian"
    lorentzian = metric.signature.is_lorentzian
    kind = metric.provenance
    rows = []
    base_dim = spec.base_dim if spec is not None else None
    fiber_dim = spec.fiber_dim if spec is not None else None

    rows.append(_row_biconditional(
        "lemma-3.1",
        "a 4-dimensional direct product is self-dual iff it is anti-self-dual",
        kind == "direct" and n == 4 and not lorentzian,
        flags.self_dual, flags.anti_self_dual, "self_dual", "anti_self_dual",
    ))
    rows.append(_row_biconditional(
        "theorem-3.2",
        "a 4-dimensional warped product is conformally Osserman iff conformally flat",
        kind == "warped" and n == 4,
        flags.conformally_osserman, flags.lcf, "conformally_osserman", "lcf",
    ))
    if kind == "twisted" and n == 4:
        in_scope = base_dim in (1, 3)
        note = "" if in_scope else (
            f"outside the hypothesis: dim B = {base_dim}, dim F = {fiber_dim} "
            "(both factors are surfaces)"
        )
        rows.append(_row_biconditional(
            "theorem-3.4",
            "a 4-dimensional twisted product with a 1- or 3-dimensional base is "
            "conformally Osserman iff conformally flat",
            in_scope,
            flags.conformally_osserman, flags.lcf, "conformally_osserman", "lcf",
            note=note,
        ))
    rows.append(_row_biconditional(
        "theorem-1.1",
        "a Riemannian warped product is conformally Osserman iff conformally flat",
        kind == "warped" and riemannian and n >= 4,
        flags.conformally_osserman, flags.lcf, "conformally_osserman", "lcf",
    ))
    rows.append(_row_biconditional(
        "theorem-1.2",
        "a Riemannian twisted product is pointwise Osserman iff of constant curvature",
        kind in ("warped", "twisted") and riemannian,
        flags.pointwise_osserman, flags.constant_curvature,
        "pointwise_osserman", "constant_curvature",
    ))
    if kind == "direct":
        applicable = riemannian and flags.conformally_osserman is not None and flags.lcf is not None
        passed = None
        if applicable:
            passed = (not flags.conformally_osserman) or bool(flags.lcf)
        rows.append(CrossCheckRow(
            "lemma-4.2",
            "a conformally Osserman Riemannian direct product has vanishing Weyl tensor",
            applicable,
            "conformally_osserman implies lcf",
            f"conformally_osserman={_fmt(flags.conformally_osserman)}, lcf={_fmt(flags.lcf)}",
            passed,
        ))
    if kind == "twisted":
        one_dim_factor = base_dim == 1 or fiber_dim == 1
        note = "" if one_dim_factor else (
            f"outside the hypothesis: dim B = {base_dim}, dim F = {fiber_dim}"
        )
        rows.append(_row_biconditional(
            "theorem-4.4",
            "a Riemannian twisted product with a 1-dimensional base or fiber is "
            "conformally Osserman iff conformally flat",
            one_dim_factor and riemannian and n >= 4,
            flags.conformally_osserman, flags.lcf, "conformally_osserman", "lcf",
            note=note,
        ))
    # Einstein + conformally Osserman iff pointwise Osserman
    left = None
    if flags.einstein is not None and flags.conformally_osserman is not None:
        left = flags.einstein and flags.conformally_osserman
    note = "" if riemannian else "indefinite signature: verdicts are charpoly-constancy"
    rows.append(_row_biconditional(
        "einstein-biconditional",
        "Einstein and conformally Osserman together are equivalent to pointwise Osserman",
        left is not None and flags.pointwise_osserman is not None,
        left, flags.pointwise_osserman,
        "einstein and conformally_osserman", "pointwise_osserman",
        note=note,
    ))
    rows.append(_row_biconditional(
        "corollary-4.5",
        "a twisted-product decomposition of a pointwise Osserman Riemannian manifold "
        "forces constant curvature",
        kind in ("warped", "twisted") and riemannian,
        flags.pointwise_osserman, flags.constant_curvature,
        "pointwise_osserman", "constant_curvature",
    ))
    return rows
