"""Command line front end.

    osserman-lab classify  --preset s2xs2 [--json]
    osserman-lab curvature --preset walker --at 0,0,1,1,0,0 --what weyl
    osserman-lab reproduce --case example-3.3
    osserman-lab presets

Exit codes: 0 all checks pass, 1 input or evaluation error, 2 a verification
or cross-check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .classify import ClassifyConfig, classify
from .curvature import (
    CurvatureError,
    point_curvature,
    ricci_scalar,
    riemann,
    schouten,
    weyl,
    weyl_trace_residual,
)
from .expr import ExprError
from .fourdim import FourDimError, weyl_pm
from .linalg import LinalgError, char_poly, metric_frame, sym_eigen
from .metric import MetricError, MetricField
from .operators import OperatorError, jacobi
from .products import ProductError, ProductSpec, build_product
from .reproduce import CASES, run_case
from .specfile import SpecFileError, load_manifold_file, load_preset, preset_names

INPUT_ERROR = 1
CHECK_FAILED = 2


def _load_target(args) -> tuple:
    """(metric, spec_or_none) from --manifold / --preset."""
    if args.manifold:
        obj = load_manifold_file(args.manifold)
    else:
        obj = load_preset(args.preset)
    if isinstance(obj, ProductSpec):
        return build_product(obj), obj
    return obj, None


def _add_target_options(parser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--manifold", metavar="FILE", help="manifold spec file (JSON)")
    group.add_argument("--preset", metavar="NAME", help="preset name (see 'presets')")


def _flag_text(value) -> str:
    return {True: "true", False: "false", None: "indeterminate"}[value]


def cmd_classify(args) -> int:
    config = ClassifyConfig(points=args.points, samples=args.samples,
                            seed=args.seed, tol=args.tol)
    metric, spec = _load_target(args)
    report = classify(spec if spec is not None else metric, config)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(f"manifold: {report.name}  (kind {report.kind}, dimension {report.dimension}, "
              f"signature {report.signature}, {report.mode})")
        print(f"config: points={report.config['points']} samples={report.config['samples']} "
              f"seed={report.config['seed']} tol={report.config['tol']:g}")
        print("flags:")
        for key, value in report.flags.to_dict().items():
            if key == "constant_curvature_value":
                continue
            extra = ""
            if key == "constant_curvature" and value:
                extra = f"  (value {report.flags.constant_curvature_value:+.6f})"
            elif key == "constant_curvature":
                extra = f"  (spread {report.evidence['constant_curvature']['spread']:.2e})"
            elif key in ("einstein", "lcf"):
                dev = report.evidence.get(key, {}).get("deviation")
                if dev is not None:
                    extra = f"  (deviation {dev:.2e})"
            elif key in ("pointwise_osserman", "conformally_osserman"):
                per_point = report.evidence[key]["per_point"]
                worst = max(p["deviation"] for p in per_point)
                extra = f"  (max deviation {worst:.2e}, {report.evidence[key]['verdict_label']})"
            elif key == "twisted_reducible" and value is not None:
                worst = report.evidence["twisted_reducible"]["max_mixed_derivative"]
                extra = f"  (max mixed derivative {worst:.2e})"
            print(f"  {key:22s} {_flag_text(value)}{extra}")
        if report.oracle_residual is not None:
            print(f"oracle equivalence residual: {report.oracle_residual:.2e}")
        print("cross-checks:")
        for row in report.cross_checks:
            if row.applicable:
                status = "pass" if row.passed else "FAIL"
            else:
                status = "n/a "
            note = f"  [{row.note}]" if row.note else ""
            print(f"  [{status}] {row.check_id}: {row.observed}{note}")
        for warning in report.warnings:
            print(f"warning: {warning}")
    return 0 if report.all_checks_pass() else CHECK_FAILED


def _parse_point(text: str, dimension: int, metric: MetricField) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValueError(f"--at expects comma-separated numbers, got '{text}'") from None
    if len(values) != dimension:
        raise ValueError(f"--at needs {dimension} coordinates, got {len(values)}")
    point = np.array(values)
    for k, (lo, hi) in enumerate(metric.box):
        if not lo <= point[k] <= hi:
            raise ValueError(
                f"coordinate x{k + 1} = {point[k]} outside the chart box [{lo}, {hi}]"
            )
    return point


def _print_tensor4(label: str, components: np.ndarray) -> None:
    n = components.shape[0]
    printed = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                for l in range(k + 1, n):
                    if (i, j) > (k, l):
                        continue
                    value = components[i, j, k, l]
                    if abs(value) > 1e-12:
                        print(f"  {label}_{i+1}{j+1}{k+1}{l+1} = {value:+.10f}")
                        printed += 1
    if printed == 0:
        print("  all components vanish")


def cmd_curvature(args) -> int:
    metric, _ = _load_target(args)
    point = _parse_point(args.at, metric.dimension, metric)
    what = args.what
    if what == "riemann":
        r4 = riemann(metric, point)
        print(f"curvature tensor at {point.tolist()} (coordinate basis, independent components):")
        _print_tensor4("R", r4.components)
        print("symmetry residuals:",
              {k: f"{v:.2e}" for k, v in r4.symmetry_residuals().items()})
    elif what == "ricci":
        data = ricci_scalar(metric, point)
        print(f"Ricci tensor at {point.tolist()}:")
        print(np.array_str(data.ricci, precision=10, suppress_small=True))
        print(f"scalar curvature: {data.scalar:.10f}")
    elif what == "weyl":
        w4 = weyl(metric, point)
        print(f"Weyl tensor at {point.tolist()} (coordinate basis, independent components):")
        if w4.flag:
            print(f"  [{w4.flag}]")
        _print_tensor4("W", w4.components)
        print(f"trace residual: {weyl_trace_residual(metric, point, w=w4):.2e}")
        print("symmetry residuals:",
              {k: f"{v:.2e}" for k, v in w4.symmetry_residuals().items()})
    elif what == "schouten":
        print(f"Schouten tensor at {point.tolist()}:")
        print(np.array_str(schouten(metric, point), precision=10, suppress_small=True))
    elif what.startswith("jacobi:"):
        direction = np.array([float(v) for v in what.split(":", 1)[1].split(",")])
        if len(direction) != metric.dimension:
            raise ValueError(f"jacobi direction needs {metric.dimension} components")
        data = point_curvature(metric, point)
        q = float(direction @ data.g @ direction)
        if abs(q) < 1e-10:
            raise ValueError("jacobi direction is null; give a non-null direction")
        x = direction / np.sqrt(abs(q))
        frame = metric_frame(data.g, metric.signature)
        op = jacobi(metric, point, x, data=data, frame=frame)
        print(f"Jacobi operator at {point.tolist()} along {np.round(x, 6).tolist()} "
              f"(frame components, g(x,x) = {float(x @ data.g @ x):+.1f}):")
        print(np.array_str(op, precision=8, suppress_small=True))
        if metric.signature.is_riemannian:
            print("eigenvalues:", np.round(sym_eigen(0.5 * (op + op.T)), 8).tolist())
        else:
            print("characteristic polynomial:", np.round(char_poly(op), 8).tolist())
    elif what == "weylpm":
        pm = weyl_pm(metric, point)
        plus_spec, minus_spec = pm.spectra()
        print(f"self-dual / anti-self-dual Weyl blocks at {point.tolist()} "
              f"(orientation {pm.orientation:+d}):")
        print("W+ =")
        print(np.array_str(pm.w_plus, precision=8, suppress_small=True))
        print("spectrum(W+):", np.round(plus_spec, 8).tolist())
        print("W- =")
        print(np.array_str(pm.w_minus, precision=8, suppress_small=True))
        print("spectrum(W-):", np.round(minus_spec, 8).tolist())
    else:
        raise ValueError(
            f"unknown --what '{what}'; use riemann|ricci|weyl|schouten|jacobi:<dir>|weylpm"
        )
    return 0


def cmd_reproduce(args) -> int:
    result = run_case(args.case)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    else:
        print(f"case {result.case}: {'PASS' if result.passed else 'FAIL'}")
        for line in result.lines:
            mark = "ok " if line.ok else "BAD"
            print(f"  [{mark}] {line.label}: expected {line.expected}, observed {line.observed}")
        for note in result.notes:
            print(f"  note: {note}")
    return 0 if result.passed else CHECK_FAILED


def cmd_presets(_args) -> int:
    for name in preset_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osserman-lab",
        description="curvature, Weyl and Jacobi-operator checks for product metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classification report with cross-checks")
    _add_target_options(p)
    p.add_argument("--points", type=int, default=5, help="sample points (default 5)")
    p.add_argument("--samples", type=int, default=64, help="sphere samples per point (default 64)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default 42, or OSSERMAN_LAB_SEED)")
    p.add_argument("--tol", type=float, default=1e-7, help="verdict tolerance (default 1e-7)")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curvature", help="print a tensor or operator at a point")
    _add_target_options(p)
    p.add_argument("--at", required=True, metavar="X1,..,XN", help="evaluation point")
    p.add_argument("--what", required=True,
                   help="riemann | ricci | weyl | schouten | jacobi:<dir> | weylpm")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("reproduce", help="run a scripted verification case")
    p.add_argument("--case", required=True, choices=sorted(CASES), help="case name")
    p.add_argument("--json", action="store_true", help="machine-readable result")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("presets", help="list preset manifolds")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecFileError, ExprError, MetricError, ProductError, LinalgError,
            CurvatureError, OperatorError, FourDimError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
