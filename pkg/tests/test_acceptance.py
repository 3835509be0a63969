"""Acceptance criteria, one test per criterion, each printing a verdict line.

Criterion 1 is split: the vanishing of the anti-self-dual block passes as
stated, while the printed closed form for the self-dual spectrum is
implemented exactly as stated and expected to fail away from the locus
x1*x3 = x2*x4 (see the xfail reason and the companion test asserting the
independently verified spectrum).
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from osserman_lab.classify import ClassifyConfig, classify
from osserman_lab.curvature import (
    kulkarni_nomizu,
    point_curvature,
    schouten,
    sectional,
    weyl,
    weyl_trace_residual,
)
from osserman_lab.expr import parse
from osserman_lab.fourdim import weyl_pm
from osserman_lab.linalg import char_poly, metric_frame, sphere_samples, sym_eigen
from osserman_lab.metric import MetricField, conformal_rescale
from osserman_lab.operators import conformal_jacobi, osserman_check
from osserman_lab.products import (
    ProductSpec,
    adapted_frame,
    build_product,
    max_oracle_residual,
)
from osserman_lab.specfile import preset_names

EX33_POINTS = [
    (0.0, 0.0, 0.0, 0.0),
    (0.3, -0.4, 0.25, 0.7),
    (-0.8, 0.5, 0.6, -0.9),
    (0.5, 0.5, -0.5, 0.5),
    (-0.25, 0.75, 0.1, -0.6),
]


@contextmanager
def verdict(number, description):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number}: PASS - {description} [{elapsed:.2f}s]")


def test_criterion_1_w_minus_vanishes(presets):
    with verdict("1a", "twisted example: anti-self-dual block vanishes at 5 points, < 1 s"):
        start = time.perf_counter()
        joint = build_product(presets("example-3.3"))
        for point in EX33_POINTS:
            pm = weyl_pm(joint, point)
            scale = max(1.0, pm.scale)
            assert np.max(np.abs(pm.w_minus)) <= 1e-8 * scale
        assert time.perf_counter() - start < 1.0


@pytest.mark.xfail(
    strict=True,
    reason=(
        "stated closed form a = (1 + e^(x1x3-x2x4))/2 does not match the "
        "orthonormal-frame self-dual Weyl spectrum of the twisted metric "
        "delta + f^2 delta; two independent computations (this pipeline, "
        "cross-validated by trace-freeness, conformal invariance and the "
        "two-form norm decomposition, and a from-scratch symbolic "
        "derivation) both give spectrum {..., +-e^-(x1x3-x2x4)}, which "
        "agrees with the stated value only where x1*x3 = x2*x4 (e.g. the "
        "origin); see the companion test below for the verified spectrum"
    ),
)
def test_criterion_1_spectrum_formula_as_stated(presets):
    with verdict("1b", "twisted example: stated spectrum formula (1+e^xi)/2"):
        joint = build_product(presets("example-3.3"))
        for point in EX33_POINTS:
            pm = weyl_pm(joint, point)
            xi = point[0] * point[2] - point[1] * point[3]
            a = 0.5 * (1.0 + np.exp(xi))
            expected = np.array([-a, 0.0, a])
            observed = sym_eigen(pm.w_plus)
            assert np.max(np.abs(observed - expected)) <= 1e-7 * (1.0 + a)


def test_criterion_1_verified_spectrum(presets):
    with verdict("1c", "twisted example: verified spectrum {-e^-xi, 0, e^-xi} at 5 points, < 1 s"):
        start = time.perf_counter()
        joint = build_product(presets("example-3.3"))
        for point in EX33_POINTS:
            pm = weyl_pm(joint, point)
            xi = point[0] * point[2] - point[1] * point[3]
            a = np.exp(-xi)
            expected = np.array([-a, 0.0, a])
            observed = sym_eigen(pm.w_plus)
            assert np.max(np.abs(observed - expected)) <= 1e-7 * (1.0 + a)
        assert time.perf_counter() - start < 1.0


def test_criterion_2_walker_product(presets):
    with verdict(2, "Walker product: Ricci flat, W_3434 = 1, nilpotent conformal Jacobi, < 2 s"):
        start = time.perf_counter()
        joint = build_product(presets("walker"))
        rng = np.random.default_rng(5)
        for _ in range(5):
            point = rng.uniform(-1.0, 1.0, 6)
            data = point_curvature(joint, point)
            assert np.max(np.abs(data.ricci.ricci)) <= 1e-8
            assert abs(data.weyl.components[2, 3, 2, 3] - 1.0) <= 1e-7
            frame = metric_frame(data.g, joint.signature)
            for sign in (1, -1):
                for s in sphere_samples(frame.epsilons, 6, seed=0, causal_sign=sign):
                    op = conformal_jacobi(joint, point, frame.vectors @ s,
                                          data=data, frame=frame)
                    coeffs = char_poly(op)
                    assert coeffs[0] == 1.0
                    assert np.max(np.abs(coeffs[1:])) <= 1e-8
        assert time.perf_counter() - start < 2.0


def _random_metric2(rng, curved=True):
    a, b, c = (round(float(v), 3) for v in rng.uniform(0.1, 0.6, 3))
    if not curved:
        return MetricField.flat(2)
    rows = [[f"1 + {a}*x2^2", f"{b}*x1*x2"], [f"{b}*x1*x2", f"2 + {c}*x1^2"]]
    return MetricField.from_strings(rows, (1, 1))


def _random_warped_spec(rng):
    p, q = (round(float(v), 3) for v in rng.uniform(0.2, 0.8, 2))
    function = parse(f"exp({p}*x1) + {q}*x2^2", 4)
    return ProductSpec("warped", _random_metric2(rng), _random_metric2(rng), function)


def _random_twisted_spec(rng):
    a, b, c = (round(float(v), 3) for v in rng.uniform(0.2, 0.7, 3))
    function = parse(f"exp({a}*x1*x3 - {b}*x2*x4 + {c}*x1)", 4)
    return ProductSpec("twisted", _random_metric2(rng), _random_metric2(rng), function)


def test_criterion_3_oracle_equivalence():
    with verdict(3, "closed-form product curvature matches coordinate curvature, < 10 s"):
        start = time.perf_counter()
        rng = np.random.default_rng(101)
        specs = [_random_warped_spec(rng) for _ in range(3)]
        specs += [_random_twisted_spec(rng) for _ in range(3)]
        worst = 0.0
        for spec in specs:
            points = [rng.uniform(-0.8, 0.8, spec.dimension) for _ in range(5)]
            worst = max(worst, max_oracle_residual(spec, points, 10, seed=31))
        assert worst <= 1e-7
        assert time.perf_counter() - start < 10.0


def test_criterion_4_calibration_and_decomposition(presets):
    with verdict(4, "sphere/hyperbolic calibration and R = C*g + W with trace-free W"):
        rng = np.random.default_rng(7)
        for name, value in (("sphere2", 1.0), ("sphere4", 1.0)):
            metric = presets(name)
            n = metric.dimension
            for _ in range(5):
                point = rng.uniform(-0.8, 0.8, n)
                x, y = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
                assert abs(sectional(metric, point, x, y) - value) <= 1e-8
        hyp = presets("hyperbolic3")
        hypw = build_product(presets("hyperbolic3-warped"))
        for metric, box_lo, box_hi in ((hyp, [-1, -1, 0.6], [1, 1, 1.4]),
                                       (hypw, [-0.9] * 3, [0.9] * 3)):
            for _ in range(5):
                point = rng.uniform(box_lo, box_hi)
                x, y = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
                assert abs(sectional(metric, point, x, y) + 1.0) <= 1e-8
        for name in preset_names():
            obj = presets(name)
            metric = obj if isinstance(obj, MetricField) else build_product(obj)
            if metric.dimension < 4:
                continue
            lo = np.array([b[0] for b in metric.box]) + 0.1
            hi = np.array([b[1] for b in metric.box]) - 0.1
            for _ in range(3):
                point = rng.uniform(lo, hi)
                data = point_curvature(metric, point)
                c = schouten(metric, point, ricci=data.ricci)
                residual = np.max(np.abs(
                    data.riemann.components - kulkarni_nomizu(c, data.g) - data.weyl.components
                ))
                scale = max(1.0, data.riemann.scale)
                assert residual <= 1e-8 * scale
                assert weyl_trace_residual(metric, point, w=data.weyl) <= 1e-8 * scale


def test_criterion_5_product_conformal_jacobi_eigenvalues(presets):
    with verdict(5, "product of unit spheres: conformal Jacobi eigenvalues 2/3 and -1/3"):
        spec = presets("s2xs2")
        joint = build_product(spec)
        for point in ([0.1, -0.2, 0.3, 0.2], [0.4, 0.3, -0.5, 0.1]):
            frame = adapted_frame(spec, point)
            data = point_curvature(joint, point)
            x = frame.vectors[:, 0]  # unit base direction
            op = conformal_jacobi(joint, point, x, data=data, frame=frame)
            assert abs(np.trace(op)) <= 1e-9
            # base-plane eigenvalue on the other base direction
            assert abs(op[1, 1] - 2.0 / 3.0) <= 1e-7
            # mixed eigenvalue on each fiber direction
            assert abs(op[2, 2] + 1.0 / 3.0) <= 1e-7
            assert abs(op[3, 3] + 1.0 / 3.0) <= 1e-7
            spectrum = sym_eigen(0.5 * (op + op.T))
            assert np.max(np.abs(spectrum - [-1 / 3, -1 / 3, 0, 2 / 3])) <= 1e-7


def test_criterion_6_theorem_desk_suite(presets):
    with verdict(6, "structural statement suite over the preset zoo, < 60 s"):
        start = time.perf_counter()
        config = ClassifyConfig(points=5, samples=64)

        # split relations for direct products (2+2 and 3+1)
        spec = presets("r2xs2")
        joint = build_product(spec)
        point = [0.2, 0.3, -0.1, 0.4]
        pm = weyl_pm(joint, point, frame=adapted_frame(spec, point))
        scale = max(1.0, pm.scale)
        for block in (pm.w_plus, pm.w_minus):
            assert max(abs(block[0, 1]), abs(block[0, 2]), abs(block[1, 2])) <= 1e-8 * scale
        assert np.max(np.abs(np.diag(pm.w_plus) - np.diag(pm.w_minus))) <= 1e-8 * scale
        bumpy3 = MetricField.from_strings(
            [["1 + x2^2", "x1*x2/3", "x3/5"],
             ["x1*x2/3", "2 + x1^2", "0"],
             ["x3/5", "0", "1 + x1^2/2 + x2^2/3"]], (1, 1, 1))
        line = MetricField.from_strings([["1"]], (1,))
        spec31 = ProductSpec("direct", bumpy3, line, None, name="bumpy3xline")
        joint31 = build_product(spec31)
        pm = weyl_pm(joint31, point, frame=adapted_frame(spec31, point))
        scale = max(1.0, pm.scale)
        assert abs(pm.w_plus[0, 1] - pm.w_minus[0, 1]) <= 1e-8 * scale
        assert abs(pm.w_plus[0, 2] + pm.w_minus[0, 2]) <= 1e-8 * scale
        assert abs(pm.w_plus[1, 2] + pm.w_minus[1, 2]) <= 1e-8 * scale

        # 4-dimensional warped products: conformally Osserman iff conformally flat
        warped4 = [
            ProductSpec("warped", line, MetricField.flat(3), parse("exp(x1)", 4),
                        name="hyperbolic4-warped"),
            ProductSpec("warped", MetricField.flat(2), MetricField.flat(2),
                        parse("exp(x1)", 4), name="exp-warped"),
            ProductSpec("warped", MetricField.flat(2),
                        presets("sphere2"), parse("1 + x1^2/4 + x2^2/5", 4),
                        name="warped-bowl"),
        ]
        for spec4 in warped4:
            rep = classify(spec4, config)
            assert rep.flags.conformally_osserman == rep.flags.lcf, spec4.name
            row = [r for r in rep.cross_checks if r.check_id == "theorem-3.2"][0]
            assert row.applicable and row.passed

        # fiber-line twisted product
        rep = classify(presets("twisted-dimF1"), config)
        row = [r for r in rep.cross_checks if r.check_id == "theorem-4.4"][0]
        assert row.applicable and row.passed

        # direct products: conformally Osserman forces W = 0
        rep = classify(presets("s2xs2"), config)
        assert rep.flags.conformally_osserman is False and rep.flags.lcf is False
        assert [r for r in rep.cross_checks if r.check_id == "lemma-4.2"][0].passed
        rep = classify(presets("flat4"), config)
        assert rep.flags.conformally_osserman is True and rep.flags.lcf is True
        assert [r for r in rep.cross_checks if r.check_id == "lemma-4.2"][0].passed

        # every preset: all applicable cross-check rows pass, including the
        # Einstein/conformally-Osserman/pointwise-Osserman biconditional
        for name in preset_names():
            rep = classify(presets(name), config)
            for row in rep.cross_checks:
                if row.applicable:
                    assert row.passed, f"{name}: {row.check_id}"
            bic = [r for r in rep.cross_checks if r.check_id == "einstein-biconditional"][0]
            assert bic.applicable and bic.passed, name
        assert time.perf_counter() - start < 60.0


def test_criterion_7_fubini_study(presets):
    with verdict(7, "Fubini-Study plane: spectrum {0,1,1,4}, Einstein, not conformally flat"):
        metric = presets("cp2-fubini-study")
        rng = np.random.default_rng(3)
        for point in ([0.0, 0.0, 0.0, 0.0], [0.3, -0.2, 0.1, 0.4], [-0.5, 0.2, -0.3, 0.1]):
            report = osserman_check(metric, point, samples=64, seed=11)
            assert report.verdict == "constant"
            assert report.max_deviation <= 1e-6
            spectrum = np.array(report.spectra[0].values)
            assert np.max(np.abs(spectrum - [0.0, 1.0, 1.0, 4.0])) <= 1e-6
            data = point_curvature(metric, point)
            einstein = np.max(np.abs(data.ricci.ricci - (data.ricci.scalar / 4) * data.g))
            assert einstein / (1 + np.max(np.abs(data.ricci.ricci))) <= 1e-7
        rep = classify(metric, ClassifyConfig(points=3, samples=32))
        assert rep.flags.lcf is False
        assert rep.flags.conformally_osserman is True


def test_criterion_8_conformal_invariance(presets, bumpy4):
    with verdict(8, "Weyl conformal invariance and warped-to-direct rescaling"):
        rng = np.random.default_rng(13)
        sigmas = ["x1/3 + sin(x2)/2", "x3*x4/5 - x1^2/8", "cos(x2)/3 + x4/7"]
        for metric in (bumpy4, presets("cp2-fubini-study")):
            for text in sigmas:
                sigma = parse(text, 4)
                rescaled = conformal_rescale(metric, sigma)
                point = rng.uniform(-0.7, 0.7, 4)
                w1 = np.einsum("im,mjkl->ijkl", metric.inverse(point),
                               weyl(metric, point).components)
                w2 = np.einsum("im,mjkl->ijkl", rescaled.inverse(point),
                               weyl(rescaled, point).components)
                scale = max(1.0, float(np.max(np.abs(w1))))
                assert np.max(np.abs(w1 - w2)) <= 1e-7 * scale

        # rescaling a warped product by 1/f^2 yields the direct product
        spec = presets("hyperbolic3-warped")
        joint = build_product(spec)
        minus_log_f = parse("-x1", 3)  # sigma = -log(exp(x1))
        rescaled = conformal_rescale(joint, minus_log_f)
        base_rescaled = conformal_rescale(spec.base, parse("-x1", 1))
        direct = build_product(ProductSpec("direct", base_rescaled, spec.fiber, None))
        for _ in range(5):
            point = rng.uniform(-0.9, 0.9, 3)
            assert np.max(np.abs(rescaled.value(point) - direct.value(point))) <= 1e-12
