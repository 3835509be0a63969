import json
import subprocess
import sys

import pytest

from osserman_lab.cli import main
from osserman_lab.metric import MetricField
from osserman_lab.products import ProductSpec
from osserman_lab.specfile import (
    SpecFileError,
    load_manifold,
    load_manifold_file,
    load_preset,
    preset_names,
)

EXAMPLE_FILE = {
    "name": "example-3.3",
    "kind": "twisted",
    "base": {"kind": "coordinate", "dimension": 2, "signature": [1, 1],
             "metric": [["1", "0"], ["0", "1"]]},
    "fiber": {"kind": "coordinate", "dimension": 2, "signature": [1, 1],
              "metric": [["1", "0"], ["0", "1"]]},
    "function": "exp(x1*x3 - x2*x4)",
    "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]],
}


def test_load_illustrative_spec():
    spec = load_manifold(EXAMPLE_FILE)
    assert isinstance(spec, ProductSpec)
    assert spec.kind == "twisted" and spec.dimension == 4
    assert spec.base.box == ((-1.0, 1.0), (-1.0, 1.0))


def test_load_coordinate_spec():
    metric = load_manifold({
        "name": "demo", "kind": "coordinate", "dimension": 2,
        "signature": [1, 1], "metric": [["1", "0"], ["0", "x1^2 + 1"]],
    })
    assert isinstance(metric, MetricField)
    assert metric.name == "demo"


@pytest.mark.parametrize("mutate, path_fragment", [
    (lambda d: d.pop("kind"), "kind"),
    (lambda d: d.update(kind="spiral"), "kind"),
    (lambda d: d.pop("function"), "function"),
    (lambda d: d["base"].pop("metric"), "base"),
    (lambda d: d["base"]["metric"][0].__setitem__(1, "x1 +"), "base.metric[0][1]"),
    (lambda d: d["fiber"]["signature"].__setitem__(0, 2), "fiber.signature"),
    (lambda d: d.update(box=[[1, -1]] * 4), "box[0]"),
    (lambda d: d.update(dimension=5), "dimension"),
    (lambda d: d["base"].update(kind="warped"), "base.kind"),
])
def test_validation_errors_carry_paths(mutate, path_fragment):
    data = json.loads(json.dumps(EXAMPLE_FILE))
    mutate(data)
    with pytest.raises(SpecFileError) as err:
        load_manifold(data)
    assert path_fragment in str(err.value)


def test_asymmetric_metric_rejected():
    data = {
        "kind": "coordinate", "dimension": 2, "signature": [1, 1],
        "metric": [["1", "x1"], ["x2", "1"]],
    }
    with pytest.raises(SpecFileError, match="symmetric"):
        load_manifold(data)


def test_direct_with_function_rejected():
    data = json.loads(json.dumps(EXAMPLE_FILE))
    data["kind"] = "direct"
    with pytest.raises(SpecFileError, match="no function"):
        load_manifold(data)


def test_warped_with_fiber_variable_rejected():
    data = json.loads(json.dumps(EXAMPLE_FILE))
    data["kind"] = "warped"
    with pytest.raises(SpecFileError, match="base variables only"):
        load_manifold(data)


def test_load_manifold_file_roundtrip(tmp_path):
    path = tmp_path / "demo.json"
    path.write_text(json.dumps(EXAMPLE_FILE))
    spec = load_manifold_file(path)
    assert spec.name == "example-3.3"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecFileError, match="not valid JSON"):
        load_manifold_file(bad)


def test_every_preset_validates():
    names = preset_names()
    assert sorted(names) == sorted([
        "flat2", "flat3", "flat4", "sphere2", "sphere4", "hyperbolic3",
        "hyperbolic3-warped", "s2xs2", "r2xs2", "cp2-fubini-study",
        "example-3.3", "walker", "twisted-reducible", "twisted-dimF1",
    ])
    for name in names:
        obj = load_preset(name)
        assert isinstance(obj, (MetricField, ProductSpec))


def test_unknown_preset_message():
    with pytest.raises(SpecFileError, match="unknown preset"):
        load_preset("moebius")


# ---------------------------------------------------------------- CLI level

def run_cli(*argv):
    from io import StringIO
    import contextlib

    out, err = StringIO(), StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_cli_presets_lists_zoo():
    code, out, _ = run_cli("presets")
    assert code == 0
    assert "example-3.3" in out and "walker" in out


def test_cli_classify_flat4_exit_zero():
    code, out, _ = run_cli("classify", "--preset", "flat4", "--points", "2", "--samples", "8")
    assert code == 0
    assert "constant_curvature" in out


def test_cli_classify_json_schema():
    code, out, _ = run_cli("classify", "--preset", "example-3.3", "--json",
                           "--points", "2", "--samples", "8")
    assert code == 0
    data = json.loads(out)
    assert data["flags"]["conformally_osserman"] is True
    assert data["flags"]["lcf"] is False
    assert data["config"]["seed"] == 42
    assert data["all_checks_pass"] is True


def test_cli_classify_json_reproducible():
    args = ("classify", "--preset", "s2xs2", "--json", "--points", "2", "--samples", "8")
    code_a, out_a, _ = run_cli(*args)
    code_b, out_b, _ = run_cli(*args)
    assert code_a == code_b == 0
    assert out_a == out_b


def test_cli_unknown_preset_is_input_error():
    code, _, err = run_cli("classify", "--preset", "moebius")
    assert code == 1
    assert "unknown preset" in err


def test_cli_manifold_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(EXAMPLE_FILE))
    code, out, _ = run_cli("classify", "--manifold", str(path),
                           "--points", "2", "--samples", "8")
    assert code == 0

    path.write_text(json.dumps({**EXAMPLE_FILE, "function": "exp(x9)"}))
    code, _, err = run_cli("classify", "--manifold", str(path))
    assert code == 1
    assert "function" in err


def test_cli_curvature_walker_weyl():
    code, out, _ = run_cli("curvature", "--preset", "walker",
                           "--at", "0,0,1,1,0,0", "--what", "weyl")
    assert code == 0
    assert "W_3434 = +1.0000000000" in out


def test_cli_curvature_flat_riemann():
    code, out, _ = run_cli("curvature", "--preset", "flat4",
                           "--at", "0.1,0.2,0.3,0.4", "--what", "riemann")
    assert code == 0
    assert "all components vanish" in out


def test_cli_curvature_weylpm_example():
    code, out, _ = run_cli("curvature", "--preset", "example-3.3",
                           "--at", "0,0,0,0", "--what", "weylpm")
    assert code == 0
    assert "spectrum(W+): [-1.0, 0.0, 1.0]" in out
    assert "spectrum(W-): [0.0, 0.0, 0.0]" in out


def test_cli_curvature_jacobi_direction():
    code, out, _ = run_cli("curvature", "--preset", "sphere4",
                           "--at", "0,0,0,0", "--what", "jacobi:1,0,0,0")
    assert code == 0
    assert "eigenvalues: [0.0, 1.0, 1.0, 1.0]" in out


def test_cli_curvature_schouten():
    code, out, _ = run_cli("curvature", "--preset", "sphere4",
                           "--at", "0,0,0,0", "--what", "schouten")
    assert code == 0
    assert "Schouten" in out


def test_cli_curvature_unknown_what():
    code, _, err = run_cli("curvature", "--preset", "flat4",
                           "--at", "0,0,0,0", "--what", "torsion")
    assert code == 1
    assert "unknown --what" in err


def test_cli_classify_exit_two_on_failing_row(monkeypatch):
    # no preset trips a cross-check (the statements hold), so exercise the
    # wiring with a doctored report
    import osserman_lab.cli as cli_mod
    from osserman_lab.classify import CrossCheckRow

    real_classify = cli_mod.classify

    def tampered(obj, config=None):
        report = real_classify(obj, config)
        report.cross_checks.append(
            CrossCheckRow("synthetic", "forced failure", True, "x", "y", False))
        return report

    monkeypatch.setattr(cli_mod, "classify", tampered)
    code, out, _ = run_cli("classify", "--preset", "flat2",
                           "--points", "2", "--samples", "8")
    assert code == 2
    assert "FAIL" in out


def test_cli_curvature_point_outside_box():
    code, _, err = run_cli("curvature", "--preset", "hyperbolic3",
                           "--at", "0,0,9", "--what", "ricci")
    assert code == 1
    assert "outside the chart box" in err


def test_cli_nonpositive_twisting_function(tmp_path):
    data = json.loads(json.dumps(EXAMPLE_FILE))
    data["function"] = "x1"  # crosses zero inside the box
    path = tmp_path / "bad_function.json"
    path.write_text(json.dumps(data))
    code, _, err = run_cli("classify", "--manifold", str(path),
                           "--points", "3", "--samples", "8")
    assert code == 1
    assert "not positive" in err


def test_cli_curvature_null_jacobi_direction():
    code, _, err = run_cli("curvature", "--preset", "walker",
                           "--at", "0,0,0,0,0,0", "--what", "jacobi:1,0,0,0,0,0")
    assert code == 1
    assert "null" in err


@pytest.mark.parametrize("case", [
    "example-3.3", "walker", "lemma-3.1", "oracle-warped",
    "oracle-twisted", "theorem-1.1", "theorem-1.2",
])
def test_cli_reproduce_cases_pass(case):
    code, out, _ = run_cli("reproduce", "--case", case)
    assert code == 0, out
    assert "PASS" in out


def test_cli_reproduce_json():
    code, out, _ = run_cli("reproduce", "--case", "oracle-warped", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert all(line["ok"] for line in data["lines"])


def test_console_entry_point_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "osserman_lab.cli", "presets"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "sphere4" in proc.stdout
