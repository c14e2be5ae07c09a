import json
import subprocess
import sys
from pathlib import Path

import pytest

from ppc.cli import main, run_checks
from ppc.errors import ExprSyntaxError, SchemaError, VariantMismatch
from ppc.report import all_passed, to_json, to_text
from ppc.sampling import Xorshift64Star, sample_points
from ppc.specfile import load_spec

SPECS = Path(__file__).resolve().parents[1] / "specs"

SL2R = """
[structure]
variant = "paracontact"
mode = "lie_group"
epsilon = 1

[functions]
a1 = 1.0
a2 = 1.0
a3 = 1.0
a4 = 0.0
a5 = 0.0

[sampling]
points = 1
"""


def write(tmp_path, text, name="spec.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_sl2r(tmp_path):
    sf = load_spec(write(tmp_path, SL2R))
    assert sf.variant == "paracontact"
    assert sf.mode == "lie_group"
    assert sf.epsilon == 1
    assert sf.functions["a1"] == 1.0
    assert len(sf.digest) == 64


def test_missing_function_names_the_field(tmp_path):
    text = SL2R.replace("a4 = 0.0\n", "")
    with pytest.raises(SchemaError, match="a4"):
        load_spec(write(tmp_path, text))


def test_unparseable_expression_carries_offset(tmp_path):
    text = SL2R.replace('a4 = 0.0', 'a4 = "1 + * 2"')
    text = text.replace('mode = "lie_group"', 'mode = "chart"')
    with pytest.raises(ExprSyntaxError):
        load_spec(write(tmp_path, text))


def test_shortcut_expansion(tmp_path):
    text = """
[structure]
variant = "darboux"

[constants]
alpha = 1.0
beta = 2.0
gamma = 0.0

[functions]
f = "sin(x)"
"""
    sf = load_spec(write(tmp_path, text))
    assert sf.shortcut
    report = run_checks(sf, "check", points=5)
    assert all_passed(report)
    names = [c["name"] for c in report["checks"]]
    assert "darboux_constraint" in names
    assert "realization_consistency" in names


def test_darboux_without_abc_or_alpha_fails(tmp_path):
    text = '[structure]\nvariant = "darboux"\n\n[functions]\na = "1"\nb = "0"\n'
    with pytest.raises(SchemaError):
        load_spec(write(tmp_path, text))


def test_lie_group_rejects_expressions(tmp_path):
    text = SL2R.replace("a1 = 1.0", 'a1 = "exp(z)"')
    with pytest.raises(SchemaError):
        load_spec(write(tmp_path, text))


def test_chart_requires_frame(tmp_path):
    text = SL2R.replace('mode = "lie_group"', 'mode = "chart"')
    with pytest.raises(SchemaError, match="frame"):
        load_spec(write(tmp_path, text))


def test_run_checks_sl2r_soliton():
    sf = load_spec(SPECS / "sl2r_soliton.toml")
    report = run_checks(sf, "soliton")
    assert all_passed(report)
    s = report["summary"]
    assert s["soliton"]["verdict"] == "soliton"
    assert s["soliton"]["lambda"] == -2.0
    assert s["soliton"]["scalar_curvature"] == -6.0
    assert s["kappa_mu"]["mu_min"] == -2.0
    assert s["segre"]["label"] == "segre_degenerate_21"


def test_variant_mismatch_exit_code():
    assert main(["crossval", str(SPECS / "sl2r_soliton.toml")]) == 2


def test_exit_codes_and_formats(capsys):
    assert main(["soliton", str(SPECS / "sl2r_soliton.toml")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("ppc ")
    assert "RESULT: PASS" in out

    assert main(["soliton", str(SPECS / "parasasakian.toml")]) == 1
    out = capsys.readouterr().out
    assert "RESULT: FAIL" in out

    assert main(["soliton", str(SPECS / "sl2r_soliton.toml"),
                 "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "soliton"


def test_schema_error_exit_code(tmp_path, capsys):
    path = write(tmp_path, "[structure]\nvariant = \"nope\"\n")
    assert main(["check", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_normal_soliton_needs_lambda(tmp_path):
    text = """
[structure]
variant = "normal"
mode = "lie_group"

[functions]
b1 = 0.0
b2 = 2.0
a3 = -2.0
a4 = 0.0
a5 = 0.0
"""
    sf = load_spec(write(tmp_path, text))
    with pytest.raises(SchemaError, match="lambda"):
        run_checks(sf, "soliton")


def test_normal_specs_pass():
    for name in ("normal_unsteady_einstein.toml", "normal_steady_soliton.toml"):
        sf = load_spec(SPECS / name)
        report = run_checks(sf, "report")
        assert all_passed(report), name


def test_general_darboux_spec_passes():
    sf = load_spec(SPECS / "darboux_parasasakian.toml")
    report = run_checks(sf, "report")
    assert all_passed(report)
    assert report["summary"]["h_flags"]["para_sasakian"]
    with pytest.raises(VariantMismatch):
        run_checks(sf, "soliton")
    with pytest.raises(VariantMismatch):
        run_checks(sf, "crossval")


def test_machine_report_round_trip():
    sf = load_spec(SPECS / "sl2r_soliton.toml")
    report = run_checks(sf, "report")
    blob = to_json(report)
    assert to_json(json.loads(blob)) == blob


def test_reports_are_deterministic():
    sf1 = load_spec(SPECS / "inhomogeneous_soliton.toml")
    sf2 = load_spec(SPECS / "inhomogeneous_soliton.toml")
    r1 = run_checks(sf1, "soliton")
    r2 = run_checks(sf2, "soliton")
    assert to_json(r1) == to_json(r2)


def test_text_and_json_numeric_parity():
    sf = load_spec(SPECS / "sl2r_soliton.toml")
    report = run_checks(sf, "soliton")
    text = to_text(report)
    for rec in report["checks"]:
        if rec.get("worst_residual") is not None:
            assert repr(rec["worst_residual"]) in text
        if rec.get("tolerance") is not None:
            assert repr(rec["tolerance"]) in text


def test_reports_identical_across_processes_and_hash_seeds():
    import os
    outs = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        proc = subprocess.run(
            [sys.executable, "-m", "ppc.cli", "soliton",
             str(SPECS / "sl2r_soliton.toml"), "--format", "json"],
            capture_output=True, text=True, env=env)
        assert proc.returncode == 0
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_cli_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "ppc.cli", "soliton",
         str(SPECS / "sl2r_soliton.toml"), "--format", "json"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["soliton"]["verdict"] == "soliton"


def test_sampling_is_deterministic_and_respects_exclusions():
    box = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
    a = sample_points(box, 50, seed=7)
    b = sample_points(box, 50, seed=7)
    assert [(p.x, p.y, p.z) for p in a] == [(p.x, p.y, p.z) for p in b]
    c = sample_points(box, 50, seed=8)
    assert a[0].x != c[0].x
    guarded = sample_points(box, 200, seed=7, exclude=[("z", 0.0)])
    assert all(abs(p.z) >= 0.1 for p in guarded)
    assert all(-1.0 <= p.x <= 1.0 for p in guarded)


def test_xorshift_stream_is_stable():
    rng = Xorshift64Star(7)
    stream = [rng.next_u64() for _ in range(4)]
    rng2 = Xorshift64Star(7)
    assert stream == [rng2.next_u64() for _ in range(4)]
    assert all(0 <= v < 2 ** 64 for v in stream)
    u = Xorshift64Star(0).uniform()
    assert 0.0 <= u < 1.0


NATURAL = """
[structure]
variant = "natural"
mode = "lie_group"

[functions]
a1 = 0.0
a2 = 3.0
a3 = 0.0
a4 = 0.0
a5 = 0.0
b1 = 3.0
b2 = 0.0

[sampling]
points = 1
"""


def test_natural_variant_check_and_soliton_mismatch(tmp_path):
    sf = load_spec(write(tmp_path, NATURAL))
    report = run_checks(sf, "check")
    assert all_passed(report)
    assert report["summary"]["flags"]["divergence_free"]
    with pytest.raises(VariantMismatch):
        run_checks(sf, "soliton")


SINGULAR_FIELD = """
[structure]
variant = "paracontact"
mode = "chart"

[functions]
a1 = "log(z)"
a2 = "log(z)"
a3 = -1.0
a4 = 0.0
a5 = 0.0

[frame]
xi = [0.0, 0.0, 2.0]
e = [1.0, 0.0, 0.0]
phie = [0.0, 1.0, 0.0]

[sampling]
box = [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
points = 16
seed = 3
"""


def test_epsilon_must_be_unit(tmp_path):
    text = SL2R.replace("epsilon = 1", "epsilon = 1.5")
    with pytest.raises(SchemaError, match="epsilon"):
        load_spec(write(tmp_path, text))


def test_overflowing_field_exits_2(tmp_path, capsys):
    text = SL2R.replace('mode = "lie_group"', 'mode = "chart"')
    text = text.replace("a1 = 1.0", 'a1 = "exp(exp(exp(x+9)))"')
    text += """
[frame]
xi = [0.0, 0.0, 2.0]
e = [1.0, 0.0, 0.0]
phie = [0.0, 1.0, 0.0]
"""
    path = write(tmp_path, text)
    assert main(["check", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_skip_singular_policy(tmp_path):
    # log(z) is undefined on half the box: plain runs surface the offending
    # point, --skip-singular drops it and reports the count
    sf = load_spec(write(tmp_path, SINGULAR_FIELD))
    with pytest.raises(Exception, match="at point"):
        run_checks(sf, "check")
    report = run_checks(sf, "check", skip_singular=True)
    assert report["summary"]["skipped_points"] > 0


def test_fixed_points_override(tmp_path):
    text = SL2R + "\n[sampling]\nfixed_points = [[0.0, 0.0, 0.0]]\n"
    # the later [sampling] table replaces the earlier one in TOML; rebuild
    text = SL2R.replace("[sampling]\npoints = 1\n",
                        "[sampling]\nfixed_points = [[0.1, 0.2, 0.3]]\n")
    sf = load_spec(write(tmp_path, text))
    pts = sf.sampling.generate()
    assert len(pts) == 1
    assert (pts[0].x, pts[0].y, pts[0].z) == (0.1, 0.2, 0.3)
