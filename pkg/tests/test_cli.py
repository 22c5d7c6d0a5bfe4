import json

import numpy as np
import pytest

from torsion_forge.cli.main import main, parse_args
from torsion_forge.cli.report import dumps_canonical, render_text, to_jsonable
from torsion_forge.core.torsion import MOD_SIGN_NOTE, TorsionValue

from .conftest import REGULAR_GRAM_DET


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None), out


def test_parser_defaults():
    args = parse_args(["verify"])
    assert args.suite == "all"
    assert args.format == "text"
    assert args.tol is None


def test_unknown_command_exits_through_argparse():
    with pytest.raises(SystemExit):
        main(["analyze"])


def test_gram_report(capsys, fixture_path):
    code, report, _ = run_json(capsys, "gram", fixture_path("regular_angles.json"))
    assert code == 0
    assert report["det"][0] == pytest.approx(REGULAR_GRAM_DET, rel=1e-12)
    assert report["det"][1] == 0.0
    assert len(report["gram"]) == 4 and len(report["gram"][0]) == 4
    assert report["lengths"]["12"] == pytest.approx(np.arccosh(1 + np.sqrt(2) / 2), rel=1e-10)
    assert report["seed"] == 20240229


def test_json_is_canonical(capsys, fixture_path):
    _, report, out = run_json(capsys, "block", fixture_path("dblock_fsl.json"), "--seed", "5")
    assert dumps_canonical(report) == out
    assert report["seed"] == 5
    _, _, again = run_json(capsys, "block", fixture_path("dblock_fsl.json"), "--seed", "5")
    assert again == out


def test_torsion_values_carry_the_sign_convention(capsys, fixture_path):
    code, report, _ = run_json(capsys, "block", fixture_path("pants_cone.json"), "--kind", "pants")
    assert code == 0
    assert report["closed_form"]["convention"] == MOD_SIGN_NOTE
    assert report["closed_form"]["value"] == pytest.approx([0.0, 0.1767767], abs=1e-7)
    assert report["direct"]["convention"] == MOD_SIGN_NOTE
    assert report["passed"] is True


def test_block_checks(capsys, fixture_path):
    code, report, _ = run_json(capsys, "block", fixture_path("dblock_dual.json"), "--checks", "--tol", "1e-8")
    assert code == 0
    assert set(report["lemma_checks"]) == {"det_12_13_14", "det_12_23_24", "det_13_23_34", "det_14_24_34", "det4"}
    assert all(value < 1e-8 for value in report["holonomy_checks"].values())


def test_assemble_regular_fsl(capsys, fixture_path):
    code, report, _ = run_json(capsys, "assemble", fixture_path("d1_fsl.json"), "--tol", "1e-8")
    assert code == 0
    assert report["closed_form"]["value"] == pytest.approx([0.0, 8 * np.sqrt(-REGULAR_GRAM_DET)], abs=1e-9)
    assert report["counts"] == {"c": 2, "d": 1, "n": 3, "p": 4}
    assert report["tolerance"] == 1e-8


def test_assemble_with_curves(capsys, fixture_path):
    code, report, _ = run_json(capsys, "assemble", fixture_path("d2_fsl.json"), "--tol", "1e-8",
                               "--curves", "1,0;1,1;2,1;1,2;3,1;1,0")
    assert code == 0
    section = report["curves"]
    assert section["residual"] < 1e-8
    assert section["filled"]["convention"] == MOD_SIGN_NOTE
    assert section["finite_difference"]["relative_difference"] < 1e-6


def test_assemble_with_a_solved_filling(capsys, fixture_path):
    code, report, _ = run_json(capsys, "assemble", fixture_path("d1_fsl.json"), "--tol", "1e-8",
                               "--curves", "4,0;4,0;4,0", "--solve")
    assert code == 0
    assert report["solver"]["iterations"] == 0
    assert "not primitive" in report["curves"]["note"]


def test_solve_needs_curves(capsys, fixture_path):
    assert main(["assemble", fixture_path("d1_fsl.json"), "--solve"]) == 2
    assert "--curves" in capsys.readouterr().err


def test_unsolvable_filling_exits_4(capsys, fixture_path):
    assert main(["assemble", fixture_path("d1_fsl.json"), "--curves", "0,1;0,1;0,1", "--solve"]) == 4


@pytest.mark.parametrize("command, name, fragment", [
    ("gram", "invalid_angles.json", "vertex 4"),
    ("gram", "malformed.json", "malformed.json:"),
    ("assemble", "broken_pcd.json", "p=c+2d"),
    ("assemble", "missing.json", "cannot read file"),
])
def test_input_errors_exit_2(command, name, fragment, capsys, fixture_path):
    assert main([command, fixture_path(name)]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert fragment in captured.err


def test_schema_errors_name_the_field(capsys, tmp_path):
    path = tmp_path / "shape.json"
    path.write_text(json.dumps({"kind": "angles", "alpha": [0.5] * 5}))
    assert main(["gram", str(path)]) == 2
    assert "alpha" in capsys.readouterr().err


def test_verification_failure_exits_3(capsys):
    # a tolerance of zero cannot be met by floating point
    assert main(["verify", "--suite", "identities", "--samples", "1", "--tol", "0"]) == 3


def test_verify_reports_every_check(capsys):
    code, report, _ = run_json(capsys, "verify", "--suite", "torsion", "--samples", "1", "--seed", "9",
                               "--tol", "1e-8", "--workers", "1")
    assert code == 0
    assert report["seed"] == 9
    assert len(report["checks"]) == 15
    assert report["failing_seeds"] == []


def test_vacuous_sweep(capsys):
    code, report, _ = run_json(capsys, "verify", "--samples", "0")
    assert code == 0
    assert report["warnings"]


def test_environment_tolerance(capsys, fixture_path, monkeypatch):
    monkeypatch.setenv("TORSION_FORGE_TOL", "1e-6")
    _, report, _ = run_json(capsys, "block", fixture_path("dblock_fsl.json"))
    assert report["tolerance"] == 1e-6
    _, report, _ = run_json(capsys, "block", fixture_path("dblock_fsl.json"), "--tol", "1e-7")
    assert report["tolerance"] == 1e-7


def test_output_file(capsys, fixture_path, tmp_path):
    target = tmp_path / "report.json"
    assert main(["gram", fixture_path("regular_angles.json"), "--format", "json", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["command"] == "gram"


def test_text_report_shows_the_convention(capsys, fixture_path):
    assert main(["block", fixture_path("pants_boundary.json"), "--kind", "pants", "--tol", "1e-8"]) == 0
    out = capsys.readouterr().out
    assert "closed_form: +-(" in out
    assert MOD_SIGN_NOTE in out


def test_non_finite_values_are_strings():
    data = to_jsonable({"residual": float("inf"), "z": complex(1, float("nan"))})
    assert data == {"residual": "inf", "z": [1.0, "nan"]}
    assert "residual: inf" in render_text({"residual": float("inf")})


def test_torsion_value_is_rendered_canonically():
    assert to_jsonable(TorsionValue(-1 - 2j))["value"] == [1.0, 2.0]
