import json
import math

import pytest

from paramres import __version__
from paramres.cli import build_parser, main


@pytest.fixture(autouse=True)
def _isolated_config(config_home):
    """Keep a developer's ~/.config/paramres out of CLI runs."""


def _json_out(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def _error(capsys, argv, code):
    assert main(argv) == code
    doc = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert doc["exit_code"] == code
    return doc


# === Subcommands ===

def test_classify_resonant_kick(capsys):
    doc = _json_out(capsys, ["classify", "--omega", "1", "--resonant", "--alpha", "1",
                             "--format", "json"])
    assert doc["class"] == "hyperbolic"
    assert doc["mu"] == pytest.approx(1.0, abs=1e-12)
    assert doc["det"] == pytest.approx(1.0, abs=1e-12)
    assert doc["discriminant"] > 0


def test_classify_csv_report(capsys):
    assert main(["classify", "--omega", "1", "--T", "6.283185307", "--alpha", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "key,value"
    assert "class,hyperbolic" in lines


def test_classify_on_boundary_is_marginal(capsys):
    doc = _json_out(capsys, ["classify", "--omega-t", "1", "--on-boundary", "--format", "json"])
    assert doc["class"] == "marginal"
    assert doc["shearing"] is True


def test_heff_reports_expanded_ratios(capsys):
    doc = _json_out(capsys, ["heff", "--omega-t", "2", "--alpha", "0.3", "--format", "json"])
    assert doc["regime"] == "elliptic"
    assert doc["reflected"] is False
    assert doc["reconstruction_error"] < 1e-10
    assert doc["proportionality_residual"] < 1e-10
    assert doc["expanded_ratio_xp"] == pytest.approx(2.0, rel=1e-10)
    assert doc["a_re"] == 0.0


def test_heff_from_profile(capsys):
    doc = _json_out(capsys, ["heff", "--profile", "mathieu", "--param", "l=1",
                             "--param", "delta_l=0.5", "--param", "omega0=2", "--format", "json"])
    assert doc["source"] == "mathieu"
    assert doc["regime"] == "hyperbolic"
    assert doc["reflected"] is True
    assert "expanded_ratio_xp" not in doc


def test_spectrum_detects_third_turn(capsys):
    doc = _json_out(capsys, ["spectrum", "--OmegaT", "2.0943951", "--n-max", "8",
                             "--format", "json"])
    assert doc["rational"] == "1/3"
    assert doc["n_distinct"] == 3
    assert doc["degeneracy"] == "finite"
    assert [lvl["class"] for lvl in doc["levels"]] == [0, 1, 2] * 3


def test_spectrum_csv_levels(capsys):
    assert main(["spectrum", "--OmegaT", "1.0", "--n-max", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,class,quasi_energy"
    assert len(lines) == 6


def test_spectrum_marginal_partners_csv(capsys):
    assert main(["spectrum", "--omega", "0", "--T", "2", "--P0", "1", "--k-max", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,momentum"
    assert len(lines) == 7


def test_spectrum_partners_of_large_momentum(capsys):
    assert main(["spectrum", "--omega", "0", "--T", str(2 * math.pi), "--P0", "1000",
                 "--k-max", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 9
    assert float(lines[3].split(",")[1]) == pytest.approx(math.sqrt(1000.0 ** 2 + 2.0))


def test_evolve_growth_matches_mu(capsys):
    doc = _json_out(capsys, ["evolve", "--alpha", "1", "--resonant", "--periods", "30",
                             "--format", "json"])
    assert doc["class"] == "hyperbolic"
    assert doc["growth_relative_error"] < 0.01
    assert doc["det_drift"] < 1e-12


def test_evolve_trajectory_table(capsys):
    assert main(["evolve", "--omega-t", "1", "--periods", "5", "--trajectory"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,mean_x,mean_p,sigma_xx")
    assert len(lines) == 7


def test_eigenstate_report(capsys):
    doc = _json_out(capsys, ["eigenstate", "--x0", "1", "--mu", "0", "--alpha", "1",
                             "--N", "10", "--format", "json"])
    assert doc["entries"] == 21
    assert doc["boundary_terms"] == 2
    assert doc["boundary_modulus_lo"] == pytest.approx(doc["expected_modulus_lo"], rel=1e-12)
    assert doc["boundary_modulus_hi"] == pytest.approx(doc["expected_modulus_hi"], rel=1e-12)


def test_eigenstate_entries_and_normalize(capsys):
    assert main(["eigenstate", "--x0", "5", "--normalize", "--N", "2", "--entries"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,position,amplitude_re,amplitude_im"
    assert len(lines) == 6
    assert float(lines[3].split(",")[1]) == pytest.approx(5.0 / math.e)


def test_chart_cells_and_worker_invariance(capsys):
    argv = ["chart", "--axis1", "omega_t:0.1:6.2:8", "--axis2", "alpha:-1:1:5"]
    assert main(argv) == 0
    serial = capsys.readouterr().out
    assert main(argv + ["--workers", "3"]) == 0
    assert capsys.readouterr().out == serial
    lines = serial.splitlines()
    assert lines[0] == "param1,param2,class,exponent,trace"
    assert len(lines) == 41


def test_chart_boundaries_json(capsys):
    doc = _json_out(capsys, ["chart", "--axis1", "omega_t:0.1:6.2:30", "--axis2",
                             "alpha:-2:2:30", "--what", "boundaries", "--format", "json"])
    points = [p for line in doc["polylines"] for p in line]
    assert points
    for p in points:
        assert abs(math.cosh(p["param2"]) * math.cos(p["param1"])) == pytest.approx(1.0, abs=1e-9)


def test_mathieu_boundary_table(capsys):
    assert main(["mathieu-boundary", "--slices", "1024", "--scan-points", "16"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,l,sign"
    assert [line.split(",")[2] for line in lines[1:]] == ["-1", "-1"]


def test_selftest_single_criterion(capsys):
    assert main(["selftest", "--only", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "criterion,name,status,detail"
    assert lines[1].split(",")[2] == "pass"


def test_selftest_output_is_reproducible(capsys):
    code = main(["selftest", "--seed", "7"])
    first = capsys.readouterr().out
    assert main(["selftest", "--seed", "7"]) == code
    assert capsys.readouterr().out == first
    assert len(first.splitlines()) == 12


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert main(["spectrum", "--OmegaT", "1", "-o", str(path), "--format", "json"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["regime"] == "elliptic"


# === Errors ===

def test_missing_period_is_invalid_input(capsys):
    doc = _error(capsys, ["classify", "--alpha", "1"], 1)
    assert doc["kind"] == "ValidationError"


def test_unknown_flag_is_invalid_input(capsys):
    _error(capsys, ["classify", "--colour", "red"], 1)


def test_no_command(capsys):
    _error(capsys, [], 1)


def test_profile_csv_error_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("t,omega_sq\n0,1\nx,2\n")
    doc = _error(capsys, ["classify", "--profile-csv", str(path)], 1)
    assert doc["kind"] == "ProfileFormatError"
    assert doc["line"] == 3


def test_no_bracket_is_numerical_failure(capsys):
    doc = _error(capsys, ["mathieu-boundary", "--lo", "0.1", "--hi", "0.3",
                          "--slices", "256", "--scan-points", "4"], 2)
    assert doc["kind"] == "NoBracketError"


def test_overflowing_kick_is_invalid_input(capsys):
    doc = _error(capsys, ["classify", "--omega-t", "1", "--alpha", "800"], 1)
    assert doc["kind"] == "ValidationError"
    doc = _error(capsys, ["eigenstate", "--x0", "1", "--mu", "0", "--alpha", "2",
                          "--N", "800"], 1)
    assert "overflow" in doc["error"]


def test_float_overflow_is_numerical_failure(capsys):
    doc = _error(capsys, ["eigenstate", "--x0", "5", "--normalize", "--alpha", "800"], 2)
    assert doc["kind"] == "NumericalError"
    assert "overflow" in doc["error"]


def test_tolerance_overrides(capsys):
    _error(capsys, ["--tol", "wobble=1", "spectrum", "--OmegaT", "1"], 1)
    _error(capsys, ["--tol", "band=-1", "spectrum", "--OmegaT", "1"], 1)
    assert main(["--tol", "band=1e-6", "spectrum", "--OmegaT", "1"]) == 0


def test_selftest_rejects_bad_selection(capsys):
    _error(capsys, ["selftest", "--only", "abc"], 1)
    _error(capsys, ["selftest", "--only", "99"], 1)


# === Manifests ===

def test_manifest_runs_command(tmp_path, capsys):
    path = tmp_path / "run.conf"
    path.write_text("# third turn\ncommand = spectrum\nOmegaT = 2.0943951\n"
                    "n-max = 8\nformat = json\ntolerances.band = 1e-7\n")
    doc = _json_out(capsys, ["--config", str(path)])
    assert doc["rational"] == "1/3"


def test_flags_override_manifest(tmp_path, capsys):
    path = tmp_path / "run.conf"
    path.write_text("command = eigenstate\nN = 4\nformat = json\n")
    doc = _json_out(capsys, ["--config", str(path), "eigenstate", "--N", "6"])
    assert doc["N"] == 6


def test_manifest_list_values(tmp_path, capsys):
    path = tmp_path / "run.conf"
    path.write_text("command = chart\nfamily = mathieu\naxis1 = l:0.5:1.5:4\n"
                    "axis2 = delta_l:0.1:0.5:3\nfixed = slices=64,omega0=2\n")
    assert main(["--config", str(path)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 13


@pytest.mark.parametrize("text, message", [
    ("command = spectrum\ncolour = red\n", "manifest line 2"),
    ("command = spectrum\nn-max = many\n", "manifest line 2"),
    ("command = chart\nwhat = everything\n", "manifest line 2"),
    ("command = eigenstate\nnormalize = perhaps\n", "manifest line 2"),
    ("command = dance\n", "unknown command"),
    ("format = json\n", "no command"),
])
def test_manifest_errors(tmp_path, capsys, text, message):
    path = tmp_path / "run.conf"
    path.write_text(text)
    doc = _error(capsys, ["--config", str(path)], 1)
    assert message in doc["error"]


def test_manifest_command_conflict(tmp_path, capsys):
    path = tmp_path / "run.conf"
    path.write_text("command = spectrum\n")
    doc = _error(capsys, ["--config", str(path), "eigenstate"], 1)
    assert "conflicts" in doc["error"]


def test_version(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--version"])
    assert __version__ in capsys.readouterr().out
