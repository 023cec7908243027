import json
import subprocess
import sys

import pytest

from solenoids import load_presentation, parse_presentation, presentations_isomorphic
from solenoids.cli import main
from solenoids.fixtures import fixture_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fx(name):
    return fixture_path(name)


def test_validate_exit_codes(capsys):
    assert run(capsys, "validate", fx("swap_four_edge"))[0] == 0
    assert run(capsys, "validate", fx("circle_fold"))[0] == 2
    assert run(capsys, "validate", fx("wedge_branched"))[0] == 2
    assert run(capsys, "validate", "/no/such/file.sol")[0] == 1


def test_validate_text_report(capsys):
    code, out, _ = run(capsys, "validate", fx("circle_fold"))
    assert "classification: invalid" in out
    assert "witness nonfolding: e2 e2^-1" in out


def test_validate_structured(capsys):
    code, out, _ = run(capsys, "validate", fx("swap_fixed_point"), "--format", "structured")
    d = json.loads(out)
    assert d["classification"] == "solenoid" and d["flattening_exponent"] == 2


def test_bundled_names_resolve(capsys):
    assert run(capsys, "validate", "wedge_aab")[0] == 0


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.sol"
    bad.write_text("presentation X\nvertices: p\nedge a p q\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "line 3" in err


def test_usage_error_exit(capsys):
    with pytest.raises(SystemExit) as info:
        main(["orbits", str(fx("pair_g1")), "--period", "0"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_orbits(capsys):
    code, out, _ = run(capsys, "orbits", fx("pair_g1"), "--period", "1")
    assert code == 0 and out.split("\n")[:2] == ["vertex(p)", "cycle(a.2)"]


def test_rebase_writes_files(tmp_path, capsys):
    out_path = tmp_path / "qr.sol"
    code, out, _ = run(capsys, "rebase", fx("wedge_aab"), "--orbit", "a.3 b.1", "-o", out_path)
    assert code == 0
    Q = load_presentation(out_path)
    assert load_presentation(str(out_path) + ".refined").edge_names == ("a1", "a2", "b1", "b2")
    assert (tmp_path / "qr.sol.rho").read_text().startswith("rho E1 = ")
    assert "matrix: " in out and "lambda_drift" in out
    code, out, _ = run(capsys, "rebase", fx("wedge_aab"), "--orbit", "a.3 b.1", "--format", "structured")
    assert json.loads(out)["output_classification"] == "solenoid"
    assert presentations_isomorphic(Q, load_presentation(out_path)) is not None


def test_rebase_branched_needs_force(capsys):
    assert run(capsys, "rebase", fx("wedge_branched"), "--orbit", "b.2")[0] == 2
    code, out, _ = run(capsys, "rebase", fx("wedge_branched"), "--orbit", "b.2", "--force")
    assert code == 0 and "branched" in out


def test_rebase_budget_exit(capsys):
    code, _, err = run(capsys, "rebase", fx("pair_g1"), "--orbit", "a.1 a.2", "--closure-budget", "2")
    assert code == 3 and "exceeded 2 classes" in err


def test_rebase_bad_orbit(capsys):
    assert run(capsys, "rebase", fx("wedge_aab"), "--orbit", "a.1 a.3")[0] == 1


def test_matrix_commands(capsys):
    assert run(capsys, "bf", "--matrix", "[[0,1,0],[3,1,1],[5,3,1]]")[1].strip() == "Z8"
    assert run(capsys, "amalgamate", "--matrix",
               "[[0,1,1,0],[0,0,0,1],[1,0,0,2],[1,1,1,1]]")[1].strip() == "[[0,1,0],[1,0,3],[1,1,1]]"
    assert float(run(capsys, "entropy", "--matrix", "[[2]]")[1]) == pytest.approx(0.6931471806)
    assert run(capsys, "bf", "--matrix", "[[1,2]]")[0] == 1
    assert run(capsys, "bf", "--matrix", "nonsense")[0] == 1


def test_cover(capsys):
    code, out, _ = run(capsys, "cover", fx("wedge_aab"), "--format", "structured")
    d = json.loads(out)
    assert d["matrix"] == "[[2,1],[1,1]]" and d["bf"] == "0" and d["mixing"]


def test_compare_self_not_distinguished(capsys):
    code, out, _ = run(capsys, "compare", fx("pair_g1"), fx("pair_g1"), "--period", "2")
    assert code == 0 and "verdict: NotDistinguishedByThisInvariant" in out


def test_compare_g1_g2(capsys):
    code, out, _ = run(capsys, "compare", fx("pair_g1"), fx("pair_g2"), "--period", "2")
    assert "verdict: Distinguished" in out
    code, out, _ = run(capsys, "compare", fx("pair_g1"), fx("pair_g2"), "--period", "2", "--invariant", "tca")
    assert "verdict: Distinguished" in out
    code, out, _ = run(capsys, "compare", fx("pair_g1"), fx("pair_g2"), "--period", "1")
    assert code == 0 and "verdict: NotDistinguishedByThisInvariant" in out


def test_compare_single_orbit_warns(capsys):
    code, out, _ = run(capsys, "compare", fx("pair_g1"), fx("pair_g2"),
                       "--orbits-left", "a.1 a.2", "--orbits-right", "a.1 a.3")
    assert code == 0 and "warning:" in out


def test_se_verify_and_lift(tmp_path, capsys):
    args = [fx("wedge_efff_refined"), fx("eight_edge"), "--maps", fx("refined_to_eight_edge.map")]
    code, out, _ = run(capsys, "se-verify", *args)
    assert code == 0 and out.count(": pass") == 11 and out.endswith("verdict: pass\n")
    code, out, _ = run(capsys, "lift", *args, "-o", tmp_path / "phi.txt")
    assert code == 0 and "psi o phi = central projection: pass" in out
    assert len((tmp_path / "phi.txt").read_text().splitlines()) == 42
    assert len((tmp_path / "phi.txt.psi").read_text().splitlines()) == 50


def test_se_verify_failure_exit(tmp_path, capsys):
    text = fixture_path("refined_to_eight_edge.map").read_text().replace("rmap f2 = 6 7", "rmap f2 = 2 3 5 7")
    bad = tmp_path / "bad.map"
    bad.write_text(text)
    code, out, _ = run(capsys, "se-verify", fx("wedge_efff_refined"), fx("eight_edge"), "--maps", bad)
    assert code == 2 and "identity r f = g r: fail" in out and "lhs:" in out


def test_console_script_is_deterministic():
    cmd = [sys.executable, "-m", "solenoids.cli", "compare", str(fx("pair_g1")), str(fx("pair_g2")),
           "--period", "2", "--format", "structured"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second


def test_empty_file_is_input_error(tmp_path, capsys):
    empty = tmp_path / "empty.sol"
    empty.write_text("")
    assert run(capsys, "validate", empty)[0] == 1


def test_branched_refusal_cites_flattening(capsys):
    code, _, err = run(capsys, "rebase", fx("wedge_branched"), "--orbit", "b.2")
    assert code == 2 and "flattening" in err


def test_vertex_orbit_rebase(capsys):
    code, out, _ = run(capsys, "rebase", fx("swap_fixed_point"), "--orbit", "a.2", "--format", "structured")
    assert code == 0
    d = json.loads(out)
    assert presentations_isomorphic(
        parse_presentation(d["presentation"]), load_presentation(fx("wedge_efff"))) is not None


def test_orbits_invalid_presentation(capsys):
    assert run(capsys, "orbits", fx("circle_fold"), "--period", "1")[0] == 2
