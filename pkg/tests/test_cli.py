import json
import subprocess
import sys

import pytest

from garland.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_minimal_q_json(capsys):
    code, out, _ = run(capsys, "minimal-q", "--diagram", "triangle:4,4,4", "--qmax", "13",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["minimal_q"] == 7


def test_enumerate_dims(capsys):
    code, out, _ = run(capsys, "enumerate", "--dim", "3", "--format", "json")
    assert code == 0 and len(json.loads(out)["diagrams"]) == 2
    code, out, _ = run(capsys, "enumerate", "--dim", "4", "--format", "json")
    assert json.loads(out)["diagrams"] == ["cycle:3,3,3,3,4"]


def test_enumerate_dim2_text_flags_discrepancy(capsys):
    code, out, _ = run(capsys, "enumerate", "--dim", "2")
    assert "reference count: 10" in out and "computed: 11" in out and "DISCREPANCY" in out


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "--dim", "2", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "dim,index,diagram,reference_count,discrepancy"
    assert len(lines) == 12


def test_check_fails_with_strict_exit_code(capsys):
    code, out, _ = run(capsys, "check", "--diagram", "triangle:3,3,4", "--q", "2")
    assert code == 0 and "verdict=Fails" in out
    code, out, _ = run(capsys, "check", "--diagram", "triangle:3,3,4", "--q", "2", "--strict",
                       "--format", "json")
    assert code == 1
    rep = json.loads(out)
    m4 = [c for c in rep["checks"] if c["link_type"] == "I2(4)"]
    assert m4[0]["kappa"] == pytest.approx(1 / 3, abs=1e-12)


def test_check_all_pass_strict_exit_zero(capsys):
    code, _, _ = run(capsys, "check", "--diagram", "triangle:4,4,4", "--q", "7", "--strict")
    assert code == 0


def test_strict_unverified_exit_code(capsys, monkeypatch):
    from garland import cli
    from garland.criterion import PARTIAL

    class Args:
        strict = True
    assert cli._strict_code(Args, PARTIAL) == 3


def test_minimal_q_strict_none_found(capsys):
    code, _, _ = run(capsys, "minimal-q", "--diagram", "triangle:6,6,6", "--qmax", "9", "--strict")
    assert code == 3


def test_check_csv(capsys):
    code, out, _ = run(capsys, "check", "--diagram", "triangle:4,4,4", "--q", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith("diagram,q,n,cotype,k,link_type,threshold,kappa")
    assert len(lines) == 4


@pytest.mark.parametrize("argv", [
    ["check", "--diagram", "triangle:3,3", "--q", "2"],
    ["check", "--diagram", "triangle:3,3,3", "--q", "2"],
    ["check", "--diagram", "triangle:4,4,4", "--q", "6"],
    ["check", "--diagram", "triangle:4,4,4"],
    ["enumerate"],
    ["betti", "--complex", "/nonexistent/file.txt"],
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_usage_errors_exit_2(capsys):
    code, _, err = run(capsys, "no-such-command")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "check", "--format", "yaml")
    assert code == 2 and "usage" in err


def test_spectrum_gon_and_export(capsys, tmp_path):
    path = tmp_path / "fano.txt"
    code, out, _ = run(capsys, "spectrum", "--gon", "3", "--q", "2", "--format", "json",
                       "--export", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["kappa"] == pytest.approx(0.528595479209, abs=1e-12)
    assert rep["axioms"]["gon"] is True
    assert path.read_text().startswith("gon m=3 q=2 points=7 lines=7")


def test_betti_on_file_and_building(capsys, tmp_path):
    f = tmp_path / "torus.txt"
    from garland.complexes import torus, write_complex
    f.write_text(write_complex(torus()))
    code, out, _ = run(capsys, "betti", "--complex", str(f), "--format", "json")
    assert json.loads(out)["betti"] == [1, 2, 1]
    code, out, _ = run(capsys, "betti", "--building", "A3", "--q", "2", "--format", "json")
    assert json.loads(out)["betti"] == [1, 0, 64]


def test_vanishing_demo_builtin(capsys):
    code, out, _ = run(capsys, "vanishing-demo", "--builtin", "octahedron", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["degrees"][0]["all_links_pass"] and rep["degrees"][0]["betti"] == 0


def test_mass_formula_and_transitivity_subcommands(capsys, tmp_path):
    cx = tmp_path / "oct.txt"
    gp = tmp_path / "oct.grp"
    cx.write_text("0 2 4\n0 2 5\n0 3 4\n0 3 5\n1 2 4\n1 2 5\n1 3 4\n1 3 5\n")
    gp.write_text("(0 1)\n(0 2 4 1 3 5)\n(0 2 1 3)\n")
    code, out, _ = run(capsys, "mass-formula", "--complex", str(cx), "--group", str(gp),
                       "--samples", "5", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["group_order"] == 48 and rep["all_equal"]
    code, out, _ = run(capsys, "lemma16", "--complex", str(cx), "--group", str(gp), "--format", "json")
    rep = json.loads(out)
    assert rep["codim2_links_connected"] and rep["codim1_stabilizers_transitive"]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--diagram", "path:3,4,3", "--format", "json")
    rep = json.loads(out)
    assert rep["kind"] == "Spherical" and rep["type"] == "F4" and rep["exact_agrees"]


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out


def test_plots_written(capsys, tmp_path):
    for argv, name in [(["check", "--diagram", "triangle:3,3,4", "--q", "3"], "c.png"),
                       (["minimal-q", "--diagram", "triangle:4,4,4"], "m.png"),
                       (["spectrum", "--gon", "4", "--q", "2"], "s.png")]:
        path = tmp_path / name
        assert main(argv + ["--plot", str(path)]) == 0
        assert path.stat().st_size > 1000
    capsys.readouterr()


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "garland.cli", "enumerate", "--dim", "4"],
                         capture_output=True, text=True, check=True)
    assert "cycle:3,3,3,3,4" in out.stdout
