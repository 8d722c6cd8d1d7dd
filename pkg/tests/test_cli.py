import cmath
import json
import math

from src.cli import main

from conftest import fixture_path

REGULAR_SHAPE = cmath.exp(1j * math.pi / 3)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_info_text(capsys):
    code, out, _ = _run(capsys, "info", fixture_path("figure_eight.json"))
    assert code == 0
    assert out.splitlines()[0] == "2 tetrahedra, 2 edges (deg 6,6), 1 vertex, closed: no boundary faces unglued"


def test_info_json(capsys):
    code, out, _ = _run(capsys, "info", fixture_path("lens_5_1.json"), "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["num_tetrahedra"] == 5
    assert payload["num_edges"] == 7
    assert payload["num_vertices"] == 2
    assert payload["euler_characteristic"] == 0


def test_missing_and_malformed_inputs_exit_one(capsys, tmp_path):
    code, _, err = _run(capsys, "info", str(tmp_path / "nope.json"))
    assert code == 1
    assert "[ERROR]" in err

    bad = tmp_path / "bad.json"
    bad.write_text('{"num_tetrahedra": 2,', encoding="utf-8")
    code, _, err = _run(capsys, "info", str(bad))
    assert code == 1
    assert "malformed JSON" in err


def test_presentation_reports_abelianization(capsys):
    code, out, _ = _run(capsys, "presentation", fixture_path("lens_5_1.json"))
    assert code == 0
    assert "abelianization: Z^0 + Z/5" in out


def test_check_rep(capsys):
    code, out, _ = _run(capsys, "check-rep", fixture_path("lens_5_1.json"), fixture_path("lens_5_1_rep.json"))
    assert code == 0
    assert "representation passes" in out

    code, out, _ = _run(
        capsys, "check-rep", fixture_path("lens_5_1.json"), fixture_path("lens_5_1_trivial_rep.json")
    )
    assert code == 2
    assert "loop edge 0 (g0) is sent to the identity" in out
    assert "loop edge 4 (g3) is sent to the identity" in out


def test_spin_is_reproducible(capsys):
    args = ("spin", fixture_path("lens_5_1.json"), fixture_path("lens_5_1_rep.json"), "--seed", "7")
    code, first, _ = _run(capsys, *args)
    assert code == 0
    _, again, _ = _run(capsys, *args)
    assert first == again
    _, other, _ = _run(capsys, *args[:-1], "8")
    assert other != first
    assert json.loads(first)["solutions"][0]["sidecar"]["seed"] == 7


def test_spin_verify_volume_holonomy_compare(capsys, tmp_path):
    lens = fixture_path("lens_5_1.json")
    rep = fixture_path("lens_5_1_rep.json")
    code, _, _ = _run(capsys, "spin", lens, rep, "--seed", "0", "--count", "20", "--out-dir", str(tmp_path))
    assert code == 0
    solutions = sorted(str(p) for p in tmp_path.glob("spin_*.json") if not p.name.endswith(".sidecar.json"))
    assert len(solutions) == 20
    assert len(list(tmp_path.glob("spin_*.sidecar.json"))) == 20

    for path in solutions:
        code, out, _ = _run(capsys, "verify", lens, path, "--format", "json")
        assert code == 0
        assert json.loads(out)["max_residual"] < 1e-9

    code, out, _ = _run(capsys, "volume", lens, *solutions, "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert len(payload["volumes"]) == 20
    assert payload["stdev"] < 1e-7

    code, out, _ = _run(capsys, "holonomy", lens, str(tmp_path / "spin_3.json"))
    assert code == 0
    holonomy = tmp_path / "holonomy.json"
    holonomy.write_text(out, encoding="utf-8")

    code, out, _ = _run(capsys, "compare", lens, rep, str(holonomy))
    assert code == 0
    assert out.startswith("conjugate")


def test_verify_fails_on_perturbed_solution(capsys, tmp_path):
    solution = tmp_path / "perturbed.json"
    solution.write_text(json.dumps({"shapes": [[0.5, 0.867], [0.5, 0.866]]}), encoding="utf-8")
    code, out, _ = _run(capsys, "verify", fixture_path("figure_eight.json"), str(solution))
    assert code == 2
    assert "FAIL" in out
    edge_lines = [line for line in out.splitlines() if line.startswith("edge ")]
    assert len(edge_lines) == 2
    assert edge_lines[0].startswith("edge 0: residual ")
    assert edge_lines[0].endswith(")")
    assert "i (|r| " in edge_lines[0]


def test_compare_distinct_representations(capsys):
    code, out, _ = _run(
        capsys,
        "compare",
        fixture_path("lens_5_1.json"),
        fixture_path("lens_5_1_rep.json"),
        fixture_path("lens_5_1_trivial_rep.json"),
    )
    assert code == 2
    assert out.startswith("distinct")


def test_solve_figure_eight(capsys):
    code, out, _ = _run(
        capsys, "solve", fixture_path("figure_eight.json"), fixture_path("figure_eight_start.json"), "--tol", "1e-12"
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["iterations"] <= 15
    for re, im in payload["shapes"]:
        assert abs(complex(re, im) - REGULAR_SHAPE) < 1e-9
    assert abs(payload["volume"] - 2.0298832128) < 1e-9


def test_spin_with_trivial_representation_fails(capsys):
    code, out, _ = _run(
        capsys, "spin", fixture_path("lens_5_1.json"), fixture_path("lens_5_1_trivial_rep.json")
    )
    assert code == 2
    assert "loop edge 0 is sent to the identity" in out
