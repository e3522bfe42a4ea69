import csv
import json
from math import pi

import pytest

from fstube import __version__
from fstube.cli import main

EMBEDDED = {"claim", "inputs", "values", "pass", "margins", "seed", "variant", "version", "input_digest"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_focal_quadric_example(capsys):
    code, out, _ = run(capsys, "focal", "--model", "quadric", "--n", "3", "--points", "50", "--normals", "10", "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert EMBEDDED <= set(rep)
    assert rep["values"]["estimate"] == pytest.approx(pi / 4, abs=1e-7)
    assert rep["seed"] == 7 and rep["version"] == __version__ and rep["variant"] == "corrected"


def test_tube_volume_at_zero(capsys):
    code, out, _ = run(capsys, "tube-volume", "--model", "hypersurface", "--n", "2", "--d", "1", "--r", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["values"]["value"] == 0.0
    assert rep["seed"] == 0  # injected default


def test_tube_volume_flags_radii_past_focal_distance(capsys):
    code, out, _ = run(capsys, "tube-volume", "--model", "fermat-3", "--n", "2", "--r", "0.3", "--r", "1.2")
    assert code == 0
    rows = json.loads(out)["values"]["table"]
    assert [row["admissible"] for row in rows] == [True, False]
    assert rows[1]["value"] < 0


def test_variant_flag(capsys):
    _, out, _ = run(capsys, "tube-volume", "--model", "quadric", "--n", "2", "--r", "0.3", "--variant", "as-printed")
    rep = json.loads(out)
    assert rep["variant"] == "as-printed"
    assert rep["values"]["value"] == rep["values"]["table"][0]["as-printed"]


def test_full_precision_round_trip(capsys):
    _, out, _ = run(capsys, "tube-volume", "--model", "fermat-3", "--n", "3", "--r", "0.123456789")
    rep = json.loads(out)
    from fstube.tube_volume import tube_volume_hypersurface

    assert rep["values"]["value"] == tube_volume_hypersurface(3, 3, 0.123456789)


def test_radius_grid_csv(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "mc-volume", "--model", "quadric", "--n", "2", "--r-grid", "0.1:0.5:3", "--samples", "20000", "--seed", "1", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert [float(r["r"]) for r in rows] == pytest.approx([0.1, 0.3, 0.5])
    assert {"corrected", "as-printed", "mc", "stderr", "z"} <= set(rows[0])


def test_json_out_file_matches_stdout(tmp_path, capsys):
    path = tmp_path / "rep.json"
    _, out, _ = run(capsys, "curve-volume", "--model", "conic", "--out", str(path))
    assert path.read_text() == out
    rep = json.loads(out)
    assert rep["values"]["volume"] == pytest.approx(2 * pi)
    assert rep["values"]["degree_if_vol_over_pi"] == pytest.approx(2.0)


def test_riccati_command(capsys):
    code, out, _ = run(capsys, "riccati", "--kappa", "2", "--lam0=-inf", "--r", "0.01", "--r", "0.5")
    assert code == 0
    rep = json.loads(out)
    assert rep["values"]["table"][0]["closed_form"] == pytest.approx(-99.98666631109685)
    assert rep["pass"]
    _, out, _ = run(capsys, "riccati", "--kappa", "1", "--theta", "0.5", "--r-grid", "0:1:11")
    rep = json.loads(out)
    assert rep["values"]["blowups_numeric"] == pytest.approx([0.5], abs=1e-6)
    assert rep["margins"]["max_value_error"] < 1e-8


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "segre-2", "--points", "5")
    assert code == 0
    assert json.loads(out)["values"]["spectrum"] == pytest.approx([-1, -1, 0, 0, 1, 1], abs=1e-8)


def test_input_document(tmp_path, capsys):
    doc = {"n": 2, "d": 2, "terms": [{"coeff": 1, "exp": [2, 0, 0]}, {"coeff": 1, "exp": [0, 2, 0]}, {"coeff": 1, "exp": [0, 0, 2]}]}
    path = tmp_path / "q.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "focal", "--input", str(path), "--points", "4", "--normals", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["values"]["estimate"] == pytest.approx(pi / 4)
    other = tmp_path / "copy.json"
    other.write_text(json.dumps(doc, indent=4))
    _, out2, _ = run(capsys, "focal", "--input", str(other), "--points", "4", "--normals", "2")
    assert json.loads(out2)["input_digest"] == rep["input_digest"]


def test_curve_input_document(tmp_path, capsys):
    doc = {"n": 2, "d": 1, "components": [[{"coeff": 1, "exp": [1, 0]}], [{"coeff": 1, "exp": [0, 1]}], []]}
    path = tmp_path / "line.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "curve-volume", "--input", str(path))
    assert code == 0
    assert json.loads(out)["values"]["volume"] == pytest.approx(pi)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"n": 2,\n "d": 2\n "terms": []}', "line 3"),
        ('{"n": 2, "d": 2, "terms": [{"coeff": 1, "exp": [2, 0]}]}', "terms[0].exp"),
        ('{"n": 2, "d": 2, "terms": [{"exp": [2, 0, 0]}]}', "terms[0]"),
        ('{"d": 2, "terms": []}', "missing field 'n'"),
    ],
)
def test_malformed_documents_exit_2(tmp_path, capsys, text, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, out, err = run(capsys, "focal", "--input", str(path))
    assert code == 2 and out == ""
    assert fragment in err


@pytest.mark.parametrize(
    "argv",
    [
        ["focal", "--model", "quadric", "--n", "3", "--bogus"],
        ["frobnicate"],
        [],
        ["tube-volume", "--model", "quadric", "--n", "2", "--r", "2.0"],
        ["tube-volume", "--model", "quadric", "--n", "2"],
        ["tube-volume", "--model", "torus", "--n", "2", "--r", "0.1"],
        ["tube-volume", "--model", "segre-1", "--r", "0.1"],
        ["focal", "--model", "quadric", "--n", "2", "--tol", "nonsense=1"],
        ["focal", "--model", "quadric", "--n", "2", "--variant", "both"],
        ["curve-volume", "--model", "quadric", "--n", "2"],
        ["mc-volume", "--model", "quadric", "--n", "2", "--r", "0.1", "--samples", "10"],
        ["focal", "--input", "/nonexistent/file.json"],
        ["tube-volume", "--model", "quadric", "--n", "2", "--r-grid", "0:1"],
        ["riccati", "--kappa", "1", "--theta", "5"],
        ["focal"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_tolerance_override_is_accepted(capsys):
    code, _, _ = run(capsys, "focal", "--model", "quadric", "--n", "2", "--points", "2", "--normals", "1", "--tol", "on_variety=1e-9")
    assert code == 0


def test_verification_failure_exits_1(capsys):
    # the printed normalization is several standard errors away from the sampled volume
    code, out, _ = run(capsys, "mc-volume", "--model", "quadric", "--n", "2", "--r", "0.5", "--samples", "2000", "--variant", "as-printed")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_verify_is_byte_identical(capsys):
    argv = ["verify", "--suite", "theorem4", "--seed", "7"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert EMBEDDED <= set(rep) and rep["reports"]
