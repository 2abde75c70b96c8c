import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gutzmer import make_space
from gutzmer.cli import (
    ParseError,
    coefficients_from_json,
    coefficients_to_json,
    exit_code_for,
    main,
)
from gutzmer.reports import Verdict
from gutzmer.transform import SpectralCoeffs


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@given(st.lists(st.sampled_from(list(Verdict)), max_size=8))
def test_exit_code_rule(verdicts):
    code = exit_code_for(verdicts)
    if Verdict.FAIL in verdicts:
        assert code == 1
    elif all(v is Verdict.PASS for v in verdicts):
        assert code == 0
    else:
        assert code == 2


@given(st.integers(0, 6), st.integers(0, 2**32 - 1), st.sampled_from(["circle", "sphere2", "su2"]))
def test_coefficient_json_round_trip_is_bit_exact(lmax, seed, name):
    c = SpectralCoeffs.random(make_space(name), lmax, np.random.default_rng(seed))
    back, t = coefficients_from_json(coefficients_to_json(c, 0.3))
    assert t == 0.3 and back.lmax == lmax
    assert np.array_equal(back.data.view(np.uint64), c.data.view(np.uint64))


@pytest.mark.parametrize("text", [
    "", "   \n", "{", "[]", '{"space": "torus", "data": [[[1, 0]]]}',
    '{"space": "circle", "data": []}', '{"space": "circle", "lmax": 1, "data": [[[1, 0]]]}',
    '{"space": "circle", "data": [[[1, 0]], [[1, 0]]]}',
])
def test_bad_coefficient_text(text):
    with pytest.raises(ParseError):
        coefficients_from_json(text)


def test_missing_required_flag_is_usage_error(capsys):
    code, _, err = _run(["verify", "gutzmer", "--space", "circle"], capsys)
    assert code == 64 and "--t" in err


@pytest.mark.parametrize("argv", [
    ["verify", "gutzmer", "--space", "circle", "--t", "-1"],
    ["verify", "gutzmer", "--space", "circle", "--t", "nan"],
    ["verify", "gutzmer", "--space", "circle", "--t", "0.2", "--lmax", "0"],
    ["verify", "nothing", "--space", "circle", "--t", "0.2"],
    ["verify", "gutzmer", "--space", "torus", "--t", "0.2"],
    ["classify", "delta", "--space", "circle", "--t", "0.2", "--tol", "1e-3"],
])
def test_invalid_arguments(argv, capsys):
    assert _run(argv, capsys)[0] == 64


def test_invalid_node_cap_is_usage_error(monkeypatch, capsys):
    monkeypatch.setenv("GUTZMER_MAX_NODES", "many")
    code, _, err = _run(["transform", "delta", "--space", "circle", "--t", "0.2"], capsys)
    assert code == 64 and "GUTZMER_MAX_NODES" in err


def test_empty_input_file(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("")
    assert _run(["transform", str(path), "--space", "circle", "--t", "0.2"], capsys)[0] == 65


def test_missing_input_file(tmp_path, capsys):
    assert _run(["transform", str(tmp_path / "nope.json"), "--space", "circle", "--t", "0.2"], capsys)[0] == 74


def test_transform_delta_gives_heat_multipliers(capsys):
    code, out, _ = _run(["transform", "delta", "--space", "circle", "--t", "0.1", "--lmax", "6"], capsys)
    assert code == 0
    image, t = coefficients_from_json(out)
    assert t == 0.1
    assert np.allclose(image.data, np.exp(-0.1 * image.lams.astype(float) ** 2), rtol=1e-15)


def test_transform_file_and_space_mismatch(tmp_path, capsys):
    c = SpectralCoeffs.random(make_space("su2"), 3, np.random.default_rng(0))
    path = tmp_path / "f.json"
    path.write_text(coefficients_to_json(c))
    out = tmp_path / "img.json"
    assert _run(["transform", str(path), "--space", "su2", "--t", "0.2", "--out", str(out)], capsys)[0] == 0
    image, t = coefficients_from_json(out.read_text())
    assert t == 0.2 and image.lmax == 3
    assert _run(["transform", str(path), "--space", "circle", "--t", "0.2"], capsys)[0] == 64
    # an image file is not a valid transform input
    assert _run(["transform", str(out), "--space", "su2", "--t", "0.2"], capsys)[0] == 65


def test_transform_csv_and_profile(tmp_path, capsys):
    prof = tmp_path / "profile.csv"
    code, out, _ = _run(["transform", "gaussian-coeff", "--space", "circle", "--t", "0.25", "--lmax", "8",
                         "--format", "csv", "--profile", str(prof)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 17 and rows[0].keys() == {"lambda", "j", "re", "im"}
    table = list(csv.DictReader(prof.open()))
    H = [float(r["H"]) for r in table]
    assert len(H) > 4 and all(b > a for a, b in zip(H, H[1:]))
    assert all(math.isfinite(float(r["sup_abs"])) for r in table)


@pytest.mark.parametrize("source, label", [
    ("delta", "DISTRIBUTION"), ("gaussian-coeff", "SMOOTH"), ("super-growth", "UNBOUNDED"),
])
def test_classify_builtins(source, label, capsys):
    code, out, _ = _run(["classify", source, "--space", "circle", "--t", "0.25"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["label"] == label and doc["exit_code"] == 0


def test_classify_image_file_requires_matching_time(tmp_path, capsys):
    img = tmp_path / "img.json"
    assert _run(["transform", "delta", "--space", "circle", "--t", "0.25", "--out", str(img)], capsys)[0] == 0
    code, out, _ = _run(["classify", str(img), "--space", "circle", "--t", "0.25"], capsys)
    assert code == 0 and json.loads(out)["result"]["label"] == "DISTRIBUTION"
    assert _run(["classify", str(img), "--space", "circle", "--t", "0.3"], capsys)[0] == 64


def test_verify_report_structure_and_determinism(tmp_path, capsys):
    argv = ["verify", "gutzmer", "--space", "circle", "--t", "0.2", "--lmax", "8"]
    code1, out1, _ = _run(argv, capsys)
    code2, out2, _ = _run(argv, capsys)
    assert code1 == code2 == 0
    doc1, doc2 = json.loads(out1), json.loads(out2)
    assert doc1["summary"]["PASS"] == len(doc1["reports"]) == 1
    assert set(doc1["reports"][0]) >= {"check_name", "space", "params", "rel_error", "tolerance", "verdict"}
    doc1.pop("timing"), doc2.pop("timing")
    assert doc1 == doc2


def test_verify_tolerance_override_can_fail(capsys):
    code, out, _ = _run(["verify", "gutzmer", "--space", "circle", "--t", "0.2", "--lmax", "8",
                         "--tol", "1e-300"], capsys)
    assert code == 1 and json.loads(out)["summary"]["FAIL"] == 1


def test_verify_csv(capsys):
    code, out, _ = _run(["verify", "gutzmer", "--space", "su2", "--t", "0.2", "--lmax", "4",
                         "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["check_name"] == "gutzmer" and rows[0]["verdict"] == "PASS"


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gutzmer.cli", "verify", "gutzmer", "--space", "su2"],
                          capture_output=True, text=True)
    assert proc.returncode == 64
