import json
import subprocess
import sys
from fractions import Fraction

import pytest

from lorentzkit import cli
from lorentzkit.models import shipped_corpus
from lorentzkit.report import from_jsonable


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def structured(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out) if out else None, err


def test_certify_squares_expect_lorentzian(capsys):
    code, data, _ = structured(capsys, "certify", "--model", "squares", "--expect", "lorentzian")
    assert code == 0 and data["certificate"]["verdict"] == "Lorentzian"


def test_certify_non_strict_model_fails_strict_expectation(capsys):
    code, data, _ = structured(capsys, "certify", "--model", "x-plus-y-squared", "--expect", "strict")
    assert code == 1
    assert data["strictness"]["verdict"] == "Indeterminate"


def test_certify_strict_model(capsys):
    code, data, _ = structured(capsys, "certify", "--model", "sq-rect", "--expect", "strict")
    assert code == 0 and data["verdict"] == "StrictlyLorentzian"


def test_deficits_square_rectangle(capsys):
    code, data, _ = structured(capsys, "deficits", "--model", "sq-rect", "--alpha", "e1", "--beta", "e2")
    assert code == 0
    assert data["K"] == {"lo": "1/4", "hi": "1/4"}
    assert data["A_squared"] == "9/25"
    assert data["s_sequence"] == ["1", "5/4", "1"]
    assert data["battery_failures"] == 0 and data["battery_indeterminate"] == 0


def test_deficits_text_output(capsys):
    code, out, _ = run(capsys, "deficits", "--model", "sq-rect", "--alpha", "e1", "--beta", "e2")
    assert code == 0
    assert "K: 0.250000 (exact 1/4)" in out


def test_hall_rado_reports_violation(capsys):
    code, data, _ = structured(capsys, "hall-rado", "--model", "xyplusxz", "--collection", "e2,e3")
    assert code == 0
    assert data["product_nonzero"] is False and data["nd_criterion"] is False
    assert data["violating_I"] == [1, 2]


def test_nd_and_kernel_face(capsys):
    code, data, _ = structured(capsys, "nd", "--model", "xyplusxz", "--collection", "e2,e3")
    assert code == 0 and data["nd_collection"] == 1
    code, data, _ = structured(capsys, "kernel-face", "--model", "xyplusxz", "--collection", "e2")
    assert code == 0 and data["zero_generators"] == [2, 3] and data["classification"] == "Critical"


def test_sequence_radii_stability_fmp(capsys):
    code, data, _ = structured(capsys, "sequence", "--model", "U34")
    assert code == 0 and data["s_sequence"] == ["3", "3", "1"]
    code, data, _ = structured(capsys, "radii", "--model", "xy", "--alpha", "1,1", "--beta", "2,1")
    assert code == 0 and data["alpha_beta"]["r_in"] == "1/2" and data["beta_alpha"]["R_out"] == "2"
    code, data, _ = structured(capsys, "stability", "--model", "xy", "--alpha", "1,1", "--beta", "(2, 1/2)")
    assert code == 0 and data["F"]["hi"] == "1/2" and data["bound_one_minus_r_squared"] == "3/4"
    code, data, _ = structured(capsys, "fmp", "--model", "sq-rect", "--alpha", "e1", "--beta", "e2")
    F = from_jsonable(data["F_bodies"])
    assert code == 0 and F.contains(Fraction(1, 2)) and F.width <= Fraction(1, 64)


@pytest.mark.parametrize("argv", [
    ("deficits", "--model", "no-such-model"),
    ("deficits", "--model", "sq-rect", "--alpha", "e7"),
    ("deficits", "--model", "sq-rect", "--alpha", "1,2,3"),
    ("deficits", "--model", "xy", "--alpha", "e1", "--beta", "e2"),
    ("fmp", "--model", "U34"),
    ("kernel-face", "--model", "xy"),
    ("certify",),
    ("frobnicate", "--model", "xy"),
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    if argv[0] != "frobnicate" and argv != ("certify",):
        record = json.loads(err.strip().splitlines()[-1])
        assert "error" in record and "message" in record


def test_malformed_model_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": 1, "kind": "tensor",
                                "tensor": {"nvars": 2, "degree": 2, "terms": [{"exp": [1, 1], "coeff": "1/0"}]}}))
    code, _, err = run(capsys, "certify", "--model", str(path))
    assert code == 2
    assert json.loads(err)["where"] == "$.tensor.terms[0].coeff"


def test_structured_report_is_byte_identical(capsys):
    argv = ("deficits", "--model", "cube-simplex-box", "--format", "structured")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_out_file_round_trip(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "deficits", "--model", "sq-rect", "--format", "structured", "--out", str(target))
    assert code == 0 and out == ""
    data = from_jsonable(json.loads(target.read_text()))
    assert data["A_squared"] == Fraction(9, 25)
    assert data["K"].lo == Fraction(1, 4)


def test_corpus_subset_writes_csv(tmp_path, capsys):
    for name in ("sq-rect", "xy", "squares"):
        (tmp_path / f"{name}.json").write_text((shipped_corpus() / f"{name}.json").read_text())
    csv_path = tmp_path / "table.csv"
    code, out, err = run(capsys, "corpus", str(tmp_path), "--format", "structured", "--csv", str(csv_path))
    assert code == 0
    data = json.loads(out)
    assert data["battery_failures"] == 0 and data["empirical_constants"]["all_positive"]
    header, *rows = csv_path.read_text().splitlines()
    assert header.startswith("instance,d,s,A2,B_lo,B_hi,K,sigma,r,R,slack_rKT")
    assert any(r.startswith("sq-rect:square-rect,2,2,0.36,") for r in rows)
    assert "instances in" in err


def test_corpus_parallel_matches_serial(tmp_path, capsys):
    for name in ("sq-rect", "xy", "U34"):
        (tmp_path / f"{name}.json").write_text((shipped_corpus() / f"{name}.json").read_text())
    _, serial, _ = run(capsys, "corpus", str(tmp_path), "--format", "structured")
    _, parallel, _ = run(capsys, "corpus", str(tmp_path), "--format", "structured", "--workers", "2")
    assert serial == parallel


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lorentzkit", "certify", "--model", "squares", "--expect", "lorentzian"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict: Lorentzian" in proc.stdout
