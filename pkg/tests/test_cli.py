import csv
import io
import json

import pytest

from main import build_config, main, make_parser

EXPECTED_P7 = [1, 1, 0, -1, 0, 0, 0, -3, -3, 0, 4]


def run(capsys, argv, environ=None):
    code = main(argv, environ={} if environ is None else environ)
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------
# Configuration
# ---------------------------------------------------------
def test_flags_beat_environment():
    args = make_parser().parse_args(["qexp", "--p", "7", "--terms", "5"])
    config = build_config(args, {"CMTOOL_TERMS": "11", "CMTOOL_PREC": "192"})
    assert config.terms == 5
    assert config.prec == 192


def test_defaults_without_environment():
    config = build_config(make_parser().parse_args(["chars", "--p", "7"]), {})
    assert config.terms == 1000
    assert config.output_format == "json"
    assert config.output_path is None


def test_bad_environment_value(capsys):
    code, _, err = run(capsys, ["qexp", "--p", "7"], {"CMTOOL_PREC": "beaucoup"})
    assert code == 2
    assert "CMTOOL_PREC" in err


@pytest.mark.parametrize("argv", [
    ["chars", "--p", "9"],
    ["chars", "--p", "13"],
    ["chars", "--p", "3"],
    ["qexp", "--p", "7", "--order", "2"],
    ["qexp", "--p", "7", "--terms", "0"],
    ["period", "--p", "7", "--prec", "96"],
])
def test_usage_errors(capsys, argv):
    code, out, _ = run(capsys, argv)
    assert code == 2
    assert out == ""


def test_unknown_command_is_rejected_by_the_parser():
    with pytest.raises(SystemExit):
        main(["plot", "--p", "7"], environ={})


# ---------------------------------------------------------
# Commandes
# ---------------------------------------------------------
def test_chars_p7(capsys):
    code, out, _ = run(capsys, ["chars", "--p", "7"])
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "chars"
    assert [(row["d"], row["dim_Af"]) for row in payload["results"]] == [(1, 1), (3, 2)]
    assert payload["choices"]["primitive_root"] == 3


def test_qexp_p7(capsys):
    code, out, _ = run(capsys, ["qexp", "--p", "7", "--terms", "11", "--prec", "128"])
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["coefficients"] == EXPECTED_P7
    assert payload["results"]["level"] == 49
    assert payload["results"]["twist"]["branch"] == "identity"


def test_qexp_terms_from_environment(capsys):
    code, out, _ = run(capsys, ["qexp", "--p", "7", "--prec", "128"], {"CMTOOL_TERMS": "11"})
    assert code == 0
    assert json.loads(out)["results"]["coefficients"] == EXPECTED_P7


def test_qexp_csv(capsys):
    code, out, _ = run(capsys, ["qexp", "--p", "7", "--terms", "11", "--prec", "128", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(row["re"]) for row in rows] == EXPECTED_P7
    assert rows[0] == {"n": "1", "re": "1", "im": "0", "exact": "1"}


def test_twisted_qexp_p7(capsys):
    code, out, _ = run(capsys, ["qexp", "--p", "7", "--order", "3", "--terms", "30", "--prec", "128"])
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["d"] == 3
    assert payload["results"]["twist"]["branch"] == "closed_form"
    assert payload["residuals"]["hecke"]["passed"]
    assert len(payload["choices"]["psi_extensions"]) == 2


def test_gross_p7(capsys):
    code, out, _ = run(capsys, ["gross", "--p", "7", "--prec", "128"])
    assert code == 0
    results = json.loads(out)["results"]
    assert (results["c4"], results["c6"], results["disc"]) == (105, 1323, -343)
    assert results["integral_model"] == [1, -1, 0, -2, -1]


def test_period_p7(capsys):
    code, out, _ = run(capsys, ["period", "--p", "7", "--prec", "128"])
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["is_real"]
    assert payload["residuals"]["agm_cross_check"]["passed"]


def test_verify_p7(capsys):
    code, out, err = run(capsys, ["verify", "--p", "7", "--prec", "128"])
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["passed"]
    residuals = payload["residuals"]
    assert residuals["point_count_oracle"]["primes"] == 45
    assert residuals["projector_spectrum_d3"]["rank"] == 2
    assert residuals["projector_spectrum_d3"]["eigen_multiplicities"] == {"0": 1, "3": 2}
    assert residuals["coefficient_span_d3"]["rank"] == residuals["coefficient_span_d3"]["expected_rank"] == 2
    assert residuals["make_modular_d3"]["branch"] == "closed_form"
    assert all(case["duration"] >= 0 for case in residuals.values())
    assert "Résumé" in err


def test_verify_class_number_three(capsys):
    code, out, _ = run(capsys, ["verify", "--p", "23", "--prec", "256"])
    assert code == 0
    residuals = json.loads(out)["residuals"]
    assert residuals["omega_period"]["passed"]
    assert residuals["coefficient_span_d11"]["rank"] == 30
    assert "point_count_oracle" not in residuals


def test_output_file(capsys, tmp_path):
    target = tmp_path / "gross.json"
    code, out, _ = run(capsys, ["gross", "--p", "11", "--prec", "128", "--out", str(target)])
    assert code == 0
    assert out == ""
    results = json.loads(target.read_text(encoding="utf-8"))["results"]
    assert (results["c4"], results["c6"]) == (352, -6776)
