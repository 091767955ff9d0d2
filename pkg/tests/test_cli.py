import csv
import io
import json

import pytest

from fockcode import cli


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def header_of(text):
    return dict(
        line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# ") and ": " in line
    )


def test_table3_default():
    text, code = cli.run(["table3"])
    assert code == 0
    rows = rows_of(text)
    assert [int(r["length"]) for r in rows] == [1, 1, 2, 2, 2, 2, 3, 3]
    assert (rows[0]["sequence"], rows[0]["codeword"]) == ("+++", "V")
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1, abs=1e-9)
    head = header_of(text)
    assert head["schema"] == "fockcode.table3/1"
    assert float(head["L"]) == pytest.approx(1.2929, abs=1e-4)


def test_table3_reference_fixture():
    text, code = cli.run(["table3", "--reference-table"])
    rows = rows_of(text)
    assert code == 0
    assert [r["codeword"] for r in rows] == ["V", "H", "VV", "VH", "HV", "HH", "HHH", "HHV"]


@pytest.mark.parametrize(
    "argv",
    [["table3"], ["sweep", "--theta", "30,60", "--n", "1-4"], ["roundtrip", "--theta", "45", "--n", "1-3", "--samples", "20"],
     ["schumacher", "--theta", "45", "--n", "4-8"], ["bounds", "--theta", "40", "--n", "1-5"], ["circuit-demo", "--seed", "3"]],
)
def test_output_is_deterministic(argv):
    assert cli.run(argv) == cli.run(argv)


def test_sweep_parallel_matches_serial():
    argv = ["sweep", "--theta", "20:60:20", "--n", "1-5"]
    assert cli.run(argv + ["--jobs", "2"])[0] == cli.run(argv)[0]


@pytest.mark.parametrize("command,columns", [
    ("table3", cli.TABLE3_COLUMNS), ("sweep", cli.SWEEP_COLUMNS), ("roundtrip", cli.ROUNDTRIP_COLUMNS),
    ("schumacher", cli.SCHUMACHER_COLUMNS), ("bounds", cli.BOUNDS_COLUMNS),
])
def test_help_documents_every_column(command, columns, capsys):
    with pytest.raises(SystemExit):
        cli.main([command, "--help"])
    out = capsys.readouterr().out
    for name in columns:
        assert name in out


def test_invalid_theta_is_config_error():
    _, code = cli.run(["table3", "--theta", "0"])
    assert code == 2
    _, code = cli.run(["sweep", "--theta", "180", "--n", "2"])
    assert code == 2


def test_roundtrip_with_wrong_side_info_fails():
    text, code = cli.run(["roundtrip", "--theta", "45", "--n", "3", "--samples", "10", "--lt-offset", "1"])
    assert code == 1
    assert "fail" in text


def test_roundtrip_degenerate_source():
    text, code = cli.run(["roundtrip", "--theta", "90", "--n", "1-4", "--samples", "50"])
    assert code == 0
    assert {r["status"] for r in rows_of(text)} == {"pass"}


def test_sweep_row_values():
    text, _ = cli.run(["sweep", "--theta", "45,90", "--n", "3"])
    r45, r90 = rows_of(text)
    assert float(r45["L"]) == pytest.approx(1.292893, abs=1e-6)
    assert float(r45["energy_ratio"]) == pytest.approx(1.292893 / 3, abs=1e-6)
    assert r45["lossless"] == "true"
    assert float(r90["S_letter"]) == 0.0
    assert float(r90["L"]) == 1.0


def test_schumacher_uniform_ensemble(tmp_path):
    path = tmp_path / "uniform.json"
    path.write_text(json.dumps({"letters": [{"amplitudes": [[1, 0], [0, 0]], "p": 0.5}, {"amplitudes": [[0, 0], [1, 0]], "p": 0.5}]}))
    text, code = cli.run(["schumacher", "--ensemble", str(path), "--n", "1-4"])
    assert code == 0
    for r in rows_of(text):
        assert float(r["fidelity"]) == pytest.approx(1.0)
        assert int(r["dimension"]) == 2 ** int(r["n"])


def test_json_format():
    text, code = cli.run(["bounds", "--theta", "45", "--n", "2,3", "--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["schema"] == "fockcode.bounds/1"
    assert [r["n"] for r in doc["rows"]] == [2, 3]


def test_circuit_demo():
    text, code = cli.run(["circuit-demo", "--seed", "7"])
    assert code == 0
    doc = json.loads(text)
    assert doc["schema"] == "fockcode.circuit-demo/1"
    assert json.dumps(doc).count("fidelity") >= 1
