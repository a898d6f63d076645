import json

import pytest

from tsseq.cli import main


def test_basis_command(capsys):
    assert main(["basis", "--k", "2", "--n", "1", "--d", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["[6,1]", "[5,2]"]


def test_nishida_command(capsys):
    assert main(["nishida", "--r", "4", "--cell", "9,4"]) == 0
    assert capsys.readouterr().out.splitlines() == ["[7,2]"]


def test_tahss_command(capsys):
    assert main(["tahss", "--k", "3", "--n", "1"]) == 0
    out = capsys.readouterr().out
    assert "1[7,3,1]" in out and "grade 23 outgoing" in out


def test_records_stream(capsys):
    assert main(["--records", "tahss", "--k", "3"]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    kinds = {l["kind"] for l in lines}
    assert {"fired", "survivor"} <= kinds
    assert any(l["kind"] == "fired" and l["provenance"] == "nishida" for l in lines)


def test_candidates_command(capsys):
    assert main(["candidates", "--k", "1", "--n", "1"]) == 0
    out = capsys.readouterr().out
    assert "eta[4] -> eta2[2] #nishida_candidate" in out
    assert "unknown-coefficient" in out


def test_check_exit_status_on_bad_golden(tmp_path, capsys):
    from importlib import resources

    golden = resources.files("tsseq").joinpath("data/golden")
    for entry in golden.iterdir():
        (tmp_path / entry.name).write_text(entry.read_text())
    text = (tmp_path / "tahss_l3.txt").read_text()
    (tmp_path / "tahss_l3.txt").write_text(text.replace("1[7,3,1]", "eta[7,3,1]"))
    assert main(["check", "--golden", str(tmp_path)]) == 1
    out = capsys.readouterr().out
    assert "golden TAHSS-L3: FAIL" in out
