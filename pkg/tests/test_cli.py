import json

import numpy as np
import pytest

from qinstrument import fileformat, gallery
from qinstrument.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "preset, kind",
    [
        ("appendix-c-ideal", "IdealOrdinary"),
        ("appendix-c-repeatable", "RepeatableOrdinary"),
        ("appendix-c-nonrepeatable", "NonrepeatableOrdinary"),
        ("half-half", "Generalized"),
    ],
)
def test_classify_presets(capsys, preset, kind):
    code, out, _ = run(capsys, "classify", "--preset", preset, "--json")
    assert code == 0
    assert json.loads(out)["kind"] == kind


def test_classify_text_table(capsys):
    code, out, _ = run(capsys, "classify", "preset:luders-z")
    assert code == 0
    assert "tolerance: 1e-09" in out
    assert "kind: IdealOrdinary" in out


def test_corrupted_instrument_exit_2(capsys, tmp_path):
    doc = json.loads(fileformat.dumps(gallery.preset("luders-z")))
    doc["payload"][0][0][0] = [0.9, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "classify", str(path))
    assert code == 2
    assert "completeness relation" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, _ = run(capsys, "classify", str(tmp_path / "nothing.json"))
    assert code == 2


def test_usage_errors_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64
    code, _, _ = run(capsys, "simulate", "--preset", "luders-z", "--state", "preset:plus",
                     "--shots", "0")
    assert code == 64


def test_dilate_then_extract(capsys, tmp_path):
    out_path = tmp_path / "dil.json"
    code, out, _ = run(capsys, "dilate", "--preset", "luders-bit", "-o", str(out_path), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] and payload["apparatus_dim"] == 2
    model = fileformat.load(out_path).value
    np.testing.assert_allclose(model.unitary @ [1, 0, 0, 0], [1, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(model.unitary @ [0, 0, 1, 0], [0, 0, 0, 1], atol=1e-12)

    inst_path = tmp_path / "inst.json"
    code, _, _ = run(capsys, "extract", str(out_path), "-o", str(inst_path))
    assert code == 0
    inst = fileformat.load(inst_path).value
    np.testing.assert_allclose(inst.transformers, gallery.preset("luders-bit").transformers,
                               atol=1e-12)


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "luders-z", "--state", "preset:plus",
                       "--shots", "100000", "--seed", "7", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["tv_distance"] < 0.01
    assert sum(payload["counts"]) == 100000
    again = run(capsys, "simulate", "--preset", "luders-z", "--state", "preset:plus",
                "--shots", "100000", "--seed", "7", "--json")[1]
    assert json.loads(again)["counts"] == payload["counts"]


def test_polar(capsys):
    code, out, _ = run(capsys, "polar", "preset:nilpotent", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] and payload["rank"] == 1
    assert all(r <= 1e-9 for r in payload["residuals"].values())
    code, out, _ = run(capsys, "polar", "--preset", "appendix-c-nonrepeatable", "--index", "0")
    assert code == 0
    assert "rank: 2" in out


def test_refine(capsys, tmp_path):
    path = tmp_path / "fine.json"
    code, out, _ = run(capsys, "refine", "--preset", "appendix-c-observable", "-o", str(path),
                       "--json")
    assert code == 0
    assert len(json.loads(out)["eigenvalues"]) == 4
    assert fileformat.load(path).kind == "observable"


def test_preset_list_and_write(capsys, tmp_path):
    code, out, _ = run(capsys, "preset", "--list")
    assert code == 0 and "appendix-c-ideal" in out.split()
    path = tmp_path / "p.json"
    assert run(capsys, "preset", "plus", "-o", str(path))[0] == 0
    assert fileformat.load(path).kind == "state"
    assert run(capsys, "preset", "no-such")[0] == 2
