import json

import numpy as np
import pytest

from qinstrument import fileformat, gallery
from qinstrument import randops as R
from qinstrument.dilation import dilate
from qinstrument.errors import CompletenessViolation, ValidationError
from qinstrument.quantum_types import povm_of


def corpus(rng):
    inst = R.instrument(rng, 3, 2)
    return {
        "matrix": R.ginibre(rng, 2, 3),
        "state": R.state_vector(rng, 3),
        "density": R.density(rng, 3),
        "observable": R.observable(rng, 4, 2),
        "povm": povm_of(inst),
        "instrument": inst,
        "dilation": dilate(inst),
    }


@pytest.mark.parametrize("kind", fileformat.KINDS)
def test_round_trip_is_bit_exact(kind, rng, tmp_path):
    value = corpus(rng)[kind]
    path = tmp_path / f"{kind}.json"
    fileformat.save(path, value, {"note": "x"})
    doc = fileformat.load(path)
    assert doc.kind == kind
    assert doc.metadata == {"note": "x"}
    text = path.read_text()
    assert fileformat.dumps(doc) == text
    assert json.loads(text)["schema_version"] == "1.0"


def test_values_survive(rng):
    inst = R.instrument(rng, 3, 3)
    back = fileformat.loads(fileformat.dumps(inst)).value
    np.testing.assert_array_equal(back.transformers, inst.transformers)
    assert back.labels == inst.labels


def test_dilation_keeps_labels():
    model = dilate(gallery.appendix_c_instrument("repeatable"))
    back = fileformat.loads(fileformat.dumps(model)).value
    assert back.labels == model.labels
    np.testing.assert_array_equal(back.unitary, model.unitary)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("payload"),
        lambda d: d.update(schema_version="2.0"),
        lambda d: d.update(kind="tensor"),
        lambda d: d.update(dim=3),
        lambda d: d.update(payload=[[1, 2, 3]]),
    ],
)
def test_malformed(mutate):
    doc = json.loads(fileformat.dumps(gallery.preset("luders-z")))
    mutate(doc)
    with pytest.raises(ValidationError):
        fileformat.loads(json.dumps(doc))


def test_incomplete_instrument_rejected():
    doc = json.loads(fileformat.dumps(gallery.preset("luders-z")))
    doc["payload"][0][0][0] = [0.9, 0.0]
    with pytest.raises(CompletenessViolation, match="completeness relation"):
        fileformat.loads(json.dumps(doc))


def test_not_json(tmp_path):
    with pytest.raises(ValidationError):
        fileformat.loads("{nope")
    with pytest.raises(ValidationError):
        fileformat.load(tmp_path / "missing.json")
