"""JSON operator files.

Layout::

    {
      "schema_version": "1.0",
      "kind": "instrument",
      "dim": 2,
      "payload": [[[[1.0, 0.0], [0.0, 0.0]], ...], ...],
      "labels": ["-1", "+1"],
      "metadata": {"source": "..."}
    }

Complex entries are ``[real, imag]`` pairs, row-major. Per kind:

=========== ============== ==============================================
kind        dim            payload / extra keys
=========== ============== ==============================================
matrix      [rows, cols]   2-D matrix
state       d              vector
density     d              2-D matrix
observable  d              list of projectors; ``eigenvalues``
povm        d              list of effects; ``labels``
instrument  d              list of transformers; ``labels``
dilation    [d1, d2]       composite unitary; ``ready_state``,
                           ``pointer_basis`` (columns), ``pointer_values``,
                           ``labels``
=========== ============== ==============================================

Floats are written with Python's shortest round-trip repr, so a
load/save cycle reproduces a file written by this module byte for byte.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .dilation import DilationModel
from .errors import ValidationError
from .matcore import DEFAULT_TOL
from .quantum_types import DensityOperator, Instrument, Observable, Povm, StateVector

SCHEMA_VERSION = "1.0"
KINDS = ("matrix", "state", "density", "observable", "povm", "instrument", "dilation")


@dataclass
class OperatorFile:
    kind: str
    value: Any
    metadata: dict = field(default_factory=dict)


def _encode(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_encode(x) for x in a]


def _decode(obj, ndim: int) -> np.ndarray:
    a = np.array(obj, dtype=float)
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise ValidationError(
            f"payload must be a {ndim}-D array of [real, imaginary] pairs, got shape {a.shape}"
        )
    if not np.all(np.isfinite(a)):
        raise ValidationError("payload contains non-finite numbers")
    return a[..., 0] + 1j * a[..., 1]


def kind_of(value) -> str:
    if isinstance(value, Instrument):
        return "instrument"
    if isinstance(value, Povm):
        return "povm"
    if isinstance(value, Observable):
        return "observable"
    if isinstance(value, DilationModel):
        return "dilation"
    if isinstance(value, DensityOperator):
        return "density"
    if isinstance(value, StateVector):
        return "state"
    if isinstance(value, np.ndarray) and value.ndim == 2:
        return "matrix"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_document(doc: OperatorFile) -> dict:
    v, kind = doc.value, doc.kind
    out = {"schema_version": SCHEMA_VERSION, "kind": kind}
    if kind == "matrix":
        out["dim"] = list(np.shape(v))
        out["payload"] = _encode(v)
    elif kind == "state":
        out["dim"] = v.dim
        out["payload"] = _encode(v.amplitudes)
    elif kind == "density":
        out["dim"] = v.dim
        out["payload"] = _encode(v.matrix)
    elif kind == "observable":
        out["dim"] = v.dim
        out["payload"] = _encode(v.projectors)
        out["eigenvalues"] = [float(x) for x in v.eigenvalues]
    elif kind == "povm":
        out["dim"] = v.dim
        out["payload"] = _encode(v.effects)
        out["labels"] = list(v.labels)
    elif kind == "instrument":
        out["dim"] = v.dim
        out["payload"] = _encode(v.transformers)
        out["labels"] = list(v.labels)
    elif kind == "dilation":
        out["dim"] = [v.system_dim, v.apparatus_dim]
        out["payload"] = _encode(v.unitary)
        out["ready_state"] = _encode(v.ready_state)
        out["pointer_basis"] = _encode(v.pointer_basis)
        out["pointer_values"] = list(v.pointer_values)
        out["labels"] = list(v.labels)
    else:
        raise ValidationError(f"unknown kind {kind!r}")
    out["metadata"] = {str(k): str(x) for k, x in doc.metadata.items()}
    return out


def _check_dim(d, expected):
    if d != expected:
        raise ValidationError(f"declared dim {d} does not match payload dimension {expected}")


def from_document(doc: dict, tol: float = DEFAULT_TOL) -> OperatorFile:
    if not isinstance(doc, dict):
        raise ValidationError("operator file must contain a JSON object")
    for key in ("schema_version", "kind", "dim", "payload"):
        if key not in doc:
            raise ValidationError(f"operator file is missing {key!r}")
    if str(doc["schema_version"]).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ValidationError(f"unsupported schema_version {doc['schema_version']!r}")
    kind, dim = doc["kind"], doc["dim"]
    labels = doc.get("labels")
    payload = doc["payload"]
    if kind == "matrix":
        value = _decode(payload, 2)
        _check_dim(list(dim), list(value.shape))
    elif kind == "state":
        amp = _decode(payload, 1)
        _check_dim(dim, amp.shape[0])
        value = StateVector(amp, tol)
    elif kind == "density":
        m = _decode(payload, 2)
        _check_dim(dim, m.shape[0])
        value = DensityOperator(m, tol)
    elif kind == "observable":
        projs = _decode(payload, 3)
        _check_dim(dim, projs.shape[1])
        if "eigenvalues" not in doc:
            raise ValidationError("observable file is missing 'eigenvalues'")
        value = Observable(doc["eigenvalues"], projs, tol)
    elif kind == "povm":
        effects = _decode(payload, 3)
        _check_dim(dim, effects.shape[1])
        value = Povm(effects, labels, tol)
    elif kind == "instrument":
        ms = _decode(payload, 3)
        _check_dim(dim, ms.shape[1])
        value = Instrument(ms, labels, tol)
    elif kind == "dilation":
        for key in ("ready_state", "pointer_basis", "pointer_values"):
            if key not in doc:
                raise ValidationError(f"dilation file is missing {key!r}")
        d1, d2 = dim
        value = DilationModel(
            system_dim=d1,
            apparatus_dim=d2,
            ready_state=_decode(doc["ready_state"], 1),
            pointer_basis=_decode(doc["pointer_basis"], 2),
            pointer_values=tuple(doc["pointer_values"]),
            unitary=_decode(payload, 2),
            labels=labels,
            tol=tol,
        )
    else:
        raise ValidationError(f"unknown kind {kind!r}; expected one of {KINDS}")
    return OperatorFile(kind, value, dict(doc.get("metadata") or {}))


def _is_leaf(v) -> bool:
    return isinstance(v, list) and all(
        isinstance(x, (int, float)) or (isinstance(x, list) and _is_leaf(x) and len(x) == 2)
        for x in v
    )


def _render(v, indent: int) -> str:
    pad = "  " * indent
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_render(x, indent + 1)}' for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, list) and v and not _is_leaf(v):
        items = [pad + "  " + _render(x, indent + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(v, float) and not math.isfinite(v):
        raise ValidationError("cannot serialize non-finite numbers")
    return json.dumps(v)


def dumps(value, metadata: dict = None) -> str:
    if isinstance(value, OperatorFile):
        doc = value
    else:
        doc = OperatorFile(kind_of(value), value, dict(metadata or {}))
    return _render(to_document(doc), 0) + "\n"


def loads(text: str, tol: float = DEFAULT_TOL) -> OperatorFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from None
    return from_document(doc, tol)


def save(path: Union[str, Path], value, metadata: dict = None) -> None:
    Path(path).write_text(dumps(value, metadata))


def load(path: Union[str, Path], tol: float = DEFAULT_TOL) -> OperatorFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, tol)
