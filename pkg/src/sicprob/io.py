"""JSON file formats.

Complex numbers are ``[re, im]`` pairs. Floats are written with Python's
shortest round-trip ``repr``, so save followed by load is lossless.

    operator  {"dim": d, "entries": [[re, im], ...]}            row-major, d*d entries
    povm      {"dim": d, "elements": [operator, ...], "labels": [...]}
    probs     {"probs": [p_1, ..., p_n]}
    fixture   {"dim": d, "seed": s, "fiducial": [[re, im], ...],
               "frame_potential": f, "verified_tol": t}
"""

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .errors import SchemaError
from .measurements import validate_povm

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

OPERATOR_SCHEMA = {
    "type": "object",
    "required": ["dim", "entries"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": _COMPLEX},
    },
}

POVM_SCHEMA = {
    "type": "object",
    "required": ["dim", "elements"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "elements": {"type": "array", "minItems": 1, "items": OPERATOR_SCHEMA},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}

PROBS_SCHEMA = {
    "type": "object",
    "required": ["probs"],
    "properties": {"probs": {"type": "array", "minItems": 1, "items": {"type": "number"}}},
}

FIXTURE_SCHEMA = {
    "type": "object",
    "required": ["dim", "fiducial"],
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "seed": {"type": "integer"},
        "fiducial": {"type": "array", "items": _COMPLEX},
        "frame_potential": {"type": "number"},
        "verified_tol": {"type": "number"},
    },
}

SCHEMAS = {
    "operator": OPERATOR_SCHEMA,
    "povm": POVM_SCHEMA,
    "probs": PROBS_SCHEMA,
    "fixture": FIXTURE_SCHEMA,
}


def _reject_constant(name):
    raise SchemaError("$", f"non-finite number {name} is not allowed")


def parse(text):
    return json.loads(text, parse_constant=_reject_constant)


def dumps(doc, indent=None):
    return json.dumps(doc, indent=indent, allow_nan=False)


def _fmt_path(parts, prefix="$"):
    out = prefix
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def check_schema(doc, kind, path="$"):
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        raise SchemaError(_fmt_path(exc.absolute_path, path), exc.message) from None


def complex_to_json(values):
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def complex_from_json(pairs, path):
    arr = np.array(pairs, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise SchemaError(path, "entries must be finite")
    return arr[:, 0] + 1j * arr[:, 1]


def operator_to_json(m):
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "entries": complex_to_json(m)}


def operator_from_json(doc, path="$"):
    check_schema(doc, "operator", path)
    d = doc["dim"]
    if len(doc["entries"]) != d * d:
        raise SchemaError(f"{path}.entries", f"expected {d * d} entries, got {len(doc['entries'])}")
    return complex_from_json(doc["entries"], f"{path}.entries").reshape(d, d)


def povm_to_json(povm):
    out = {"dim": povm.dim, "elements": [operator_to_json(e) for e in povm.elements]}
    if povm.labels is not None:
        out["labels"] = list(povm.labels)
    return out


def povm_from_json(doc, path="$"):
    check_schema(doc, "povm", path)
    ops = []
    for i, e in enumerate(doc["elements"]):
        op = operator_from_json(e, f"{path}.elements[{i}]")
        if op.shape[0] != doc["dim"]:
            raise SchemaError(f"{path}.elements[{i}].dim", f"expected dim {doc['dim']}")
        ops.append(op)
    return validate_povm(ops, labels=doc.get("labels"))


def probs_to_json(p):
    return {"probs": [float(x) for x in p]}


def probs_from_json(doc, path="$"):
    check_schema(doc, "probs", path)
    p = np.array(doc["probs"], dtype=float)
    if not np.all(np.isfinite(p)):
        raise SchemaError(f"{path}.probs", "entries must be finite")
    return p


@dataclass
class Fixture:
    dim: int
    fiducial: np.ndarray
    seed: int = None
    frame_potential: float = None
    verified_tol: float = None

    def frame(self):
        from .sic import sic_from_fiducial

        return sic_from_fiducial(self.fiducial)


def fixture_to_json(fx):
    out = {"dim": fx.dim}
    if fx.seed is not None:
        out["seed"] = int(fx.seed)
    out["fiducial"] = complex_to_json(fx.fiducial)
    if fx.frame_potential is not None:
        out["frame_potential"] = float(fx.frame_potential)
    if fx.verified_tol is not None:
        out["verified_tol"] = float(fx.verified_tol)
    return out


def fixture_from_json(doc, path="$"):
    check_schema(doc, "fixture", path)
    d = doc["dim"]
    if len(doc["fiducial"]) != d:
        raise SchemaError(f"{path}.fiducial", f"expected {d} amplitudes, got {len(doc['fiducial'])}")
    return Fixture(
        dim=d,
        fiducial=complex_from_json(doc["fiducial"], f"{path}.fiducial"),
        seed=doc.get("seed"),
        frame_potential=doc.get("frame_potential"),
        verified_tol=doc.get("verified_tol"),
    )


_DECODERS = {
    "operator": operator_from_json,
    "povm": povm_from_json,
    "probs": probs_from_json,
    "fixture": fixture_from_json,
}
_ENCODERS = {
    "operator": operator_to_json,
    "povm": povm_to_json,
    "probs": probs_to_json,
    "fixture": fixture_to_json,
}


def load_json(path, kind):
    with open(path) as fh:
        doc = parse(fh.read())
    return _DECODERS[kind](doc)


def save_json(path, kind, value):
    text = dumps(_ENCODERS[kind](value), indent=2)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def bundled_dims():
    files = resources.files("sicprob.fiducials")
    return sorted(int(f.name[1:-5]) for f in files.iterdir() if f.name.startswith("d") and f.name.endswith(".json"))


def bundled_fixture(d):
    """Frozen, pre-verified fiducial shipped with the package."""
    res = resources.files("sicprob.fiducials").joinpath(f"d{d}.json")
    if not res.is_file():
        raise FileNotFoundError(f"no bundled fiducial for d={d}; available: {bundled_dims()}")
    return fixture_from_json(parse(res.read_text()))


def bundled_frame(d):
    return bundled_fixture(d).frame()
