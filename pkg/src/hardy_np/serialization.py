"""JSON encoding of problem instances and reports.

Complex numbers are ``[re, im]`` pairs; a matrix is a list of rows of such
pairs (row-major).  Plain real numbers are accepted wherever a complex
number is expected.  Every document is validated against a closed schema
(unknown keys are rejected) before anything is built from it.
"""
from __future__ import annotations

import copy

import jsonschema
import numpy as np

from .algebra import BlockAlgebra, Representation
from .correspondence import QuiverCorrespondence, TensorElement
from .dual import DualCorrespondence, DualElement
from .exceptions import DomainError

_COMPLEX = {"oneOf": [
    {"type": "number"},
    {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
]}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX}}
_MATRICES = {"type": "array", "items": _MATRIX}
_COUNTS = {"type": "array", "items": {"type": "integer", "minimum": 0}}


def _obj(props: dict, required=()) -> dict:
    props = dict(props)
    props.setdefault("version", {"type": ["string", "integer"]})
    props.setdefault("kind", {"type": "string"})
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_FRAME = {
    "type": "object",
    "properties": {
        "algebra": {"type": "object", "properties": {"blocks": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}},
                    "required": ["blocks"], "additionalProperties": False},
        "representation": {"type": "object", "properties": {"multiplicities": _COUNTS},
                           "required": ["multiplicities"], "additionalProperties": False},
        "quiver": {"type": "object", "properties": {"arrows": {"type": "array", "items": {
            "type": "object",
            "properties": {"src": {"type": "integer"}, "dst": {"type": "integer"}, "mult": {"type": "integer", "minimum": 1}},
            "required": ["src", "dst"], "additionalProperties": False}}},
            "required": ["arrows"], "additionalProperties": False},
    },
    "required": ["algebra", "representation", "quiver"],
    "additionalProperties": False,
}
_POINT = {"type": "object", "properties": {"edge_blocks": _MATRICES, "matrix": _MATRIX},
          "additionalProperties": False, "minProperties": 1, "maxProperties": 1}
_TENSOR = {"type": "object", "additionalProperties": _MATRIX}
_POLY = {"deg0": _MATRICES, "coeffs": {"type": "array", "items": _TENSOR}, "norm_bound": {"type": ["number", "null"]}}
_SAMPLE = {"type": "object", "properties": {"point": _POINT, "value": _MATRIX},
           "required": ["point", "value"], "additionalProperties": False}

SCHEMAS = {
    "dual": _obj({"frame": _FRAME}, ["frame"]),
    "poly": _obj({"frame": _FRAME, **_POLY}, ["frame"]),
    "point": _obj({"edge_blocks": _MATRICES, "matrix": _MATRIX}),
    "pick_check": _obj({"frame": _FRAME, "points": {"type": "array", "items": _POINT, "minItems": 1},
                        "B": _MATRICES, "C": _MATRICES}, ["frame", "points", "C"]),
    "np_points": {"type": "array", "items": _COMPLEX},
    "nest_solve": _obj({"h": {"type": "integer", "minimum": 1}, "ranks": _COUNTS, "basis": _MATRIX,
                        "B": _MATRIX, "C": _MATRIX, "U": _MATRIX, "V": _MATRIX}, ["h", "ranks"]),
    "samples": _obj({"frame": _FRAME, "samples": {"type": "array", "items": _SAMPLE, "minItems": 1}},
                    ["frame", "samples"]),
    "colligation": _obj({"frame": _FRAME, "A": _MATRIX, "B": _MATRIX, "C": _MATRIX, "D": _MATRIX,
                         "tau_multiplicities": _COUNTS}, ["frame", "A", "B", "C", "D", "tau_multiplicities"]),
}


def validate(doc, schema: str):
    try:
        jsonschema.validate(doc, SCHEMAS[schema])
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise DomainError(f"{schema} document invalid at {where}: {exc.message}") from None


# -- primitives ------------------------------------------------------------

def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    return complex(x[0], x[1])


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[encode_complex(x) for x in row] for row in a]


def decode_matrix(rows, shape=None) -> np.ndarray:
    if not rows:
        return np.zeros(shape if shape is not None else (0, 0), dtype=complex)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DomainError("matrix rows have different lengths")
    out = np.array([[decode_complex(x) for x in r] for r in rows], dtype=complex).reshape(len(rows), widths.pop())
    if shape is not None and out.size == 0:
        out = out.reshape(shape)
    if shape is not None and out.shape != tuple(shape):
        raise DomainError(f"matrix has shape {out.shape}, expected {tuple(shape)}")
    return out


def jsonable(obj):
    """Recursively turn numpy values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_matrix(obj) if obj.ndim == 2 else [encode_complex(x) for x in obj.ravel()]
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return obj


# -- structures ------------------------------------------------------------

def decode_frame(doc: dict):
    M = BlockAlgebra(tuple(doc["algebra"]["blocks"]))
    sigma = Representation(M, tuple(doc["representation"]["multiplicities"]))
    E = QuiverCorrespondence(M, tuple((a["src"], a["dst"], a.get("mult", 1)) for a in doc["quiver"]["arrows"]))
    return M, sigma, E


def encode_frame(E: QuiverCorrespondence, sigma: Representation) -> dict:
    return {"algebra": E.owner.to_json(), "representation": sigma.to_json(), "quiver": E.to_json()}


def decode_point(doc: dict, E, sigma) -> DualElement:
    if "edge_blocks" in doc:
        m = sigma.multiplicities
        blocks = doc["edge_blocks"]
        if len(blocks) != len(E.edges):
            raise DomainError(f"point needs {len(E.edges)} edge blocks, got {len(blocks)}")
        return DualCorrespondence(E, sigma).element(
            [decode_matrix(b, (m[e.src], m[e.dst])) for b, e in zip(blocks, E.edges)])
    mat = decode_matrix(doc["matrix"], (E.tensor_layout(1, sigma).dim, sigma.dim))
    return DualElement(sigma, E, mat)


def encode_point(eta: DualElement) -> dict:
    return {"edge_blocks": [encode_matrix(y) for y in eta.edge_blocks]}


def _path_lookup(E, k):
    return {p.key(): p for p in E.paths(k)}


def encode_tensor(t: TensorElement) -> dict:
    return {p.key(): encode_matrix(m) for p, m in sorted(t.data.items(), key=lambda kv: kv[0].edges)}


def decode_tensor(doc: dict, E, k: int) -> TensorElement:
    lookup = _path_lookup(E, k)
    data = {}
    for key, rows in doc.items():
        if key not in lookup:
            raise DomainError(f"'{key}' is not a path of length {k}")
        p = lookup[key]
        data[p] = decode_matrix(rows, E.fiber_shape(p))
    return TensorElement(E, k, data)


def encode_polynomial(X) -> dict:
    out = {}
    if 0 in X.coeffs:
        a = X.coeffs[0].as_algebra_element()
        out["deg0"] = [encode_matrix(b) for b in a.blocks]
    out["coeffs"] = [encode_tensor(X.coefficient(k)) for k in range(1, X.degree + 1)]
    if X.norm_bound is not None:
        out["norm_bound"] = float(X.norm_bound)
    return out


def decode_polynomial(doc: dict, E):
    from .hardy import HardyPolynomial

    coeffs = {}
    if "deg0" in doc:
        n = E.owner.block_sizes
        if len(doc["deg0"]) != len(n):
            raise DomainError(f"deg0 needs {len(n)} blocks")
        coeffs[0] = E.owner.element([decode_matrix(b, (k, k)) for b, k in zip(doc["deg0"], n)])
    for k, t in enumerate(doc.get("coeffs", []), start=1):
        if t:
            coeffs[k] = decode_tensor(t, E, k)
    return HardyPolynomial(E, coeffs, doc.get("norm_bound"))


def decode_samples(doc: dict):
    from .realization import SampledFunction

    _, sigma, E = decode_frame(doc["frame"])
    d = sigma.dim
    pts = [decode_point(s["point"], E, sigma) for s in doc["samples"]]
    vals = [decode_matrix(s["value"], (d, d)) for s in doc["samples"]]
    return SampledFunction(tuple(pts), tuple(vals))


def encode_samples(samples) -> dict:
    return {"frame": encode_frame(samples.base, samples.representation),
            "samples": [{"point": encode_point(p), "value": encode_matrix(v)}
                        for p, v in zip(samples.points, samples.values)]}


def decode_colligation(doc: dict):
    from .realization import Colligation

    _, sigma, E = decode_frame(doc["frame"])
    dual = DualCorrespondence(E, sigma)
    tau = Representation(dual.commutant, tuple(doc["tau_multiplicities"]))
    d, k = sigma.dim, tau.dim
    o = dual.quiver.tensor_layout(1, tau).dim
    return Colligation(E, sigma, tau.multiplicities, decode_matrix(doc["A"], (d, d)),
                       decode_matrix(doc["B"], (d, k)), decode_matrix(doc["C"], (o, d)),
                       decode_matrix(doc["D"], (o, k)))


def encode_colligation(V) -> dict:
    out = V.to_json()
    out["frame"] = encode_frame(V.base, V.representation)
    return out


def strip_meta(doc: dict) -> dict:
    doc = copy.deepcopy(doc)
    doc.pop("version", None)
    doc.pop("kind", None)
    return doc


__all__ = [
    "SCHEMAS", "validate", "encode_matrix", "decode_matrix", "encode_complex", "decode_complex",
    "jsonable", "decode_frame", "encode_frame", "decode_point", "encode_point", "encode_tensor",
    "decode_tensor", "encode_polynomial", "decode_polynomial", "decode_samples", "encode_samples",
    "decode_colligation", "encode_colligation",
]
