"""Model files: schema, validation and compilation to a volume polynomial.

A model is a JSON document with ``"format": 1`` and one of three kinds:

``tensor``
    ``{"nvars": s, "degree": d, "terms": [{"exp": [...], "coeff": "p/q"}, ...]}``
``polytopes``
    ``{"bodies": [{"name": "Q", "points": [[x, y], ...]}, ...]}``; the volume
    polynomial is ``t -> vol(t_1 P_1 + ... + t_s P_s)``.
``matroid``
    one of ``{"bases": [[...], ...], "ground_size": n}``, ``{"uniform": [r, n]}``
    or ``{"graphic": {"vertices": v, "edges": [[i, j], ...]}}``, plus optional
    ``"divisors"`` (``"alpha"``, ``"beta"`` or ``{"name": ..., "profile": [...]}``).

Rationals are integers or strings ``"p/q"``.  Optional sections:
``nef_generators`` or ``nef_facets``, ``psef_generators``, ``tags``,
``kahler_samples``, ``alpha``/``beta``/``omega``, ``pairs`` and ``collections``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import bodies as bodies_mod
from . import matroid as matroid_mod
from .cones import ConeModel, SamplePlan, from_facets, from_generators, positive_orthant
from .errors import InputError
from .polycore import Vector, VolumePolynomial, as_fraction, basis_vector, require_volume_degree, vector

FORMAT_VERSION = 1

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*-?\d+)?\s*$"}]}
_VECTOR = {"type": "array", "items": _RATIONAL, "minItems": 1}
_VECTORS = {"type": "array", "items": _VECTOR, "minItems": 1}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["format", "kind"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "kind": {"enum": ["tensor", "polytopes", "matroid"]},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "tensor": {
            "type": "object",
            "required": ["nvars", "degree", "terms"],
            "properties": {
                "nvars": {"type": "integer", "minimum": 1},
                "degree": {"type": "integer", "minimum": 2},
                "terms": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["exp", "coeff"],
                        "properties": {
                            "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                            "coeff": _RATIONAL,
                        },
                        "additionalProperties": False,
                    },
                },
            },
            "additionalProperties": False,
        },
        "polytopes": {
            "type": "object",
            "required": ["bodies"],
            "properties": {
                "bodies": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["points"],
                        "properties": {"name": {"type": "string"}, "points": _VECTORS},
                        "additionalProperties": False,
                    },
                },
            },
            "additionalProperties": False,
        },
        "matroid": {
            "type": "object",
            "properties": {
                "ground_size": {"type": "integer", "minimum": 1},
                "bases": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                "uniform": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
                "graphic": {
                    "type": "object",
                    "required": ["vertices", "edges"],
                    "properties": {
                        "vertices": {"type": "integer", "minimum": 1},
                        "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                                             "minItems": 2, "maxItems": 2}},
                    },
                    "additionalProperties": False,
                },
                "divisors": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"oneOf": [
                        {"enum": ["alpha", "beta"]},
                        {"type": "object", "required": ["name", "profile"],
                         "properties": {"name": {"type": "string"}, "profile": {"type": "array", "items": _RATIONAL}},
                         "additionalProperties": False},
                    ]},
                },
            },
            "additionalProperties": False,
        },
        "nef_generators": _VECTORS,
        "nef_facets": _VECTORS,
        "psef_generators": _VECTORS,
        "tags": {"type": "array", "items": {"enum": ["nef", "movable", "divisorial"]}},
        "kahler_samples": _VECTORS,
        "alpha": _VECTOR,
        "beta": _VECTOR,
        "omega": _VECTOR,
        "pairs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["alpha", "beta"],
                "properties": {"name": {"type": "string"}, "alpha": _VECTOR, "beta": _VECTOR},
                "additionalProperties": False,
            },
        },
        "collections": {"type": "array", "items": _VECTORS},
        "expect": {"enum": ["lorentzian", "strict", "not-lorentzian"]},
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"const": "tensor"}}}, "then": {"required": ["tensor"]}},
        {"if": {"properties": {"kind": {"const": "polytopes"}}}, "then": {"required": ["polytopes"]}},
        {"if": {"properties": {"kind": {"const": "matroid"}}}, "then": {"required": ["matroid"]}},
        {"not": {"required": ["nef_generators", "nef_facets"]}},
    ],
}


class ModelError(InputError):
    """A model file failed to parse, validate or compile; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = "$"):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.detail = message


@dataclass(frozen=True)
class FixedSamples:
    """Sampler that returns explicit interior points (from ``kahler_samples``)."""

    samples: tuple[Vector, ...]

    def points(self, cone: ConeModel) -> list[Vector]:
        return list(self.samples)


@dataclass(frozen=True)
class Pair:
    name: str
    alpha: Vector
    beta: Vector


@dataclass(frozen=True)
class CompiledModel:
    name: str
    kind: str
    f: VolumePolynomial
    nef: ConeModel
    psef: ConeModel | None
    omega: Vector
    pairs: tuple[Pair, ...]
    collections: tuple[tuple[Vector, ...], ...] = ()
    samples: tuple[Vector, ...] = ()
    bodies: tuple = ()
    labels: tuple[str, ...] = ()
    expect: str | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def sampler(self, count: int = 16) -> SamplePlan | FixedSamples:
        return FixedSamples(self.samples) if self.samples else SamplePlan(count)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _rational(raw, where: str) -> Fraction:
    try:
        return as_fraction(raw)
    except ZeroDivisionError:
        raise ModelError(f"zero denominator in rational {raw!r}", where) from None
    except (TypeError, ValueError) as exc:
        raise ModelError(f"not a rational: {exc}", where) from None


def _vec(raw, where: str, length: int | None = None) -> Vector:
    v = tuple(_rational(x, f"{where}[{i}]") for i, x in enumerate(raw))
    if length is not None and len(v) != length:
        raise ModelError(f"expected {length} coordinates, got {len(v)}", where)
    return v


def parse_document(text: str, source: str = "<model>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc.msg}", f"{source}:{exc.lineno}:{exc.colno}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise ModelError(err.message, _path(err.absolute_path))
    return doc


def compile_document(doc: dict, name: str = "model") -> CompiledModel:
    kind = doc["kind"]
    name = doc.get("name", name)
    bodies: tuple = ()
    labels: tuple[str, ...] = ()
    if kind == "tensor":
        f = _compile_tensor(doc["tensor"])
    elif kind == "polytopes":
        f, bodies, labels = _compile_polytopes(doc["polytopes"])
    else:
        f, labels = _compile_matroid(doc["matroid"])
    s = f.nvars
    try:
        require_volume_degree(f)
    except InputError as exc:
        raise ModelError(str(exc), "$") from None

    tags = tuple(doc["tags"]) if "tags" in doc else None
    try:
        if "nef_generators" in doc:
            gens = [_vec(g, f"$.nef_generators[{i}]", s) for i, g in enumerate(doc["nef_generators"])]
            nef = from_generators("nef", gens, tags)
        elif "nef_facets" in doc:
            normals = [_vec(n, f"$.nef_facets[{i}]", s) for i, n in enumerate(doc["nef_facets"])]
            nef = from_facets("nef", normals)
        else:
            nef = positive_orthant(s)
        psef = None
        if "psef_generators" in doc:
            gens = [_vec(g, f"$.psef_generators[{i}]", s) for i, g in enumerate(doc["psef_generators"])]
            psef = from_generators("psef", gens)
    except ModelError:
        raise
    except InputError as exc:
        raise ModelError(str(exc), "$.nef_generators") from None

    omega = _vec(doc["omega"], "$.omega", s) if "omega" in doc else nef.interior_point()
    pairs = []
    if "pairs" in doc:
        for i, p in enumerate(doc["pairs"]):
            pairs.append(Pair(p.get("name", f"pair{i + 1}"), _vec(p["alpha"], f"$.pairs[{i}].alpha", s),
                              _vec(p["beta"], f"$.pairs[{i}].beta", s)))
    if "alpha" in doc or "beta" in doc or not pairs:
        alpha = _vec(doc["alpha"], "$.alpha", s) if "alpha" in doc else basis_vector(s, 0)
        beta = _vec(doc["beta"], "$.beta", s) if "beta" in doc else basis_vector(s, min(1, s - 1))
        pairs.insert(0, Pair("default", alpha, beta))
    collections = tuple(
        tuple(_vec(v, f"$.collections[{i}][{j}]", s) for j, v in enumerate(c)) for i, c in enumerate(doc.get("collections", []))
    )
    samples = tuple(_vec(v, f"$.kahler_samples[{i}]", s) for i, v in enumerate(doc.get("kahler_samples", [])))
    for i, w in enumerate(samples):
        if not nef.in_interior(w):
            raise ModelError("sample point is not interior to the nef model", f"$.kahler_samples[{i}]")
    return CompiledModel(name, kind, f, nef, psef, omega, tuple(pairs), collections, samples, bodies, labels,
                         doc.get("expect"))


def _compile_tensor(spec: dict) -> VolumePolynomial:
    nvars, degree = spec["nvars"], spec["degree"]
    terms: dict = {}
    for i, term in enumerate(spec["terms"]):
        where = f"$.tensor.terms[{i}]"
        exp = tuple(term["exp"])
        if len(exp) != nvars:
            raise ModelError(f"exponent has {len(exp)} entries but nvars is {nvars}", where + ".exp")
        if sum(exp) != degree:
            raise ModelError(f"non-homogeneous term: exponent sums to {sum(exp)}, degree is {degree}", where + ".exp")
        terms[exp] = terms.get(exp, Fraction(0)) + _rational(term["coeff"], where + ".coeff")
    return VolumePolynomial(nvars, degree, terms)


def _compile_polytopes(spec: dict):
    polys = []
    labels = []
    dims = set()
    for i, body in enumerate(spec["bodies"]):
        where = f"$.polytopes.bodies[{i}]"
        pts = [_vec(p, f"{where}.points[{j}]") for j, p in enumerate(body["points"])]
        dims |= {len(p) for p in pts}
        if len(dims) != 1:
            raise ModelError("all points of all bodies must share one ambient dimension", where + ".points")
        try:
            polys.append(bodies_mod.polytope(pts))
        except InputError as exc:
            raise ModelError(str(exc), where) from None
        labels.append(body.get("name", f"P{i + 1}"))
    try:
        f = bodies_mod.mixed_volumes(bodies_mod.BodyFamily(tuple(polys)))
    except InputError as exc:
        raise ModelError(str(exc), "$.polytopes") from None
    return f, tuple(polys), tuple(labels)


def _compile_matroid(spec: dict):
    try:
        if "uniform" in spec:
            r, n = spec["uniform"]
            M = matroid_mod.uniform(r, n)
        elif "graphic" in spec:
            M = matroid_mod.graphic(spec["graphic"]["vertices"], [tuple(e) for e in spec["graphic"]["edges"]])
        elif "bases" in spec and "ground_size" in spec:
            M = matroid_mod.from_bases(spec["ground_size"], spec["bases"])
        else:
            raise ModelError("give bases with ground_size, uniform, or graphic", "$.matroid")
        divisors = []
        labels = []
        for i, d in enumerate(spec.get("divisors", ["alpha", "beta"])):
            if d == "alpha":
                divisors.append(matroid_mod.ALPHA)
            elif d == "beta":
                divisors.append(matroid_mod.BETA)
            else:
                profile = [_rational(v, f"$.matroid.divisors[{i}].profile[{j}]") for j, v in enumerate(d["profile"])]
                divisors.append(matroid_mod.concave_cardinality(M, profile))
                d = d["name"]
            labels.append(d)
        f, _ = matroid_mod.bergman_volume_polynomial(M, divisors)
    except ModelError:
        raise
    except InputError as exc:
        raise ModelError(str(exc), "$.matroid") from None
    return f, tuple(labels)


def shipped_corpus() -> Path:
    return Path(str(resources.files("lorentzkit") / "corpus"))


def resolve_model_path(ref: str) -> Path:
    """A file path, or the name of a shipped corpus model (``squares``, ``sq-rect`` ...)."""
    p = Path(ref)
    if p.is_file():
        return p
    candidate = shipped_corpus() / f"{ref}.json"
    if candidate.is_file():
        return candidate
    raise ModelError(f"no model file or shipped model named {ref!r}", "--model")


def load_model(ref: str | Path) -> CompiledModel:
    path = resolve_model_path(str(ref))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"cannot read model: {exc.strerror}", str(path)) from None
    doc = parse_document(text, str(path))
    return compile_document(doc, path.stem)
