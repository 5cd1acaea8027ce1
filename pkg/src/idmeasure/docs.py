"""JSON documents for spaces, measures, tower elements, couplings and maps.

Rationals are written as integers or ``"p/q"`` strings and -inf as the string
``"-inf"``; floats are rejected on input.  Every document carries a ``kind``
and unknown fields are an error, so printing a parsed canonical document
gives back the same JSON.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .maxplus import NEG_INF, FiniteMetricSpace, format_scalar, scalar, validate_metric
from .measures import IdempotentMeasure, SpaceMismatch
from .tower import TowerElement, element, point
from .transport import Coupling, is_admissible

KINDS = ("space", "measure", "tower", "coupling", "map", "result", "report")


class DocumentError(ValueError):
    pass


def _keys(doc, kind, required, optional=()):
    if not isinstance(doc, dict):
        raise DocumentError(f"{kind} document must be a JSON object")
    if doc.get("kind") != kind:
        raise DocumentError(f"expected kind {kind!r}, found {doc.get('kind')!r}")
    allowed = {"kind", *required, *optional}
    extra = set(doc) - allowed
    if extra:
        raise DocumentError(f"unknown field(s) in {kind} document: {', '.join(sorted(extra))}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise DocumentError(f"missing field(s) in {kind} document: {', '.join(missing)}")


def encode_scalar(a):
    if a is NEG_INF:
        return "-inf"
    a = Fraction(a)
    return a.numerator if a.denominator == 1 else format_scalar(a)


def decode_scalar(v, where="value"):
    if isinstance(v, float):
        raise DocumentError(f"{where}: floats are not accepted, write {v!r} as \"p/q\"")
    try:
        return scalar(v)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: {exc}") from None


# --------------------------------------------------------------------------
# spaces


def space_to_doc(space: FiniteMetricSpace) -> dict:
    doc = {"kind": "space"}
    if space.name is not None:
        doc["name"] = space.name
    doc["labels"] = list(space.labels)
    doc["dist"] = [[encode_scalar(v) for v in row] for row in space.dist]
    return doc


def space_from_doc(doc) -> FiniteMetricSpace:
    _keys(doc, "space", ("labels", "dist"), ("name",))
    labels = doc["labels"]
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise DocumentError("labels: expected a list of strings")
    dist = doc["dist"]
    if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
        raise DocumentError("dist: expected a list of rows")
    matrix = [[decode_scalar(v, f"dist[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(dist)]
    return validate_metric(labels, matrix, doc.get("name"))


def resolve_space(ref, space: FiniteMetricSpace | None) -> FiniteMetricSpace:
    """Turn a ``space`` field (a name or an inline document) into a space."""
    if isinstance(ref, dict):
        inline = space_from_doc(ref)
        if space is not None and inline != space:
            raise SpaceMismatch("inline space differs from the given space file")
        return inline
    if isinstance(ref, str):
        if space is None:
            raise DocumentError(f"space {ref!r} is referenced by name but no space file was given")
        if space.name is not None and space.name != ref:
            raise SpaceMismatch(f"document refers to space {ref!r}, space file is {space.name!r}")
        return space
    raise DocumentError("space: expected a name or an inline space document")


def _space_ref(space: FiniteMetricSpace, inline: bool):
    if inline or space.name is None:
        return space_to_doc(space)
    return space.name


# --------------------------------------------------------------------------
# measures


def _density_to_doc(space, density):
    return {lab: encode_scalar(w) for lab, w in zip(space.labels, density)}


def _density_from_doc(space, obj, where="density"):
    if not isinstance(obj, dict):
        raise DocumentError(f"{where}: expected an object mapping labels to weights")
    dens = [NEG_INF] * len(space)
    for lab, w in obj.items():
        if lab not in space.labels:
            raise DocumentError(f"{where}: unknown point {lab!r}")
        dens[space.index(lab)] = decode_scalar(w, f"{where}.{lab}")
    return tuple(dens)


def measure_to_doc(mu: IdempotentMeasure, inline: bool = False) -> dict:
    return {
        "kind": "measure",
        "space": _space_ref(mu.space, inline),
        "density": _density_to_doc(mu.space, mu.density),
    }


def measure_from_doc(doc, space: FiniteMetricSpace | None = None) -> IdempotentMeasure:
    _keys(doc, "measure", ("space", "density"))
    sp = resolve_space(doc["space"], space)
    return IdempotentMeasure(sp, _density_from_doc(sp, doc["density"]))


# --------------------------------------------------------------------------
# tower elements


def _enc_element(space, e: TowerElement):
    if e.level == 0:
        return space.labels[e.point]
    return [{"weight": encode_scalar(w), "child": _enc_element(space, c)} for w, c in e.children]


def _dec_element(space, obj, level, path="element"):
    if level == 0:
        if not isinstance(obj, str) or obj not in space.labels:
            raise DocumentError(f"{path}: expected a point label at level 0, found {obj!r}")
        return point(space.index(obj))
    if not isinstance(obj, list) or not obj:
        raise DocumentError(f"{path}: expected a nonempty list at level {level}")
    pairs = []
    for k, item in enumerate(obj):
        where = f"{path}[{k}]"
        if not isinstance(item, dict) or set(item) != {"weight", "child"}:
            raise DocumentError(f"{where}: expected exactly the fields 'weight' and 'child'")
        pairs.append((decode_scalar(item["weight"], f"{where}.weight"), _dec_element(space, item["child"], level - 1, f"{where}.child")))
    return element(pairs)


def tower_to_doc(space: FiniteMetricSpace, e: TowerElement, inline: bool = False) -> dict:
    return {
        "kind": "tower",
        "space": _space_ref(space, inline),
        "level": e.level,
        "element": _enc_element(space, e),
    }


def tower_from_doc(doc, space: FiniteMetricSpace | None = None) -> tuple[FiniteMetricSpace, TowerElement]:
    _keys(doc, "tower", ("space", "level", "element"))
    sp = resolve_space(doc["space"], space)
    level = doc["level"]
    if not isinstance(level, int) or isinstance(level, bool) or level < 0:
        raise DocumentError("level: expected a nonnegative integer")
    return sp, _dec_element(sp, doc["element"], level)


# --------------------------------------------------------------------------
# couplings and maps


def coupling_to_doc(xi: Coupling, inline: bool = False) -> dict:
    sp = xi.space
    entries = [
        {"x": sp.labels[i], "y": sp.labels[j], "weight": encode_scalar(xi.weights[i][j])}
        for i, j in xi.support()
    ]
    return {
        "kind": "coupling",
        "space": _space_ref(sp, inline),
        "left": _density_to_doc(sp, xi.left.density),
        "right": _density_to_doc(sp, xi.right.density),
        "weights": entries,
    }


def coupling_from_doc(doc, space: FiniteMetricSpace | None = None) -> Coupling:
    _keys(doc, "coupling", ("space", "left", "right", "weights"))
    sp = resolve_space(doc["space"], space)
    left = IdempotentMeasure(sp, _density_from_doc(sp, doc["left"], "left"))
    right = IdempotentMeasure(sp, _density_from_doc(sp, doc["right"], "right"))
    k = len(sp)
    w = [[NEG_INF] * k for _ in range(k)]
    if not isinstance(doc["weights"], list):
        raise DocumentError("weights: expected a list of entries")
    for n, item in enumerate(doc["weights"]):
        where = f"weights[{n}]"
        if not isinstance(item, dict) or set(item) != {"x", "y", "weight"}:
            raise DocumentError(f"{where}: expected exactly the fields 'x', 'y', 'weight'")
        if item["x"] not in sp.labels or item["y"] not in sp.labels:
            raise DocumentError(f"{where}: unknown point")
        w[sp.index(item["x"])][sp.index(item["y"])] = decode_scalar(item["weight"], f"{where}.weight")
    xi = Coupling(left, right, tuple(tuple(r) for r in w))
    if not is_admissible(xi):
        raise DocumentError("coupling marginals do not equal its left/right measures")
    return xi


def map_from_doc(doc, source: FiniteMetricSpace, target: FiniteMetricSpace) -> dict:
    _keys(doc, "map", ("map",), ("source", "target"))
    f = doc["map"]
    if not isinstance(f, dict):
        raise DocumentError("map: expected an object from source labels to target labels")
    for key, sp in (("source", source), ("target", target)):
        if key in doc and sp.name is not None and doc[key] != sp.name:
            raise SpaceMismatch(f"map {key} is {doc[key]!r}, given space is {sp.name!r}")
    return dict(f)


def map_to_doc(f: dict, source: FiniteMetricSpace, target: FiniteMetricSpace) -> dict:
    doc = {"kind": "map"}
    if source.name is not None:
        doc["source"] = source.name
    if target.name is not None:
        doc["target"] = target.name
    doc["map"] = dict(f)
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
