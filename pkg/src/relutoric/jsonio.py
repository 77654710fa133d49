"""JSON document encoding and decoding.

Exactness forbids JSON floats: rationals travel as integers or as strings
"p/q" with arbitrary precision.  All emitted dictionaries are built in a
fixed key order so serialized reports are byte-stable.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DocumentError
from .exact_math import RationalPolytope, frac
from .expressions import parse_and_compile
from .divisor import SupportFunction, support_on_fan
from .fan import Cone, Fan, _assemble_fan, cone_from_rays
from .network import NetworkSpec, ValidatedNetwork, validate


def encode_rational(value: Fraction):
    value = frac(value)
    if value.denominator == 1:
        return int(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def decode_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad rational {value!r}: {exc}") from exc
    raise DocumentError(f"expected int or 'p/q' string, got {value!r}")


def encode_vector(vec) -> list:
    return [encode_rational(x) for x in vec]


def decode_vector(values) -> tuple[Fraction, ...]:
    if not isinstance(values, (list, tuple)):
        raise DocumentError(f"expected a list, got {values!r}")
    return tuple(decode_rational(v) for v in values)


def encode_matrix(rows) -> list:
    return [encode_vector(row) for row in rows]


def decode_matrix(rows) -> tuple:
    if not isinstance(rows, list):
        raise DocumentError(f"expected a matrix, got {rows!r}")
    return tuple(decode_vector(row) for row in rows)


# ---------------------------------------------------------------------------
# networks
# ---------------------------------------------------------------------------

def encode_network(net: ValidatedNetwork) -> dict:
    doc = {
        "architecture": list(net.architecture),
        "layers": [encode_matrix(layer) for layer in net.layers],
    }
    if net.biases is not None:
        doc["biases"] = [encode_vector(vec) for vec in net.biases]
    return doc


def decode_network(doc) -> ValidatedNetwork:
    if not isinstance(doc, dict) or "layers" not in doc:
        raise DocumentError("network document needs a 'layers' key")
    layers = tuple(decode_matrix(layer) for layer in doc["layers"])
    if "architecture" in doc:
        arch = tuple(int(n) for n in doc["architecture"])
    else:
        if not layers or not layers[0]:
            raise DocumentError("cannot infer architecture from empty layers")
        arch = (len(layers[0][0]),) + tuple(len(m) for m in layers)
    biases = None
    if doc.get("biases") is not None:
        biases = tuple(decode_vector(vec) for vec in doc["biases"])
    return validate(NetworkSpec(arch, layers, biases))


# ---------------------------------------------------------------------------
# fans and supports
# ---------------------------------------------------------------------------

def encode_fan(fan: Fan) -> dict:
    ray_index = {r: i for i, r in enumerate(fan.rays)}
    return {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "cones": [{"rays": [ray_index[r] for r in cone.rays]}
                  for cone in fan.maximal_cones],
        "walls": [
            {
                "generators": [ray_index[g] for g in wall.generators],
                "cones": list(wall.cones),
                "hyperplane": list(wall.normal),
                "provenance": {
                    "kind": wall.kind,
                    "neurons": [list(n) for n in wall.neurons],
                },
            }
            for wall in fan.walls
        ],
    }


def decode_fan(doc) -> Fan:
    if not isinstance(doc, dict) or "rays" not in doc or "cones" not in doc:
        raise DocumentError("fan document needs 'rays' and 'cones'")
    rays = [tuple(int(x) for x in r) for r in doc["rays"]]
    if not rays:
        raise DocumentError("fan document has no rays")
    dim = int(doc.get("dim", len(rays[0])))
    cones = []
    for cone_doc in doc["cones"]:
        idxs = cone_doc["rays"] if isinstance(cone_doc, dict) else cone_doc
        cones.append(cone_from_rays([rays[i] for i in idxs], dim))
    return _assemble_fan(cones, dim, ())


def encode_support(s: SupportFunction) -> dict:
    return {
        "dim": s.fan.dim,
        "fan": encode_fan(s.fan),
        "slopes": [encode_vector(m) for m in s.slopes],
    }


def decode_support(doc) -> SupportFunction:
    fan = decode_fan(doc["fan"])
    slope_docs = doc.get("slopes")
    if slope_docs is None or len(slope_docs) != len(fan.maximal_cones):
        raise DocumentError("need one slope vector per maximal cone")
    # Hand-given cones may be listed in any order; match by containment of
    # each canonical cone's interior point in the documented cone.
    documented = [cone_from_rays(
        [tuple(int(x) for x in doc["fan"]["rays"][i])
         for i in (c["rays"] if isinstance(c, dict) else c)], fan.dim)
        for c in doc["fan"]["cones"]]
    slopes = []
    for cone in fan.maximal_cones:
        probe = cone.interior_point()
        position = next((i for i, d in enumerate(documented) if d.contains(probe)),
                        None)
        if position is None:
            raise DocumentError("documented cones do not cover the fan")
        slopes.append(decode_vector(slope_docs[position]))
    return support_on_fan(fan, slopes)


def decode_function(doc) -> SupportFunction:
    """A function document: {"dim": n, "expr": ...} or {"dim", "fan", "slopes"}."""
    if not isinstance(doc, dict):
        raise DocumentError("function document must be an object")
    if "expr" in doc:
        dim = int(doc.get("dim", 0))
        if dim < 1:
            raise DocumentError("function document needs a positive 'dim'")
        return parse_and_compile(doc["expr"], dim)
    if "fan" in doc:
        return decode_support(doc)
    raise DocumentError("function document needs 'expr' or 'fan'+'slopes'")


def encode_polytope(P: RationalPolytope) -> dict:
    return {
        "dimension": P.dimension,
        "vertices": [encode_vector(v) for v in P.vertices],
        "empty": P.is_empty(),
    }
