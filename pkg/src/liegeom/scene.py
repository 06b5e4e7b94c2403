"""Scene files (JSON, schema version 1): strict parsing and canonical output.

A scene describes a decorated graph::

    {
      "version": 1,
      "vertices": [
        {"id": "v1", "kind": "elemental", "tag": "H3",
         "cusps": [{"id": "c0", "generators": [G, G]}],
         "holonomy_generators": [G, ...]},
        {"id": "k1", "kind": "klein", "lattice": [[1, 0], [0, 1]],
         "sigma": [[1, 0], [0, -1]], "shift": [0.5, 0]}
      ],
      "edges": [{"id": "e0", "from": "v1.c0", "to": "k1.end",
                 "class": [[0, 1], [1, 0]], "slide": 0.0, "offset": [0, 0]}],
      "faults": [{"wall": 0, "generator": 0, "delta": 0.001}]
    }

Group elements ``G`` are encoded per tag:

* ``H3``: ``[[re, im], [re, im], [re, im], [re, im]]`` for ``a, b, c, d``
* ``H2R``: ``{"m": [[a, b], [c, d]], "s": real}``
* ``SL2T``: ``{"m": [[a, b], [c, d]], "theta": real, "k": int}`` (``k`` optional)

A Klein vertex may be referenced as ``"k1"`` or ``"k1.end"``. ``faults``
is a diagnostic hook that perturbs stored reduction generators after the
build. Unknown keys are errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .assembly import KLEIN_END, EdgeData, GeometryGraph, PieceDecoration
from .errors import LieGeometryError, SceneError
from .group_actions import HYPERBOLIC_TAGS, FiberedIsom, IsomH2R, MoebiusC, Tag
from .lattices import CuspSubgroup, Lattice2

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SceneFile:
    """Parsed scene in canonical (defaults filled) plain-data form."""

    version: int
    vertices: tuple
    edges: tuple
    faults: tuple = ()

    def to_graph(self) -> GeometryGraph:
        try:
            vertices = tuple(_vertex_to_piece(v) for v in self.vertices)
            edges = tuple(
                EdgeData(e["id"], _split_ref(e["from"]), _split_ref(e["to"]),
                         tuple(tuple(r) for r in e["class"]), e["slide"], tuple(e["offset"]))
                for e in self.edges
            )
        except LieGeometryError as exc:
            raise SceneError(str(exc)) from exc
        return GeometryGraph(vertices, edges)


# -- parsing -------------------------------------------------------------------


def _reject_constant(name):
    raise SceneError(f"non-finite number {name} is not allowed")


def loads(text: str) -> SceneFile:
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SceneError(f"invalid JSON: {exc}") from exc
    return parse(raw)


def load(path) -> SceneFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _keys(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise SceneError(f"{where}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise SceneError(f"{where}: unknown keys {sorted(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise SceneError(f"{where}: missing keys {missing}")


def _real(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SceneError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise SceneError(f"{where}: number must be finite")
    return x


def _int(x, where) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or x != int(x):
        raise SceneError(f"{where}: expected an integer, got {x!r}")
    return int(x)


def _string(x, where) -> str:
    if not isinstance(x, str) or not x:
        raise SceneError(f"{where}: expected a non-empty string")
    return x


def _array(x, n, where):
    if not isinstance(x, list) or len(x) != n:
        raise SceneError(f"{where}: expected an array of length {n}")
    return x


def _real_vec(x, where):
    return [_real(v, f"{where}[{i}]") for i, v in enumerate(_array(x, 2, where))]


def _real_mat(x, where):
    return [_real_vec(r, f"{where}[{i}]") for i, r in enumerate(_array(x, 2, where))]


def _int_mat(x, where):
    return [[_int(v, f"{where}[{i}][{j}]") for j, v in enumerate(_array(r, 2, f"{where}[{i}]"))]
            for i, r in enumerate(_array(x, 2, where))]


def _element(x, tag, where):
    if tag is Tag.H3:
        return [_real_vec(e, f"{where}[{i}]") for i, e in enumerate(_array(x, 4, where))]
    if tag is Tag.H2R:
        _keys(x, where, ("m", "s"))
        return {"m": _real_mat(x["m"], f"{where}.m"), "s": _real(x["s"], f"{where}.s")}
    _keys(x, where, ("m", "theta"), ("k",))
    return {"m": _real_mat(x["m"], f"{where}.m"), "theta": _real(x["theta"], f"{where}.theta"),
            "k": _int(x.get("k", 0), f"{where}.k")}


def _vertex(x, where):
    _keys(x, where, ("id", "kind"), ("tag", "cusps", "holonomy_generators", "lattice", "sigma", "shift"))
    vid = _string(x["id"], f"{where}.id")
    if "." in vid:
        raise SceneError(f"{where}.id: '.' is reserved for endpoint references")
    kind = x["kind"]
    if kind == "elemental":
        _keys(x, where, ("id", "kind", "tag", "cusps"), ("holonomy_generators",))
        try:
            tag = Tag(x["tag"])
        except ValueError:
            raise SceneError(f"{where}.tag: unknown tag {x['tag']!r}") from None
        if tag not in HYPERBOLIC_TAGS:
            raise SceneError(f"{where}.tag: elemental pieces must be H3, H2R or SL2T")
        if not isinstance(x["cusps"], list):
            raise SceneError(f"{where}.cusps: expected an array")
        cusps = []
        for i, c in enumerate(x["cusps"]):
            cw = f"{where}.cusps[{i}]"
            _keys(c, cw, ("id", "generators"))
            gens = _array(c["generators"], 2, f"{cw}.generators")
            cusps.append({"id": _string(c["id"], f"{cw}.id"),
                          "generators": [_element(g, tag, f"{cw}.generators[{j}]") for j, g in enumerate(gens)]})
        hol = x.get("holonomy_generators", [])
        if not isinstance(hol, list):
            raise SceneError(f"{where}.holonomy_generators: expected an array")
        return {"id": vid, "kind": kind, "tag": tag.value, "cusps": cusps,
                "holonomy_generators": [_element(g, tag, f"{where}.holonomy_generators[{j}]")
                                        for j, g in enumerate(hol)]}
    if kind == "klein":
        _keys(x, where, ("id", "kind", "lattice"), ("sigma", "shift"))
        return {"id": vid, "kind": kind, "lattice": _real_mat(x["lattice"], f"{where}.lattice"),
                "sigma": _int_mat(x.get("sigma", [[1, 0], [0, -1]]), f"{where}.sigma"),
                "shift": _real_vec(x.get("shift", [0.5, 0.0]), f"{where}.shift")}
    raise SceneError(f"{where}.kind: expected 'elemental' or 'klein', got {kind!r}")


def _split_ref(ref: str):
    vid, _, cid = ref.partition(".")
    return vid, cid


def _endpoint(ref, vertices, where):
    ref = _string(ref, where)
    vid, _, cid = ref.partition(".")
    v = vertices.get(vid)
    if v is None:
        raise SceneError(f"{where}: unknown vertex {vid!r}")
    if v["kind"] == "klein":
        if cid not in ("", KLEIN_END):
            raise SceneError(f"{where}: klein vertex {vid!r} has only the boundary '{KLEIN_END}'")
        return f"{vid}.{KLEIN_END}"
    if cid not in {c["id"] for c in v["cusps"]}:
        raise SceneError(f"{where}: vertex {vid!r} has no cusp {cid!r}")
    return ref


def parse(raw) -> SceneFile:
    _keys(raw, "scene", ("version", "vertices"), ("edges", "faults"))
    if _int(raw["version"], "version") != SCHEMA_VERSION:
        raise SceneError(f"unsupported scene version {raw['version']!r}")
    if not isinstance(raw["vertices"], list):
        raise SceneError("vertices: expected an array")
    vertices = [_vertex(v, f"vertices[{i}]") for i, v in enumerate(raw["vertices"])]
    by_id = {v["id"]: v for v in vertices}
    edges_raw = raw.get("edges", [])
    if not isinstance(edges_raw, list):
        raise SceneError("edges: expected an array")
    edges = []
    for i, e in enumerate(edges_raw):
        w = f"edges[{i}]"
        _keys(e, w, ("from", "to", "class"), ("id", "slide", "offset"))
        edges.append({
            "id": _string(e.get("id", f"e{i}"), f"{w}.id"),
            "from": _endpoint(e["from"], by_id, f"{w}.from"),
            "to": _endpoint(e["to"], by_id, f"{w}.to"),
            "class": _int_mat(e["class"], f"{w}.class"),
            "slide": _real(e.get("slide", 0.0), f"{w}.slide"),
            "offset": _real_vec(e.get("offset", [0.0, 0.0]), f"{w}.offset"),
        })
    faults_raw = raw.get("faults", [])
    if not isinstance(faults_raw, list):
        raise SceneError("faults: expected an array")
    faults = []
    for i, f in enumerate(faults_raw):
        w = f"faults[{i}]"
        _keys(f, w, ("wall",), ("generator", "delta"))
        faults.append({"wall": _int(f["wall"], f"{w}.wall"),
                       "generator": _int(f.get("generator", 0), f"{w}.generator"),
                       "delta": _real(f.get("delta", 1e-3), f"{w}.delta")})
    scene = SceneFile(SCHEMA_VERSION, tuple(vertices), tuple(edges), tuple(faults))
    scene.to_graph()  # surfaces singular matrices and degenerate lattices as parse errors
    return scene


# -- conversion to domain objects ---------------------------------------------


def _make_element(x, tag):
    if tag is Tag.H3:
        return MoebiusC.from_entries(*(complex(re, im) for re, im in x))
    if tag is Tag.H2R:
        return IsomH2R.from_matrix(x["m"], x["s"])
    return FiberedIsom.from_matrix(x["m"], x["theta"], x["k"])


def _vertex_to_piece(v) -> PieceDecoration:
    if v["kind"] == "klein":
        return PieceDecoration(
            v["id"], "klein", lattice=Lattice2(*v["lattice"]),
            sigma=tuple(tuple(r) for r in v["sigma"]), shift=tuple(v["shift"]),
        )
    tag = Tag(v["tag"])
    cusps = tuple(
        (c["id"], CuspSubgroup(*(_make_element(g, tag) for g in c["generators"])))
        for c in v["cusps"]
    )
    hol = tuple(_make_element(g, tag) for g in v["holonomy_generators"])
    return PieceDecoration(v["id"], "elemental", tag, cusps, hol)


# -- canonical emission --------------------------------------------------------


def format_real(x: float) -> str:
    s = format(float(x), ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _emit(value, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in value) + "]"
        items = [f"{pad}{_emit(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(scene: SceneFile) -> str:
    doc = {"version": scene.version, "vertices": list(scene.vertices), "edges": list(scene.edges)}
    if scene.faults:
        doc["faults"] = list(scene.faults)
    return _emit(doc, 2, 0) + "\n"


def dump_document(doc) -> str:
    """Serialize any plain-data document with the canonical number format."""
    return _emit(doc, 2, 0) + "\n"
