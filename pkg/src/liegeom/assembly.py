"""Decorated graphs, end-to-end assembly of the Lie generated structure,
and the aggregated verification report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .construction import (
    REQUIRED_CLASS_DET,
    AffineCylinderGlue,
    EndAttachment,
    KleinEnd,
    attach_cylinder,
    build_affine_cylinder,
    flip_conjugacy_residual,
    klein_checks,
    klein_end,
)
from .errors import AssemblyError, LieGeometryError
from .group_actions import (
    HYPERBOLIC_TAGS,
    AffineA,
    GroupElement,
    Tag,
    compose,
    embed_translation,
    identity,
    translation_vector,
)
from .lattices import (
    CuspSubgroup,
    Lattice2,
    area,
    conjugate,
    normalize,
    same_lattice_residual,
)
from .sampling import DEFAULT_SAMPLES, action_residual, sample_points

KLEIN_END = "end"
HALF_EDGE_TOL = 1e-9
DEFAULT_EPS = 1e-9
MINIMALITY_NOTE = "minimality assumed by construction"


# -- graph description -----------------------------------------------------


@dataclass(frozen=True)
class PieceDecoration:
    id: str
    kind: str  # "elemental" or "klein"
    tag: Tag | None = None
    cusps: tuple = ()  # ((cusp_id, CuspSubgroup), ...)
    holonomy_generators: tuple = ()
    lattice: Lattice2 | None = None
    sigma: tuple | None = None
    shift: tuple | None = None

    def cusp(self, cusp_id):
        for cid, c in self.cusps:
            if cid == cusp_id:
                return c
        return None

    @property
    def boundary_ids(self):
        if self.kind == "klein":
            return (KLEIN_END,)
        return tuple(cid for cid, _ in self.cusps)


@dataclass(frozen=True)
class EdgeData:
    id: str
    end_a: tuple  # (vertex id, cusp id)
    end_b: tuple
    gluing_class: tuple
    slide: float = 0.0
    offset: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class GeometryGraph:
    vertices: tuple
    edges: tuple = ()

    def vertex(self, vid) -> PieceDecoration | None:
        for v in self.vertices:
            if v.id == vid:
                return v
        return None


# -- report ----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass" or "fail"
    max_residual: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return tuple(c for c in self.checks if not c.passed)

    def get(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _report(checks) -> VerificationReport:
    return VerificationReport(tuple(sorted(checks, key=lambda c: c.name)))


def _ok(name, ok, residual=0.0, detail=""):
    return Check(name, "pass" if ok else "fail", float(residual), detail)


# -- validation ------------------------------------------------------------


def _det2(m):
    (a, b), (c, d) = m
    return a * d - b * c


def _is_connected(vertex_ids, edges):
    if not vertex_ids:
        return False
    adj = {v: set() for v in vertex_ids}
    for e in edges:
        a, b = e.end_a[0], e.end_b[0]
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    seen = {vertex_ids[0]}
    stack = [vertex_ids[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertex_ids)


def validate(g: GeometryGraph) -> VerificationReport:
    """Check the decorated graph; failures are report entries, never raised."""
    checks = []
    ids = [v.id for v in g.vertices]
    checks.append(_ok("graph:unique_ids", len(set(ids)) == len(ids),
                      detail="" if len(set(ids)) == len(ids) else "duplicate vertex ids"))
    connected = _is_connected(ids, g.edges)
    checks.append(_ok("graph:connected", connected,
                      detail="" if connected else "graph is empty or disconnected"))

    usage = {}
    for e in g.edges:
        det = _det2(e.gluing_class)
        checks.append(_ok(
            f"edge:{e.id}:orientation", det == REQUIRED_CLASS_DET,
            detail="" if det == REQUIRED_CLASS_DET else
            f"class {e.gluing_class} has det {det}; orientation convention requires det = -1",
        ))
        for end in (e.end_a, e.end_b):
            v = g.vertex(end[0])
            ok = v is not None and end[1] in v.boundary_ids
            checks.append(_ok(f"edge:{e.id}:endpoint:{end[0]}.{end[1]}", ok,
                              detail="" if ok else "endpoint does not resolve"))
            usage[end] = usage.get(end, 0) + 1

    for v in g.vertices:
        if v.kind == "elemental":
            tag_ok = v.tag in HYPERBOLIC_TAGS
            checks.append(_ok(f"vertex:{v.id}:tag", tag_ok,
                              detail="" if tag_ok else f"elemental tag must be hyperbolic type, got {v.tag}"))
            for cid, cusp in v.cusps:
                try:
                    attach_cylinder(cusp)
                    checks.append(_ok(f"cusp:{v.id}.{cid}:standard_form", True))
                except LieGeometryError as exc:
                    checks.append(_ok(f"cusp:{v.id}.{cid}:standard_form", False, 1.0, str(exc)))
                n = usage.get((v.id, cid), 0)
                checks.append(_ok(f"valence:{v.id}.{cid}", n == 1,
                                  detail="" if n == 1 else
                                  ("unmatched cusp" if n == 0 else f"cusp matched by {n} edge endpoints")))
        elif v.kind == "klein":
            n = usage.get((v.id, KLEIN_END), 0)
            checks.append(_ok(f"valence:{v.id}.{KLEIN_END}", n == 1,
                              detail="" if n == 1 else f"klein vertex must be univalent, has valence {n}"))
            try:
                _klein_for(v)
                checks.append(_ok(f"klein:{v.id}:involution", True))
            except LieGeometryError as exc:
                checks.append(_ok(f"klein:{v.id}:involution", False, 1.0, str(exc)))
        else:
            checks.append(_ok(f"vertex:{v.id}:kind", False, 1.0, f"unknown kind {v.kind!r}"))
    return _report(checks)


def _klein_for(v: PieceDecoration) -> KleinEnd:
    _, lat = normalize(v.lattice, Tag.AFF)
    kwargs = {}
    if v.sigma is not None:
        kwargs["sigma"] = v.sigma
    if v.shift is not None:
        kwargs["shift"] = v.shift
    return klein_end(lat, **kwargs)


def moduli_dimension(g: GeometryGraph) -> int:
    """Continuous parameters: one slide and one 2-vector offset per edge."""
    return 3 * len(g.edges)


def moduli_parameters(g: GeometryGraph):
    return [(e.id, e.slide, tuple(e.offset)) for e in g.edges]


# -- the built structure ---------------------------------------------------


@dataclass(frozen=True)
class Region:
    id: str
    tag: Tag
    generators: tuple
    provenance: str


@dataclass(frozen=True)
class Intersection:
    """Binary overlap of regions ``a`` and ``b``.

    ``transition`` lies in ``a``'s group and carries ``a``'s chart to
    ``b``'s chart on the overlap. Each reduction generator is a pair
    ``(rep_a, rep_b)`` of elements of the two groups acting identically on
    U in ``b``'s chart. ``wall_generators`` is the wall subgroup as seen
    from ``a``'s chart; conjugating it by ``transition`` recovers the
    holonomy of the wall.
    """

    index: int
    a: str
    b: str
    transition: GroupElement
    reductions: tuple
    wall_generators: tuple
    kind: str

    @property
    def name(self):
        return f"w{self.index}:{self.a}|{self.b}"

    def other(self, region):
        if region == self.a:
            return self.b
        if region == self.b:
            return self.a
        return None


@dataclass(frozen=True)
class LieGeneratedStructure:
    regions: tuple
    intersections: tuple
    base_region: str
    attachments: tuple = ()
    glues: tuple = ()  # ((edge id, AffineCylinderGlue), ...)
    klein_ends: tuple = ()  # ((vertex id, KleinEnd), ...)
    cusps: tuple = ()  # ((vertex id, cusp id, CuspSubgroup), ...)
    notes: tuple = field(default=(MINIMALITY_NOTE,))

    def region(self, rid) -> Region:
        for r in self.regions:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def intersection(self, index) -> Intersection:
        if not 0 <= index < len(self.intersections):
            raise KeyError(index)
        return self.intersections[index]


def _pairs(lat: Lattice2, tag_a, tag_b):
    return tuple((embed_translation(v, tag_a), embed_translation(v, tag_b)) for v in lat.basis)


def _translations(lat: Lattice2, tag=Tag.AFF):
    return tuple(embed_translation(v, tag) for v in lat.basis)


def build(g: GeometryGraph, collar_halfwidth: float = 1.0) -> LieGeneratedStructure:
    report = validate(g)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise AssemblyError(f"graph failed validation: {names}")

    regions = []
    intersections = []
    attachments = {}
    cusps = []

    def add_intersection(a, b, transition, reductions, wall, kind):
        intersections.append(Intersection(len(intersections), a, b, transition,
                                          tuple(reductions), tuple(wall), kind))

    for v in g.vertices:
        if v.kind != "elemental":
            continue
        gens = tuple(x for _, c in v.cusps for x in c.generators) + tuple(v.holonomy_generators)
        regions.append(Region(v.id, v.tag, gens, f"vertex:{v.id}"))
        for cid, c in v.cusps:
            attachments[(v.id, cid)] = attach_cylinder(c, collar_halfwidth, v.id, cid)
            cusps.append((v.id, cid, c))

    glues = []
    kleins = []

    def attach_end(end, edge_region, lat, edge_side):
        """Create the collar (or Klein) region at one half-edge."""
        vid, cid = end
        v = g.vertex(vid)
        if v.kind == "klein":
            k = _klein_for(v)
            _match(k.lattice, lat, f"{vid}.{cid}")
            rid = f"{vid}/klein"
            regions.append(Region(rid, Tag.AFF, _translations(k.lattice) + (k.involution,), f"vertex:{vid}"))
            kleins.append((vid, k))
            add_intersection(rid, edge_region, identity(Tag.AFF), _pairs(lat, Tag.AFF, Tag.AFF),
                             _translations(k.lattice), f"klein-{edge_side}")
            return
        att = attachments[(vid, cid)]
        _match(att.lattice, lat, f"{vid}.{cid}")
        collar = f"{vid}.{cid}/collar"
        regions.append(Region(collar, Tag.AFF, _translations(att.lattice), f"cusp:{vid}.{cid}"))
        add_intersection(vid, collar, att.conjugator, _pairs(att.lattice, att.tag, Tag.AFF),
                         v.cusp(cid).generators, "collar")
        if edge_side == "L":
            add_intersection(collar, edge_region, identity(Tag.AFF), _pairs(lat, Tag.AFF, Tag.AFF),
                             _translations(att.lattice), "half-edge")
        else:
            add_intersection(edge_region, collar, identity(Tag.AFF), _pairs(lat, Tag.AFF, Tag.AFF),
                             _translations(lat), "half-edge")

    for e in g.edges:
        lat_a = _end_lattice(g, attachments, e.end_a)
        lat_b = _end_lattice(g, attachments, e.end_b)
        glue = build_affine_cylinder(lat_a, lat_b, e.gluing_class, e.slide, e.offset)
        glues.append((e.id, glue))
        left, mid, right = f"{e.id}/L", f"{e.id}/M", f"{e.id}/R"
        attach_end(e.end_a, left, lat_a, "L")
        regions.append(Region(left, Tag.AFF, glue.regions["L"], f"edge:{e.id}"))
        regions.append(Region(mid, Tag.AFF, glue.regions["M"], f"edge:{e.id}"))
        regions.append(Region(right, Tag.AFF, glue.right_translations, f"edge:{e.id}"))
        add_intersection(left, mid, identity(Tag.AFF), _pairs(lat_a, Tag.AFF, Tag.AFF),
                         glue.left_translations, "edge-left")
        add_intersection(mid, right, glue.flip, _pairs(lat_b, Tag.AFF, Tag.AFF),
                         glue.left_translations, "edge-flip")
        attach_end(e.end_b, right, lat_b, "R")

    if regions:
        base = regions[0].id
    else:
        raise AssemblyError("graph has no regions")
    s = LieGeneratedStructure(
        tuple(regions), tuple(intersections), base,
        tuple(attachments[(v, c)] for v, c, _ in cusps),
        tuple(glues), tuple(kleins), tuple(cusps),
    )
    _check_combinatorics(s)
    return s


def _end_lattice(g, attachments, end):
    v = g.vertex(end[0])
    if v.kind == "klein":
        return _klein_for(v).lattice
    return attachments[end].lattice


def _match(expected: Lattice2, got: Lattice2, where):
    err = max(abs(x - y) for u, w in zip(expected.basis, got.basis) for x, y in zip(u, w))
    if err > HALF_EDGE_TOL:
        raise AssemblyError(f"lattice mismatch at half-edge {where}: {err:.3g}")


def _check_combinatorics(s: LieGeneratedStructure):
    ids = [r.id for r in s.regions]
    if len(set(ids)) != len(ids):
        raise AssemblyError("duplicate region ids")
    if not _intersection_graph_connected(s):
        raise AssemblyError("intersection graph is disconnected")


def _intersection_graph_connected(s: LieGeneratedStructure) -> bool:
    adj = {r.id: set() for r in s.regions}
    for x in s.intersections:
        adj[x.a].add(x.b)
        adj[x.b].add(x.a)
    start = s.regions[0].id
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def expected_counts(g: GeometryGraph):
    """``(regions, intersections)`` predicted from the graph alone."""
    elemental = [v for v in g.vertices if v.kind == "elemental"]
    klein = [v for v in g.vertices if v.kind == "klein"]
    n_cusps = sum(len(v.cusps) for v in elemental)
    regions = len(elemental) + n_cusps + 3 * len(g.edges) + len(klein)
    return regions, 2 * n_cusps + 2 * len(g.edges) + len(klein)


# -- verification ----------------------------------------------------------


def _reduction_residual(x: Intersection, points) -> float:
    return max((action_residual(ra, rb, points) for ra, rb in x.reductions), default=0.0)


def _minimality_residual(x: Intersection, points) -> float:
    """Compare stored reductions with the holonomy of the wall subgroup."""
    holonomy = [conjugate(x.transition, w) for w in x.wall_generators]
    worst = 0.0
    vectors = []
    for h in holonomy:
        v = translation_vector(h, math.inf)
        if v is None:
            return math.inf
        worst = max(worst, action_residual(h, embed_translation(v, h.tag), points))
        vectors.append(v)
    stored = [translation_vector(rb, math.inf) for _, rb in x.reductions]
    if any(v is None for v in stored) or len(stored) < 2:
        return math.inf
    try:
        lat = Lattice2(*stored[:2])
    except LieGeometryError:
        return math.inf
    worst = max(worst, same_lattice_residual(lat, stored))
    return max(worst, same_lattice_residual(lat, vectors))


def _membership_residual(gens) -> float:
    worst = 0.0
    for g in gens:
        if not isinstance(g, AffineA):
            return math.inf
        worst = max(worst, abs(abs(g.det()) - 1.0), 0.0 if g.eps in (1, -1) else 1.0)
    return worst


def verify(s: LieGeneratedStructure, eps: float = DEFAULT_EPS,
           samples: int = DEFAULT_SAMPLES, seed: int = 0) -> VerificationReport:
    """Run every structural and numeric check; a check passes iff its
    residual is strictly below ``eps``."""
    points = sample_points(samples, seed)
    checks = []

    def num(name, residual, detail=""):
        checks.append(_ok(name, residual < eps, residual, detail))

    for x in s.intersections:
        num(f"reduction:{x.name}", _reduction_residual(x, points))
        num(f"minimality:{x.name}", _minimality_residual(x, points), MINIMALITY_NOTE)

    for eid, glue in s.glues:
        num(f"membership:{eid}/M", _membership_residual(glue.regions["M"]))
        num(f"flip:{eid}", flip_conjugacy_residual(glue))
        num(f"orientation:{eid}", abs(glue.torus_map.det() - REQUIRED_CLASS_DET))
        num(f"area:{eid}/left", abs(area(glue.lat_left) - 1.0))
        num(f"area:{eid}/right", abs(area(glue.lat_right) - 1.0))

    for vid, cid, cusp in s.cusps:
        r = action_residual(compose(cusp.g1, cusp.g2), compose(cusp.g2, cusp.g1), points)
        num(f"commutation:{vid}.{cid}", r)
    for att in s.attachments:
        num(f"area:{att.piece_id}.{att.cusp_id}/collar", abs(area(att.lattice) - 1.0))

    for vid, k in s.klein_ends:
        for name, ok, residual in klein_checks(k):
            checks.append(_ok(f"klein:{vid}:{name}", ok and residual < eps, residual))
        num(f"area:{vid}/klein", abs(area(k.lattice) - 1.0))

    binary = all(x.a != x.b for x in s.intersections)
    checks.append(_ok("structure:binary_intersections", binary, 0.0 if binary else 1.0))
    conn = _intersection_graph_connected(s)
    checks.append(_ok("structure:connected", conn, 0.0 if conn else 1.0))
    return _report(checks)


def inject_fault(s: LieGeneratedStructure, intersection: int, generator: int = 0,
                 delta: float = 1e-3) -> LieGeneratedStructure:
    """Copy of ``s`` with one reduction representative moved by ``delta`` in x."""
    x = s.intersections[intersection]
    ra, rb = x.reductions[generator]
    rb = compose(embed_translation((delta, 0.0), rb.tag), rb)
    reductions = list(x.reductions)
    reductions[generator] = (ra, rb)
    xs = list(s.intersections)
    xs[intersection] = replace(x, reductions=tuple(reductions))
    return replace(s, intersections=tuple(xs))

