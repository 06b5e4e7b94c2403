import math

import pytest

from liegeom.assembly import (
    MINIMALITY_NOTE,
    EdgeData,
    GeometryGraph,
    PieceDecoration,
    build,
    expected_counts,
    inject_fault,
    moduli_dimension,
    moduli_parameters,
    validate,
    verify,
)
from liegeom.errors import AssemblyError
from liegeom.group_actions import MoebiusC, Tag
from liegeom.lattices import CuspSubgroup, Lattice2

from conftest import load_graph

FLIP = ((0, 1), (1, 0))
LONGITUDE = 2 * math.sqrt(3)


def fig8_cusp():
    return CuspSubgroup(MoebiusC.from_entries(1, 1, 0, 1), MoebiusC.from_entries(1, LONGITUDE * 1j, 0, 1))


def piece(vid, n_cusps=1):
    return PieceDecoration(vid, "elemental", Tag.H3, tuple((f"c{i}", fig8_cusp()) for i in range(n_cusps)))


def chain_graph(n):
    """``n`` two-cusped pieces in a cycle of edges (n >= 2)."""
    vs = tuple(piece(f"v{i}", 2) for i in range(n))
    es = tuple(EdgeData(f"e{i}", (f"v{i}", "c1"), (f"v{(i + 1) % n}", "c0"), FLIP, 0.1 * i, (0.0, 0.2))
               for i in range(n))
    return GeometryGraph(vs, es)


def test_validate_unmatched_cusp():
    report = validate(GeometryGraph((piece("v1"),)))
    assert not report.passed
    assert any("unmatched cusp" in c.detail for c in report.failures)


def test_validate_pass_and_orientation(double_graph):
    assert validate(double_graph).passed
    bad = load_graph("orientation_violation")
    failed = validate(bad).failures
    assert [c.name for c in failed] == ["edge:e0:orientation"]
    assert "orientation convention" in failed[0].detail


def test_validate_reports_without_raising():
    g = GeometryGraph((piece("v1"), piece("v1")), (EdgeData("e0", ("v1", "c0"), ("v9", "c0"), FLIP),))
    names = {c.name for c in validate(g).failures}
    assert "graph:unique_ids" in names and "edge:e0:endpoint:v9.c0" in names


def test_double_counts_and_path(double_graph, double_structure):
    s = double_structure
    assert (len(s.regions), len(s.intersections)) == (7, 6) == expected_counts(double_graph)
    degree = {r.id: 0 for r in s.regions}
    for x in s.intersections:
        assert x.a != x.b
        degree[x.a] += 1
        degree[x.b] += 1
    assert sorted(degree.values()) == [1, 1, 2, 2, 2, 2, 2]


def test_klein_structure(klein_graph):
    s = build(klein_graph)
    tags = [r.id for r in s.regions]
    assert tags == ["v1", "v1.c0/collar", "e0/L", "e0/M", "e0/R", "k1/klein"]
    assert (len(s.regions), len(s.intersections)) == expected_counts(klein_graph)
    report = verify(s)
    assert report.passed
    assert all(c.passed for c in report.checks if c.name.startswith("reduction:"))


def test_closed_piece_is_single_region():
    g = GeometryGraph((piece("v1", 0),))
    s = build(g)
    assert [r.id for r in s.regions] == ["v1"] and s.intersections == ()
    assert verify(s).passed
    assert moduli_dimension(g) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counts_follow_graph(n):
    g = chain_graph(n)
    s = build(g)
    assert (len(s.regions), len(s.intersections)) == expected_counts(g)
    # one independent cycle, as in the input graph
    assert len(s.intersections) - len(s.regions) + 1 == len(g.edges) - len(g.vertices) + 1
    assert moduli_dimension(g) == 3 * n
    assert verify(s).passed


def test_moduli_examples(double_graph):
    assert moduli_dimension(double_graph) == 3
    assert moduli_parameters(double_graph) == [("e0", 0.0, (0.0, 0.0))]


def test_moduli_additive():
    a, b = chain_graph(2), chain_graph(3)
    union = GeometryGraph(a.vertices, a.edges + b.edges)
    assert moduli_dimension(union) == moduli_dimension(a) + moduli_dimension(b)


def test_verify_passes_below_tolerance(double_structure):
    report = verify(double_structure)
    assert report.passed
    assert max(c.max_residual for c in report.checks) < 1e-9
    assert [c.name for c in report.checks] == sorted(c.name for c in report.checks)
    assert MINIMALITY_NOTE in double_structure.notes


def test_fault_injection(double_structure):
    for x in double_structure.intersections:
        for k in range(len(x.reductions)):
            report = verify(inject_fault(double_structure, x.index, k, 1e-3))
            c = report.get(f"reduction:{x.name}")
            assert not c.passed
            assert 1e-4 <= c.max_residual <= 1e-2
            others = [f for f in report.failures if not f.name.endswith(x.name)]
            assert others == []


def test_zero_tolerance_fails_numeric_checks(double_structure):
    report = verify(double_structure, eps=0.0)
    numeric = [c for c in report.checks if not c.name.startswith("structure:")]
    assert numeric and all(not c.passed for c in numeric)


def test_determinism(double_graph):
    assert verify(build(double_graph), seed=3) == verify(build(double_graph), seed=3)


def test_build_refuses_invalid_graph():
    with pytest.raises(AssemblyError):
        build(GeometryGraph((piece("v1"),)))
