import math

import numpy as np
import pytest

from liegeom.errors import ConstraintError, NotACuspError
from liegeom.group_actions import (
    FiberedIsom,
    MoebiusC,
    Tag,
    angle_derivative,
    embed_translation,
    identity,
    inverse,
    same_element,
)
from liegeom.lattices import (
    CuspSubgroup,
    Lattice2,
    area,
    conjugate,
    modulus,
    normalize,
    standard_form,
)
from liegeom.sampling import action_residual, random_element, sample_points


def test_area_examples(rng):
    assert area(Lattice2((1, 0), (0, 1))) == 1.0
    assert area(Lattice2((2, 0), (0, 2))) == 4.0
    for _ in range(20):
        x, y = rng.normal(0, 3, 2)
        assert area(Lattice2((1, 0), (x, y))) == pytest.approx(abs(y), rel=1e-15)
    with pytest.raises(ConstraintError):
        Lattice2((1, 2), (2, 4))


def test_standard_form_already_standard():
    tau = 0.5 + 1.2j
    cusp = CuspSubgroup(MoebiusC.from_entries(1, 1, 0, 1), MoebiusC.from_entries(1, tau, 0, 1))
    h, lat = standard_form(cusp)
    assert same_element(h, identity(Tag.H3))
    assert lat.b1 == pytest.approx((1, 0)) and lat.b2 == pytest.approx((0.5, 1.2))


def test_standard_form_fixing_zero():
    g1 = MoebiusC.from_entries(1, 0, 1, 1)
    g2 = MoebiusC.from_entries(1, 0, 1j, 1)
    h, lat = standard_form(CuspSubgroup(g1, g2))
    # matrix-conjugation oracle: [[0,-1],[1,0]] [[1,0],[1,1]] [[0,1],[-1,0]] = [[1,-1],[0,1]]
    assert same_element(h, MoebiusC.from_entries(0, -1, 1, 0))
    assert same_element(conjugate(h, g1), MoebiusC.from_entries(1, -1, 0, 1))
    assert lat.b1 == pytest.approx((-1, 0), abs=1e-15)


def test_standard_form_affine_translations():
    cusp = CuspSubgroup(embed_translation((1, 0), Tag.AFF), embed_translation((0, 1), Tag.AFF))
    h, lat = standard_form(cusp)
    assert same_element(h, identity(Tag.AFF))
    assert lat.basis == ((1.0, 0.0), (0.0, 1.0))


def test_standard_form_errors():
    a = MoebiusC.from_entries(1, 1, 0, 1)
    b = MoebiusC.from_entries(1, 0, 1, 1)
    with pytest.raises(ConstraintError):
        standard_form(CuspSubgroup(a, b))
    hyperbolic = MoebiusC.from_entries(2, 0, 0, 0.5)
    with pytest.raises(NotACuspError):
        standard_form(CuspSubgroup(hyperbolic, hyperbolic))


def _random_lattice(rng):
    while True:
        b = rng.normal(0, 1.2, 4)
        if abs(b[0] * b[3] - b[1] * b[2]) > 0.3:
            return Lattice2((b[0], b[1]), (b[2], b[3]))


@pytest.mark.parametrize("tag", list(Tag))
def test_standard_form_recovers_conjugated_cusps(tag):
    rng = np.random.default_rng(100 + list(Tag).index(tag))
    pts = sample_points(100, seed=0)
    for _ in range(50):
        lat = _random_lattice(rng)
        k = random_element(tag, rng, scale=0.5)
        gens = [conjugate(inverse(k), embed_translation(v, tag)) for v in lat.basis]
        h, found = standard_form(CuspSubgroup(*gens))
        for g, v in zip(gens, found.basis):
            assert action_residual(conjugate(h, g), embed_translation(v, tag), pts) < 1e-9
        if tag is Tag.H3:
            # conjugators fixing infinity are similarities, so the shape survives
            assert abs(modulus(found) - modulus(lat)) < 1e-6


def test_sl2t_parabolic_angle_is_exactly_zero():
    g = FiberedIsom.from_matrix(((1, 0.8), (0, 1)), theta=0.3)
    for p in sample_points(20, seed=1):
        assert angle_derivative(g.m, complex(p.x, p.z)) == 0.0


def test_normalize_examples():
    h, lat = normalize(Lattice2((1, 0), (0, 1)), Tag.H3)
    assert h == 1.0 and lat.basis == ((1.0, 0.0), (0.0, 1.0))
    h, lat = normalize(Lattice2((1, 0), (0, 2)), Tag.H3)
    assert h == pytest.approx(math.sqrt(2))
    assert lat.b1 == pytest.approx((1 / math.sqrt(2), 0)) and lat.b2 == pytest.approx((0, math.sqrt(2)))


@pytest.mark.parametrize("tag", list(Tag))
def test_normalize_unit_area_and_idempotent(tag, rng):
    for _ in range(20):
        _, lat = normalize(_random_lattice(rng), tag)
        assert area(lat) == pytest.approx(1.0, abs=1e-12)
        h2, lat2 = normalize(lat, tag)
        assert h2 == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(lat2.basis, lat.basis, atol=1e-12)


def test_modulus_examples():
    assert modulus(Lattice2((1, 0), (0, 1))) == pytest.approx(1j)
    assert modulus(Lattice2((1, 0), (1, 1))) == pytest.approx(1j)
    for r in (1.0, 1.5, 3.0, 10.0):
        assert modulus(Lattice2((1, 0), (0, r))) == pytest.approx(r * 1j)


def _random_gl2z(rng):
    m = np.eye(2, dtype=int)
    gens = [np.array([[1, 1], [0, 1]]), np.array([[1, -1], [0, 1]]), np.array([[0, -1], [1, 0]]),
            np.array([[1, 0], [0, -1]])]
    for _ in range(rng.integers(1, 8)):
        m = m @ gens[rng.integers(0, 4)]
    return m


def test_modulus_invariant_under_basis_change(rng):
    for _ in range(100):
        lat = _random_lattice(rng)
        m = _random_gl2z(rng)
        b = np.array(lat.basis).T @ m
        other = Lattice2(tuple(b[:, 0]), tuple(b[:, 1]))
        tau, tau2 = modulus(lat), modulus(other)
        assert abs(tau - tau2) < 1e-9
        assert -0.5 <= tau.real < 0.5 and abs(tau) >= 1 - 1e-12
