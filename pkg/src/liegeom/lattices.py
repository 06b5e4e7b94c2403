"""Horizontal translation lattices, cusp subgroups and their standard form."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstraintError, NotACuspError
from .group_actions import (
    GroupElement,
    IsomH2R,
    FiberedIsom,
    MoebiusC,
    Tag,
    compose,
    embed_translation,
    identity,
    inverse,
    is_identity,
    translation_vector,
)
from .sampling import action_residual

AREA_TOL = 1e-12
PARABOLIC_TOL = 1e-9
FIXED_POINT_TOL = 1e-9
COMMUTE_TOL = 1e-9
# a conjugated cusp generator must be this close to a pure translation
STANDARD_TOL = 1e-7


@dataclass(frozen=True)
class Lattice2:
    b1: tuple
    b2: tuple

    def __post_init__(self):
        object.__setattr__(self, "b1", (float(self.b1[0]), float(self.b1[1])))
        object.__setattr__(self, "b2", (float(self.b2[0]), float(self.b2[1])))
        if abs(self.cross()) <= AREA_TOL:
            raise ConstraintError(f"degenerate lattice basis {self.b1}, {self.b2}")

    def cross(self) -> float:
        return self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0]

    @property
    def basis(self):
        return (self.b1, self.b2)

    def matrix(self):
        """Basis vectors as columns, flattened ``(a, b, c, d)``."""
        return (self.b1[0], self.b2[0], self.b1[1], self.b2[1])

    def scaled(self, xs: float, ys: float | None = None) -> "Lattice2":
        ys = xs if ys is None else ys
        return Lattice2((self.b1[0] * xs, self.b1[1] * ys), (self.b2[0] * xs, self.b2[1] * ys))

    def coordinates(self, v):
        """Coordinates of ``v`` in this basis."""
        det = self.cross()
        return (
            (v[0] * self.b2[1] - v[1] * self.b2[0]) / det,
            (self.b1[0] * v[1] - self.b1[1] * v[0]) / det,
        )


def area(lat: Lattice2) -> float:
    return abs(lat.cross())


def same_lattice_residual(lat: Lattice2, vectors) -> float:
    """How far ``vectors`` are from being a basis of ``lat``.

    Zero when the coordinate matrix of ``vectors`` in ``lat``'s basis is an
    integer matrix of determinant +-1.
    """
    cols = [lat.coordinates(v) for v in vectors]
    if len(cols) < 2:
        return math.inf
    entries = [x for col in cols for x in col]
    residual = max(abs(x - round(x)) for x in entries)
    if len(cols) == 2:
        (p, r), (q, s) = cols
        det = round(p) * round(s) - round(q) * round(r)
        if abs(det) != 1:
            return max(residual, 1.0)
        return residual
    # more than two generators: the rounded coordinates must generate Z^2
    ints = [(round(c[0]), round(c[1])) for c in cols]
    g = 0
    for i in range(len(ints)):
        for j in range(i + 1, len(ints)):
            g = math.gcd(g, ints[i][0] * ints[j][1] - ints[i][1] * ints[j][0])
    return residual if g == 1 else max(residual, 1.0)


@dataclass(frozen=True)
class CuspSubgroup:
    g1: GroupElement
    g2: GroupElement

    @property
    def tag(self) -> Tag:
        return self.g1.tag

    @property
    def generators(self):
        return (self.g1, self.g2)

    def commutator_residual(self) -> float:
        return action_residual(compose(self.g1, self.g2), compose(self.g2, self.g1))


# -- standard form -----------------------------------------------------------


def _to_infinity_complex(p: complex) -> MoebiusC:
    return MoebiusC.from_entries(0j, -1 + 0j, 1 + 0j, -p)


def _fixed_point_complex(g: MoebiusC):
    """Boundary fixed point of a parabolic, or None for infinity."""
    if abs(g.c) <= 1e-12:
        return None
    return (g.a - g.d) / (2 * g.c)


def _fixed_point_real(m):
    a, b, c, d = m
    if abs(c) <= 1e-12:
        return None
    return (a - d) / (2 * c)


def _common(points, what):
    finite = [p for p in points if p is not None]
    if len(finite) not in (0, len(points)):
        raise NotACuspError(f"{what} do not share a fixed point")
    if not finite:
        return None
    p0 = finite[0]
    for p in finite[1:]:
        if abs(p - p0) > FIXED_POINT_TOL * (1.0 + abs(p0)):
            raise NotACuspError(f"{what} do not share a fixed point")
    return p0


def _conjugator_h3(gens):
    for g in gens:
        if is_identity(g, PARABOLIC_TOL):
            raise NotACuspError("cusp generator is trivial")
        if abs(abs(g.trace()) - 2.0) > PARABOLIC_TOL or abs(g.trace().imag) > PARABOLIC_TOL:
            raise NotACuspError(f"generator is not parabolic (trace {g.trace():.6g})")
    p = _common([_fixed_point_complex(g) for g in gens], "parabolic generators")
    return identity(Tag.H3) if p is None else _to_infinity_complex(p)


def _matrix_kind(m):
    """'identity', 'parabolic' or None for a real det-1 matrix."""
    a, b, c, d = m
    if max(abs(a - 1), abs(b), abs(c), abs(d - 1)) <= PARABOLIC_TOL:
        return "identity"
    if abs(abs(a + d) - 2.0) <= PARABOLIC_TOL:
        return "parabolic"
    return None


def _conjugator_fibered(gens, tag):
    kinds = [_matrix_kind(g.m) for g in gens]
    if None in kinds:
        raise NotACuspError("base isometry is neither parabolic nor trivial")
    if all(k == "identity" for k in kinds):
        raise NotACuspError("cusp lattice has no horocyclic direction")
    p = _common([_fixed_point_real(g.m) for g, k in zip(gens, kinds) if k == "parabolic"],
                "base parabolics")
    if p is None:
        return identity(tag)
    m = (0.0, -1.0, 1.0, -p)
    return IsomH2R(m, 0.0) if tag is Tag.H2R else FiberedIsom(m, 0, 0.0)


def _conjugator_affine(gens):
    for g in gens:
        if translation_vector(g, PARABOLIC_TOL) is None:
            raise NotACuspError("affine cusp generators must be horizontal translations")
    return identity(Tag.AFF)


def conjugate(h: GroupElement, g: GroupElement) -> GroupElement:
    """``h g h^-1``."""
    return compose(h, compose(g, inverse(h)))


def standard_form(cusp: CuspSubgroup):
    """Conjugate a cusp subgroup to horizontal translations fixing infinity.

    Returns ``(h, lattice)`` where ``h g_i h^-1`` acts as
    ``embed_translation(lattice.b_i)``.
    """
    g1, g2 = cusp.generators
    if g1.tag is not g2.tag:
        raise ConstraintError("cusp generators must share a tag")
    tag = g1.tag
    residual = cusp.commutator_residual()
    if residual >= COMMUTE_TOL:
        raise ConstraintError(f"cusp generators do not commute (residual {residual:.3g})")
    if tag is Tag.H3:
        h = _conjugator_h3(cusp.generators)
    elif tag is Tag.AFF:
        h = _conjugator_affine(cusp.generators)
    else:
        h = _conjugator_fibered(cusp.generators, tag)
    vectors = []
    for g in cusp.generators:
        v = translation_vector(conjugate(h, g), STANDARD_TOL)
        if v is None:
            raise NotACuspError("generator is not conjugate to a horizontal translation")
        vectors.append(v)
    try:
        lat = Lattice2(*vectors)
    except ConstraintError as exc:
        raise NotACuspError(f"cusp translations are not a rank 2 lattice: {exc}") from exc
    return h, lat


# -- normalization and shape -------------------------------------------------


def normalize(lat: Lattice2, tag):
    """Choose the cross-section height that makes the cusp torus unit area.

    H3: the horosphere at Euclidean height ``h`` sees lengths scaled by
    ``1/h`` in both directions, so ``h = sqrt(area)``. H2R and SL2T: only
    the horocyclic (x) direction is scaled while the fibre (y) length is
    fixed, so ``h = area``. AFF: a pure rescale with ``h = 1``.
    """
    a = area(lat)
    tag = Tag(tag)
    if tag is Tag.H3:
        h = math.sqrt(a)
        return h, lat.scaled(1.0 / h)
    if tag is Tag.AFF:
        return 1.0, lat.scaled(1.0 / math.sqrt(a))
    return a, lat.scaled(1.0 / a, 1.0)


def height_conjugator(height: float, tag) -> GroupElement:
    """Group element moving the cross-section at ``height`` to height 1."""
    tag = Tag(tag)
    r = 1.0 / math.sqrt(height)
    if tag is Tag.H3:
        return MoebiusC(complex(r), 0j, 0j, complex(1.0 / r))
    if tag is Tag.H2R:
        return IsomH2R((r, 0.0, 0.0, 1.0 / r), 0.0)
    if tag is Tag.SL2T:
        return FiberedIsom((r, 0.0, 0.0, 1.0 / r), 0, 0.0)
    return identity(tag)


_SNAP = 1e-12


def reduce_modulus(tau: complex) -> complex:
    """Move ``tau`` into ``|tau| >= 1, -1/2 <= Re tau < 1/2``.

    On the unit circle the representative with ``Re tau <= 0`` is taken.
    """
    if tau.imag <= 0:
        raise ConstraintError("modulus needs Im tau > 0")
    for _ in range(10_000):
        tau = complex(tau.real - math.floor(tau.real + 0.5), tau.imag)
        if tau.real >= 0.5 - _SNAP:
            tau -= 1
        if abs(tau) < 1.0 - _SNAP:
            tau = -1 / tau
            continue
        break
    if abs(abs(tau) - 1.0) <= _SNAP and tau.real > 0:
        tau = complex(-tau.real, tau.imag)
    if abs(tau.real + 0.5) <= _SNAP:
        tau = complex(-0.5, tau.imag)
    return tau


def modulus(lat: Lattice2) -> complex:
    w1 = complex(*lat.b1)
    w2 = complex(*lat.b2)
    tau = w2 / w1
    if tau.imag < 0:
        tau = -tau
    return reduce_modulus(tau)


def lattice_from_elements(elements, tol: float = STANDARD_TOL):
    """Translation vectors of ``elements``; None if any is not a translation."""
    out = []
    for g in elements:
        v = translation_vector(g, tol)
        if v is None:
            return None
        out.append(v)
    return out

