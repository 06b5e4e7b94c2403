"""The four Lie groups acting on upper half space U.

===========  =====================================  ===========
tag          group                                   dimension
===========  =====================================  ===========
``H3``       PSL(2, C), Poincare extension           6
``AFF``      measure preserving affine maps [A]      6
``H2R``      PSL(2, R) x R                           4
``SL2T``     Z-cover of PSL(2, R) x SO(2)            4
===========  =====================================  ===========

For ``H2R`` and ``SL2T`` the hyperbolic plane factor is the ``(x, z)``
half-plane and the line (fibre) factor is ``y``, so horizontal translation
lattices are literally horizontal in U for all four groups.

Elements are immutable and kept in a canonical form, so equality of
elements can be decided field by field.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import ClassVar, Union

from .errors import ConstraintError, RangeError, TagError
from .model_space import EPoint, UPoint

DET_TOL = 1e-12
ELEMENT_TOL = 1e-12
TWO_PI = 2.0 * math.pi
_TINY = 1e-300
_NONZERO = 1e-12


class Tag(str, enum.Enum):
    H3 = "H3"
    AFF = "AFF"
    H2R = "H2R"
    SL2T = "SL2T"

    def __str__(self):
        return self.value


HYPERBOLIC_TAGS = (Tag.H3, Tag.H2R, Tag.SL2T)

_DIMENSIONS = {Tag.H3: 6, Tag.AFF: 6, Tag.H2R: 4, Tag.SL2T: 4}


def group_dimension(tag) -> int:
    return _DIMENSIONS[Tag(tag)]


# -- 2x2 helpers -------------------------------------------------------------


def _matmul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _canonical_sign_complex(m):
    for entry in m:
        if abs(entry) > _NONZERO:
            phase = cmath.phase(entry)
            if phase > math.pi / 2 or phase <= -math.pi / 2:
                return tuple(-e for e in m)
            return tuple(m)
    return tuple(m)


def _canonical_sign_real(m):
    for entry in m:
        if abs(entry) > _NONZERO:
            return tuple(-e for e in m) if entry < 0 else tuple(m)
    return tuple(m)


def _normalize_complex(m):
    a, b, c, d = (complex(e) for e in m)
    det = a * d - b * c
    if abs(det) < _TINY:
        raise ConstraintError("singular matrix cannot represent a Moebius map")
    if det != 1:
        r = cmath.sqrt(det)
        a, b, c, d = a / r, b / r, c / r, d / r
    return _canonical_sign_complex((a, b, c, d))


def _normalize_real(m, *, renormalize=True):
    a, b, c, d = (float(e) for e in m)
    det = a * d - b * c
    if renormalize:
        if det <= _TINY:
            raise ConstraintError(f"real matrix must have positive determinant, got {det}")
        if det != 1.0:
            r = math.sqrt(det)
            a, b, c, d = a / r, b / r, c / r, d / r
    return _canonical_sign_real((a, b, c, d))


def _mobius_half_plane(m, zeta):
    a, b, c, d = m
    den = c * zeta + d
    if abs(den) < _TINY:
        raise RangeError("Moebius denominator vanished")
    return (a * zeta + b) / den, den


def rotation_lift(m, zeta: complex) -> float:
    """Continuous lift of the derivative rotation of ``m`` at ``zeta``.

    Equals ``-2 arg(c zeta + d)`` with the principal ``arg``; since
    ``c zeta + d`` stays in one open half-plane when ``c != 0`` this branch
    is continuous on the whole upper half-plane, with values in
    ``(-2 pi, 2 pi)``. For ``c == 0`` the result is exactly 0.
    """
    c, d = m[2], m[3]
    if c == 0.0:
        return 0.0 if d > 0 else -TWO_PI
    return -2.0 * cmath.phase(c * zeta + d)


def _wrap_angle(theta: float) -> float:
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def angle_derivative(m, p) -> float:
    """Rotation angle of the derivative of the Moebius map of ``m`` at ``p``.

    ``m`` is a real 2x2 matrix given as ``(a, b, c, d)`` or nested rows;
    ``p`` is a half-plane point as a complex number or an ``(x, z)`` pair.
    The angle is measured against the unit vertical vector field and
    returned on the principal branch ``(-pi, pi]``.
    """
    m = _flat(m)
    zeta = p if isinstance(p, complex) else complex(p[0], p[1])
    if zeta.imag <= 0:
        raise ConstraintError("angle_derivative needs a point of the open half-plane")
    if m[2] == 0.0:
        return 0.0
    return _wrap_angle(-2.0 * cmath.phase(m[2] * zeta + m[3]))


def _flat(m):
    if len(m) == 2:
        (a, b), (c, d) = m
        return (a, b, c, d)
    return tuple(m)


# -- element types -----------------------------------------------------------


@dataclass(frozen=True)
class MoebiusC:
    """Element of PSL(2, C), normalized to det 1 with canonical sign."""

    a: complex
    b: complex
    c: complex
    d: complex
    tag: ClassVar[Tag] = Tag.H3

    @classmethod
    def from_entries(cls, a, b, c, d):
        return cls(*_normalize_complex((a, b, c, d)))

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def trace(self) -> complex:
        return self.a + self.d

    def act(self, p: UPoint) -> UPoint:
        a, b, c, d = self.entries
        w = complex(p.x, p.y)
        t = p.z
        cwd = c * w + d
        den = abs(cwd) ** 2 + abs(c) ** 2 * t * t
        if den < _TINY:
            raise RangeError("Poincare extension denominator vanished")
        num = (a * w + b) * cwd.conjugate() + a * c.conjugate() * t * t
        return UPoint(num.real / den, num.imag / den, t / den)


@dataclass(frozen=True)
class AffineA:
    """Affine map of U in the transferred group [A].

    Horizontally ``(x, y) -> L (x, y) + (b1, b2)``; vertically
    ``z -> exp(b3) z**eps``, i.e. ``u -> eps u + b3`` in the log coordinate.
    """

    l11: float
    l12: float
    l21: float
    l22: float
    eps: int
    b1: float
    b2: float
    b3: float
    tag: ClassVar[Tag] = Tag.AFF

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ConstraintError(f"eps must be +1 or -1, got {self.eps!r}")
        if abs(abs(self.det()) - 1.0) > 1e-9:
            raise ConstraintError(f"horizontal block must have |det| = 1, got {self.det()}")

    def det(self) -> float:
        return self.l11 * self.l22 - self.l12 * self.l21

    @property
    def linear(self):
        return (self.l11, self.l12, self.l21, self.l22)

    def act(self, p: UPoint) -> UPoint:
        x = self.l11 * p.x + self.l12 * p.y + self.b1
        y = self.l21 * p.x + self.l22 * p.y + self.b2
        u = self.eps * math.log(p.z) + self.b3
        try:
            z = math.exp(u)
        except OverflowError as exc:
            raise RangeError("affine action overflowed in z") from exc
        if z == 0.0:
            raise RangeError("affine action underflowed in z")
        return UPoint(x, y, z)

    def act_euclidean(self, q: EPoint) -> EPoint:
        return EPoint(
            self.l11 * q.x + self.l12 * q.y + self.b1,
            self.l21 * q.x + self.l22 * q.y + self.b2,
            self.eps * q.z + self.b3,
        )


@dataclass(frozen=True)
class IsomH2R:
    """``(m, s)`` in PSL(2, R) x R: ``m`` on the (x, z) half-plane, ``y -> y + s``."""

    m: tuple
    s: float
    tag: ClassVar[Tag] = Tag.H2R

    @classmethod
    def from_matrix(cls, m, s=0.0):
        return cls(_normalize_real(_flat(m)), float(s))

    def act(self, p: UPoint) -> UPoint:
        zeta, _ = _mobius_half_plane(self.m, complex(p.x, p.z))
        return UPoint(zeta.real, p.y + self.s, zeta.imag)


@dataclass(frozen=True)
class FiberedIsom:
    """Element of the Z-cover of PSL(2, R) x SO(2) acting on U.

    Stored as ``(m, k, theta)``; the canonical form has ``k = 0`` with the
    winding folded into ``theta``. The fibre coordinate ``y`` moves by
    ``theta + rotation_lift(m, x + i z) + 2 pi k``.
    """

    m: tuple
    k: int
    theta: float
    tag: ClassVar[Tag] = Tag.SL2T

    @classmethod
    def from_matrix(cls, m, theta=0.0, k=0):
        return cls(_normalize_real(_flat(m)), 0, float(theta) + TWO_PI * int(k))

    def act(self, p: UPoint) -> UPoint:
        base = complex(p.x, p.z)
        zeta, _ = _mobius_half_plane(self.m, base)
        shift = self.theta + rotation_lift(self.m, base) + TWO_PI * self.k
        return UPoint(zeta.real, p.y + shift, zeta.imag)


GroupElement = Union[MoebiusC, AffineA, IsomH2R, FiberedIsom]

_I2 = (1.0, 0.0, 0.0, 1.0)


def identity(tag) -> GroupElement:
    tag = Tag(tag)
    if tag is Tag.H3:
        return MoebiusC(1 + 0j, 0j, 0j, 1 + 0j)
    if tag is Tag.AFF:
        return AffineA(1.0, 0.0, 0.0, 1.0, 1, 0.0, 0.0, 0.0)
    if tag is Tag.H2R:
        return IsomH2R(_I2, 0.0)
    return FiberedIsom(_I2, 0, 0.0)


def act(g: GroupElement, p: UPoint) -> UPoint:
    return g.act(p)


def winding_cocycle(g1: FiberedIsom, g2: FiberedIsom) -> int:
    """Integer correction making ``compose`` match the composed action.

    ``rotation_lift`` is continuous in the point, so the defect
    ``lift(m1, m2 i) + lift(m2, i) - lift(m1 m2, i)`` is a multiple of
    ``2 pi`` independent of the base point.
    """
    m12 = _normalize_real(_matmul(g1.m, g2.m))
    m2i, _ = _mobius_half_plane(g2.m, 1j)
    defect = rotation_lift(g1.m, m2i) + rotation_lift(g2.m, 1j) - rotation_lift(m12, 1j)
    return round(defect / TWO_PI)


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """The element acting as ``a`` after ``b``."""
    if a.tag is not b.tag:
        raise TagError(f"cannot compose {a.tag} with {b.tag}; use a Word for mixed tags")
    if a.tag is Tag.H3:
        return MoebiusC(*_normalize_complex(_matmul(a.entries, b.entries)))
    if a.tag is Tag.AFF:
        l = _matmul(a.linear, b.linear)
        return AffineA(
            *l,
            a.eps * b.eps,
            a.l11 * b.b1 + a.l12 * b.b2 + a.b1,
            a.l21 * b.b1 + a.l22 * b.b2 + a.b2,
            a.eps * b.b3 + a.b3,
        )
    if a.tag is Tag.H2R:
        return IsomH2R(_normalize_real(_matmul(a.m, b.m)), a.s + b.s)
    m = _normalize_real(_matmul(a.m, b.m))
    theta = a.theta + b.theta + TWO_PI * (a.k + b.k + winding_cocycle(a, b))
    return FiberedIsom(m, 0, theta)


def _inverse_matrix(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def inverse(g: GroupElement) -> GroupElement:
    if g.tag is Tag.H3:
        return MoebiusC(*_canonical_sign_complex(_inverse_matrix(g.entries)))
    if g.tag is Tag.AFF:
        det = g.det()
        l11, l12, l21, l22 = g.l22 / det, -g.l12 / det, -g.l21 / det, g.l11 / det
        return AffineA(
            l11, l12, l21, l22,
            g.eps,
            -(l11 * g.b1 + l12 * g.b2),
            -(l21 * g.b1 + l22 * g.b2),
            -g.eps * g.b3,
        )
    if g.tag is Tag.H2R:
        return IsomH2R(_canonical_sign_real(_inverse_matrix(g.m)), -g.s)
    minv = _canonical_sign_real(_inverse_matrix(g.m))
    bare = FiberedIsom(minv, 0, 0.0)
    theta = -g.theta - TWO_PI * (g.k + winding_cocycle(g, bare))
    return FiberedIsom(minv, 0, theta)


# -- translations shared by all four groups ----------------------------------


def embed_translation(v, tag) -> GroupElement:
    """The element of ``tag`` acting as ``(x, y, z) -> (x + u, y + w, z)``."""
    u, w = float(v[0]), float(v[1])
    tag = Tag(tag)
    if tag is Tag.H3:
        return MoebiusC(1 + 0j, complex(u, w), 0j, 1 + 0j)
    if tag is Tag.AFF:
        return AffineA(1.0, 0.0, 0.0, 1.0, 1, u, w, 0.0)
    if tag is Tag.H2R:
        return IsomH2R((1.0, u, 0.0, 1.0), w)
    return FiberedIsom((1.0, u, 0.0, 1.0), 0, w)


def translation_vector(g: GroupElement, tol: float = 0.0):
    """Return ``(u, w)`` if ``g`` is a horizontal translation, else None.

    With ``tol == 0`` the test is exact, which is what word reduction needs;
    a positive ``tol`` accepts nearly-translational elements.
    """
    if g.tag is Tag.H3:
        if abs(g.c) <= tol and abs(g.a - 1) <= tol and abs(g.d - 1) <= tol:
            return (g.b.real, g.b.imag)
        return None
    if g.tag is Tag.AFF:
        if (
            g.eps == 1
            and abs(g.l11 - 1) <= tol
            and abs(g.l12) <= tol
            and abs(g.l21) <= tol
            and abs(g.l22 - 1) <= tol
            and abs(g.b3) <= tol
        ):
            return (g.b1, g.b2)
        return None
    a, b, c, d = g.m
    if abs(c) <= tol and abs(a - 1) <= tol and abs(d - 1) <= tol:
        fibre = g.s if g.tag is Tag.H2R else g.theta + TWO_PI * g.k
        return (b, fibre)
    return None


def is_identity(g: GroupElement, tol: float = ELEMENT_TOL) -> bool:
    v = translation_vector(g, tol)
    return v is not None and abs(v[0]) <= tol and abs(v[1]) <= tol


def fields(g: GroupElement) -> tuple:
    """Flat tuple of real parameters, used for field-wise comparison."""
    if g.tag is Tag.H3:
        return tuple(x for e in g.entries for x in (e.real, e.imag))
    if g.tag is Tag.AFF:
        return (*g.linear, float(g.eps), g.b1, g.b2, g.b3)
    if g.tag is Tag.H2R:
        return (*g.m, g.s)
    return (*g.m, float(g.k), g.theta)


def same_element(g: GroupElement, h: GroupElement, tol: float = ELEMENT_TOL) -> bool:
    if g.tag is not h.tag:
        return False
    return all(abs(x - y) <= tol for x, y in zip(fields(g), fields(h)))


# -- Euclidean affine maps and their transfer --------------------------------


@dataclass(frozen=True)
class EuclideanAffine:
    """Affine map of R^3 = R^2 x R: ``(v, u) -> (L v + (t1, t2), eps u + t3)``."""

    linear: tuple
    eps: int
    translation: tuple

    def apply(self, q: EPoint) -> EPoint:
        l11, l12, l21, l22 = self.linear
        t1, t2, t3 = self.translation
        return EPoint(l11 * q.x + l12 * q.y + t1, l21 * q.x + l22 * q.y + t2, self.eps * q.z + t3)

    def then(self, other: "EuclideanAffine") -> "EuclideanAffine":
        """``other`` after ``self``."""
        l11, l12, l21, l22 = other.linear
        t1, t2, t3 = self.translation
        o1, o2, o3 = other.translation
        return EuclideanAffine(
            _matmul(other.linear, self.linear),
            other.eps * self.eps,
            (l11 * t1 + l12 * t2 + o1, l21 * t1 + l22 * t2 + o2, other.eps * t3 + o3),
        )


def transfer_affine(f: EuclideanAffine) -> AffineA:
    """Conjugate a split, factorwise measure preserving affine map of R^3
    into U by ``exp`` on the third coordinate."""
    l11, l12, l21, l22 = (float(x) for x in _flat(f.linear))
    det = l11 * l22 - l12 * l21
    if abs(abs(det) - 1.0) > DET_TOL:
        raise ConstraintError(f"horizontal block must have |det| = 1, got {det}")
    if f.eps not in (1, -1):
        raise ConstraintError(f"vertical factor must be +1 or -1, got {f.eps!r}")
    t1, t2, t3 = (float(x) for x in f.translation)
    return AffineA(l11, l12, l21, l22, int(f.eps), t1, t2, t3)
