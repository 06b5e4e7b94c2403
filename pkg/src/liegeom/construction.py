"""Local building blocks: cusp cylinder attachment, the affine gluing
cylinder between two flat tori, and the Klein bottle end.

Everything here is combinatorial bookkeeping plus the group data on each
region; no meshes or fundamental domains are produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ConstraintError,
    InvalidInvolutionError,
    NotInvertibleOverZError,
    OrientationError,
)
from .group_actions import (
    AffineA,
    GroupElement,
    Tag,
    compose,
    embed_translation,
    translation_vector,
)
from .lattices import (
    CuspSubgroup,
    Lattice2,
    area,
    conjugate,
    height_conjugator,
    normalize,
    same_lattice_residual,
    standard_form,
)

UNIT_AREA_TOL = 1e-12
MAP_TOL = 1e-9

#: The orientation convention for edge classes. The collar identification
#: (v, u) -> (A v, 2 slide - u) reverses u, so A must reverse the torus for
#: the glued manifold to stay oriented.
REQUIRED_CLASS_DET = -1

DEFAULT_SIGMA = ((1, 0), (0, -1))
DEFAULT_SHIFT = (0.5, 0.0)


def _det2(m) -> float:
    (a, b), (c, d) = m
    return a * d - b * c


def _mat_vec(m, v):
    (a, b), (c, d) = m
    return (a * v[0] + b * v[1], c * v[0] + d * v[1])


def _mat_mul(m, n):
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _basis_matrix(lat: Lattice2):
    return ((lat.b1[0], lat.b2[0]), (lat.b1[1], lat.b2[1]))


def _inv2(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def _integer_matrix(m, what):
    try:
        rows = tuple(tuple(int(x) for x in row) for row in m)
    except (TypeError, ValueError) as exc:
        raise ConstraintError(f"{what} must be a 2x2 integer matrix") from exc
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ConstraintError(f"{what} must be a 2x2 integer matrix")
    if any(x != y for row, orig in zip(rows, m) for x, y in zip(row, orig)):
        raise ConstraintError(f"{what} must have integer entries")
    return rows


def _check_unit_area(lat: Lattice2, name):
    if abs(area(lat) - 1.0) > UNIT_AREA_TOL:
        raise ConstraintError(f"{name} must have unit area, got {area(lat)!r}")


# -- Step one: cylinder attachment ---------------------------------------------


@dataclass(frozen=True)
class EndAttachment:
    """Pushout data replacing a cusp by a half-infinite flat cylinder.

    ``conjugator`` maps the piece's chart to the flat chart in which the
    cusp group is the translation lattice ``lattice`` (unit area). The
    region of the piece and the flat ``T x R`` region overlap in a double
    collar of ``T`` whose structure group is that lattice.
    """

    piece_id: str
    cusp_id: str
    tag: Tag
    conjugator: GroupElement
    lattice: Lattice2
    height: float
    collar_halfwidth: float

    def lattice_translations(self, tag=None):
        tag = self.tag if tag is None else tag
        return tuple(embed_translation(v, tag) for v in self.lattice.basis)


def attach_cylinder(cusp: CuspSubgroup, collar_halfwidth: float = 1.0,
                    piece_id: str = "", cusp_id: str = "") -> EndAttachment:
    if not collar_halfwidth > 0:
        raise ConstraintError(f"collar_halfwidth must be positive, got {collar_halfwidth!r}")
    h, lat = standard_form(cusp)
    height, lat_norm = normalize(lat, cusp.tag)
    conj = compose(height_conjugator(height, cusp.tag), h)
    return EndAttachment(piece_id, cusp_id, cusp.tag, conj, lat_norm, height, float(collar_halfwidth))


# -- Step two: affine cylinder -------------------------------------------------


@dataclass(frozen=True)
class TorusMap:
    """Affine map ``v -> linear v + offset`` of the plane covering a torus map."""

    linear: tuple
    offset: tuple = (0.0, 0.0)

    def det(self) -> float:
        return _det2(self.linear)

    def __call__(self, v):
        x, y = _mat_vec(self.linear, v)
        return (x + self.offset[0], y + self.offset[1])


def gluing_representative(lat1: Lattice2, lat2: Lattice2, gluing_class,
                          offset=(0.0, 0.0)) -> TorusMap:
    """Area preserving affine map from torus 1 to torus 2 in a given class.

    ``gluing_class`` is the action on first homology in the two lattice
    bases, so the linear part is ``B2 class B1^-1``.
    """
    cls = _integer_matrix(gluing_class, "gluing class")
    if abs(_det2(cls)) != 1:
        raise NotInvertibleOverZError(f"gluing class {cls} is not invertible over Z")
    _check_unit_area(lat1, "first lattice")
    _check_unit_area(lat2, "second lattice")
    linear = _mat_mul(_mat_mul(_basis_matrix(lat2), cls), _inv2(_basis_matrix(lat1)))
    return TorusMap(linear, (float(offset[0]), float(offset[1])))


def flip_element(torus_map: TorusMap, slide: float = 0.0) -> AffineA:
    """``A x reflection``: ``(v, u) -> (A v + offset, 2 slide - u)``."""
    (l11, l12), (l21, l22) = torus_map.linear
    return AffineA(l11, l12, l21, l22, -1, torus_map.offset[0], torus_map.offset[1], 2.0 * slide)


@dataclass(frozen=True)
class AffineCylinderGlue:
    """Three-region affine cylinder joining two flat tori.

    All generator lists are written in the left chart. In the assembled
    structure the right region uses its own chart, reached through ``flip``.
    """

    lat_left: Lattice2
    lat_right: Lattice2
    gluing_class: tuple
    torus_map: TorusMap
    slide: float
    flip: AffineA
    regions: dict

    @property
    def left_translations(self):
        return tuple(embed_translation(v, Tag.AFF) for v in self.lat_left.basis)

    @property
    def right_translations(self):
        return tuple(embed_translation(v, Tag.AFF) for v in self.lat_right.basis)


def build_affine_cylinder(lat1: Lattice2, lat2: Lattice2, gluing_class,
                          slide: float = 0.0, offset=(0.0, 0.0)) -> AffineCylinderGlue:
    cls = _integer_matrix(gluing_class, "gluing class")
    if _det2(cls) != REQUIRED_CLASS_DET:
        raise OrientationError(
            f"gluing class {cls} has det {_det2(cls)}; the orientation convention "
            f"requires det = {REQUIRED_CLASS_DET} because the collar gluing reflects "
            "the cylinder coordinate"
        )
    amap = gluing_representative(lat1, lat2, cls, offset)
    flip = flip_element(amap, slide)
    left = tuple(embed_translation(v, Tag.AFF) for v in lat1.basis)
    right = tuple(embed_translation(w, Tag.AFF) for w in lat2.basis)
    # lattice 2 seen from the left chart, i.e. F^-1 T_w F
    right_in_left = tuple(embed_translation(_solve(amap.linear, w), Tag.AFF) for w in lat2.basis)
    regions = {
        "L": left,
        "M": left + right + (flip,),
        "R": right_in_left,
    }
    return AffineCylinderGlue(lat1, lat2, cls, amap, float(slide), flip, regions)


def _solve(m, w):
    return _mat_vec(_inv2(m), w)


def flip_conjugacy_residual(glue: AffineCylinderGlue) -> float:
    """Max residual of ``F T_v F^-1 = T_{A v}`` over the left basis."""
    worst = 0.0
    for v in glue.lat_left.basis:
        moved = conjugate(glue.flip, embed_translation(v, Tag.AFF))
        w = translation_vector(moved, math.inf)
        target = _mat_vec(glue.torus_map.linear, v)
        fields = (moved.l11 - 1, moved.l12, moved.l21, moved.l22 - 1, moved.b3,
                  w[0] - target[0], w[1] - target[1])
        worst = max(worst, *(abs(x) for x in fields))
    return worst


# -- Step three: Klein bottle end -----------------------------------------------


@dataclass(frozen=True)
class KleinEnd:
    lattice: Lattice2
    sigma: tuple
    shift: tuple
    involution: AffineA
    sigma_lattice: tuple  # sigma in lattice coordinates, integer


def _sigma_in_lattice(lat: Lattice2, sigma):
    b = _basis_matrix(lat)
    m = _mat_mul(_mat_mul(_inv2(b), sigma), b)
    rounded = tuple(tuple(round(x) for x in row) for row in m)
    err = max(abs(x - y) for row, rrow in zip(m, rounded) for x, y in zip(row, rrow))
    return rounded, err


def _exact(x) -> Fraction:
    return Fraction(x).limit_denominator(10**9) if isinstance(x, float) else Fraction(x)


def fixed_point_congruence_solvable(m, s) -> bool:
    """Whether ``m v = -s (mod Z^2)`` has a real solution ``v``.

    ``m`` is an integer matrix, ``s`` a rational vector. The image ``m R^2``
    is a subspace; the congruence is solvable iff ``-s`` lies in
    ``m R^2 + Z^2``.
    """
    (a, b), (c, d) = m
    s = tuple(_exact(x) for x in s)
    if a * d - b * c != 0:
        return True
    if a == b == c == d == 0:
        return all(x.denominator == 1 for x in s)
    # rank one: image spanned by an integer column; test the primitive normal
    col = (a, c) if (a, c) != (0, 0) else (b, d)
    g = math.gcd(col[0], col[1])
    normal = (-col[1] // g, col[0] // g)
    return (normal[0] * s[0] + normal[1] * s[1]).denominator == 1


def klein_end(lat: Lattice2, sigma=DEFAULT_SIGMA, shift=DEFAULT_SHIFT) -> KleinEnd:
    """Fixed point free involution ``(v, u) -> (sigma v + B shift, -u)``.

    ``sigma`` acts on horizontal Euclidean coordinates; ``shift`` is given
    in lattice coordinates.
    """
    sig = _integer_matrix(sigma, "sigma")
    if _det2(sig) != -1:
        raise InvalidInvolutionError("det(sigma) = -1", f"det is {_det2(sig)}")
    if _mat_mul(sig, sig) != ((1, 0), (0, 1)):
        raise InvalidInvolutionError("sigma^2 = I")
    s_lat, err = _sigma_in_lattice(lat, sig)
    if err > MAP_TOL:
        raise InvalidInvolutionError("sigma preserves the lattice", f"residual {err:.3g}")
    shift = (float(shift[0]), float(shift[1]))
    exact_shift = tuple(_exact(x) for x in shift)
    # iota^2 translates by (S + I) shift in lattice coordinates
    square = _mat_vec(((s_lat[0][0] + 1, s_lat[0][1]), (s_lat[1][0], s_lat[1][1] + 1)), exact_shift)
    if any(x.denominator != 1 for x in square):
        raise InvalidInvolutionError("iota^2 is a lattice translation", f"(S+I)shift = {square}")
    minus_id = ((s_lat[0][0] - 1, s_lat[0][1]), (s_lat[1][0], s_lat[1][1] - 1))
    if fixed_point_congruence_solvable(minus_id, exact_shift):
        raise InvalidInvolutionError("fixed point freeness", "the congruence (S - I) v = -shift has a solution")
    offset = (shift[0] * lat.b1[0] + shift[1] * lat.b2[0], shift[0] * lat.b1[1] + shift[1] * lat.b2[1])
    (l11, l12), (l21, l22) = sig
    iota = AffineA(float(l11), float(l12), float(l21), float(l22), -1, offset[0], offset[1], 0.0)
    if orientation_sign(iota) != 1:
        raise InvalidInvolutionError("3D orientation +1")
    return KleinEnd(lat, sig, shift, iota, s_lat)


def orientation_sign(g: AffineA) -> int:
    """Sign of the Jacobian determinant in Euclidean coordinates."""
    return 1 if g.det() * g.eps > 0 else -1


def klein_checks(k: KleinEnd):
    """Exact and numeric checks of a Klein end as ``(name, ok, residual)``."""
    out = []
    square = compose(k.involution, k.involution)
    v = translation_vector(square, 1e-12)
    if v is None:
        out.append(("square_is_translation", False, 1.0))
    else:
        out.append(("square_is_translation", True, same_lattice_residual(k.lattice, [v, k.lattice.b1, k.lattice.b2])))
    minus_id = ((k.sigma_lattice[0][0] - 1, k.sigma_lattice[0][1]),
                (k.sigma_lattice[1][0], k.sigma_lattice[1][1] - 1))
    free = not fixed_point_congruence_solvable(minus_id, k.shift)
    out.append(("fixed_point_free", free, 0.0 if free else 1.0))
    o3 = orientation_sign(k.involution)
    out.append(("orientation_3d", o3 == 1, 0.0 if o3 == 1 else 1.0))
    o2 = _det2(k.sigma)
    out.append(("orientation_torus", o2 == -1, 0.0 if o2 == -1 else 1.0))
    return out
