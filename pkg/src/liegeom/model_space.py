"""Points of Euclidean 3-space and of upper half space, and the exp/log
identification between them.

Upper half space is ``U = {(x, y, z) : z > 0}``. Euclidean coordinates
``(x, y, u)`` map to ``(x, y, exp(u))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RangeError

#: Global tolerance for point equality in model coordinates.
POINT_TOL = 1e-9

#: Standard sampling box used by every residual check.
SAMPLE_BOX = ((-5.0, 5.0), (-5.0, 5.0), (0.1, 10.0))


@dataclass(frozen=True)
class UPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError(f"point outside upper half space: z = {self.z!r}")

    def as_tuple(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class EPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise DomainError("Euclidean point must have finite coordinates")

    def as_tuple(self):
        return (self.x, self.y, self.z)


def to_upper_half(p: EPoint) -> UPoint:
    try:
        z = math.exp(p.z)
    except OverflowError as exc:
        raise RangeError(f"exp({p.z}) overflows") from exc
    if z == 0.0:
        raise RangeError(f"exp({p.z}) underflows to zero")
    return UPoint(p.x, p.y, z)


def to_euclidean(p: UPoint) -> EPoint:
    if not p.z > 0:
        raise DomainError(f"log undefined for z = {p.z!r}")
    return EPoint(p.x, p.y, math.log(p.z))


def hyp_distance(p: UPoint, q: UPoint) -> float:
    """Distance for the curvature -1 metric ``ds = |dX| / z`` on U.

    Uses ``d = 2 asinh(|p - q| / (2 sqrt(z_p z_q)))``, which is the usual
    ``arccosh(1 + |p-q|^2 / (2 z_p z_q))`` rewritten to stay accurate for
    nearby points.
    """
    dx = p.x - q.x
    dy = p.y - q.y
    dz = p.z - q.z
    chord = math.sqrt(dx * dx + dy * dy + dz * dz)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.z * q.z)))


def point_residual(p: UPoint, q: UPoint) -> float:
    """Largest coordinate difference between two points."""
    return max(abs(p.x - q.x), abs(p.y - q.y), abs(p.z - q.z))
