"""Deterministic sample sets and random elements for residual checks."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .group_actions import (
    AffineA,
    FiberedIsom,
    GroupElement,
    IsomH2R,
    MoebiusC,
    Tag,
    _normalize_complex,
    _normalize_real,
)
from .model_space import SAMPLE_BOX, UPoint

DEFAULT_SAMPLES = 100


def sample_points(n: int = DEFAULT_SAMPLES, seed: int = 0) -> tuple[UPoint, ...]:
    """``n`` points drawn uniformly from the standard sampling box."""
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1), (z0, z1) = SAMPLE_BOX
    xs = rng.uniform(x0, x1, n)
    ys = rng.uniform(y0, y1, n)
    zs = rng.uniform(z0, z1, n)
    return tuple(UPoint(float(x), float(y), float(z)) for x, y, z in zip(xs, ys, zs))


@lru_cache(maxsize=None)
def standard_samples() -> tuple[UPoint, ...]:
    """The fixed 100-point set used for action equality."""
    return sample_points(DEFAULT_SAMPLES, 0)


def action_residual(g, h, points=None) -> float:
    """Max coordinate difference between the actions of ``g`` and ``h``.

    ``g`` and ``h`` may be group elements or anything with an ``act``-like
    callable interface (see ``developing.Word``).
    """
    points = standard_samples() if points is None else points
    worst = 0.0
    for p in points:
        q1, q2 = g.act(p), h.act(p)
        worst = max(worst, abs(q1.x - q2.x), abs(q1.y - q2.y), abs(q1.z - q2.z))
    return worst


def _real_sl2(rng, scale):
    while True:
        a, b, c, d = rng.normal(0.0, scale, 4)
        if a * d - b * c > 0.2:
            return _normalize_real((a, b, c, d))


def random_element(tag, rng: np.random.Generator, scale: float = 0.7) -> GroupElement:
    """A moderately conditioned random element of the given group."""
    tag = Tag(tag)
    if tag is Tag.H3:
        while True:
            re = rng.normal(0.0, scale, 4)
            im = rng.normal(0.0, scale, 4)
            entries = [complex(r, i) for r, i in zip(re, im)]
            a, b, c, d = entries
            if abs(a * d - b * c) > 0.2:
                return MoebiusC(*_normalize_complex(entries))
    if tag is Tag.AFF:
        while True:
            l = rng.normal(0.0, 1.0, 4)
            det = l[0] * l[3] - l[1] * l[2]
            if abs(det) > 0.2:
                break
        r = math.sqrt(abs(det))
        eps = 1 if rng.random() < 0.5 else -1
        b = rng.normal(0.0, 1.0, 3)
        return AffineA(*(float(x / r) for x in l), eps, *(float(x) for x in b))
    if tag is Tag.H2R:
        return IsomH2R(_real_sl2(rng, scale), float(rng.normal(0.0, 2.0)))
    return FiberedIsom(_real_sl2(rng, scale), 0, float(rng.uniform(-math.pi, math.pi) * 2))


def random_near_identity(tag, rng: np.random.Generator, spread: float = 0.25) -> GroupElement:
    """A random element within roughly ``spread`` of the identity.

    Products of a handful of these keep the sampling box at moderate
    magnitudes, so composed and letter-by-letter evaluation can be compared
    at absolute tolerances near machine precision.
    """
    tag = Tag(tag)
    if tag is Tag.H3:
        n = rng.normal(0.0, spread, (2, 4))
        e = [complex(1 + n[0][0], n[1][0]), complex(n[0][1], n[1][1]),
             complex(n[0][2], n[1][2]), complex(1 + n[0][3], n[1][3])]
        return MoebiusC(*_normalize_complex(e))
    if tag is Tag.AFF:
        l = np.eye(2).ravel() + rng.normal(0.0, spread, 4)
        r = math.sqrt(abs(l[0] * l[3] - l[1] * l[2]))
        b = rng.normal(0.0, spread, 3)
        return AffineA(*(float(x / r) for x in l), 1, *(float(x) for x in b))
    m = np.eye(2).ravel() + rng.normal(0.0, spread, 4)
    m = _normalize_real(tuple(float(x) for x in m))
    if tag is Tag.H2R:
        return IsomH2R(m, float(rng.normal(0.0, spread)))
    return FiberedIsom(m, 0, float(rng.normal(0.0, spread)))
