"""Compound geometric structures on 3-manifolds assembled from pieces.

Pieces carry one of four transitive Lie group actions on the upper half
space; their cusps are joined through affine collars and Klein-bottle
ends, and the result is checked numerically wall by wall.
"""

from .assembly import build, validate, verify
from .group_actions import Tag, compose, embed_translation, group_dimension, inverse
from .model_space import EPoint, UPoint, hyp_distance

__version__ = "0.1.0"

__all__ = [
    "EPoint",
    "Tag",
    "UPoint",
    "build",
    "compose",
    "embed_translation",
    "group_dimension",
    "hyp_distance",
    "inverse",
    "validate",
    "verify",
]
