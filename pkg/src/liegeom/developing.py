"""Germs of charts, continuation across walls, holonomy words.

A germ over a region is ``frame o phi_r`` where ``phi_r`` is the region's
base chart and ``frame`` is a word in the group generated by all four
actions. Crossing the wall between regions ``a`` and ``b`` (with
``phi_b = tau o phi_a``) through the sheet selected by reduction element
``t`` appends ``tau^-1 t`` (a to b) or ``t tau`` (b to a) on the right of
the frame. Continuation therefore commutes with post-composition of the
frame, which is how the structure group acts on the fibres of germs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import PathError, ReductionIndexError
from .group_actions import (
    GroupElement,
    Tag,
    compose,
    embed_translation,
    inverse,
    is_identity,
    translation_vector,
)
from .model_space import UPoint

#: Letters closer than this to the identity are dropped by ``reduce_word``.
IDENTITY_TOL = 1e-13
CANONICAL_TRANSLATION_TAG = Tag.AFF


@dataclass(frozen=True)
class Word:
    """Free word in the generated group; evaluates right to left."""

    letters: tuple = ()

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + tuple(other.letters))

    def act(self, p: UPoint) -> UPoint:
        return evaluate_word(self, p)

    def inverse(self) -> "Word":
        return Word(tuple(inverse(g) for g in reversed(self.letters)))


@dataclass(frozen=True)
class Germ:
    region: str
    frame: Word = Word()


@dataclass(frozen=True)
class PathStep:
    """Cross ``intersection``; ``reduction`` picks the sheet.

    ``reduction`` is either a tuple of ``(index, sign)`` pairs naming stored
    reduction generators (multiplied left to right), an explicit group
    element, or empty for the identity.
    """

    intersection: int
    reduction: object = ()


@dataclass(frozen=True)
class PathSpec:
    steps: tuple = ()

    def inverse(self, s, start: str) -> "PathSpec":
        """The reversed path, returning to ``start``."""
        regions = [start]
        for step in self.steps:
            x = s.intersection(step.intersection)
            nxt = x.other(regions[-1])
            if nxt is None:
                raise PathError(f"step w{step.intersection} is not adjacent to {regions[-1]}")
            regions.append(nxt)
        steps = []
        for step in reversed(self.steps):
            red = step.reduction
            if isinstance(red, tuple):
                red = tuple((i, -sgn) for i, sgn in reversed(red))
            else:
                red = inverse(red)
            steps.append(PathStep(step.intersection, red))
        return PathSpec(tuple(steps))

    def __add__(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.steps + other.steps)


def _reduction_element(x, reduction, tag) -> GroupElement | None:
    if isinstance(reduction, tuple):
        t = None
        for index, sign in reduction:
            if not 0 <= index < len(x.reductions):
                raise ReductionIndexError(
                    f"reduction t{index} out of range for {x.name} ({len(x.reductions)} generators)"
                )
            g = x.reductions[index][0]
            g = g if sign > 0 else inverse(g)
            t = g if t is None else compose(t, g)
        return t
    if reduction.tag is not tag:
        v = translation_vector(reduction, 1e-12)
        if v is None:
            raise PathError(f"explicit reduction must lie in {tag}")
        reduction = embed_translation(v, tag)
    return reduction


def crossing_letters(s, region: str, step: PathStep):
    """Region reached and letters appended when ``step`` is taken from ``region``."""
    try:
        x = s.intersection(step.intersection)
    except KeyError:
        raise PathError(f"no wall w{step.intersection}") from None
    target = x.other(region)
    if target is None:
        raise PathError(f"wall {x.name} is not adjacent to region {region}")
    tag_a = s.region(x.a).tag
    t = _reduction_element(x, step.reduction, tag_a)
    if region == x.a:
        letters = (inverse(x.transition),) + ((t,) if t is not None else ())
    else:
        letters = ((t,) if t is not None else ()) + (x.transition,)
    return target, tuple(g for g in letters if not is_identity(g, 0.0))


def continue_germ(s, germ: Germ, path: PathSpec) -> Germ:
    region = germ.region
    frame = list(germ.frame.letters)
    for step in path.steps:
        region, letters = crossing_letters(s, region, step)
        frame.extend(letters)
    return Germ(region, Word(tuple(frame)))


def holonomy(s, loop: PathSpec) -> Word:
    end = continue_germ(s, Germ(s.base_region), loop)
    if end.region != s.base_region:
        raise PathError(f"loop ends at {end.region}, not at base region {s.base_region}")
    return reduce_word(end.frame)


def evaluate_word(w: Word, p: UPoint) -> UPoint:
    for g in reversed(w.letters):
        p = g.act(p)
    return p


# -- word reduction ------------------------------------------------------------


def _retag(g: GroupElement) -> GroupElement:
    v = translation_vector(g)
    if v is None or g.tag is CANONICAL_TRANSLATION_TAG:
        return g
    return embed_translation(v, CANONICAL_TRANSLATION_TAG)


def _merge(left: GroupElement, right: GroupElement):
    if left.tag is right.tag:
        return compose(left, right)
    u = translation_vector(left)
    v = translation_vector(right)
    if u is not None and v is not None:
        return embed_translation((u[0] + v[0], u[1] + v[1]), CANONICAL_TRANSLATION_TAG)
    return None


def _one_pass(letters):
    stack = []
    for g in letters:
        if is_identity(g, IDENTITY_TOL):
            continue
        stack.append(g)
        while len(stack) >= 2:
            merged = _merge(stack[-2], stack[-1])
            if merged is None:
                break
            del stack[-2:]
            if not is_identity(merged, IDENTITY_TOL):
                stack.append(merged)
    return [_retag(g) for g in stack]


def reduce_word(w: Word) -> Word:
    """Merge adjacent same-tag letters and horizontal translations of any
    tag, drop identity letters, and re-tag translations as AFF."""
    letters = list(w.letters)
    while True:
        out = _one_pass(letters)
        if len(out) == len(letters) and all(a is b for a, b in zip(out, letters)):
            return Word(tuple(out))
        letters = out


# -- loop grammar --------------------------------------------------------------


class LoopSyntaxError(PathError):
    pass


LOOP_GRAMMAR = (
    "loop := token (',' token)* ; token := 'w' INT | ('+'|'-') 't' INT ; "
    "'wN' crosses wall N, a following '+tK' / '-tK' selects reduction "
    "generator K (or its inverse) for that crossing"
)

_WALL = re.compile(r"w(\d+)")
_RED = re.compile(r"([+-])t(\d+)")


def parse_loop(text: str) -> PathSpec:
    steps = []
    text = text.strip()
    if not text:
        return PathSpec(())
    for raw in text.split(","):
        tok = raw.strip()
        m = _WALL.fullmatch(tok)
        if m:
            steps.append([int(m.group(1)), []])
            continue
        m = _RED.fullmatch(tok)
        if m and steps:
            steps[-1][1].append((int(m.group(2)), 1 if m.group(1) == "+" else -1))
            continue
        raise LoopSyntaxError(f"bad loop token {tok!r}; grammar: {LOOP_GRAMMAR}")
    return PathSpec(tuple(PathStep(i, tuple(r)) for i, r in steps))


def collar_loop(s, intersection: int, generator: int, sign: int = 1) -> PathSpec:
    """Loop from side ``a`` of a wall around one of its reduction generators."""
    return PathSpec((PathStep(intersection, ()), PathStep(intersection, ((generator, sign),))))


def path_between(s, start: str, goal: str) -> PathSpec:
    """Shortest identity-reduction path in the intersection graph."""
    prev = {start: None}
    queue = [start]
    while queue:
        r = queue.pop(0)
        if r == goal:
            break
        for x in s.intersections:
            nxt = x.other(r)
            if nxt is not None and nxt not in prev:
                prev[nxt] = (r, x.index)
                queue.append(nxt)
    if goal not in prev:
        raise PathError(f"no path from {start} to {goal}")
    steps = []
    r = goal
    while prev[r] is not None:
        r, idx = prev[r]
        steps.append(PathStep(idx, ()))
    return PathSpec(tuple(reversed(steps)))

