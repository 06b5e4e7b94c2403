"""Command line entry point.

Exit codes: 0 success, 1 validation failure, 2 verification failure,
64 unreadable or malformed scene, 65 bad loop specification.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Sequence

from . import scene as scene_io
from .assembly import (
    DEFAULT_EPS,
    build,
    expected_counts,
    inject_fault,
    moduli_dimension,
    moduli_parameters,
    validate,
    verify,
)
from .developing import LOOP_GRAMMAR, holonomy, parse_loop
from .errors import LieGeometryError, PathError, SceneError
from .group_actions import Tag
from .model_space import UPoint
from .sampling import DEFAULT_SAMPLES

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2
EXIT_PARSE = 64
EXIT_LOOP = 65

REPORT_FORMAT = "liegeom-report"


def _load(path, err):
    try:
        scene = scene_io.load(path)
        return scene, scene.to_graph()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=err)
    except SceneError as exc:
        print(f"error: {path}: {exc}", file=err)
    return None, None


def _print_report(report, out):
    for c in report.checks:
        line = f"{c.status.upper():4} {c.name}"
        if c.detail and not c.passed:
            line += f": {c.detail}"
        print(line, file=out)


def cmd_validate(path, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    _, graph = _load(path, err)
    if graph is None:
        return EXIT_PARSE
    report = validate(graph)
    _print_report(report, out)
    return EXIT_OK if report.passed else EXIT_INVALID


def _residual(x: float):
    return x if math.isfinite(x) else "inf"


def report_document(graph, structure, report, eps, samples, seed) -> dict:
    regions, intersections = expected_counts(graph)
    return {
        "format": REPORT_FORMAT,
        "version": 1,
        "parameters": {"eps": eps, "samples": samples, "seed": seed},
        "status": "pass" if report.passed else "fail",
        "statistics": {
            "regions": len(structure.regions),
            "intersections": len(structure.intersections),
            "expected_regions": regions,
            "expected_intersections": intersections,
            "moduli_dimension": moduli_dimension(graph),
        },
        "walls": [
            {"id": f"w{x.index}", "a": x.a, "b": x.b, "kind": x.kind, "reductions": len(x.reductions)}
            for x in structure.intersections
        ],
        "checks": [
            {"name": c.name, "status": c.status, "max_residual": _residual(c.max_residual), "detail": c.detail}
            for c in report.checks
        ],
        "notes": list(structure.notes),
    }


def _build(scene, graph, err):
    report = validate(graph)
    if not report.passed:
        _print_report(report, err)
        return None
    s = build(graph)
    for f in scene.faults:
        try:
            s = inject_fault(s, f["wall"], f["generator"], f["delta"])
        except IndexError:
            print(f"error: fault refers to missing wall/generator {f}", file=err)
            return None
    return s


def cmd_build_verify(path, eps=DEFAULT_EPS, samples=DEFAULT_SAMPLES, seed=0, out_path=None,
                     out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    scene, graph = _load(path, err)
    if graph is None:
        return EXIT_PARSE
    s = _build(scene, graph, err)
    if s is None:
        return EXIT_INVALID
    report = verify(s, eps, samples, seed)
    text = scene_io.dump_document(report_document(graph, s, report, eps, samples, seed))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _num(x: float) -> str:
    return format(x, ".15g")


def _complex(z: complex) -> str:
    return f"[{_num(z.real)}, {_num(z.imag)}]"


def format_letter(g) -> str:
    if g.tag is Tag.H3:
        return f"H3 a={_complex(g.a)} b={_complex(g.b)} c={_complex(g.c)} d={_complex(g.d)}"
    if g.tag is Tag.AFF:
        lin = ", ".join(_num(x) for x in g.linear)
        return (f"AFF L=[{lin}] eps={g.eps} "
                f"b=[{_num(g.b1)}, {_num(g.b2)}, {_num(g.b3)}]")
    m = ", ".join(_num(x) for x in g.m)
    if g.tag is Tag.H2R:
        return f"H2R m=[{m}] s={_num(g.s)}"
    return f"SL2T m=[{m}] k={g.k} theta={_num(g.theta)}"


def _parse_point(text):
    try:
        x, y, z = (float(t) for t in text.split(","))
        return UPoint(x, y, z)
    except (ValueError, LieGeometryError) as exc:
        raise argparse.ArgumentTypeError(f"--point must be x,y,z with z > 0: {exc}") from None


def cmd_develop(path, loop="", point="0,0,1", out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    scene, graph = _load(path, err)
    if graph is None:
        return EXIT_PARSE
    s = _build(scene, graph, err)
    if s is None:
        return EXIT_INVALID
    try:
        p = _parse_point(point)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_LOOP
    try:
        word = holonomy(s, parse_loop(loop))
    except (PathError, IndexError) as exc:
        print(f"error: {exc}\nloop grammar: {LOOP_GRAMMAR}", file=err)
        return EXIT_LOOP
    print(f"base region: {s.base_region}", file=out)
    print(f"word length: {len(word)}", file=out)
    for i, g in enumerate(word):
        print(f"letter {i}: {format_letter(g)}", file=out)
    q = word.act(p)
    print(f"point: {_num(p.x)} {_num(p.y)} {_num(p.z)}", file=out)
    print(f"image: {_num(q.x)} {_num(q.y)} {_num(q.z)}", file=out)
    return EXIT_OK


def cmd_moduli(path, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    _, graph = _load(path, err)
    if graph is None:
        return EXIT_PARSE
    report = validate(graph)
    if not report.passed:
        _print_report(report, err)
        return EXIT_INVALID
    print(moduli_dimension(graph), file=out)
    for eid, slide, offset in moduli_parameters(graph):
        print(f"{eid}: slide={_num(slide)} offset=[{_num(offset[0])}, {_num(offset[1])}]", file=out)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liegeom", description="Build and check Lie generated geometries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scene's decorated graph")
    p.add_argument("path")

    p = sub.add_parser("build-verify", help="build the structure and run every check")
    p.add_argument("path")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("develop", help="holonomy word of a loop and its action on a point")
    p.add_argument("path")
    p.add_argument("--loop", default="")
    p.add_argument("--point", default="0,0,1")

    p = sub.add_parser("moduli", help="count and list the continuous parameters")
    p.add_argument("path")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.path)
    if args.command == "build-verify":
        return cmd_build_verify(args.path, args.eps, args.samples, args.seed, args.out)
    if args.command == "develop":
        return cmd_develop(args.path, args.loop, args.point)
    return cmd_moduli(args.path)


if __name__ == "__main__":
    sys.exit(main())
