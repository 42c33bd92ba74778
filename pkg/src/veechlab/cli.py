"""Command line front end: ``veechlab <subcommand> ...``.

Every subcommand prints ``key=value`` lines.  Exit codes: 0 success,
2 usage error, 3 invalid input or failed operation, 4 a search or trace
budget ran out.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .affine import dehn_twist, fixed_points, in_gamma2, involution, is_in_veech_group
from .cylinders import PeriodicityUndetermined, cylinder_decomposition, rectangle_decomposition
from .flow import TraceBudgetExceeded, saddle_connections_up_to
from .illumination import (
    Certificate,
    blocked_certify_covering,
    covering_partners,
    has_covering_structure,
    illuminates,
    offdiagonal_blocked_pairs,
    twist_reduce,
    vh_path,
)
from .product import LeafNotCompact, build_leaf, parse_slope
from .scalar import Mat2, parse_scalar, simplify
from .surface import (
    PolygonSurface,
    SurfaceError,
    arithmeticity_detect,
    builtin_surface,
    format_surface,
    parse_surface,
)
from .svg import emit_svg, leaf_scene, surface_scene, vh_path_scene
from .torus import BudgetExhausted, Dense, jacobsthal, jacobsthal_constant, kronecker_hit, torus_orbit_classify

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILED = 3
EXIT_BUDGET = 4


class CliError(Exception):
    pass


def _out(key, value):
    print(f"{key}={value}")


def _fmt(v):
    v = simplify(v) if not isinstance(v, (int, str)) else v
    return str(v)


def _vec(v):
    return f"({_fmt(v[0])},{_fmt(v[1])})"


def _pt(p):
    return f"sq{p.cell}:{_fmt(p.x)},{_fmt(p.y)}"


def load_surface(source):
    if os.path.exists(source) and not source.startswith("builtin:"):
        with open(source, encoding="utf-8") as fh:
            return parse_surface(fh.read())
    return builtin_surface(source)


def _rect(S):
    if isinstance(S, PolygonSurface):
        try:
            return S.to_rect_surface()
        except SurfaceError as exc:
            raise CliError("this operation needs a surface tiled by rectangles") from exc
    return S


def parse_point(S, text):
    """``sqC:x,y`` (cell C, local coordinates) or ``vK`` (vertex K)."""
    text = text.strip()
    if text.startswith("v") and text[1:].isdigit():
        return S.vertex_point(int(text[1:]))
    if not text.startswith("sq") or ":" not in text:
        raise CliError(f"bad point {text!r}; expected sqC:x,y")
    cell, _, coords = text[2:].partition(":")
    x, y = coords.split(",")
    return S.point(int(cell), simplify(parse_scalar(x)), simplify(parse_scalar(y)))


def _matrix(text):
    parts = [simplify(parse_scalar(t)) for t in text.split(",")]
    if len(parts) != 4:
        raise CliError("matrix needs four comma separated entries a,b,c,d")
    return Mat2(*parts)


def _direction(text):
    if text in ("h", "horizontal"):
        return (1, 0)
    if text in ("v", "vertical"):
        return (0, 1)
    a, b = text.split(",")
    return (simplify(parse_scalar(a)), simplify(parse_scalar(b)))


# -- subcommands -------------------------------------------------------------------


def cmd_surface(args):
    S = load_surface(args.source)
    action = args.action
    if action == "dump":
        text = format_surface(S)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            _out("written", args.out)
        else:
            sys.stdout.write(text)
        return
    _out("genus", S.genus())
    _out("cone_points", S.cone_signature())
    _out("area", _fmt(S.area()))
    if isinstance(S, PolygonSurface):
        _out("polygons", len(S.polygons))
    else:
        _out("cells", S.n)
        kind = arithmeticity_detect(S)
        _out("arithmetic", "true" if type(kind).__name__ == "Arithmetic" else "false")
        if action == "load":
            _out("canonical", repr(S.canonical_form()))
        if args.svg:
            emit_svg(surface_scene(S), args.svg)
            _out("svg", args.svg)


def cmd_decompose(args):
    S = _rect(load_surface(args.source))
    cyls = cylinder_decomposition(S, _direction(args.direction))
    _out("cylinders", len(cyls))
    for k, c in enumerate(cyls):
        circ = c.circumference
        _out(f"cylinder{k}", f"circumference={_fmt(circ) if circ is not None else 'sqrt(' + _fmt(c.circumference2) + ')'} "
                             f"height={_fmt(c.height)} area={_fmt(c.area)} modulus={_fmt(c.modulus)}")
    if args.svg:
        emit_svg(surface_scene(S), args.svg)
        _out("svg", args.svg)


def cmd_saddles(args):
    S = _rect(load_surface(args.source))
    sc = saddle_connections_up_to(S, simplify(parse_scalar(args.len)))
    _out("count", len(sc))
    if args.list:
        for s in sc:
            _out("saddle", f"{s.start}->{s.end} {_vec(s.holonomy)}")


def cmd_twist(args):
    S = _rect(load_surface(args.source))
    f = dehn_twist(S, args.dir, args.power)
    a, b, c, d = (simplify(e) for e in f.derivative.entries())
    _out("derivative", f"({_fmt(a)} {_fmt(b)};{_fmt(c)} {_fmt(d)})")
    _out("shear", _fmt(f.shear))
    if args.point:
        _out("image", _pt(f.apply(parse_point(S, args.point))))


def cmd_involution(args):
    S = _rect(load_surface(args.source))
    phi, unique = involution(S)
    if phi is None:
        _out("involution", "none")
        return
    _out("involution", "found")
    _out("unique", str(unique).lower())
    fix = fixed_points(phi)
    _out("fixed_points", len(fix))
    _out("cone_fixed_points", sum(1 for p in fix if S.is_cone(p)))
    for p in fix:
        _out("fixed", _pt(p))


def cmd_veech_test(args):
    S = _rect(load_surface(args.source))
    A = _matrix(args.matrix)
    _out("in_veech_group", str(is_in_veech_group(S, A)).lower())
    if A.is_integral() and A.det() == 1:
        _out("in_gamma2", str(in_gamma2(A)).lower())


def _base(S, text):
    if text is None:
        return "cone"
    parts = text.split(";") if ";" in text else text.split(",", 1) if text.startswith("cone") else None
    if parts is None:
        raise CliError("base must be 'cone,cone' or 'P;Q'")
    return tuple("cone" if t.strip() == "cone" else parse_point(S, t) for t in parts)


def cmd_leaf(args):
    S = _rect(load_surface(args.source))
    slope = parse_slope(args.slope)
    leaf = build_leaf(S, slope, _base(S, args.base), args.branch)
    C = leaf.carrier
    _out("slope", str(slope))
    _out("squares", leaf.squares)
    _out("cells", C.n)
    _out("genus", C.genus())
    _out("cone_points", C.cone_signature())
    _out("scale_h", leaf.scale_h)
    _out("scale_v", leaf.scale_v)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_surface(C))
        _out("dump", args.dump)
    if args.out:
        emit_svg(leaf_scene(leaf), args.out)
        _out("svg", args.out)


def cmd_torus_classify(args):
    x, y = (simplify(parse_scalar(t)) for t in args.point.split(","))
    res = torus_orbit_classify((x, y))
    if isinstance(res, Dense):
        _out("orbit", "dense")
        return
    _out("orbit", "finite")
    _out("n", res.n)
    _out("size", len(res.points))


def cmd_jacobsthal(args):
    _out("J", jacobsthal(args.n))
    if args.sweep:
        K, n_at, _ = jacobsthal_constant(args.sweep)
        _out("K", f"{K:.12f}")
        _out("K_attained_at", n_at)


def cmd_kronecker(args):
    vals = [simplify(parse_scalar(t)) for t in (args.phi, args.theta, args.c, args.d, args.e)]
    res = kronecker_hit(*vals, Fraction(args.eps), budget=args.budget)
    if type(res).__name__ == "Hit":
        _out("result", "hit")
        _out("n", res.n)
    else:
        _out("result", "exceptional")
        _out("delta", res.delta)
        _out("reason", res.reason)


def _target(S, p, text):
    if text.startswith("partner:"):
        k = int(text.split(":", 1)[1])
        partners = covering_partners(S, p)
        if not 0 <= k < len(partners):
            raise CliError(f"partner index out of range (0..{len(partners) - 1})")
        return partners[k]
    return parse_point(S, text)


def cmd_illuminate(args):
    S = _rect(load_surface(args.source))
    p = parse_point(S, args.source_point)
    q = _target(S, p, args.to)
    L = simplify(parse_scalar(args.len))
    v = illuminates(S, p, q, L)
    _out("from", _pt(p))
    _out("to", _pt(q))
    _out("verdict", v.label)
    if v.label == "Illuminated":
        _out("holonomy", _vec(v.holonomy))
        _out("crossing", " ".join(str(c) for c in v.cells))
    if has_covering_structure(S):
        _out("certified", str(blocked_certify_covering(S, p, q)).lower())


def cmd_blocked_pairs(args):
    S = _rect(load_surface(args.source))
    rep = offdiagonal_blocked_pairs(S)
    _out("status", rep.status)
    _out("unique_involution", str(rep.unique).lower())
    _out("fixed_points", len(rep.fixed_points))
    if rep.witness is not None:
        _out("witness", _pt(rep.witness))
    if args.point:
        p = parse_point(S, args.point)
        _out("pair", f"{_pt(p)} {_pt(rep.involution.apply(p))}")


def cmd_twist_reduce(args):
    S = _rect(load_surface(args.source))
    p = parse_point(S, args.source_point)
    q = _target(S, p, args.to)
    res = twist_reduce(S, p, q, budget=args.budget)
    if isinstance(res, Certificate):
        _out("result", "certificate")
        _out("word", " ".join(res.word) if res.word else "empty")
        _out("colocation", res.colocation)
        _out("holonomy", _vec(res.holonomy))
    else:
        _out("result", "exhausted")
        _out("orbit_closed", str(res.closed).lower())
        _out("states", res.states)
        if not res.closed:
            raise BudgetExhausted("twist search budget exhausted")


def cmd_vh_path(args):
    S = _rect(load_surface(args.source))
    p = parse_point(S, args.source_point)
    q = parse_point(S, args.to)
    path = vh_path(S, p, q, rectangle_decomposition(S))
    _out("length", path.length)
    _out("rectangles", " ".join(str(r) for r in path.rectangles))
    _out("moves", " ".join(path.moves) if path.moves else "none")
    for t in path.turning_points:
        _out("turn", _pt(t))
    if args.out:
        emit_svg(vh_path_scene(S, path, p, q), args.out)
        _out("svg", args.out)


# -- parser --------------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="veechlab", description="Translation surface laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="surface invariants, dump and load")
    p.add_argument("source")
    p.add_argument("action", nargs="?", default="info", choices=["info", "dump", "load"])
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("decompose", help="cylinder decomposition")
    p.add_argument("source")
    p.add_argument("--dir", "--direction", dest="direction", default="h")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("saddles", help="saddle connections up to a length")
    p.add_argument("source")
    p.add_argument("--len", required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_saddles)

    p = sub.add_parser("twist", help="minimal horizontal or vertical multitwist")
    p.add_argument("source")
    p.add_argument("--dir", default="h", choices=["h", "v"])
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--point")
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("involution", help="affine involution and its fixed points")
    p.add_argument("source")
    p.set_defaults(func=cmd_involution)

    p = sub.add_parser("veech-test", help="Veech group membership")
    p.add_argument("source")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_veech_test)

    p = sub.add_parser("leaf", help="leaf of a linear foliation of the square")
    p.add_argument("source")
    p.add_argument("--slope", required=True)
    p.add_argument("--base", default="cone,cone")
    p.add_argument("--branch", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--dump")
    p.set_defaults(func=cmd_leaf)

    p = sub.add_parser("torus-classify", help="SL2(Z) orbit of a torus point")
    p.add_argument("point")
    p.set_defaults(func=cmd_torus_classify)

    p = sub.add_parser("jacobsthal", help="Jacobsthal function")
    p.add_argument("n", type=int)
    p.add_argument("--sweep", type=int)
    p.set_defaults(func=cmd_jacobsthal)

    p = sub.add_parser("kronecker", help="first return of a torus rotation to a box")
    for name in ("phi", "theta"):
        p.add_argument(f"--{name}", required=True)
    for name in ("c", "d", "e"):
        p.add_argument(f"--{name}", default="0")
    p.add_argument("--eps", required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_kronecker)

    p = sub.add_parser("illuminate", help="search a segment between two points")
    p.add_argument("source")
    p.add_argument("--from", dest="source_point", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--len", required=True)
    p.set_defaults(func=cmd_illuminate)

    p = sub.add_parser("blocked-pairs", help="off-diagonal blocking family")
    p.add_argument("source")
    p.add_argument("--point")
    p.set_defaults(func=cmd_blocked_pairs)

    p = sub.add_parser("twist-reduce", help="twist words co-locating two points")
    p.add_argument("source")
    p.add_argument("--from", dest="source_point", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_twist_reduce)

    p = sub.add_parser("vh-path", help="rectangle chain and turning points")
    p.add_argument("source")
    p.add_argument("--from", dest="source_point", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_vh_path)
    return ap


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        args.func(args)
    except (TraceBudgetExceeded, BudgetExhausted, LeafNotCompact) as exc:
        print(f"error=budget message={exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CliError, SurfaceError, ValueError, TypeError, KeyError, NotImplementedError,
            PeriodicityUndetermined, OSError) as exc:
        print(f"error=failed message={exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
