from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veechlab.scalar import Scalar
from veechlab.surface import (
    Arithmetic,
    NonArithmetic,
    PolygonSurface,
    SurfaceError,
    arithmeticity_detect,
    build_double_cover_LC,
    build_l_shaped,
    build_origami,
    build_staircase,
    builtin_surface,
    format_surface,
    parse_surface,
)


def commutator_orders(right, up):
    """Cycle lengths of r u r^-1 u^-1, computed from scratch."""
    n = len(right)
    rinv = [0] * n
    uinv = [0] * n
    for i in range(n):
        rinv[right[i]] = i
        uinv[up[i]] = i
    comm = [right[up[rinv[uinv[i]]]] for i in range(n)]
    seen, out = set(), []
    for i in range(n):
        if i in seen:
            continue
        k, j = 0, i
        while j not in seen:
            seen.add(j)
            j = comm[j]
            k += 1
        out.append(k)
    return sorted(out)


def test_torus():
    S = build_origami([0], [0])
    assert S.genus() == 1 and S.cone_points() == []


def test_l3_from_one_based_cycles():
    # right (1 2)(3), up (1 3)(2) written 0-based
    S = build_origami("(0 1)(2)", "(0 2)(1)")
    assert S.genus() == 2 and S.cone_signature() == "3^1"
    assert S.is_isomorphic(builtin_surface("L3"))
    assert commutator_orders(S.right, S.up) == [3]


def test_disconnected_surface_rejected():
    with pytest.raises(SurfaceError):
        build_origami([0, 1], [0, 1])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_staircase_properties(n):
    S = build_staircase(n)
    assert S.n == 4 * n and S.area() == 4 * n
    assert S.genus() == 2 * n - 1
    if n > 1:
        assert Counter(S.vertex_order) == Counter({n: 4})
    assert sorted(S.vertex_order) == sorted(o for o in commutator_orders(S.right, S.up))
    assert S.meta["cover"]["lattice"] == 2 and S.meta["cover"]["degree"] == n


def test_staircase_y2_commutator_cycles():
    S = build_staircase(2)
    cycles = sorted(tuple(sorted(c)) for c in S.vertex_cycles)
    # frozen: (0 4)(1 5)(2 6)(3 7)
    assert cycles == [(0, 4), (1, 5), (2, 6), (3, 7)]


def test_golden_l():
    S = builtin_surface("golden-L")
    assert S.genus() == 2 and S.cone_signature() == "3^1"
    kind = arithmeticity_detect(S)
    assert isinstance(kind, NonArithmetic)


def test_unit_l_shape_matches_origami():
    S = build_l_shaped(1, 1, 1, 1)
    assert S.is_isomorphic(build_origami("(0 1)(2)", "(0 2)(1)"))


def test_arithmetic_examples():
    L = builtin_surface("L3")
    kind = arithmeticity_detect(L)
    assert isinstance(kind, Arithmetic) and kind.degree == 3
    Y = build_staircase(3)
    kind = arithmeticity_detect(Y)
    assert isinstance(kind, Arithmetic)


def test_lc_cover_of_l3():
    LC = build_double_cover_LC(builtin_surface("L3"))
    assert LC.area() == 6
    assert sum(o - 1 for o in LC.vertex_order) == 2 * LC.genus() - 2


def test_octagon_single_cone_point():
    S = builtin_surface("octagon")
    assert isinstance(S, PolygonSurface)
    assert S.genus() == 2 and S.cone_signature() == "3^1"
    assert S.area() == Scalar(2, 2, 2)


def test_decagon_pair_automorphism_of_order_two():
    S = builtin_surface("decagon-pair")
    assert S.translation_automorphism_order([1, 0]) == 2


@pytest.mark.parametrize("name", ["torus", "L3", "L(3,2)", "golden-L", "Y2", "LC", "octagon", "decagon"])
def test_gauss_bonnet(name):
    S = builtin_surface(name)
    assert sum(o - 1 for o in S.vertex_order) == 2 * S.genus() - 2


@pytest.mark.parametrize("name", ["torus", "L3", "golden-L", "Y3", "LC", "octagon"])
def test_file_round_trip(name):
    S = builtin_surface(name)
    text = format_surface(S)
    T = parse_surface(text)
    assert format_surface(T) == text


def test_polygon_round_trip_preserves_cones():
    for name in ["L3", "Y2", "L(2,3)"]:
        S = builtin_surface(name)
        P = S.to_polygons()
        assert P.genus() == S.genus()
        assert P.cone_signature() == S.cone_signature()
        assert P.to_rect_surface().is_isomorphic(S)


def test_points_have_one_canonical_form():
    L = builtin_surface("L3")
    # the right edge of square 0 is the left edge of square 1
    assert L.point(0, 1, Fraction(1, 2)) == L.point(1, 0, Fraction(1, 2))
    # every corner of the cone class is the same point
    corners = {L.point(c, x, y) for c in range(3) for x in (0, 1) for y in (0, 1)}
    assert len(corners) == 1


@st.composite
def origamis(draw):
    n = draw(st.integers(1, 7))
    right = draw(st.permutations(range(n)))
    up = draw(st.permutations(range(n)))
    return list(right), list(up)


@settings(max_examples=150, deadline=None)
@given(origamis())
def test_random_origamis_satisfy_gauss_bonnet(perms):
    try:
        S = build_origami(*perms)
    except SurfaceError:
        return
    assert sorted(S.vertex_order) == commutator_orders(*perms)
    assert sum(o - 1 for o in S.vertex_order) == 2 * S.genus() - 2
    assert parse_surface(format_surface(S)).is_isomorphic(S)
