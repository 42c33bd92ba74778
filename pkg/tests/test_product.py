import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veechlab.affine import dehn_twist, involution
from veechlab.flow import trace_segment
from veechlab.illumination import random_rational_point
from veechlab.product import (
    HORIZONTAL,
    VERTICAL,
    LeafNotCompact,
    Slope,
    build_leaf,
    cone_order_product,
    leaf_invariance_check,
    local_leaf_classes,
    map_order,
    parse_slope,
    quotient_by_cell_permutation,
    translation_automorphisms,
)
from veechlab.surface import builtin_surface

F = Fraction


@pytest.mark.parametrize("oh,ov,order,count", [(3, 3, 3, 3), (1, 5, 5, 1), (4, 6, 12, 2)])
def test_cone_order_product(oh, ov, order, count):
    assert cone_order_product(oh, ov) == {"order": order, "leaf_count": count}


@settings(deadline=None)
@given(st.integers(1, 40), st.integers(1, 40))
def test_cone_order_product_law(oh, ov):
    r = cone_order_product(oh, ov)
    assert r["order"] * r["leaf_count"] == oh * ov


def test_slopes():
    assert parse_slope("2") == Slope(2, 1)
    assert parse_slope("-4/6") == Slope(-2, 3)
    assert parse_slope("inf") == VERTICAL
    assert parse_slope("0") == HORIZONTAL
    assert parse_slope((2, -4)) == Slope(-1, 2)


def test_torus_diagonal_leaf():
    T = builtin_surface("torus")
    leaf = build_leaf(T, 1, ((0, 0, 0), (0, 0, 0)))
    assert leaf.squares == 1 and leaf.carrier.genus() == 1


def test_l3_trivial_branch_is_the_diagonal():
    L = builtin_surface("L3")
    leaf = build_leaf(L, 1, "cone", 0)
    assert leaf.carrier.is_isomorphic(L)


def test_l3_nontrivial_branch_is_d2():
    L = builtin_surface("L3")
    D2 = build_leaf(L, 1, "cone", 1).carrier
    assert (D2.n, D2.genus(), D2.cone_signature()) == (6, 3, "3^2")
    assert build_leaf(L, 1, "cone", 2).carrier.is_isomorphic(D2)
    orders = sorted(map_order(f) for f in translation_automorphisms(D2))
    assert orders == [1, 2, 2, 2, 3, 3]
    f = next(f for f in translation_automorphisms(D2) if map_order(f) == 3)
    Q, _ = quotient_by_cell_permutation(D2, [f.images[c].cell for c in range(D2.n)])
    assert Q.n == 2 and Q.genus() == 1


def test_l3_slope_two_leaf():
    L = builtin_surface("L3")
    leaf = build_leaf(L, 2, "cone", 0)
    assert leaf.squares == 36
    assert leaf.carrier.genus() == 13 and leaf.carrier.cone_signature() == "3^12"
    for branch in (1, 2):
        assert build_leaf(L, 2, "cone", branch).squares == 36


def test_leaf_budget():
    L = builtin_surface("L3")
    with pytest.raises(LeafNotCompact):
        build_leaf(L, 2, "cone", 0, max_cells=5)


def test_local_leaves_at_l3_cone():
    L = builtin_surface("L3")
    classes = local_leaf_classes(L, 0, L, 0)
    assert len(classes) == 3 and all(o == 3 for o, _ in classes)


def _twists(S):
    return [dehn_twist(S, d, k) for d in ("h", "v") for k in (1, -1)]


def test_diagonal_and_d2_are_twist_invariant():
    L = builtin_surface("L3")
    gens = _twists(L)
    for branch in (0, 1, 2):
        assert leaf_invariance_check(build_leaf(L, 1, "cone", branch), gens)
    assert leaf_invariance_check(build_leaf(L, 2, "cone", 0), gens)


def test_antidiagonal_is_twist_invariant():
    L = builtin_surface("L3")
    phi, _ = involution(L)
    p = L.point(0, F(1, 3), F(1, 5))
    leaf = build_leaf(L, -1, (p, phi.apply(p)))
    assert leaf.contains(p, phi.apply(p))
    assert leaf_invariance_check(leaf, _twists(L))


def test_generic_leaf_is_not_invariant():
    L = builtin_surface("L3")
    leaf = build_leaf(L, 1, (L.point(0, F(1, 3), F(1, 5)), L.point(2, F(1, 7), F(2, 3))))
    assert not leaf_invariance_check(leaf, _twists(L))


@pytest.mark.parametrize("slope", ["1", "2", "1/2", "3/2"])
def test_slope_leaf_covers_factor_evenly(slope):
    L = builtin_surface("L3")
    leaf = build_leaf(L, slope, "cone", 0)
    s = leaf.slope
    area_h = Counter()
    for c, st_ in enumerate(leaf.states):
        area_h[st_[0]] += leaf.carrier.widths[c] * leaf.carrier.heights[c] * s.q * s.q
    assert len(set(area_h.values())) == 1


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["1", "2", "1/2", "3/2", "-1", "-2"]), st.integers(0, 10**6),
       st.integers(-2, 2), st.integers(-2, 2))
def test_leaf_length_relation(slope, seed, a, b):
    # a segment on the leaf projects to segments stretched by q and |p|,
    # so p |L_h| = q |L_v|
    L = builtin_surface("L3")
    leaf = build_leaf(L, slope, "cone", 0)
    C = leaf.carrier
    rng = random.Random(seed)
    x = random_rational_point(C, rng, denominator=6)
    y = random_rational_point(C, rng, denominator=6)
    v = (y.x - x.x + a * C.widths[y.cell], y.y - x.y + b * C.heights[y.cell])
    res = trace_segment(C, x, v)
    if res.terminal != "end":
        return
    q, p = leaf.slope.q, leaf.slope.p
    hh = (q * v[0], q * v[1])
    rh = trace_segment(L, leaf.pr_h(x), hh)
    assert rh.terminal == "end" and rh.end == leaf.pr_h(res.end)
    hv = (p * v[0], p * v[1])  # a negative slope runs the vertical factor backwards
    rv = trace_segment(L, leaf.pr_v(x), hv)
    assert rv.terminal == "end" and rv.end == leaf.pr_v(res.end)
    len_h2 = hh[0] ** 2 + hh[1] ** 2
    len_v2 = hv[0] ** 2 + hv[1] ** 2
    assert p * p * len_h2 == q * q * len_v2


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5))
def test_cone_pairs_on_staircase_products(oh, ov):
    Xh, Xv = builtin_surface(f"Y{oh}"), builtin_surface(f"Y{ov}")
    classes = local_leaf_classes(Xh, 0, Xv, 0)
    assert len(classes) == math.gcd(oh, ov)
    assert {o for o, _ in classes} == {oh * ov // math.gcd(oh, ov)}
    members = [m for _, ms in classes for m in ms]
    assert len(members) == len(set(members)) == oh * ov
