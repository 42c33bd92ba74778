import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veechlab.affine import (
    apply_diag,
    dehn_twist,
    find_affine_maps,
    fixed_points,
    identity_map,
    in_gamma2,
    involution,
    is_in_veech_group,
)
from veechlab.illumination import random_rational_point
from veechlab.scalar import Mat2
from veechlab.surface import builtin_surface

F = Fraction


def test_torus_twist():
    T = builtin_surface("torus")
    assert dehn_twist(T, "h").derivative == Mat2(1, 1, 0, 1)
    assert is_in_veech_group(T, Mat2(1, 1, 0, 1))


def test_l3_twists():
    L = builtin_surface("L3")
    assert dehn_twist(L, "h").derivative == Mat2(1, 2, 0, 1)
    assert dehn_twist(L, "v").derivative == Mat2(1, 0, 2, 1)


def test_l3_horizontal_twist_pointwise():
    # (1/2, 1/2) in the two-square cylinder goes to x + 2y = 3/2: the second square
    L = builtin_surface("L3")
    T = dehn_twist(L, "h")
    assert T.apply(L.point(0, F(1, 2), F(1, 2))) == L.point(1, F(1, 2), F(1, 2))


def test_vertical_twist_on_torus_pointwise():
    T = builtin_surface("torus")
    f = dehn_twist(T, "v")
    assert f.apply(T.point(0, F(1, 2), 0)) == T.point(0, F(1, 2), F(1, 2))


def test_identity_fixes_points():
    L = builtin_surface("L3")
    f = identity_map(L)
    rng = random.Random(0)
    for _ in range(20):
        p = random_rational_point(L, rng)
        assert f.apply(p) == p


def test_involution_fixed_points():
    L = builtin_surface("L3")
    phi, unique = involution(L)
    assert phi is not None and unique
    fix = fixed_points(phi)
    assert len(fix) == 6
    assert sum(1 for p in fix if L.is_cone(p)) == 1


def test_torus_involution_has_four_fixed_points():
    T = builtin_surface("torus")
    phi, _ = involution(T)
    assert len(fixed_points(phi)) == 4


def test_golden_l_involution():
    G = builtin_surface("golden-L")
    phi, _ = involution(G)
    assert phi is not None
    assert len(fixed_points(phi)) == 6


def test_veech_group_membership_on_l3():
    L = builtin_surface("L3")
    assert is_in_veech_group(L, Mat2(-1, 0, 0, -1))
    assert not is_in_veech_group(L, Mat2(1, 1, 0, 1))
    assert is_in_veech_group(L, Mat2(1, 2, 0, 1))
    assert is_in_veech_group(L, Mat2(1, 0, 2, 1))


def test_veech_group_rejects_foreign_field():
    from veechlab.scalar import Scalar

    L = builtin_surface("L3")
    with pytest.raises(ValueError):
        is_in_veech_group(L, Mat2(1, Scalar(0, 1, 2), 0, 1))


def test_gamma2():
    assert in_gamma2(Mat2(1, 0, 0, 1))
    assert in_gamma2(Mat2(1, 2, 0, 1))
    assert not in_gamma2(Mat2(1, 1, 0, 1))
    with pytest.raises(ValueError):
        in_gamma2(Mat2(F(1, 2), 0, 0, 2))


@pytest.mark.parametrize("name", ["L3", "Y2", "golden-L", "L(3,2)"])
def test_twists_lie_in_the_veech_group(name):
    S = builtin_surface(name)
    for d in ("h", "v"):
        f = dehn_twist(S, d)
        assert is_in_veech_group(S, f.derivative)


def test_twist_inverse():
    L = builtin_surface("L3")
    f = dehn_twist(L, "h")
    g = f.inverse()
    rng = random.Random(4)
    for _ in range(30):
        p = random_rational_point(L, rng)
        assert g.apply(f.apply(p)) == p


def test_apply_diag():
    L = builtin_surface("L3")
    f = dehn_twist(L, "v")
    p, q = L.point(0, F(1, 4), F(1, 3)), L.point(2, F(3, 5), F(1, 7))
    assert apply_diag(f, (p, q)) == (f.apply(p), f.apply(q))


words = st.lists(st.sampled_from(["h", "v", "H", "V"]), min_size=1, max_size=5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["L3", "Y2"]), words, st.integers(0, 10**6))
def test_derivative_is_a_homomorphism(name, word, seed):
    S = builtin_surface(name)
    gens = {"h": dehn_twist(S, "h"), "v": dehn_twist(S, "v"),
            "H": dehn_twist(S, "h", -1), "V": dehn_twist(S, "v", -1)}
    f = identity_map(S)
    A = Mat2.identity()
    for letter in word:
        f = gens[letter].compose(f)
        A = gens[letter].derivative @ A
    assert f.derivative == A
    # the composite agrees with applying the letters one after another
    p = random_rational_point(S, random.Random(seed))
    q = p
    for letter in word:
        q = gens[letter].apply(q)
    assert f.apply(p) == q


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["L3", "Y2", "LC"]), st.integers(0, 10**6))
def test_maps_send_cones_to_cones(name, seed):
    S = builtin_surface(name)
    rng = random.Random(seed)
    f = dehn_twist(S, rng.choice("hv"), rng.choice([1, -1]))
    for v, o in enumerate(S.vertex_order):
        img = f.apply(S.vertex_point(v))
        w = S.vertex_at(img)
        assert w is not None and S.vertex_order[w] == o


def test_translation_automorphisms_of_staircase():
    Y = builtin_surface("Y2")
    maps = find_affine_maps(Y, Mat2(1, 0, 0, 1), first=False)
    assert len(maps) >= 1
